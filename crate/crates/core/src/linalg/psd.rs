use num_complex::Complex64;
use serde::Serialize;

use super::eigen::herm_eigen;
use super::matrix::{CMatrix, HermMatrix};
use crate::error::Result;

/// Default relative PSD tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdVerdict {
    Psd,
    NotPsd,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsdCertificate {
    pub verdict: PsdVerdict,
    pub min_eigenvalue: f64,
    /// Unit eigenvector of the minimal eigenvalue, present when the verdict is
    /// `NotPsd`.
    pub witness: Option<Vec<Complex64>>,
    /// Absolute threshold `tol · max(1, ‖M‖∞)` the minimal eigenvalue was
    /// compared against.
    pub tolerance_used: f64,
    /// PSD within tolerance but with a negative minimal eigenvalue.
    pub marginal: bool,
    pub eigenvalues: Vec<f64>,
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        self.verdict == PsdVerdict::Psd
    }
}

/// Decides `M ≥ 0` from the spectrum: PSD iff `λ_min ≥ −tol · max(1, ‖M‖∞)`.
pub fn psd_check(m: &HermMatrix, tol: f64) -> Result<PsdCertificate> {
    assert!(tol >= 0.0, "tolerance must be non-negative");
    let threshold = tol * m.matrix().norm_inf().max(1.0);
    if m.dim() == 0 {
        return Ok(PsdCertificate {
            verdict: PsdVerdict::Psd,
            min_eigenvalue: 0.0,
            witness: None,
            tolerance_used: threshold,
            marginal: false,
            eigenvalues: Vec::new(),
        });
    }
    let eig = herm_eigen(m)?;
    let min = eig.values[0];
    let psd = min >= -threshold;
    Ok(PsdCertificate {
        verdict: if psd { PsdVerdict::Psd } else { PsdVerdict::NotPsd },
        min_eigenvalue: min,
        witness: (!psd).then(|| eig.vector(0)),
        tolerance_used: threshold,
        marginal: psd && min < 0.0,
        eigenvalues: eig.values,
    })
}

/// Attempts a pivoted Cholesky factorization of `M + shift·I`. Returns
/// whether it succeeds, i.e. whether the shifted matrix is numerically
/// positive semidefinite.
pub fn pivoted_cholesky_psd(m: &CMatrix, shift: f64) -> bool {
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] += shift;
    }
    let scale = m.max_abs().max(shift).max(f64::MIN_POSITIVE);
    let eps = 1e-13 * scale * n as f64;
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (piv, dmax) = (k..n)
            .map(|i| (i, a[(perm[i], perm[i])].re))
            .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dmax <= eps {
            // Remaining Schur complement must vanish for a semidefinite matrix.
            return (k..n).all(|i| {
                (k..n).all(|j| a[(perm[i], perm[j])].norm() <= eps.max(1e-12 * scale))
            });
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let l = dmax.sqrt();
        a[(pk, pk)] = Complex64::new(l, 0.0);
        for i in k + 1..n {
            let pi = perm[i];
            a[(pi, pk)] /= l;
        }
        for i in k + 1..n {
            let pi = perm[i];
            let lik = a[(pi, pk)];
            for j in k + 1..n {
                let pj = perm[j];
                let ljk = a[(pj, pk)];
                a[(pi, pj)] -= lik * ljk.conj();
            }
        }
    }
    true
}
