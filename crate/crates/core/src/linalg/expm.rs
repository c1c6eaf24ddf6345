//! Matrix exponential.

use num_complex::Complex64;

use super::eigen::herm_eigen;
use super::matrix::{CMatrix, HermMatrix};
use crate::error::{Error, Result};

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^M`. With `hermitian_hint` the spectral decomposition is used;
/// otherwise Padé-13 scaling and squaring.
pub fn matrix_exp(m: &CMatrix, hermitian_hint: bool) -> Result<CMatrix> {
    assert!(m.is_square(), "matrix_exp needs a square matrix");
    if m.is_zero() {
        return Ok(CMatrix::identity(m.rows()));
    }
    if !m.all_finite() {
        return Err(Error::Numerical("matrix exponential of non-finite input".into()));
    }
    let out = if hermitian_hint {
        let eig = herm_eigen(&HermMatrix::new(m.clone())?)?;
        let top = eig.values.last().copied().unwrap_or(0.0);
        if top > f64::MAX.ln() {
            return Err(overflow(top));
        }
        eig.apply_function(f64::exp)
    } else {
        pade_13(m)?
    };
    if !out.all_finite() {
        return Err(overflow(m.norm_1()));
    }
    Ok(out)
}

fn overflow(size: f64) -> Error {
    Error::Numerical(format!(
        "matrix exponential overflows (norm or top eigenvalue {size:e})"
    ))
}

fn pade_13(m: &CMatrix) -> Result<CMatrix> {
    let n = m.rows();
    let norm = m.norm_1();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(overflow(norm));
    }
    let a = m.scale(Complex64::new(0.5f64.powi(s), 0.0));
    let b = |k: usize| Complex64::new(PADE_13[k], 0.0);
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let comb = |c6: usize, c4: usize, c2: usize, c0: Option<usize>| {
        let mut out = &(&a6.scale(b(c6)) + &a4.scale(b(c4))) + &a2.scale(b(c2));
        if let Some(k) = c0 {
            out = &out + &id.scale(b(k));
        }
        out
    };
    let u_inner = &(&a6 * &comb(13, 11, 9, None)) + &comb(7, 5, 3, Some(1));
    let u = &a * &u_inner;
    let v = &(&a6 * &comb(12, 10, 8, None)) + &comb(6, 4, 2, Some(0));
    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
        if !r.all_finite() {
            return Err(overflow(norm));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_exact_identity() {
        for hint in [false, true] {
            assert_eq!(matrix_exp(&CMatrix::zeros(4, 4), hint).unwrap(), CMatrix::identity(4));
        }
    }

    #[test]
    fn diagonal_exponential() {
        let d = CMatrix::diagonal(&[c(1.5, 0.0), c(-2.0, 0.0)]);
        for hint in [false, true] {
            let e = matrix_exp(&d, hint).unwrap();
            assert!((e[(0, 0)].re - 1.5f64.exp()).abs() < 1e-12 * 1.5f64.exp());
            assert!((e[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-14);
            assert!(e[(0, 1)].norm() < 1e-15);
        }
        let big = CMatrix::diagonal(&[c(10.0, 0.0), c(0.0, 3.0)]);
        let e = matrix_exp(&big, false).unwrap();
        assert!((e[(0, 0)].re / 10f64.exp() - 1.0).abs() < 1e-12);
        assert!((e[(1, 1)] - c(3f64.cos(), 3f64.sin())).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_and_rotation() {
        let n = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = matrix_exp(&n, false).unwrap();
        assert!((&e - &CMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]])).max_abs() < 1e-15);
        let r = CMatrix::from_real(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let e = matrix_exp(&r, false).unwrap();
        assert!((e[(0, 0)].re - 1f64.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn overflow_is_an_error() {
        let d = CMatrix::diagonal(&[c(1000.0, 0.0)]);
        assert!(matrix_exp(&d, false).is_err());
        assert!(matrix_exp(&d, true).is_err());
    }

    fn random_matrix(max_norm: f64) -> impl Strategy<Value = CMatrix> {
        (1usize..=8).prop_flat_map(move |n| {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
                let m = CMatrix::from_fn(n, n, |i, j| c(v[i * n + j].0, v[i * n + j].1));
                let s = m.norm_1().max(1e-300);
                m.scale(c(max_norm / s, 0.0))
            })
        })
    }

    proptest! {
        #[test]
        fn group_property(m in random_matrix(5.0)) {
            let e = matrix_exp(&m, false).unwrap();
            let f = matrix_exp(&(-&m), false).unwrap();
            let p = &e * &f;
            prop_assert!((&p - &CMatrix::identity(m.rows())).max_abs() <= 1e-8);
        }

        #[test]
        fn anti_hermitian_gives_unitary(m in random_matrix(6.0)) {
            let k = &m - &m.adjoint();
            let e = matrix_exp(&k, false).unwrap();
            let p = &e.adjoint() * &e;
            prop_assert!((&p - &CMatrix::identity(m.rows())).max_abs() <= 1e-8);
        }

        #[test]
        fn spectral_and_pade_paths_agree(m in random_matrix(4.0)) {
            let h = (&m + &m.adjoint()).scale(c(0.5, 0.0));
            let a = matrix_exp(&h, true).unwrap();
            let b = matrix_exp(&h, false).unwrap();
            let scale = h.norm_1().exp();
            prop_assert!((&a - &b).max_abs() <= 1e-9 * scale);
        }
    }
}
