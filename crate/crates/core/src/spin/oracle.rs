use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::couplings::{spin_basis, SpinLabel};
use super::gauge::SpinReflection;
use super::kitaev::{chiral_projection, kitaev_map, KitaevLattice};
use super::pauli::{spin_reflect, SpinElement};
use crate::clifford::same_lattice;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{matrix_exp, psd_check, CMatrix, HermMatrix, PsdCertificate};
use crate::matrix_rep::{trace_against, Functional, Provenance, Representation, RpReport, ORACLE_MAX_GENERATORS};
use crate::reflection::reflect;

pub const SPIN_ORACLE_MAX_SITES: usize = 10;

/// `X` on `2^{|Λ|}` dimensions, site bit `b` acting on qubit `b`.
pub fn spin_dense(x: &SpinElement) -> CMatrix {
    let dim = 1usize << x.lattice().len();
    let mut m = CMatrix::zeros(dim, dim);
    for (s, z) in x.terms() {
        let op = s.operator();
        for b in 0..dim as u64 {
            m[((b ^ op.x) as usize, b as usize)] += op.entry(b) * z;
        }
    }
    m
}

fn check_size(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        return Err(Error::SizeCap { what, actual, limit });
    }
    Ok(())
}

fn normalization(functional: Functional, z: Complex64) -> Result<Complex64> {
    match functional {
        Functional::Boltzmann => Ok(Complex64::new(1.0, 0.0)),
        Functional::Gibbs => {
            if z.norm() <= 1e-12 || !z.norm().is_finite() {
                return Err(Error::DegenerateNormalization(z));
            }
            Ok(z)
        }
    }
}

fn boltzmann(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    let hermitian = h.adjoint() == *h;
    matrix_exp(&h.scale(Complex64::new(-beta, 0.0)), hermitian)
}

fn certify(
    gram: &CMatrix,
    tol: f64,
    labels: &[SpinLabel],
    lat: &Arc<Lattice>,
) -> Result<(PsdCertificate, Option<SpinElement>)> {
    let certificate = psd_check(&HermMatrix::new(gram.clone())?, tol)?;
    let witness = certificate.witness.as_ref().map(|w| {
        SpinElement::from_terms(lat, labels.iter().zip(w).map(|(l, &c)| (l.string(lat), c)))
    });
    Ok((certificate, witness))
}

/// Brute-force positivity of `X ↦ Tr(Θ(X) X e^{−βH})` on `𝔄₊` in the
/// tensor-product representation.
pub fn spin_rp_oracle(
    h: &SpinElement,
    reflection: &SpinReflection,
    beta: f64,
    functional: Functional,
    tol: f64,
) -> Result<RpReport<SpinElement>> {
    let lat = h.lattice();
    check_size("spin sites for the oracle", lat.len(), SPIN_ORACLE_MAX_SITES)?;
    if let SpinReflection::Gauge(g) = reflection {
        if !same_lattice(g.lattice(), lat) {
            return Err(Error::LatticeMismatch);
        }
    }
    let dim = 1usize << lat.len();
    let r = boltzmann(&spin_dense(h), beta)?;
    let z = r.trace() / dim as f64;
    let norm = normalization(functional, z)?;
    let labels = spin_basis(lat);
    let images: Vec<SpinElement> = labels
        .iter()
        .map(|l| reflection.apply(&SpinElement::string(lat, l.string(lat), Complex64::new(1.0, 0.0))))
        .collect();
    let n = labels.len();
    let entries: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let col = labels[k % n].string(lat);
            images[k / n]
                .terms()
                .map(|(s, a)| {
                    let (p, t) = s.mul(col);
                    p.apply(a) * t.operator().normalized_trace_with(&r)
                })
                .sum::<Complex64>()
                / norm
        })
        .collect();
    let gram = CMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    let value = |x: &SpinElement| {
        let form = &reflection.apply(x) * x;
        form.terms()
            .map(|(s, a)| a * s.operator().normalized_trace_with(&r))
            .sum::<Complex64>()
            / norm
    };
    let (certificate, witness) = certify(&gram, tol, &labels, lat)?;
    let witness_value = witness.as_ref().map(|x| value(x).re);
    Ok(RpReport {
        provenance: Provenance::Oracle,
        beta,
        functional,
        labels: labels.iter().map(|l| l.render(lat)).collect(),
        gram,
        partition_function: z,
        certificate,
        witness,
        witness_value,
    })
}

/// The same form computed on the Majorana side: `Tr_M(Θ(X̂) X̂ e^{−βĤ} P⁵)`
/// divided by `Tr_M(P⁵)`, for the standard reflection.
pub fn kitaev_rp_oracle(
    h: &SpinElement,
    beta: f64,
    functional: Functional,
    tol: f64,
) -> Result<RpReport<SpinElement>> {
    let lat = h.lattice();
    check_size("Majorana generators for the Kitaev oracle", 4 * lat.len(), ORACLE_MAX_GENERATORS)?;
    let target = KitaevLattice::new(lat)?;
    let rep = Representation::new(target.majorana())?;
    let hm = kitaev_map(h, &target)?;
    let p5 = rep.represent(&chiral_projection(&target));
    let r = &rep.boltzmann_matrix(&hm, beta)? * &p5;
    let tp5 = rep.normalized_trace(&p5);
    let z = rep.normalized_trace(&r) / tp5;
    let norm = normalization(functional, z)? * tp5;
    let labels = spin_basis(lat);
    let hats: Vec<_> = labels
        .iter()
        .map(|l| kitaev_map(&SpinElement::string(lat, l.string(lat), Complex64::new(1.0, 0.0)), &target))
        .collect::<Result<_>>()?;
    let reflected: Vec<_> = hats.iter().map(reflect).collect();
    let n = labels.len();
    let entries: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|k| trace_against(&(&reflected[k / n] * &hats[k % n]), &r, &rep) / norm)
        .collect();
    let gram = CMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    let value = |x: &SpinElement| {
        let xh = kitaev_map(x, &target).expect("same lattice");
        trace_against(&(&reflect(&xh) * &xh), &r, &rep) / norm
    };
    let (certificate, witness) = certify(&gram, tol, &labels, lat)?;
    let witness_value = witness.as_ref().map(|x| value(x).re);
    Ok(RpReport {
        provenance: Provenance::Oracle,
        beta,
        functional,
        labels: labels.iter().map(|l| l.render(lat)).collect(),
        gram,
        partition_function: z,
        certificate,
        witness,
        witness_value,
    })
}

/// `Tr(Θ(X) X e^{−βH})` for one element, standard reflection.
pub fn spin_form(h: &SpinElement, x: &SpinElement, beta: f64) -> Result<Complex64> {
    let r = boltzmann(&spin_dense(h), beta)?;
    let form = &spin_reflect(x) * x;
    Ok(form
        .terms()
        .map(|(s, a)| a * s.operator().normalized_trace_with(&r))
        .sum())
}
