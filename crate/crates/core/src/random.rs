//! Random reflection invariant Hamiltonians and elements for testing.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{AlgebraElement, Phase};
use crate::error::Result;
use crate::hamiltonian::CouplingMatrix;
use crate::lattice::Lattice;
use crate::linalg::{herm_eigen, CMatrix, HermMatrix};
use crate::reflection::{plus_basis, BasisIndex, TwistChoice};
use crate::spin::{spin_basis, SpinCouplings, SpinElement, SpinLabel};

/// Spectrum of the generated cross-plane block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum J0Kind {
    /// `G*G` for a random `G`.
    Psd,
    /// Shifted so that the minimal eigenvalue lies in `[−upper − 0.5, −upper]`.
    Negative { upper: f64 },
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng, scale))
}

/// A Hermitian `n × n` matrix of the requested kind, entries of order `1/n`.
pub fn random_block<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: J0Kind) -> Result<CMatrix> {
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let scale = 1.0 / n as f64;
    match kind {
        J0Kind::Psd => {
            let rank = rng.gen_range(1..=n);
            let g = random_matrix(rng, rank, n, scale.sqrt());
            Ok(&g.adjoint() * &g)
        }
        J0Kind::Negative { upper } => {
            let g = random_matrix(rng, n, n, scale);
            let h = HermMatrix::new((&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0)))?;
            let min = herm_eigen(&h)?.values[0];
            let target = -upper - rng.gen_range(0.0..0.5);
            let shift = CMatrix::identity(n).scale(Complex64::new(target - min, 0.0));
            Ok(h.matrix() + &shift)
        }
    }
}

/// Block-diagonal matrix with one block per parity of the index list.
fn parity_blocks<R: Rng + ?Sized>(
    rng: &mut R,
    odd: &[bool],
    kind: J0Kind,
) -> Result<CMatrix> {
    let n = odd.len();
    let evens: Vec<usize> = (0..n).filter(|&i| !odd[i]).collect();
    let odds: Vec<usize> = (0..n).filter(|&i| odd[i]).collect();
    let mut out = CMatrix::zeros(n, n);
    // the negative block is chosen at random; the other one stays PSD
    let negative_even = (rng.gen_bool(0.5) && !evens.is_empty()) || odds.is_empty();
    for (idx, is_even) in [(&evens, true), (&odds, false)] {
        let k = match kind {
            J0Kind::Negative { .. } if is_even != negative_even => J0Kind::Psd,
            k => k,
        };
        let b = random_block(rng, idx.len(), k)?;
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                out[(r, c)] = b[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reflection invariant, globally gauge invariant couplings on all of
/// `𝓟₊`: Hermitian `J` with parity-diagonal `J⁰` of the requested kind, a
/// random real `E` and random even boundary vector `V`.
pub fn random_majorana_couplings<R: Rng + ?Sized>(
    rng: &mut R,
    lattice: &Arc<Lattice>,
    twist: TwistChoice,
    kind: J0Kind,
) -> Result<CouplingMatrix> {
    let nonempty: Vec<BasisIndex> = plus_basis(lattice).into_iter().filter(|i| !i.is_empty()).collect();
    let odd: Vec<bool> = nonempty.iter().map(|i| i.is_odd()).collect();
    let j0 = parity_blocks(rng, &odd, kind)?;
    let mut j = CouplingMatrix::new(lattice, twist);
    for (a, &r) in nonempty.iter().enumerate() {
        for (b, &c) in nonempty.iter().enumerate() {
            j.set(r, c, j0[(a, b)]);
        }
        if !r.is_odd() {
            let v = random_complex(rng, 0.5);
            j.set(r, BasisIndex::EMPTY, v);
            j.set(BasisIndex::EMPTY, r, v.conj());
        }
    }
    j.set(BasisIndex::EMPTY, BasisIndex::EMPTY, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    Ok(j)
}

/// Gauge invariant couplings whose full matrix `J` is PSD.
pub fn random_full_psd_couplings<R: Rng + ?Sized>(
    rng: &mut R,
    lattice: &Arc<Lattice>,
    twist: TwistChoice,
) -> Result<CouplingMatrix> {
    let basis = plus_basis(lattice);
    let odd: Vec<bool> = basis.iter().map(|i| i.is_odd()).collect();
    let m = parity_blocks(rng, &odd, J0Kind::Psd)?;
    CouplingMatrix::from_dense(lattice, twist, &m)
}

/// Reflection invariant spin couplings: `i^{k+k'} J` is Hermitian, with the
/// cross-plane block of the requested kind.
pub fn random_spin_couplings<R: Rng + ?Sized>(
    rng: &mut R,
    lattice: &Arc<Lattice>,
    kind: J0Kind,
) -> Result<SpinCouplings> {
    let nonempty: Vec<SpinLabel> = spin_basis(lattice).into_iter().filter(|l| !l.is_empty()).collect();
    let m = random_block(rng, nonempty.len(), kind)?;
    let unphase = |r: SpinLabel, c: SpinLabel, z: Complex64| {
        Phase::i_pow(-((r.degree() + c.degree()) as i64)).apply(z)
    };
    let mut j = SpinCouplings::new(lattice);
    for (a, &r) in nonempty.iter().enumerate() {
        for (b, &c) in nonempty.iter().enumerate() {
            j.set(r, c, unphase(r, c, m[(a, b)]));
        }
        if rng.gen_bool(0.5) {
            let v = random_complex(rng, 0.5);
            j.set(r, SpinLabel::EMPTY, unphase(r, SpinLabel::EMPTY, v));
            j.set(SpinLabel::EMPTY, r, unphase(SpinLabel::EMPTY, r, v.conj()));
        }
    }
    j.set(SpinLabel::EMPTY, SpinLabel::EMPTY, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    Ok(j)
}

/// `A = Σ a_𝔍 C_𝔍` with random coefficients on all of `𝓟₊`.
pub fn random_plus_element<R: Rng + ?Sized>(rng: &mut R, lattice: &Arc<Lattice>) -> AlgebraElement {
    AlgebraElement::from_terms(
        lattice,
        plus_basis(lattice)
            .into_iter()
            .map(|i| (i.word(lattice), random_complex(rng, 1.0)))
            .collect::<Vec<_>>(),
    )
}

/// `X = Σ x_L Σ_L` with random coefficients over all strings on `Λ₊`.
pub fn random_plus_spin_element<R: Rng + ?Sized>(rng: &mut R, lattice: &Arc<Lattice>) -> SpinElement {
    SpinElement::from_terms(
        lattice,
        spin_basis(lattice)
            .into_iter()
            .map(|l| (l.string(lattice), random_complex(rng, 1.0)))
            .collect::<Vec<_>>(),
    )
}

/// Random element over all `4^{|Λ|}` strings, each present with
/// probability `density`.
pub fn random_spin_element<R: Rng + ?Sized>(rng: &mut R, lattice: &Arc<Lattice>, density: f64) -> SpinElement {
    let n = lattice.len();
    let mut out = SpinElement::zero(lattice);
    for code in 0u64..(1u64 << (2 * n)) {
        if !rng.gen_bool(density) {
            continue;
        }
        let (mut x, mut z) = (0u64, 0u64);
        for b in 0..n {
            match (code >> (2 * b)) & 3 {
                1 => x |= 1 << b,
                2 => {
                    x |= 1 << b;
                    z |= 1 << b;
                }
                3 => z |= 1 << b,
                _ => {}
            }
        }
        out.add_term(crate::spin::PauliString { x, z }, random_complex(rng, 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{check_properties, decompose};
    use crate::linalg::psd_check;
    use crate::spin::{spin_criterion_matrix, spin_properties};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_couplings_have_requested_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 1..=3 {
            let lat = Arc::new(Lattice::with_plus_sites(m).unwrap());
            for kind in [J0Kind::Psd, J0Kind::Negative { upper: 0.1 }] {
                let j = random_majorana_couplings(&mut rng, &lat, TwistChoice::PlusI, kind).unwrap();
                let p = check_properties(&j);
                assert!(p.reflection_invariant && p.gauge_invariant);
                let (_, j0) = decompose(&j).j0_dense();
                let cert = psd_check(&HermMatrix::new(j0).unwrap(), 1e-9).unwrap();
                match kind {
                    J0Kind::Psd => assert!(cert.is_psd()),
                    J0Kind::Negative { upper } => assert!(cert.min_eigenvalue <= -upper + 1e-12),
                }
            }
            let full = random_full_psd_couplings(&mut rng, &lat, TwistChoice::MinusI).unwrap();
            assert!(check_properties(&full).gauge_invariant);
        }
        let lat = Arc::new(Lattice::with_plus_sites(2).unwrap());
        let j = random_spin_couplings(&mut rng, &lat, J0Kind::Negative { upper: 0.1 }).unwrap();
        assert!(spin_properties(&j).reflection_invariant);
        let (_, m) = spin_criterion_matrix(&j).unwrap();
        assert!(psd_check(&m, 1e-9).unwrap().min_eigenvalue <= -0.1 + 1e-12);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let lat = Arc::new(Lattice::with_plus_sites(2).unwrap());
        let a = random_plus_element(&mut ChaCha8Rng::seed_from_u64(3), &lat);
        let b = random_plus_element(&mut ChaCha8Rng::seed_from_u64(3), &lat);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }
}
