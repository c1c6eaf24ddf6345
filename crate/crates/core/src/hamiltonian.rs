//! Coupling matrices `J`, the Hamiltonians `H = −Σ J_{𝔍𝔍'} Θ(C_𝔍)∘C_𝔍'`
//! they define, and the spectral criterion on the block `J⁰` of couplings
//! across the reflection plane.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{psd_check, CMatrix, HermMatrix, PsdCertificate};
use crate::reflection::{
    basis_assemble, basis_expand, plus_basis, q_factor, reflect, s_factor, twisted_product,
    BasisCoefficients, BasisIndex, TwistChoice,
};

/// Upper bound on `|Λ₊|` for the criterion path.
pub const CRITERION_MAX_PLUS_SITES: usize = 12;

/// Coupling constants `J_{𝔍𝔍'}` over `𝓟₊ × 𝓟₊`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    lattice: Arc<Lattice>,
    twist: TwistChoice,
    entries: BTreeMap<(BasisIndex, BasisIndex), Complex64>,
}

impl CouplingMatrix {
    pub fn new(lattice: &Arc<Lattice>, twist: TwistChoice) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            twist,
            entries: BTreeMap::new(),
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn twist(&self) -> TwistChoice {
        self.twist
    }

    pub fn get(&self, row: BasisIndex, col: BasisIndex) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn set(&mut self, row: BasisIndex, col: BasisIndex, z: Complex64) {
        let limit = 1u64 << self.lattice.half();
        assert!(
            row.mask() < limit && col.mask() < limit,
            "basis index outside 𝓟₊ of the lattice"
        );
        if z == Complex64::default() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), z);
        }
    }

    pub fn add(&mut self, row: BasisIndex, col: BasisIndex, z: Complex64) {
        let v = self.get(row, col) + z;
        self.set(row, col, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (BasisIndex, BasisIndex, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &z)| (r, c, z))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::new(&self.lattice, self.twist);
        for (r, c, v) in self.entries() {
            out.set(r, c, v * z);
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Dense matrix over the given indices.
    pub fn dense(&self, indices: &[BasisIndex]) -> CMatrix {
        CMatrix::from_fn(indices.len(), indices.len(), |i, j| {
            self.get(indices[i], indices[j])
        })
    }

    /// Builds `J` from a dense matrix over all of `𝓟₊` in graded-lex order.
    pub fn from_dense(lattice: &Arc<Lattice>, twist: TwistChoice, m: &CMatrix) -> Result<Self> {
        let basis = plus_basis(lattice);
        if m.rows() != basis.len() || m.cols() != basis.len() {
            return Err(Error::Config(format!(
                "coupling matrix must be {0}x{0}, got {1}x{2}",
                basis.len(),
                m.rows(),
                m.cols()
            )));
        }
        let mut out = Self::new(lattice, twist);
        for (i, &r) in basis.iter().enumerate() {
            for (j, &c) in basis.iter().enumerate() {
                out.set(r, c, m[(i, j)]);
            }
        }
        Ok(out)
    }

    /// Nonempty indices carrying a nonzero `J⁰` entry in their row or column.
    pub fn cross_support(&self) -> Vec<BasisIndex> {
        let set: BTreeSet<BasisIndex> = self
            .entries()
            .filter(|(r, c, _)| !r.is_empty() && !c.is_empty())
            .flat_map(|(r, c, _)| [r, c])
            .collect();
        set.into_iter().collect()
    }
}

/// `H = −Σ J_{𝔍𝔍'} Θ(C_𝔍)∘C_𝔍'`
pub fn build_hamiltonian(j: &CouplingMatrix) -> AlgebraElement {
    let mut coeffs = BasisCoefficients::new(j.lattice(), j.twist());
    for (r, c, z) in j.entries() {
        coeffs.set(r, c, -z);
    }
    basis_assemble(&coeffs)
}

/// Inverse of [`build_hamiltonian`]: `J = −(basis coefficients of H)`.
pub fn extract_couplings(h: &AlgebraElement, twist: TwistChoice) -> CouplingMatrix {
    let coeffs = basis_expand(h, twist);
    let mut out = CouplingMatrix::new(h.lattice(), twist);
    for (r, c, z) in coeffs.entries() {
        out.set(r, c, -z);
    }
    out
}

/// The block form `J = (E V*; V J⁰)` with `∅` first.
#[derive(Debug, Clone)]
pub struct CouplingDecomposition {
    pub e: Complex64,
    /// `V_𝔍 = J_{𝔍∅}`, nonzero entries only.
    pub v: BTreeMap<BasisIndex, Complex64>,
    /// `J_{∅𝔍'}`, the first row; equals `V*` for Hermitian `J`.
    pub v_row: BTreeMap<BasisIndex, Complex64>,
    /// Sparse `J⁰` over nonempty indices.
    pub j0: CouplingMatrix,
    /// `H₋ = −Σ V_𝔍 Θ(C_𝔍)`
    pub h_minus: AlgebraElement,
    /// `H₀ = −Σ J⁰_{𝔍𝔍'} Θ(C_𝔍)∘C_𝔍'`
    pub h_zero: AlgebraElement,
    /// `H₊ = −Σ J_{∅𝔍'} C_𝔍'`
    pub h_plus: AlgebraElement,
}

impl CouplingDecomposition {
    /// `H₋ + H₀ + H₊ − E`
    pub fn reassemble(&self) -> AlgebraElement {
        let lat = self.h_zero.lattice();
        let e = AlgebraElement::scalar(lat, -self.e);
        &(&(&self.h_minus + &self.h_zero) + &self.h_plus) + &e
    }

    /// `J⁰` restricted to its support, in graded-lex order.
    pub fn j0_dense(&self) -> (Vec<BasisIndex>, CMatrix) {
        let support = self.j0.cross_support();
        let m = self.j0.dense(&support);
        (support, m)
    }
}

pub fn decompose(j: &CouplingMatrix) -> CouplingDecomposition {
    let lat = j.lattice();
    let mut v = BTreeMap::new();
    let mut v_row = BTreeMap::new();
    let mut j0 = CouplingMatrix::new(lat, j.twist());
    let mut minus = CouplingMatrix::new(lat, j.twist());
    let mut plus = CouplingMatrix::new(lat, j.twist());
    for (r, c, z) in j.entries() {
        match (r.is_empty(), c.is_empty()) {
            (true, true) => {}
            (false, true) => {
                v.insert(r, z);
                minus.set(r, c, z);
            }
            (true, false) => {
                v_row.insert(c, z);
                plus.set(r, c, z);
            }
            (false, false) => j0.set(r, c, z),
        }
    }
    CouplingDecomposition {
        e: j.get(BasisIndex::EMPTY, BasisIndex::EMPTY),
        v,
        v_row,
        h_minus: build_hamiltonian(&minus),
        h_zero: build_hamiltonian(&j0),
        h_plus: build_hamiltonian(&plus),
        j0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Properties {
    /// `Θ(H) = H`, equivalently `J` Hermitian.
    pub reflection_invariant: bool,
    /// `H` even, equivalently `J_{𝔍𝔍'} = 0` whenever `|𝔍| ≠ |𝔍'|`.
    pub gauge_invariant: bool,
    /// `H* = H`, equivalently `s_𝔍 s_𝔍' J_{𝔍𝔍'}` real.
    pub hermitian: bool,
}

/// Exact property checks on user supplied couplings.
pub fn check_properties(j: &CouplingMatrix) -> Properties {
    check_properties_with(j, 0.0)
}

/// Property checks up to `rel · max |J|`, for round-tripped matrices.
pub fn check_properties_tol(j: &CouplingMatrix, rel: f64) -> Properties {
    check_properties_with(j, rel * j.max_abs())
}

fn check_properties_with(j: &CouplingMatrix, tol: f64) -> Properties {
    let tw = j.twist();
    let mut ri = true;
    let mut gi = true;
    let mut herm = true;
    for (r, c, z) in j.entries() {
        if (j.get(c, r) - z.conj()).norm() > tol {
            ri = false;
        }
        if r.is_odd() != c.is_odd() && z.norm() > tol {
            gi = false;
        }
        if (s_factor(r, tw) * s_factor(c, tw) * z).im.abs() > tol {
            herm = false;
        }
    }
    Properties {
        reflection_invariant: ri,
        gauge_invariant: gi,
        hermitian: herm,
    }
}

/// Outcome of the spectral criterion `J⁰ ≥ 0`.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub properties: Properties,
    pub e: f64,
    /// Indices of the support of `J⁰`, labelling the certificate.
    pub support: Vec<BasisIndex>,
    pub certificate: PsdCertificate,
    /// `A = Σ q_𝔍 f_𝔍 C_𝔍` for the eigenvector `f` of the negative
    /// eigenvalue. Along this direction `⟨A,A⟩⁰_{βH,Θ}` decreases at `β = 0`.
    pub witness: Option<AlgebraElement>,
    /// `−Tr((Θ(A)∘A) H)`, the initial slope of `⟨A,A⟩⁰_{βH,Θ}`.
    pub witness_slope: Option<f64>,
}

impl CriterionReport {
    pub fn reflection_positive(&self) -> bool {
        self.certificate.is_psd()
    }
}

/// `A = Σ q_𝔍 f_𝔍 C_𝔍`
pub fn criterion_witness(
    lattice: &Arc<Lattice>,
    support: &[BasisIndex],
    f: &[Complex64],
) -> AlgebraElement {
    AlgebraElement::from_terms(
        lattice,
        support
            .iter()
            .zip(f)
            .map(|(idx, &z)| (idx.word(lattice), z * q_factor(*idx))),
    )
}

/// The RP criterion for reflection invariant, globally gauge invariant
/// Hamiltonians: the Boltzmann functional `ω_{βH}` is reflection positive
/// for all `β ≥ 0` iff `J⁰ ≥ 0`.
pub fn criterion(j: &CouplingMatrix, tol: f64) -> Result<CriterionReport> {
    let lat = j.lattice();
    if lat.half() > CRITERION_MAX_PLUS_SITES {
        return Err(Error::SizeCap {
            what: "|Λ+| for the criterion",
            actual: lat.half(),
            limit: CRITERION_MAX_PLUS_SITES,
        });
    }
    let properties = check_properties(j);
    if !properties.reflection_invariant {
        let (r, c, z) = j
            .entries()
            .find(|&(r, c, z)| j.get(c, r) != z.conj())
            .expect("non-Hermitian entry");
        return Err(Error::NotReflectionInvariant(format!(
            "J is not Hermitian: J[{}][{}] = {z} but J[{}][{}] = {}",
            r.render(lat),
            c.render(lat),
            c.render(lat),
            r.render(lat),
            j.get(c, r)
        )));
    }
    if !properties.gauge_invariant {
        let (r, c, z) = j
            .entries()
            .find(|(r, c, _)| r.is_odd() != c.is_odd())
            .expect("parity-mixing entry");
        return Err(Error::NotGaugeInvariant(format!(
            "J[{}][{}] = {z} couples indices of different parity",
            r.render(lat),
            c.render(lat)
        )));
    }
    let d = decompose(j);
    let (support, m) = d.j0_dense();
    let certificate = psd_check(&HermMatrix::new(m)?, tol)?;
    let witness = certificate
        .witness
        .as_ref()
        .map(|f| criterion_witness(lat, &support, f));
    let witness_slope = witness.as_ref().map(|a| {
        let h = build_hamiltonian(j);
        let ta = twisted_product(&reflect(a), a, j.twist()).expect("same lattice");
        -(&ta * &h).trace().re
    });
    Ok(CriterionReport {
        properties,
        e: d.e.re,
        support,
        certificate,
        witness,
        witness_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::MajoranaWord;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lat(m: usize) -> Arc<Lattice> {
        Arc::new(Lattice::with_plus_sites(m).unwrap())
    }

    fn idx(t: &[usize]) -> BasisIndex {
        BasisIndex::from_tuple(t)
    }

    #[test]
    fn build_examples() {
        let l = lat(1);
        let tw = TwistChoice::PlusI;
        let mut j = CouplingMatrix::new(&l, tw);
        j.set(BasisIndex::EMPTY, BasisIndex::EMPTY, c(2.5, 0.0));
        assert_eq!(build_hamiltonian(&j), AlgebraElement::scalar(&l, c(-2.5, 0.0)));

        let mut j = CouplingMatrix::new(&l, tw);
        j.set(idx(&[0]), idx(&[0]), c(3.0, 0.0));
        let theta_c = AlgebraElement::generator(&l, l.minus_bit(0));
        let c1 = AlgebraElement::generator(&l, l.plus_bit(0));
        let expected = (&theta_c * &c1).scale(c(0.0, -3.0));
        assert_eq!(build_hamiltonian(&j), expected);

        let h = (&theta_c * &c1).scale(c(0.0, -1.0));
        let back = extract_couplings(&h, tw);
        assert_eq!(back.len(), 1);
        assert_eq!(back.get(idx(&[0]), idx(&[0])), c(1.0, 0.0));
        assert!(extract_couplings(&AlgebraElement::zero(&l), tw).is_empty());
    }

    #[test]
    fn decomposition_examples() {
        let l = lat(2);
        let j = CouplingMatrix::new(&l, TwistChoice::PlusI);
        let d = decompose(&j);
        assert_eq!(d.e, c(0.0, 0.0));
        assert!(d.v.is_empty() && d.j0.is_empty());

        let mut j = CouplingMatrix::new(&l, TwistChoice::PlusI);
        j.set(BasisIndex::EMPTY, BasisIndex::EMPTY, c(2.0, 0.0));
        j.set(idx(&[0]), idx(&[0]), c(-3.0, 0.0));
        let d = decompose(&j);
        assert_eq!(d.e, c(2.0, 0.0));
        assert!(d.v.is_empty());
        let (support, m) = d.j0_dense();
        assert_eq!(support, [idx(&[0])]);
        assert_eq!(m, CMatrix::from_real(&[&[-3.0]]));
        assert_eq!(d.reassemble(), build_hamiltonian(&j));
    }

    #[test]
    fn property_examples() {
        let l = lat(2);
        let tw = TwistChoice::PlusI;
        let mut j = CouplingMatrix::new(&l, tw);
        j.set(BasisIndex::EMPTY, BasisIndex::EMPTY, c(1.0, 0.0));
        j.set(idx(&[0, 1]), idx(&[0, 1]), c(-2.0, 0.0));
        j.set(idx(&[0, 1]), BasisIndex::EMPTY, c(0.0, -0.5));
        j.set(BasisIndex::EMPTY, idx(&[0, 1]), c(0.0, 0.5));
        let p = check_properties(&j);
        assert!(p.reflection_invariant && p.gauge_invariant && p.hermitian);
        // a real V on an index with s = ζ breaks Hermiticity of H but not Θ-invariance
        j.set(idx(&[0, 1]), BasisIndex::EMPTY, c(0.5, 0.0));
        j.set(BasisIndex::EMPTY, idx(&[0, 1]), c(0.5, 0.0));
        let p = check_properties(&j);
        assert!(p.reflection_invariant && p.gauge_invariant && !p.hermitian);

        let mut j = CouplingMatrix::new(&l, tw);
        j.set(idx(&[0]), idx(&[0]), c(0.0, 1.0));
        assert!(!check_properties(&j).reflection_invariant);

        let mut j = CouplingMatrix::new(&l, tw);
        j.set(BasisIndex::EMPTY, idx(&[0]), c(1.0, 0.0));
        assert!(!check_properties(&j).gauge_invariant);
    }

    #[test]
    fn criterion_refuses_non_invariant_input() {
        let l = lat(1);
        let mut j = CouplingMatrix::new(&l, TwistChoice::PlusI);
        j.set(idx(&[0]), idx(&[0]), c(0.0, 1.0));
        assert!(matches!(criterion(&j, 1e-9), Err(Error::NotReflectionInvariant(_))));
        let mut j = CouplingMatrix::new(&l, TwistChoice::PlusI);
        j.set(BasisIndex::EMPTY, idx(&[0]), c(1.0, 0.0));
        j.set(idx(&[0]), BasisIndex::EMPTY, c(1.0, 0.0));
        assert!(matches!(criterion(&j, 1e-9), Err(Error::NotGaugeInvariant(_))));
    }

    #[test]
    fn criterion_on_single_bond() {
        let l = lat(1);
        for (g, rp) in [(1.0, true), (-1.0, false), (0.0, true)] {
            let mut j = CouplingMatrix::new(&l, TwistChoice::PlusI);
            j.set(idx(&[0]), idx(&[0]), c(g, 0.0));
            let r = criterion(&j, 1e-9).unwrap();
            assert_eq!(r.reflection_positive(), rp);
            if !rp {
                let slope = r.witness_slope.unwrap();
                assert!((slope - r.certificate.min_eigenvalue).abs() < 1e-12);
                assert_eq!(r.witness.unwrap().len(), 1);
            }
        }
    }

    #[test]
    fn criterion_size_cap() {
        let l = lat(CRITERION_MAX_PLUS_SITES + 1);
        let j = CouplingMatrix::new(&l, TwistChoice::PlusI);
        assert!(matches!(criterion(&j, 1e-9), Err(Error::SizeCap { .. })));
    }

    fn random_j(m: usize) -> impl Strategy<Value = (Vec<(u64, u64, f64, f64)>, bool)> {
        let n = 1u64 << m;
        (
            prop::collection::vec((0..n, 0..n, -2.0..2.0f64, -2.0..2.0f64), 0..8),
            any::<bool>(),
        )
    }

    fn assemble(l: &Arc<Lattice>, tw: TwistChoice, raw: &[(u64, u64, f64, f64)]) -> CouplingMatrix {
        let mut j = CouplingMatrix::new(l, tw);
        for &(r, col, re, im) in raw {
            j.add(BasisIndex::from_mask(r), BasisIndex::from_mask(col), c(re, im));
        }
        j
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn properties_match_operator_checks(
            (raw, sym) in random_j(3),
            m in 1..=3usize,
            plus_twist in any::<bool>(),
        ) {
            let l = lat(m);
            let tw = if plus_twist { TwistChoice::PlusI } else { TwistChoice::MinusI };
            let mask = (1u64 << m) - 1;
            let raw: Vec<_> = raw.into_iter().map(|(a, b, x, y)| (a & mask, b & mask, x, y)).collect();
            let mut j = assemble(&l, tw, &raw);
            if sym {
                // Hermitian, parity-preserving part so that both outcomes occur.
                let mut herm = CouplingMatrix::new(&l, tw);
                for (a, b, z) in j.entries() {
                    if a.is_odd() == b.is_odd() {
                        herm.add(a, b, z);
                        herm.add(b, a, z.conj());
                    }
                }
                j = herm;
            }
            let h = build_hamiltonian(&j);
            let p = check_properties(&j);
            prop_assert_eq!(p.reflection_invariant, reflect(&h) == h);
            prop_assert_eq!(p.hermitian, h.adjoint() == h);
            prop_assert_eq!(p.gauge_invariant, h.global_gauge() == h);
            prop_assert_eq!(extract_couplings(&h, tw), j.clone());
            prop_assert_eq!(decompose(&j).reassemble(), h);
        }

        #[test]
        fn decomposition_parts_live_where_they_should((raw, _) in random_j(2)) {
            let l = lat(2);
            let j = assemble(&l, TwistChoice::PlusI, &raw);
            let d = decompose(&j);
            prop_assert!(d.h_minus.is_minus_supported());
            prop_assert!(d.h_plus.is_plus_supported());
            for (w, _) in d.h_zero.terms() {
                let w: MajoranaWord = w;
                prop_assert!(w.mask() & l.minus_mask() != 0 && w.mask() & l.plus_mask() != 0);
            }
        }
    }
}
