use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::pauli::{spin_reflect, PauliString, SpinElement};
use crate::clifford::Phase;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{psd_check, CMatrix, HermMatrix, PsdCertificate};
use crate::reflection::BasisIndex;

/// Label `(𝔍, A)` of a Pauli string supported on `Λ₊`, stored as masks over
/// `Λ₊` positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SpinLabel {
    x: u64,
    z: u64,
}

impl SpinLabel {
    pub const EMPTY: SpinLabel = SpinLabel { x: 0, z: 0 };

    /// From `(position, letter)` pairs; positions index `Λ₊`.
    pub fn new(letters: &[(usize, u8)]) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for &(p, a) in letters {
            if p >= 64 || s.support() >> p & 1 == 1 {
                return Err(Error::Config(format!("repeated or invalid position {p} in spin label")));
            }
            if !(1..=3).contains(&a) {
                return Err(Error::Config(format!("Pauli letter must be 1, 2 or 3, got {a}")));
            }
            let t = PauliString::single(p as u32, a);
            s = PauliString { x: s.x | t.x, z: s.z | t.z };
        }
        Ok(SpinLabel { x: s.x, z: s.z })
    }

    fn local(self) -> PauliString {
        PauliString { x: self.x, z: self.z }
    }

    /// The set `𝔍` of `Λ₊` positions.
    pub fn sites(self) -> BasisIndex {
        BasisIndex::from_mask(self.x | self.z)
    }

    /// `(position, letter)` pairs in ascending position order.
    pub fn letters(self) -> Vec<(usize, u8)> {
        self.local()
            .letters()
            .into_iter()
            .map(|(b, a)| (b as usize, a))
            .collect()
    }

    /// `k_𝔍`
    pub fn degree(self) -> u32 {
        self.local().degree()
    }

    pub fn is_empty(self) -> bool {
        self.local().is_identity()
    }

    /// `Σ_{(𝔍,A)}` as a string on the full lattice.
    pub fn string(self, lattice: &Lattice) -> PauliString {
        let h = lattice.half();
        PauliString { x: self.x << h, z: self.z << h }
    }

    /// `Σ_{ϑ(𝔍,A)}`
    pub fn mirrored(self, lattice: &Lattice) -> PauliString {
        self.string(lattice).mirror(lattice)
    }

    /// Inverse of [`SpinLabel::string`] for strings supported on `Λ₊`.
    pub fn from_plus_string(lattice: &Lattice, s: PauliString) -> Self {
        assert_eq!(s.support() & lattice.minus_mask(), 0, "string not on Λ+");
        let h = lattice.half();
        SpinLabel { x: s.x >> h, z: s.z >> h }
    }

    pub fn render(self, lattice: &Lattice) -> String {
        if self.is_empty() {
            return "I".into();
        }
        self.letters()
            .into_iter()
            .map(|(p, a)| format!("σ{a}[{}]", lattice.plus_labels()[p]))
            .collect::<Vec<_>>()
            .join("")
    }
}

impl Ord for SpinLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sites()
            .cmp(&other.sites())
            .then_with(|| self.letters().cmp(&other.letters()))
    }
}

impl PartialOrd for SpinLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `4^{|Λ₊|}` labels, sorted.
pub fn spin_basis(lattice: &Lattice) -> Vec<SpinLabel> {
    let m = lattice.half();
    let mut out = Vec::with_capacity(1 << (2 * m));
    for code in 0u64..(1u64 << (2 * m)) {
        let mut letters = Vec::new();
        for p in 0..m {
            let a = ((code >> (2 * p)) & 3) as u8;
            if a != 0 {
                letters.push((p, a));
            }
        }
        out.push(SpinLabel::new(&letters).expect("valid letters"));
    }
    out.sort();
    out
}

/// `i^{k_𝔍 + k_𝔍'}`
fn channel_phase(row: SpinLabel, col: SpinLabel) -> Phase {
    Phase::i_pow((row.degree() + col.degree()) as i64)
}

/// Couplings `J^{AA'}_{ϑ(𝔍)𝔍'}` of `H = −Σ J Σ_{ϑ(𝔍,A)} Σ_{(𝔍',A')}`.
#[derive(Debug, Clone)]
pub struct SpinCouplings {
    lattice: Arc<Lattice>,
    entries: BTreeMap<(SpinLabel, SpinLabel), Complex64>,
}

impl SpinCouplings {
    pub fn new(lattice: &Arc<Lattice>) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            entries: BTreeMap::new(),
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn get(&self, row: SpinLabel, col: SpinLabel) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn set(&mut self, row: SpinLabel, col: SpinLabel, z: Complex64) {
        let m = self.lattice.half() as u32;
        for l in [row, col] {
            assert!(m == 64 || l.sites().mask() >> m == 0, "label outside Λ+");
        }
        if z == Complex64::default() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), z);
        }
    }

    pub fn add(&mut self, row: SpinLabel, col: SpinLabel, z: Complex64) {
        let v = self.get(row, col) + z;
        self.set(row, col, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (SpinLabel, SpinLabel, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &z)| (r, c, z))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::new(&self.lattice);
        for (r, c, v) in self.entries() {
            out.set(r, c, v * z);
        }
        out
    }

    /// Labels with `𝔍 ≠ ∅` that appear in an entry with both labels
    /// nonempty.
    pub fn cross_support(&self) -> Vec<SpinLabel> {
        let set: BTreeSet<SpinLabel> = self
            .entries()
            .filter(|(r, c, _)| !r.is_empty() && !c.is_empty())
            .flat_map(|(r, c, _)| [r, c])
            .collect();
        set.into_iter().collect()
    }
}

/// `H = −Σ J^{AA'}_{ϑ(𝔍)𝔍'} Σ_{ϑ(𝔍,A)} Σ_{(𝔍',A')}`
pub fn build_spin_hamiltonian(j: &SpinCouplings) -> SpinElement {
    let lat = j.lattice();
    let mut h = SpinElement::zero(lat);
    for (r, c, z) in j.entries() {
        let (p, s) = r.mirrored(lat).mul(c.string(lat));
        h.add_term(s, -p.apply(z));
    }
    h
}

/// Inverse of [`build_spin_hamiltonian`]; every string splits uniquely into
/// its `Λ₋` and `Λ₊` parts.
pub fn extract_spin_couplings(h: &SpinElement) -> SpinCouplings {
    let lat = h.lattice();
    let mut j = SpinCouplings::new(lat);
    for (s, z) in h.terms() {
        let minus = PauliString {
            x: s.x & lat.minus_mask(),
            z: s.z & lat.minus_mask(),
        };
        let plus = PauliString {
            x: s.x & lat.plus_mask(),
            z: s.z & lat.plus_mask(),
        };
        let row = SpinLabel::from_plus_string(lat, minus.mirror(lat));
        let col = SpinLabel::from_plus_string(lat, plus);
        j.add(row, col, -z);
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpinProperties {
    /// `i^{k+k'} J` is Hermitian, i.e. `Θ(H) = H`.
    pub reflection_invariant: bool,
    /// All couplings real, i.e. `H* = H`.
    pub hermitian: bool,
}

pub fn spin_properties(j: &SpinCouplings) -> SpinProperties {
    spin_properties_tol(j, 0.0)
}

/// As [`spin_properties`], allowing deviations up to `rel · max|J|`.
pub fn spin_properties_tol(j: &SpinCouplings, rel: f64) -> SpinProperties {
    let allowed = rel * j.max_abs();
    SpinProperties {
        reflection_invariant: reflection_defect(j, allowed).is_none(),
        hermitian: j.entries().all(|(_, _, z)| z.im.abs() <= allowed),
    }
}

/// First entry where `i^{k+k'} J` fails to be Hermitian.
fn reflection_defect(j: &SpinCouplings, allowed: f64) -> Option<(SpinLabel, SpinLabel)> {
    j.entries().map(|(r, c, _)| (r, c)).find(|&(r, c)| {
        let m = channel_phase(r, c).apply(j.get(r, c));
        let t = channel_phase(c, r).apply(j.get(c, r));
        (m - t.conj()).norm() > allowed
    })
}

/// Couplings of `½(H + Θ(H))`: the Hermitian part of `i^{k+k'} J`.
pub fn reflection_symmetrized(j: &SpinCouplings) -> SpinCouplings {
    let mut out = SpinCouplings::new(j.lattice());
    for (r, c, _) in j.entries() {
        let m = channel_phase(r, c).apply(j.get(r, c));
        let t = channel_phase(c, r).apply(j.get(c, r));
        let sym = (m + t.conj()) * 0.5;
        out.set(r, c, channel_phase(r, c).inv().apply(sym));
        out.set(c, r, channel_phase(c, r).inv().apply(sym.conj()));
    }
    out
}

/// The matrix `i^{k_𝔍 + k_𝔍'} J^{0 AA'}_{ϑ(𝔍)𝔍'}` over its support.
pub fn spin_criterion_matrix(j: &SpinCouplings) -> Result<(Vec<SpinLabel>, HermMatrix)> {
    if let Some((r, c)) = reflection_defect(j, 0.0) {
        let lat = j.lattice();
        return Err(Error::NotReflectionInvariant(format!(
            "i^(k+k')J is not Hermitian at J[{}][{}] = {} against J[{}][{}] = {}",
            r.render(lat),
            c.render(lat),
            j.get(r, c),
            c.render(lat),
            r.render(lat),
            j.get(c, r)
        )));
    }
    let support = j.cross_support();
    let m = CMatrix::from_fn(support.len(), support.len(), |a, b| {
        let (r, c) = (support[a], support[b]);
        channel_phase(r, c).apply(j.get(r, c))
    });
    Ok((support, HermMatrix::new(m)?))
}

/// Outcome of the spin criterion.
#[derive(Debug, Clone)]
pub struct SpinCriterionReport {
    pub properties: SpinProperties,
    pub support: Vec<SpinLabel>,
    pub certificate: PsdCertificate,
    /// `X = Σ i^{k_𝔍} y_{(𝔍,A)} Σ_{(𝔍,A)}` for the eigenvector `y` of the
    /// negative eigenvalue.
    pub witness: Option<SpinElement>,
    /// `−Tr(Θ(X) X H)`, the initial slope of `Tr(Θ(X) X e^{−βH})`.
    pub witness_slope: Option<f64>,
}

impl SpinCriterionReport {
    pub fn reflection_positive(&self) -> bool {
        self.certificate.is_psd()
    }
}

pub fn spin_criterion_witness(lattice: &Arc<Lattice>, support: &[SpinLabel], y: &[Complex64]) -> SpinElement {
    SpinElement::from_terms(
        lattice,
        support
            .iter()
            .zip(y)
            .map(|(l, &z)| (l.string(lattice), Phase::i_pow(l.degree() as i64).apply(z))),
    )
}

/// For reflection invariant `H`, `Tr(Θ(X) X e^{−βH}) ≥ 0` for all `β ≥ 0`
/// and `X ∈ 𝔄₊` iff the criterion matrix is PSD.
pub fn spin_criterion(j: &SpinCouplings, tol: f64) -> Result<SpinCriterionReport> {
    let lat = j.lattice();
    let (support, m) = spin_criterion_matrix(j)?;
    let certificate = psd_check(&m, tol)?;
    let witness = certificate
        .witness
        .as_ref()
        .map(|y| spin_criterion_witness(lat, &support, y));
    let witness_slope = witness.as_ref().map(|x| {
        let h = build_spin_hamiltonian(j);
        -(&(&spin_reflect(x) * x) * &h).trace().re
    });
    Ok(SpinCriterionReport {
        properties: spin_properties(j),
        support,
        certificate,
        witness,
        witness_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lat(m: usize) -> Arc<Lattice> {
        Arc::new(Lattice::with_plus_sites(m).unwrap())
    }

    fn l(letters: &[(usize, u8)]) -> SpinLabel {
        SpinLabel::new(letters).unwrap()
    }

    #[test]
    fn symmetrization_matches_the_reflected_hamiltonian() {
        let l = lat(2);
        let basis = spin_basis(&l);
        let mut j = SpinCouplings::new(&l);
        j.set(basis[3], basis[5], c(0.3, -0.7));
        j.set(basis[0], basis[9], c(1.1, 0.2));
        j.set(basis[6], basis[6], c(0.4, 0.5));
        let sym = reflection_symmetrized(&j);
        assert!(spin_properties(&sym).reflection_invariant);
        let h = build_spin_hamiltonian(&j);
        let expected = (&h + &spin_reflect(&h)).scale(c(0.5, 0.0));
        assert!(build_spin_hamiltonian(&sym).distance(&expected) <= 1e-15);
        let again = reflection_symmetrized(&sym);
        assert!(again.entries().all(|(r, col, z)| (z - sym.get(r, col)).norm() <= 1e-15));
    }

    #[test]
    fn basis_order_and_size() {
        let lt = lat(2);
        let b = spin_basis(&lt);
        assert_eq!(b.len(), 16);
        assert_eq!(b[0], SpinLabel::EMPTY);
        assert_eq!(b[1], l(&[(0, 1)]));
        assert_eq!(b[4], l(&[(1, 1)]));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(b[15].degree() == 2);
        assert!(SpinLabel::new(&[(0, 1), (0, 2)]).is_err());
        assert!(SpinLabel::new(&[(0, 4)]).is_err());
    }

    #[test]
    fn ising_bond_matrix() {
        let lt = lat(1);
        for jv in [-1.0, 0.5] {
            let mut j = SpinCouplings::new(&lt);
            j.set(l(&[(0, 3)]), l(&[(0, 3)]), c(jv, 0.0));
            let (support, m) = spin_criterion_matrix(&j).unwrap();
            assert_eq!(support.len(), 1);
            assert_eq!(m.matrix()[(0, 0)], c(-jv, 0.0));
            let rep = spin_criterion(&j, 1e-9).unwrap();
            assert_eq!(rep.reflection_positive(), jv <= 0.0);
            // H = −J σ³_{1'} σ³_1
            let h = build_spin_hamiltonian(&j);
            let s = PauliString { x: 0, z: 0b11 };
            assert_eq!(h.coefficient(s), c(-jv, 0.0));
        }
    }

    #[test]
    fn rotator_bond_not_positive_under_standard_reflection() {
        let lt = lat(1);
        let mut j = SpinCouplings::new(&lt);
        for a in [1, 2] {
            j.set(l(&[(0, a)]), l(&[(0, a)]), c(1.0, 0.0));
        }
        let (_, m) = spin_criterion_matrix(&j).unwrap();
        assert_eq!(m.matrix()[(0, 0)], c(-1.0, 0.0));
        assert_eq!(m.matrix()[(1, 1)], c(-1.0, 0.0));
        let rep = spin_criterion(&j, 1e-9).unwrap();
        assert!(!rep.reflection_positive());
        assert!(rep.witness_slope.unwrap() < 0.0);
    }

    #[test]
    fn empty_couplings_are_vacuously_positive() {
        let j = SpinCouplings::new(&lat(2));
        let rep = spin_criterion(&j, 1e-9).unwrap();
        assert!(rep.support.is_empty() && rep.reflection_positive());
    }

    #[test]
    fn fields_enter_reflection_invariance() {
        let lt = lat(1);
        // h σ³_1 and its mirror image with the sign that makes Θ(H) = H
        let mut j = SpinCouplings::new(&lt);
        j.set(SpinLabel::EMPTY, l(&[(0, 3)]), c(1.0, 0.0));
        assert!(spin_criterion_matrix(&j).is_err());
        j.set(l(&[(0, 3)]), SpinLabel::EMPTY, c(-1.0, 0.0));
        assert!(spin_properties(&j).reflection_invariant);
        let h = build_spin_hamiltonian(&j);
        assert_eq!(spin_reflect(&h), h);
    }

    fn random_couplings(m: usize) -> impl Strategy<Value = Vec<(usize, usize, f64, f64)>> {
        let n = 1usize << (2 * m);
        prop::collection::vec((0..n, 0..n, -1.0..1.0f64, -1.0..1.0f64), 0..8)
    }

    proptest! {
        #[test]
        fn build_and_extract_are_inverse(es in random_couplings(2)) {
            let lt = lat(2);
            let basis = spin_basis(&lt);
            let mut j = SpinCouplings::new(&lt);
            for (r, col, re, im) in es {
                j.add(basis[r], basis[col], c(re, im));
            }
            let back = extract_spin_couplings(&build_spin_hamiltonian(&j));
            prop_assert_eq!(back.entries().collect::<Vec<_>>(), j.entries().collect::<Vec<_>>());
        }

        #[test]
        fn reflection_invariance_matches_operator_level(es in random_couplings(2), sym in any::<bool>()) {
            let lt = lat(2);
            let basis = spin_basis(&lt);
            let mut j = SpinCouplings::new(&lt);
            for (r, col, re, im) in es {
                let (r, col) = (basis[r], basis[col]);
                j.add(r, col, c(re, im));
                if sym {
                    // make i^{k+k'} J Hermitian on this pair
                    let m = channel_phase(r, col).apply(j.get(r, col));
                    let t = channel_phase(col, r).inv().apply(m.conj());
                    j.set(col, r, t);
                }
            }
            let h = build_spin_hamiltonian(&j);
            let p = spin_properties(&j);
            prop_assert_eq!(p.reflection_invariant, spin_reflect(&h).distance(&h) == 0.0);
            prop_assert_eq!(p.hermitian, h.adjoint() == h);
        }

        #[test]
        fn witness_slope_is_the_negative_eigenvalue(g in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16)) {
            let lt = lat(1);
            let labels = [l(&[(0, 1)]), l(&[(0, 2)]), l(&[(0, 3)])];
            let m = CMatrix::from_fn(3, 3, |a, b| c(g[3 * a + b].0, g[3 * a + b].1));
            let m = &m + &m.adjoint();
            let mut j = SpinCouplings::new(&lt);
            for a in 0..3 {
                for b in 0..3 {
                    let phase = channel_phase(labels[a], labels[b]).inv();
                    j.set(labels[a], labels[b], phase.apply(m[(a, b)]));
                }
            }
            let rep = spin_criterion(&j, 1e-9).unwrap();
            if let Some(slope) = rep.witness_slope {
                prop_assert!((slope - rep.certificate.min_eigenvalue).abs() <= 1e-10);
            }
        }
    }
}
