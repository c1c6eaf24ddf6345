use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::clifford::{format_complex, same_lattice, Phase};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix_rep::PauliOp;

/// Product of Pauli matrices over distinct sites, `Π_j σ^{a_j}_j`, stored as
/// masks over global site bits. The letter at a site is `1` for `x` only,
/// `2` for both, `3` for `z` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn single(bit: u32, letter: u8) -> Self {
        let m = 1u64 << bit;
        match letter {
            1 => PauliString { x: m, z: 0 },
            2 => PauliString { x: m, z: m },
            3 => PauliString { x: 0, z: m },
            _ => panic!("Pauli letter must be 1, 2 or 3, got {letter}"),
        }
    }

    pub fn support(self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity factors `k`.
    pub fn degree(self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.support() == 0
    }

    pub fn letter(self, bit: u32) -> Option<u8> {
        match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
            (1, 0) => Some(1),
            (1, 1) => Some(2),
            (0, 1) => Some(3),
            _ => None,
        }
    }

    /// `(bit, letter)` pairs in ascending bit order.
    pub fn letters(self) -> Vec<(u32, u8)> {
        let mut s = self.support();
        let mut out = Vec::new();
        while s != 0 {
            let b = s.trailing_zeros();
            out.push((b, self.letter(b).expect("bit in support")));
            s &= s - 1;
        }
        out
    }

    /// `self · other = phase · string`
    pub fn mul(self, other: PauliString) -> (Phase, PauliString) {
        let out = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let e = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            - (out.x & out.z).count_ones() as i64;
        let sign = Phase::sign((self.z & other.x).count_ones() % 2 == 1);
        (Phase::i_pow(e) * sign, out)
    }

    /// The string as a qubit operator, site bit `b` being qubit `b`.
    pub fn operator(self) -> PauliOp {
        PauliOp {
            x: self.x,
            z: self.z,
            phase: Phase::i_pow((self.x & self.z).count_ones() as i64),
        }
    }

    pub fn mirror(self, lattice: &Lattice) -> Self {
        PauliString {
            x: lattice.mirror_mask(self.x),
            z: lattice.mirror_mask(self.z),
        }
    }

    pub fn render(self, lattice: &Lattice) -> String {
        if self.is_identity() {
            return "I".into();
        }
        self.letters()
            .into_iter()
            .map(|(b, a)| format!("σ{a}[{}]", lattice.label(b)))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Linear combination of Pauli strings over a spin lattice.
#[derive(Clone)]
pub struct SpinElement {
    lattice: Arc<Lattice>,
    terms: BTreeMap<PauliString, Complex64>,
}

impl SpinElement {
    pub fn zero(lattice: &Arc<Lattice>) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Self {
        Self::string(lattice, PauliString::IDENTITY, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(lattice: &Arc<Lattice>, z: Complex64) -> Self {
        Self::string(lattice, PauliString::IDENTITY, z)
    }

    pub fn string(lattice: &Arc<Lattice>, s: PauliString, z: Complex64) -> Self {
        let mut e = Self::zero(lattice);
        e.add_term(s, z);
        e
    }

    /// `σ^a` at the site with global bit `bit`.
    pub fn sigma(lattice: &Arc<Lattice>, bit: u32, letter: u8) -> Self {
        assert!((bit as usize) < lattice.len(), "site {bit} outside lattice");
        Self::string(lattice, PauliString::single(bit, letter), Complex64::new(1.0, 0.0))
    }

    /// `σ^a` at the site with the given label.
    pub fn sigma_at(lattice: &Arc<Lattice>, label: &str, letter: u8) -> Result<Self> {
        let bit = lattice
            .bit_of(label)
            .ok_or_else(|| Error::Config(format!("unknown site {label:?}")))?;
        if !(1..=3).contains(&letter) {
            return Err(Error::Config(format!("Pauli letter must be 1, 2 or 3, got {letter}")));
        }
        Ok(Self::sigma(lattice, bit, letter))
    }

    pub fn from_terms(
        lattice: &Arc<Lattice>,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Self {
        let mut e = Self::zero(lattice);
        for (s, z) in terms {
            e.add_term(s, z);
        }
        e
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.terms.iter().map(|(s, z)| (*s, *z))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: PauliString) -> Complex64 {
        self.terms.get(&s).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, s: PauliString, z: Complex64) {
        let n = self.lattice.len() as u32;
        assert!(n == 64 || s.support() >> n == 0, "string outside lattice");
        if z == Complex64::default() {
            return;
        }
        let entry = self.terms.entry(s).or_default();
        *entry += z;
        if *entry == Complex64::default() {
            self.terms.remove(&s);
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::from_terms(&self.lattice, self.terms().map(|(s, a)| (s, a * z)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !same_lattice(&self.lattice, &other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        let mut out = Self::zero(&self.lattice);
        for (s1, a) in self.terms() {
            for (s2, b) in other.terms() {
                let (p, s) = s1.mul(s2);
                out.add_term(s, p.apply(a * b));
            }
        }
        Ok(out)
    }

    /// Pauli strings are self-adjoint, so only amplitudes are conjugated.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(&self.lattice, self.terms().map(|(s, a)| (s, a.conj())))
    }

    /// Normalized trace: the identity amplitude.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(PauliString::IDENTITY)
    }

    pub fn is_plus_supported(&self) -> bool {
        let minus = self.lattice.minus_mask();
        self.terms.keys().all(|s| s.support() & minus == 0)
    }

    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for (s, a) in self.terms() {
            d = d.max((a - other.coefficient(s)).norm());
        }
        for (s, b) in other.terms() {
            if !self.terms.contains_key(&s) {
                d = d.max(b.norm());
            }
        }
        d
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(s, a)| format!("({}){}", format_complex(a), s.render(&self.lattice)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The standard spin reflection `Θ(σ^a_j) = −σ^a_{ϑ(j)}`, antilinear.
pub fn spin_reflect(x: &SpinElement) -> SpinElement {
    let lat = x.lattice();
    SpinElement::from_terms(
        lat,
        x.terms().map(|(s, a)| {
            let sign = if s.degree() % 2 == 1 { -1.0 } else { 1.0 };
            (s.mirror(lat), a.conj() * sign)
        }),
    )
}

impl fmt::Debug for SpinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialEq for SpinElement {
    fn eq(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.terms == other.terms
    }
}

impl Add for &SpinElement {
    type Output = SpinElement;
    fn add(self, rhs: &SpinElement) -> SpinElement {
        assert!(same_lattice(&self.lattice, &rhs.lattice), "lattice mismatch");
        let mut out = self.clone();
        for (s, z) in rhs.terms() {
            out.add_term(s, z);
        }
        out
    }
}

impl Neg for &SpinElement {
    type Output = SpinElement;
    fn neg(self) -> SpinElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &SpinElement {
    type Output = SpinElement;
    fn sub(self, rhs: &SpinElement) -> SpinElement {
        self + &(-rhs)
    }
}

impl Mul for &SpinElement {
    type Output = SpinElement;
    fn mul(self, rhs: &SpinElement) -> SpinElement {
        self.try_mul(rhs).expect("multiplying spin elements of different lattices")
    }
}
