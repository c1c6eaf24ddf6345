//! Sparse Clifford algebra over a [`Lattice`].
//!
//! Monomials are bitmasks in the lattice's global bit order, so a product of
//! two canonical words is an XOR together with a transposition sign computed
//! from popcounts.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// A power of `i`. Multiplying an amplitude by a phase is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// `i^k`, for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    /// `+1` if `negative` is false, `-1` otherwise.
    pub fn sign(negative: bool) -> Self {
        if negative {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn inv(self) -> Self {
        self.conj()
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn apply(self, z: Complex64) -> Complex64 {
        match self.0 {
            0 => z,
            1 => Complex64::new(-z.im, z.re),
            2 => -z,
            _ => Complex64::new(z.im, -z.re),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        self.apply(Complex64::new(1.0, 0.0))
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// `(−1)^{k(k−1)/2}`: the sign produced by reversing `k` anticommuting factors.
pub fn reversal_sign(k: u32) -> Phase {
    Phase::sign(k % 4 >= 2)
}

/// Canonically ordered product of distinct generators, stored as a bitmask
/// over global bit positions. The empty word is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MajoranaWord(u64);

impl MajoranaWord {
    pub const IDENTITY: MajoranaWord = MajoranaWord(0);

    pub fn from_mask(mask: u64) -> Self {
        MajoranaWord(mask)
    }

    pub fn generator(bit: u32) -> Self {
        MajoranaWord(1u64 << bit)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Number of generators `k`.
    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_odd(self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Generator bit positions in ascending order.
    pub fn bits(self) -> impl Iterator<Item = u32> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let b = m.trailing_zeros();
                m &= m - 1;
                Some(b)
            }
        })
    }

    /// Product of canonical words: `self · other = sign · word`.
    pub fn mul(self, other: MajoranaWord) -> (Phase, MajoranaWord) {
        let mut swaps = 0u32;
        for g in other.bits() {
            swaps += (self.0 >> g >> 1).count_ones();
        }
        (Phase::sign(swaps % 2 == 1), MajoranaWord(self.0 ^ other.0))
    }

    /// Sign of the adjoint, `C* = (−1)^{k(k−1)/2} C`.
    pub fn adjoint_sign(self) -> Phase {
        reversal_sign(self.degree())
    }
}

/// Reduces a product of generators (repeats allowed) to canonical form.
///
/// Returns the canonical word and the sign `±1` collected from
/// anticommutations; repeated generators cancel through `c_i² = I`.
pub fn canonicalize(seq: &[u32]) -> (MajoranaWord, i8) {
    let (phase, word) = canonicalize_phase(seq);
    (word, if phase == Phase::ONE { 1 } else { -1 })
}

pub(crate) fn canonicalize_phase(seq: &[u32]) -> (Phase, MajoranaWord) {
    let mut word = MajoranaWord::IDENTITY;
    let mut phase = Phase::ONE;
    for &g in seq {
        let (p, w) = word.mul(MajoranaWord::generator(g));
        phase = phase * p;
        word = w;
    }
    (phase, word)
}

/// Finite linear combination of Majorana words with complex amplitudes.
#[derive(Clone)]
pub struct AlgebraElement {
    lattice: Arc<Lattice>,
    terms: BTreeMap<MajoranaWord, Complex64>,
}

pub(crate) fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AlgebraElement {
    pub fn zero(lattice: &Arc<Lattice>) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Self {
        Self::scalar(lattice, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(lattice: &Arc<Lattice>, z: Complex64) -> Self {
        Self::monomial(lattice, MajoranaWord::IDENTITY, z)
    }

    pub fn monomial(lattice: &Arc<Lattice>, word: MajoranaWord, z: Complex64) -> Self {
        let mut e = Self::zero(lattice);
        e.add_term(word, z);
        e
    }

    /// The generator at global bit position `bit`.
    pub fn generator(lattice: &Arc<Lattice>, bit: u32) -> Self {
        assert!((bit as usize) < lattice.len(), "generator {bit} outside lattice");
        Self::monomial(lattice, MajoranaWord::generator(bit), Complex64::new(1.0, 0.0))
    }

    /// The generator of the site with the given label.
    pub fn site(lattice: &Arc<Lattice>, label: &str) -> Result<Self> {
        let bit = lattice
            .bit_of(label)
            .ok_or_else(|| Error::Config(format!("unknown site {label:?}")))?;
        Ok(Self::generator(lattice, bit))
    }

    /// Product `c_{s_1} ⋯ c_{s_k}` of generators in the given order.
    pub fn product_of(lattice: &Arc<Lattice>, bits: &[u32]) -> Self {
        let (phase, word) = canonicalize_phase(bits);
        Self::monomial(lattice, word, phase.to_complex())
    }

    pub fn from_terms(
        lattice: &Arc<Lattice>,
        terms: impl IntoIterator<Item = (MajoranaWord, Complex64)>,
    ) -> Self {
        let mut e = Self::zero(lattice);
        for (w, z) in terms {
            e.add_term(w, z);
        }
        e
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn terms(&self) -> impl Iterator<Item = (MajoranaWord, Complex64)> + '_ {
        self.terms.iter().map(|(w, z)| (*w, *z))
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

    pub fn coefficient(&self, word: MajoranaWord) -> Complex64 {
        self.terms.get(&word).copied().unwrap_or_default()
    }

    /// Adds `z · word`, dropping the entry if the sum is exactly zero.
    pub fn add_term(&mut self, word: MajoranaWord, z: Complex64) {
        let n = self.lattice.len() as u32;
        assert!(
            n == 64 || word.mask() >> n == 0,
            "word {:#x} outside lattice",
            word.mask()
        );
        if z == Complex64::default() {
            return;
        }
        let entry = self.terms.entry(word).or_default();
        *entry += z;
        if *entry == Complex64::default() {
            self.terms.remove(&word);
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::from_terms(&self.lattice, self.terms().map(|(w, a)| (w, a * z)))
    }

    pub fn scale_phase(&self, p: Phase) -> Self {
        Self::from_terms(&self.lattice, self.terms().map(|(w, a)| (w, p.apply(a))))
    }

    fn check_lattice(&self, other: &Self) -> Result<()> {
        if same_lattice(&self.lattice, &other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let mut out = self.clone();
        for (w, z) in other.terms() {
            out.add_term(w, z);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_lattice(other)?;
        let mut out = Self::zero(&self.lattice);
        for (w1, a) in self.terms() {
            for (w2, b) in other.terms() {
                let (p, w) = w1.mul(w2);
                out.add_term(w, p.apply(a * b));
            }
        }
        Ok(out)
    }

    /// The `*`-operation: antilinear, with `C* = (−1)^{k(k−1)/2} C` on words.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(
            &self.lattice,
            self.terms().map(|(w, a)| (w, w.adjoint_sign().apply(a.conj()))),
        )
    }

    /// Splits into even and odd parts.
    pub fn grade_split(&self) -> (Self, Self) {
        let (mut even, mut odd) = (Self::zero(&self.lattice), Self::zero(&self.lattice));
        for (w, a) in self.terms() {
            if w.is_odd() {
                odd.add_term(w, a);
            } else {
                even.add_term(w, a);
            }
        }
        (even, odd)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|w| !w.is_odd())
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|w| w.is_odd())
    }

    /// Normalized tracial state: the identity amplitude.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(MajoranaWord::IDENTITY)
    }

    /// Image under the global gauge map `c_i ↦ −c_i`.
    pub fn global_gauge(&self) -> Self {
        Self::from_terms(
            &self.lattice,
            self.terms()
                .map(|(w, a)| (w, if w.is_odd() { -a } else { a })),
        )
    }

    /// Support contained in the `+` side.
    pub fn is_plus_supported(&self) -> bool {
        let minus = self.lattice.minus_mask();
        self.terms.keys().all(|w| w.mask() & minus == 0)
    }

    /// Support contained in the `−` side.
    pub fn is_minus_supported(&self) -> bool {
        let plus = self.lattice.plus_mask();
        self.terms.keys().all(|w| w.mask() & plus == 0)
    }

    /// Largest absolute amplitude.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Σ |a_w|`
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|z| z.norm()).sum()
    }

    /// Max-norm of the difference, for numeric comparisons.
    pub fn distance(&self, other: &Self) -> f64 {
        assert!(same_lattice(&self.lattice, &other.lattice), "lattice mismatch");
        let mut d = 0.0f64;
        for (w, a) in self.terms() {
            d = d.max((a - other.coefficient(w)).norm());
        }
        for (w, b) in other.terms() {
            if !self.terms.contains_key(&w) {
                d = d.max(b.norm());
            }
        }
        d
    }

    /// Human readable rendering with site labels.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (w, a) in self.terms() {
            let word = if w.is_identity() {
                "I".to_string()
            } else {
                w.bits()
                    .map(|b| format!("c[{}]", self.lattice.label(b)))
                    .collect::<Vec<_>>()
                    .join("")
            };
            parts.push(format!("({}){}", format_complex(a), word));
        }
        parts.join(" + ")
    }
}

pub(crate) fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.terms == other.terms
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(rhs).expect("adding elements of different lattices")
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl AddAssign<&AlgebraElement> for AlgebraElement {
    fn add_assign(&mut self, rhs: &AlgebraElement) {
        assert!(same_lattice(&self.lattice, &rhs.lattice), "lattice mismatch");
        for (w, z) in rhs.terms() {
            self.add_term(w, z);
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_phase(Phase::MINUS_ONE)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        -&self
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self + &(-rhs)
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_mul(rhs).expect("multiplying elements of different lattices")
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        &self * &rhs
    }
}

impl Mul<Complex64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Complex64) -> AlgebraElement {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Complex64) -> AlgebraElement {
        self.scale(rhs)
    }
}
