//! The antilinear reflection `Θ`, the twisted product `∘` and the
//! reflection-adapted basis `Θ(C_𝔍)∘C_𝔍'` with `𝔍, 𝔍' ∈ 𝓟₊`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{reversal_sign, same_lattice, AlgebraElement, MajoranaWord, Phase};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// The square root of `−1` fixed for the twisted product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum TwistChoice {
    #[default]
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl TwistChoice {
    pub fn zeta(self) -> Phase {
        match self {
            TwistChoice::PlusI => Phase::I,
            TwistChoice::MinusI => Phase::MINUS_I,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            TwistChoice::PlusI => TwistChoice::MinusI,
            TwistChoice::MinusI => TwistChoice::PlusI,
        }
    }
}

impl fmt::Display for TwistChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwistChoice::PlusI => "+i",
            TwistChoice::MinusI => "-i",
        })
    }
}

impl FromStr for TwistChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+i" | "i" => Ok(TwistChoice::PlusI),
            "-i" => Ok(TwistChoice::MinusI),
            other => Err(Error::Config(format!(
                "twist must be \"+i\" or \"-i\", got {other:?}"
            ))),
        }
    }
}

/// A subset of `Λ₊`, stored as a mask over `+` side positions. Its canonical
/// tuple lists the positions in ascending order. Ordering is graded
/// lexicographic: by size, then lexicographically on the tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BasisIndex(u64);

impl BasisIndex {
    pub const EMPTY: BasisIndex = BasisIndex(0);

    pub fn from_mask(mask: u64) -> Self {
        BasisIndex(mask)
    }

    pub fn from_tuple(positions: &[usize]) -> Self {
        BasisIndex(positions.iter().fold(0, |m, &p| m | 1u64 << p))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn tuple(self) -> Vec<usize> {
        MajoranaWord::from_mask(self.0)
            .bits()
            .map(|b| b as usize)
            .collect()
    }

    /// `k_𝔍`
    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    /// `|𝔍| = k_𝔍 mod 2`
    pub fn is_odd(self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The monomial `C_𝔍` as a word over `Λ₊` bits.
    pub fn word(self, lattice: &Lattice) -> MajoranaWord {
        MajoranaWord::from_mask(self.0 << lattice.half())
    }

    /// Recovers the index of a word supported on `Λ₊`.
    pub fn from_plus_word(lattice: &Lattice, word: MajoranaWord) -> Self {
        debug_assert_eq!(word.mask() & lattice.minus_mask(), 0);
        BasisIndex(word.mask() >> lattice.half())
    }

    pub fn render(self, lattice: &Lattice) -> String {
        let labels: Vec<&str> = self
            .tuple()
            .into_iter()
            .map(|k| lattice.plus_labels()[k].as_str())
            .collect();
        format!("({})", labels.join(","))
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.tuple().cmp(&other.tuple()))
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The canonical tuple set `𝓟₊` in graded lexicographic order; `∅` first.
pub fn plus_basis(lattice: &Lattice) -> Vec<BasisIndex> {
    let m = lattice.half() as u32;
    assert!(m < 32, "𝓟₊ enumeration needs |Λ₊| < 32");
    let mut v: Vec<BasisIndex> = (0..1u64 << m).map(BasisIndex).collect();
    v.sort();
    v
}

/// `q_𝔍 = (−1)^{k(k−1)/2}`
pub fn q_factor(idx: BasisIndex) -> f64 {
    if reversal_sign(idx.degree()) == Phase::ONE {
        1.0
    } else {
        -1.0
    }
}

/// `s_𝔍 = ζ^{k(k−1)/2}`
pub fn s_factor(idx: BasisIndex, twist: TwistChoice) -> Complex64 {
    s_phase(idx, twist).to_complex()
}

pub(crate) fn s_phase(idx: BasisIndex, twist: TwistChoice) -> Phase {
    let k = idx.degree() as i64;
    let e = k * (k - 1) / 2;
    Phase::i_pow(e * twist.zeta().exponent() as i64)
}

/// `Θ` on a single word: `Θ(C) = (−1)^{k(k−1)/2} C_{ϑ}` since mirroring an
/// ascending word reverses it.
pub fn reflect_word(lattice: &Lattice, word: MajoranaWord) -> (Phase, MajoranaWord) {
    (
        reversal_sign(word.degree()),
        MajoranaWord::from_mask(lattice.mirror_mask(word.mask())),
    )
}

/// The antilinear `*`-automorphism induced by the site involution.
pub fn reflect(a: &AlgebraElement) -> AlgebraElement {
    let lat = a.lattice();
    AlgebraElement::from_terms(
        lat,
        a.terms().map(|(w, z)| {
            let (p, m) = reflect_word(lat, w);
            (m, p.apply(z.conj()))
        }),
    )
}

/// Twist phase `ζ^{|A₋||B₊| − |A₊||B₋|}` for two words, each factored as
/// (`Λ₋` part)(`Λ₊` part).
pub fn twist_phase(lattice: &Lattice, a: MajoranaWord, b: MajoranaWord, twist: TwistChoice) -> Phase {
    let minus = lattice.minus_mask();
    let odd = |m: u64| (m.count_ones() % 2) as i64;
    let (am, ap) = (odd(a.mask() & minus), odd(a.mask() & !minus));
    let (bm, bp) = (odd(b.mask() & minus), odd(b.mask() & !minus));
    Phase::i_pow((am * bp - ap * bm) * twist.zeta().exponent() as i64)
}

/// `A∘B`, extended bilinearly from canonical words.
pub fn twisted_product(
    a: &AlgebraElement,
    b: &AlgebraElement,
    twist: TwistChoice,
) -> Result<AlgebraElement> {
    if !same_lattice(a.lattice(), b.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    let lat = a.lattice();
    let mut out = AlgebraElement::zero(lat);
    for (w1, x) in a.terms() {
        for (w2, y) in b.terms() {
            let t = twist_phase(lat, w1, w2, twist);
            let (p, w) = w1.mul(w2);
            out.add_term(w, (t * p).apply(x * y));
        }
    }
    Ok(out)
}

/// Word and phase of `Θ(C_𝔍)∘C_𝔍' = ζ^{|𝔍||𝔍'|} q_𝔍 C_{ϑ(𝔍) ∪ 𝔍'}`.
pub fn basis_word(
    lattice: &Lattice,
    twist: TwistChoice,
    row: BasisIndex,
    col: BasisIndex,
) -> (Phase, MajoranaWord) {
    let (q, mirrored) = reflect_word(lattice, row.word(lattice));
    let zeta = if row.is_odd() && col.is_odd() {
        twist.zeta()
    } else {
        Phase::ONE
    };
    (
        zeta * q,
        MajoranaWord::from_mask(mirrored.mask() | col.word(lattice).mask()),
    )
}

pub fn basis_element(
    lattice: &Arc<Lattice>,
    twist: TwistChoice,
    row: BasisIndex,
    col: BasisIndex,
) -> AlgebraElement {
    let (p, w) = basis_word(lattice, twist, row, col);
    AlgebraElement::monomial(lattice, w, p.to_complex())
}

/// Splits a word into the indices `(𝔍, 𝔍')` of the basis element it is
/// proportional to.
pub fn split_word(lattice: &Lattice, word: MajoranaWord) -> (BasisIndex, BasisIndex) {
    let minus = word.mask() & lattice.minus_mask();
    let plus = word.mask() & lattice.plus_mask();
    let row = BasisIndex::from_plus_word(lattice, MajoranaWord::from_mask(lattice.mirror_mask(minus)));
    let col = BasisIndex::from_plus_word(lattice, MajoranaWord::from_mask(plus));
    (row, col)
}

/// Coefficients `a_{𝔍𝔍'}` of `A = Σ a_{𝔍𝔍'} Θ(C_𝔍)∘C_𝔍'`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCoefficients {
    lattice: Arc<Lattice>,
    twist: TwistChoice,
    entries: BTreeMap<(BasisIndex, BasisIndex), Complex64>,
}

impl BasisCoefficients {
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
        if z == Complex64::default() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), z);
        }
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

    /// Exact Hermiticity of the coefficient matrix.
    pub fn is_hermitian(&self) -> bool {
        self.entries().all(|(r, c, z)| self.get(c, r) == z.conj())
    }
}

/// Expands `A` in the basis `Θ(C_𝔍)∘C_𝔍'` by splitting each word.
pub fn basis_expand(a: &AlgebraElement, twist: TwistChoice) -> BasisCoefficients {
    let lat = a.lattice();
    let mut out = BasisCoefficients::new(lat, twist);
    for (w, z) in a.terms() {
        let (row, col) = split_word(lat, w);
        let (p, _) = basis_word(lat, twist, row, col);
        out.set(row, col, p.inv().apply(z));
    }
    out
}

/// Inverse of [`basis_expand`].
pub fn basis_assemble(coeffs: &BasisCoefficients) -> AlgebraElement {
    let lat = coeffs.lattice();
    AlgebraElement::from_terms(
        lat,
        coeffs.entries().map(|(r, c, z)| {
            let (p, w) = basis_word(lat, coeffs.twist(), r, c);
            (w, p.apply(z))
        }),
    )
}

/// `a_{𝔍𝔍'} = Tr((Θ(C_𝔍*)∘C_𝔍'*) A)`, computed through products and the
/// trace. Slow; used to cross-check [`basis_expand`].
pub fn coefficient_by_trace(
    a: &AlgebraElement,
    twist: TwistChoice,
    row: BasisIndex,
    col: BasisIndex,
) -> Complex64 {
    let lat = a.lattice();
    let c_row = AlgebraElement::monomial(lat, row.word(lat), Complex64::new(1.0, 0.0)).adjoint();
    let c_col = AlgebraElement::monomial(lat, col.word(lat), Complex64::new(1.0, 0.0)).adjoint();
    let b = twisted_product(&reflect(&c_row), &c_col, twist).expect("same lattice");
    (&b * a).trace()
}
