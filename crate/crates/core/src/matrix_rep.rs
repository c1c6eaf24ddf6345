//! Brute-force oracle: a faithful Jordan–Wigner representation of the
//! Majorana algebra, Boltzmann and Gibbs functionals as matrix traces, and
//! Gram matrices of the reflection form over `𝔄₊`.
//!
//! Generator images are Pauli operators `i^e X^x Z^z` on `⌈n/2⌉` qubits,
//! where qubit `p` is the `p`-th tensor factor and bit `p` of a basis index:
//!
//! ```text
//! c_{2p}   = Z_0 ⋯ Z_{p−1} X_p
//! c_{2p+1} = Z_0 ⋯ Z_{p−1} Y_p
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{AlgebraElement, MajoranaWord, Phase};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{matrix_exp, psd_check, CMatrix, HermMatrix, PsdCertificate};
use crate::reflection::{plus_basis, reflect, twisted_product, BasisIndex, TwistChoice};

/// Largest number of Majorana generators the oracle represents.
pub const ORACLE_MAX_GENERATORS: usize = 20;

/// `i^e X^x Z^z`, acting as `|b⟩ ↦ i^e (−1)^{|z∧b|} |b ⊕ x⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub x: u64,
    pub z: u64,
    pub phase: Phase,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp {
        x: 0,
        z: 0,
        phase: Phase::ONE,
    };

    pub fn mul(self, rhs: PauliOp) -> PauliOp {
        let sign = Phase::sign((self.z & rhs.x).count_ones() % 2 == 1);
        PauliOp {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: self.phase * rhs.phase * sign,
        }
    }

    pub fn scale(self, p: Phase) -> PauliOp {
        PauliOp {
            phase: self.phase * p,
            ..self
        }
    }

    /// Coefficient of `|b ⊕ x⟩` in the image of `|b⟩`.
    pub fn entry(self, b: u64) -> Complex64 {
        (self.phase * Phase::sign((self.z & b).count_ones() % 2 == 1)).to_complex()
    }

    pub fn dense(self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            m[((b ^ self.x) as usize, b as usize)] = self.entry(b);
        }
        m
    }

    /// `Tr(P R) / dim`, in `O(dim)`.
    pub fn normalized_trace_with(self, r: &CMatrix) -> Complex64 {
        let dim = r.rows();
        let mut s = Complex64::default();
        for b in 0..dim as u64 {
            // (P R)_{bb} = Σ_c P_{bc} R_{cb} with c = b ⊕ x
            let c = b ^ self.x;
            s += self.entry(c) * r[(c as usize, b as usize)];
        }
        s / dim as f64
    }
}

/// Jordan–Wigner images of `n` Majorana generators, padded to an even count.
#[derive(Debug, Clone)]
pub struct JordanWigner {
    generators: Vec<PauliOp>,
    qubits: usize,
    padded: bool,
}

impl JordanWigner {
    pub fn new(n: usize) -> Result<Self> {
        if n > ORACLE_MAX_GENERATORS {
            return Err(Error::SizeCap {
                what: "Majorana generators in the matrix representation",
                actual: n,
                limit: ORACLE_MAX_GENERATORS,
            });
        }
        let qubits = n.div_ceil(2);
        let generators = (0..n)
            .map(|k| {
                let p = k / 2;
                let strings = (1u64 << p) - 1;
                if k % 2 == 0 {
                    PauliOp {
                        x: 1 << p,
                        z: strings,
                        phase: Phase::ONE,
                    }
                } else {
                    PauliOp {
                        x: 1 << p,
                        z: strings | 1 << p,
                        phase: Phase::I,
                    }
                }
            })
            .collect();
        Ok(Self {
            generators,
            qubits,
            padded: n % 2 == 1,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Whether a padding generator was needed to reach an even count.
    pub fn padded(&self) -> bool {
        self.padded
    }

    pub fn generator(&self, k: usize) -> PauliOp {
        self.generators[k]
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Product of the generators in the given order.
    pub fn product(&self, seq: impl IntoIterator<Item = usize>) -> PauliOp {
        seq.into_iter()
            .fold(PauliOp::IDENTITY, |acc, k| acc.mul(self.generators[k]))
    }

    pub fn generator_images(&self) -> Vec<CMatrix> {
        self.generators.iter().map(|g| g.dense(self.dim())).collect()
    }
}

/// Matrix representation of the Majorana algebra of a lattice. Generator
/// `k` is the site at global bit position `k`.
#[derive(Debug, Clone)]
pub struct Representation {
    lattice: Arc<Lattice>,
    jw: JordanWigner,
}

impl Representation {
    pub fn new(lattice: &Arc<Lattice>) -> Result<Self> {
        Ok(Self {
            lattice: Arc::clone(lattice),
            jw: JordanWigner::new(lattice.len())?,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.jw.dim()
    }

    pub fn jordan_wigner(&self) -> &JordanWigner {
        &self.jw
    }

    pub fn generator_images(&self) -> Vec<CMatrix> {
        self.jw.generator_images()
    }

    pub fn word(&self, w: MajoranaWord) -> PauliOp {
        self.jw.product(w.bits().map(|b| b as usize))
    }

    pub fn represent(&self, a: &AlgebraElement) -> CMatrix {
        assert!(
            **a.lattice() == *self.lattice,
            "element and representation on different lattices"
        );
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, z) in a.terms() {
            let p = self.word(w);
            for b in 0..dim as u64 {
                m[((b ^ p.x) as usize, b as usize)] += p.entry(b) * z;
            }
        }
        m
    }

    /// Normalized matrix trace `tr(M) / dim`.
    pub fn normalized_trace(&self, m: &CMatrix) -> Complex64 {
        m.trace() / self.dim() as f64
    }

    /// `e^{−βH}` as a matrix.
    pub fn boltzmann_matrix(&self, h: &AlgebraElement, beta: f64) -> Result<CMatrix> {
        let hm = self.represent(h).scale(Complex64::new(-beta, 0.0));
        let hermitian = h.adjoint() == *h;
        matrix_exp(&hm, hermitian)
    }
}

/// `Z_{βH} = Tr(e^{−βH})`
pub fn partition_function(h: &AlgebraElement, beta: f64, rep: &Representation) -> Result<Complex64> {
    Ok(rep.normalized_trace(&rep.boltzmann_matrix(h, beta)?))
}

/// `ω_{βH}(A) = Tr(A e^{−βH})`
pub fn boltzmann(
    a: &AlgebraElement,
    h: &AlgebraElement,
    beta: f64,
    rep: &Representation,
) -> Result<Complex64> {
    let r = rep.boltzmann_matrix(h, beta)?;
    Ok(trace_against(a, &r, rep))
}

/// `ρ_{βH}(A) = ω_{βH}(A) / Z_{βH}`
pub fn gibbs(
    a: &AlgebraElement,
    h: &AlgebraElement,
    beta: f64,
    rep: &Representation,
) -> Result<Complex64> {
    let r = rep.boltzmann_matrix(h, beta)?;
    let z = rep.normalized_trace(&r);
    check_normalization(z)?;
    Ok(trace_against(a, &r, rep) / z)
}

fn check_normalization(z: Complex64) -> Result<()> {
    if z.norm() <= 1e-12 || !z.norm().is_finite() {
        return Err(Error::DegenerateNormalization(z));
    }
    Ok(())
}

/// `Tr(A R)` with the normalized trace.
pub fn trace_against(a: &AlgebraElement, r: &CMatrix, rep: &Representation) -> Complex64 {
    a.terms()
        .map(|(w, z)| rep.word(w).normalized_trace_with(r) * z)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `ω_{βH}(A) = Tr(A e^{−βH})`
    Boltzmann,
    /// `ρ_{βH}(A) = Tr(A e^{−βH}) / Z_{βH}`
    Gibbs,
}

/// Gram matrix of the reflection form on a list of basis labels.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub labels: Vec<BasisIndex>,
    pub matrix: CMatrix,
    pub partition_function: Complex64,
}

/// `Θ(C_𝔍)∘C_𝔍'` as a Pauli operator, assembled from generator images:
/// `ζ^{|𝔍||𝔍'|} c_{ϑ(i_1)} ⋯ c_{ϑ(i_k)} c_{j_1} ⋯ c_{j_l}`.
pub fn basis_operator(
    rep: &Representation,
    twist: TwistChoice,
    row: BasisIndex,
    col: BasisIndex,
) -> PauliOp {
    let lat = rep.lattice();
    let jw = rep.jordan_wigner();
    let left = jw.product(
        row.tuple()
            .into_iter()
            .map(|k| lat.mirror_bit(lat.plus_bit(k)) as usize),
    );
    let right = jw.product(col.tuple().into_iter().map(|k| lat.plus_bit(k) as usize));
    let zeta = if row.is_odd() && col.is_odd() {
        twist.zeta()
    } else {
        Phase::ONE
    };
    left.mul(right).scale(zeta)
}

/// Operator of the form on `𝔄₋`: `⟨Θ(C_𝔍), Θ(C_𝔍')⟩` pairs with
/// `C_𝔍 ∘ Θ(C_𝔍') = ζ^{−|𝔍||𝔍'|} C_𝔍 Θ(C_𝔍')`.
pub fn minus_basis_operator(
    rep: &Representation,
    twist: TwistChoice,
    row: BasisIndex,
    col: BasisIndex,
) -> PauliOp {
    let lat = rep.lattice();
    let jw = rep.jordan_wigner();
    let left = jw.product(row.tuple().into_iter().map(|k| lat.plus_bit(k) as usize));
    let right = jw.product(
        col.tuple()
            .into_iter()
            .map(|k| lat.mirror_bit(lat.plus_bit(k)) as usize),
    );
    let zeta = if row.is_odd() && col.is_odd() {
        twist.zeta().inv()
    } else {
        Phase::ONE
    };
    left.mul(right).scale(zeta)
}

/// Gram matrix `Tr((Θ(C_𝔍)∘C_𝔍') R)` of the functional `A ↦ Tr(A R)` for a
/// density matrix `R`, over all of `𝓟₊`.
pub fn gram_from_density(rep: &Representation, twist: TwistChoice, r: &CMatrix) -> GramMatrix {
    gram_with(rep, r, |row, col| basis_operator(rep, twist, row, col))
}

/// The same form evaluated on the reflected basis `Θ(C_𝔍)` of `𝔄₋`.
pub fn minus_gram_from_density(rep: &Representation, twist: TwistChoice, r: &CMatrix) -> GramMatrix {
    gram_with(rep, r, |row, col| minus_basis_operator(rep, twist, row, col))
}

fn gram_with(
    rep: &Representation,
    r: &CMatrix,
    op: impl Fn(BasisIndex, BasisIndex) -> PauliOp + Sync,
) -> GramMatrix {
    let labels = plus_basis(rep.lattice());
    let n = labels.len();
    let entries: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|k| op(labels[k / n], labels[k % n]).normalized_trace_with(r))
        .collect();
    GramMatrix {
        matrix: CMatrix::from_fn(n, n, |i, j| entries[i * n + j]),
        partition_function: rep.normalized_trace(r),
        labels,
    }
}

/// Gram matrix of `⟨A,B⟩⁰_{βH,Θ} = Tr((Θ(A)∘B) e^{−βH})` on `𝓟₊`,
/// divided by `Z_{βH}` when `functional` is [`Functional::Gibbs`].
pub fn gram_matrix(
    h: &AlgebraElement,
    beta: f64,
    rep: &Representation,
    twist: TwistChoice,
    functional: Functional,
) -> Result<GramMatrix> {
    let r = rep.boltzmann_matrix(h, beta)?;
    let mut g = gram_from_density(rep, twist, &r);
    if functional == Functional::Gibbs {
        check_normalization(g.partition_function)?;
        g.matrix = g.matrix.scale(g.partition_function.inv());
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Criterion,
    Oracle,
}

/// Verdict of a brute-force reflection positivity check at one `β`.
#[derive(Debug, Clone)]
pub struct RpReport<W> {
    pub provenance: Provenance,
    pub beta: f64,
    pub functional: Functional,
    pub labels: Vec<String>,
    pub gram: CMatrix,
    pub partition_function: Complex64,
    pub certificate: PsdCertificate,
    /// An element `A` with `⟨A,A⟩ < 0`, when the form is not PSD.
    pub witness: Option<W>,
    /// `⟨A,A⟩` for the witness, evaluated directly.
    pub witness_value: Option<f64>,
}

impl<W> RpReport<W> {
    pub fn reflection_positive(&self) -> bool {
        self.certificate.is_psd()
    }
}

/// Checks the Gram matrix of the reflection form for positivity and, if it
/// fails, turns the offending eigenvector into an element `A = Σ w_𝔍 C_𝔍`.
pub fn rp_oracle(
    h: &AlgebraElement,
    beta: f64,
    rep: &Representation,
    twist: TwistChoice,
    functional: Functional,
    tol: f64,
) -> Result<RpReport<AlgebraElement>> {
    let r = rep.boltzmann_matrix(h, beta)?;
    let z = rep.normalized_trace(&r);
    let norm = match functional {
        Functional::Boltzmann => Complex64::new(1.0, 0.0),
        Functional::Gibbs => {
            check_normalization(z)?;
            z
        }
    };
    let g = gram_from_density(rep, twist, &r);
    let gram = g.matrix.scale(norm.inv());
    let certificate = psd_check(&HermMatrix::new(gram.clone())?, tol)?;
    let lat = rep.lattice();
    let witness = certificate.witness.as_ref().map(|w| {
        AlgebraElement::from_terms(
            lat,
            g.labels.iter().zip(w).map(|(idx, &c)| (idx.word(lat), c)),
        )
    });
    let witness_value = witness.as_ref().map(|a| {
        let form = twisted_product(&reflect(a), a, twist).expect("same lattice");
        (trace_against(&form, &r, rep) / norm).re
    });
    Ok(RpReport {
        provenance: Provenance::Oracle,
        beta,
        functional,
        labels: g.labels.iter().map(|l| l.render(lat)).collect(),
        gram,
        partition_function: z,
        certificate,
        witness,
        witness_value,
    })
}
