use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;

use super::couplings::spin_basis;
use super::pauli::{spin_reflect, PauliString, SpinElement};
use crate::clifford::same_lattice;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Side};
use crate::linalg::CMatrix;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `σ⁰ = I, σ¹, σ², σ³`
pub fn pauli_matrix(a: u8) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    match a {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -i], [i, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index must be 0..=3, got {a}"),
    }
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn det2(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn adjoint2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn max_abs2(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn inverse2(a: &Mat2) -> Result<Mat2> {
    let d = det2(a);
    let scale = max_abs2(a);
    if !(d.norm() > 1e-14 * scale * scale) {
        return Err(Error::Config(format!("gauge matrix {a:?} is singular")));
    }
    Ok([[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]])
}

/// `e^{iθ σ³}`
pub fn sigma3_rotation(theta: f64) -> Mat2 {
    [[Complex64::from_polar(1.0, theta), ZERO], [ZERO, Complex64::from_polar(1.0, -theta)]]
}

/// Pauli coefficients of `g σ^a g⁻¹` for `a = 1, 2, 3`, indexed by the
/// output letter `0..=3`.
type Images = [[Complex64; 4]; 3];

fn conjugation_images(g: &Mat2, ginv: &Mat2) -> Images {
    let mut out = [[ZERO; 4]; 3];
    for a in 1..=3u8 {
        let m = mul2(&mul2(g, &pauli_matrix(a)), ginv);
        let row = &mut out[a as usize - 1];
        for b in 0..=3u8 {
            let p = mul2(&pauli_matrix(b), &m);
            row[b as usize] = (p[0][0] + p[1][1]) * 0.5;
        }
        // drop round-off so exact relations survive
        let top = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in row.iter_mut() {
            if z.re.abs() <= 1e-15 * top {
                z.re = 0.0;
            }
            if z.im.abs() <= 1e-15 * top {
                z.im = 0.0;
            }
        }
    }
    out
}

/// Sitewise conjugation `α_g(σ^a_j) = g_j σ^a_j g_j⁻¹`.
#[derive(Debug, Clone)]
pub struct GaugeAssignment {
    lattice: Arc<Lattice>,
    g: Vec<Mat2>,
    forward: Vec<Images>,
    backward: Vec<Images>,
}

impl GaugeAssignment {
    /// One matrix per site, indexed by global site bit.
    pub fn new(lattice: &Arc<Lattice>, per_site: Vec<Mat2>) -> Result<Self> {
        if per_site.len() != lattice.len() {
            return Err(Error::Config(format!(
                "gauge assignment has {} matrices for {} sites",
                per_site.len(),
                lattice.len()
            )));
        }
        let mut forward = Vec::with_capacity(per_site.len());
        let mut backward = Vec::with_capacity(per_site.len());
        for g in &per_site {
            let ginv = inverse2(g)?;
            forward.push(conjugation_images(g, &ginv));
            backward.push(conjugation_images(&ginv, g));
        }
        Ok(Self {
            lattice: Arc::clone(lattice),
            g: per_site,
            forward,
            backward,
        })
    }

    /// Matrices on `Λ₊` in plus order; `Λ₋` receives `g_{ϑ(j)} = g_j*`.
    pub fn from_plus(lattice: &Arc<Lattice>, plus: &[Mat2]) -> Result<Self> {
        if plus.len() != lattice.half() {
            return Err(Error::Config(format!(
                "gauge assignment has {} matrices for {} sites in Λ+",
                plus.len(),
                lattice.half()
            )));
        }
        let mut per_site = vec![pauli_matrix(0); lattice.len()];
        for (k, g) in plus.iter().enumerate() {
            per_site[lattice.plus_bit(k) as usize] = *g;
            per_site[lattice.minus_bit(k) as usize] = adjoint2(g);
        }
        Self::new(lattice, per_site)
    }

    /// `g_j = e^{iπ/4 σ³}` on `Λ₊`, `e^{−iπ/4 σ³}` on `Λ₋`.
    pub fn ferro(lattice: &Arc<Lattice>) -> Self {
        let plus = vec![sigma3_rotation(FRAC_PI_4); lattice.half()];
        Self::from_plus(lattice, &plus).expect("unitary gauge")
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Self {
        Self::new(lattice, vec![pauli_matrix(0); lattice.len()]).expect("identity gauge")
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn matrix(&self, bit: u32) -> &Mat2 {
        &self.g[bit as usize]
    }

    /// Whether `g_{ϑ(j)}` is a nonzero multiple of `g_j*` for every `j`.
    pub fn is_reflection_compatible(&self, rel: f64) -> bool {
        (0..self.lattice.len() as u32)
            .filter(|&b| self.lattice.side(b) == Side::Plus)
            .all(|b| {
                let a = adjoint2(&self.g[b as usize]);
                let m = &self.g[self.lattice.mirror_bit(b) as usize];
                let scale = max_abs2(&a) * max_abs2(m);
                let flat_a: Vec<Complex64> = a.iter().flatten().copied().collect();
                let flat_m: Vec<Complex64> = m.iter().flatten().copied().collect();
                (0..4).all(|p| {
                    (0..4).all(|q| (flat_m[p] * flat_a[q] - flat_m[q] * flat_a[p]).norm() <= rel * scale)
                })
            })
    }

    fn apply_with(&self, x: &SpinElement, tables: &[Images]) -> SpinElement {
        let mut out = SpinElement::zero(&self.lattice);
        for (s, amp) in x.terms() {
            let mut partial = vec![(PauliString::IDENTITY, amp)];
            for (bit, a) in s.letters() {
                let row = &tables[bit as usize][a as usize - 1];
                let mut next = Vec::with_capacity(partial.len() * 4);
                for &(p, z) in &partial {
                    for (b, &c) in row.iter().enumerate() {
                        if c == ZERO {
                            continue;
                        }
                        let t = if b == 0 {
                            PauliString::IDENTITY
                        } else {
                            PauliString::single(bit, b as u8)
                        };
                        next.push((PauliString { x: p.x | t.x, z: p.z | t.z }, z * c));
                    }
                }
                partial = next;
            }
            for (p, z) in partial {
                out.add_term(p, z);
            }
        }
        out
    }

    /// `α_g(x)`
    pub fn transform(&self, x: &SpinElement) -> SpinElement {
        assert!(same_lattice(&self.lattice, x.lattice()), "lattice mismatch");
        self.apply_with(x, &self.forward)
    }

    /// `α_g⁻¹(x)`
    pub fn inverse_transform(&self, x: &SpinElement) -> SpinElement {
        assert!(same_lattice(&self.lattice, x.lattice()), "lattice mismatch");
        self.apply_with(x, &self.backward)
    }

    /// Matrix of `α_g` on the strings over `Λ₊`, in [`spin_basis`] order:
    /// `α_g(Σ_L) = Σ_K T_{KL} Σ_K`.
    pub fn transfer_matrix(&self) -> CMatrix {
        let lat = &self.lattice;
        let labels = spin_basis(lat);
        let images: Vec<SpinElement> = labels
            .iter()
            .map(|l| self.transform(&SpinElement::string(lat, l.string(lat), ONE)))
            .collect();
        CMatrix::from_fn(labels.len(), labels.len(), |k, l| {
            images[l].coefficient(labels[k].string(lat))
        })
    }
}

pub fn gauge_transform(g: &GaugeAssignment, x: &SpinElement) -> Result<SpinElement> {
    if !same_lattice(g.lattice(), x.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    Ok(g.transform(x))
}

/// A reflection of the spin algebra.
#[derive(Debug, Clone)]
pub enum SpinReflection {
    /// `Θ(σ^a_j) = −σ^a_{ϑ(j)}`
    Standard,
    /// `Θ' = α_g⁻¹ Θ α_g`
    Gauge(GaugeAssignment),
}

impl SpinReflection {
    pub fn apply(&self, x: &SpinElement) -> SpinElement {
        match self {
            SpinReflection::Standard => spin_reflect(x),
            SpinReflection::Gauge(g) => g.inverse_transform(&spin_reflect(&g.transform(x))),
        }
    }
}

/// `Θ' = α_g⁻¹ Θ α_g`, provided `g_{ϑ(j)} ∝ g_j*`.
pub fn reflected_by(g: &GaugeAssignment) -> Result<SpinReflection> {
    if !g.is_reflection_compatible(1e-12) {
        return Err(Error::Config(
            "gauge assignment violates g(ϑ(j)) = g(j)* and does not define a reflection".into(),
        ));
    }
    Ok(SpinReflection::Gauge(g.clone()))
}
