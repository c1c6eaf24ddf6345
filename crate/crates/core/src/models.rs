//! Spin models on cubic lattices reflected in the plane `x₀ = 0`.
//!
//! Coordinates are half-integers; internally they are stored doubled, so
//! every coordinate is an odd integer.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Side, MAX_SITES};
use crate::linalg::CMatrix;
use crate::spin::{extract_spin_couplings, GaugeAssignment, PauliString, SpinCouplings, SpinElement, SpinReflection};

/// `{−L−½, …, L+½}^d` with the reflection `x₀ ↦ −x₀`.
#[derive(Debug, Clone)]
pub struct CubicLattice {
    dim: usize,
    half_extent: usize,
    /// Doubled coordinates, indexed by global site bit.
    coords: Vec<Vec<i64>>,
    lattice: Arc<Lattice>,
}

fn format_coords(c: &[i64]) -> String {
    c.iter()
        .map(|&v| format!("{}", v as f64 / 2.0))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn build_cubic(dim: usize, half_extent: usize) -> Result<CubicLattice> {
    if dim == 0 {
        return Err(Error::Config("cubic lattice needs dimension d ≥ 1".into()));
    }
    let side = 2 * half_extent + 2;
    let total = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total > MAX_SITES as u128 {
        return Err(Error::SizeCap {
            what: "sites of the cubic lattice",
            actual: total.min(usize::MAX as u128) as usize,
            limit: MAX_SITES,
        });
    }
    let values: Vec<i64> = (0..side as i64).map(|t| 2 * t - (side as i64 - 1)).collect();
    let mut plus: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in 0..dim {
        let mut next = Vec::new();
        for p in &plus {
            for &v in &values {
                if axis == 0 && v < 0 {
                    continue;
                }
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        plus = next;
    }
    plus.sort();
    let mirror = |c: &Vec<i64>| {
        let mut m = c.clone();
        m[0] = -m[0];
        m
    };
    let lattice = Arc::new(Lattice::from_pairs(
        plus.iter().map(|c| (format_coords(c), format_coords(&mirror(c)))),
    )?);
    let mut coords = vec![Vec::new(); lattice.len()];
    for (k, c) in plus.iter().enumerate() {
        coords[lattice.minus_bit(k) as usize] = mirror(c);
        coords[lattice.plus_bit(k) as usize] = c.clone();
    }
    Ok(CubicLattice {
        dim,
        half_extent,
        coords,
        lattice,
    })
}

impl CubicLattice {
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> usize {
        self.half_extent
    }

    pub fn coords(&self, bit: u32) -> Vec<f64> {
        self.coords[bit as usize].iter().map(|&v| v as f64 / 2.0).collect()
    }

    /// Unordered nearest-neighbour pairs, as global bits with `a < b`.
    pub fn bonds(&self) -> Vec<(u32, u32)> {
        let n = self.coords.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let d: i64 = self.coords[a]
                    .iter()
                    .zip(&self.coords[b])
                    .map(|(x, y)| (x - y).abs())
                    .sum();
                if d == 2 {
                    out.push((a as u32, b as u32));
                }
            }
        }
        out
    }

    /// Bonds with one end on each side of the plane.
    pub fn crossing_bonds(&self) -> Vec<(u32, u32)> {
        self.bonds()
            .into_iter()
            .filter(|&(a, b)| self.lattice.side(a) != self.lattice.side(b))
            .collect()
    }

    /// `‖x − x'‖`
    pub fn distance(&self, a: u32, b: u32) -> f64 {
        self.coords[a as usize]
            .iter()
            .zip(&self.coords[b as usize])
            .map(|(x, y)| ((x - y) as f64 / 2.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `σ³σ³` bonds
    Ising,
    /// `σ¹σ¹ + σ²σ²` bonds
    Rotator,
    Heisenberg,
    /// All pairs with weight `‖x − x'‖^{−s}`.
    LongRange,
}

/// The reflection a model is declared invariant under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelReflection {
    /// `Θ(σ^a_j) = −σ^a_{ϑ(j)}`
    #[default]
    Standard,
    /// `Θ'` of the gauge `e^{±iπ/4 σ³}`: flips only `σ³`.
    Ferro,
}

impl ModelReflection {
    pub fn spin_reflection(self, lattice: &Arc<Lattice>) -> SpinReflection {
        match self {
            ModelReflection::Standard => SpinReflection::Standard,
            ModelReflection::Ferro => SpinReflection::Gauge(GaugeAssignment::ferro(lattice)),
        }
    }

    /// Required `h^a_{ϑ(j)} / h^a_j` for `a = 1, 2, 3`.
    fn field_parity(self) -> [f64; 3] {
        match self {
            ModelReflection::Standard => [-1.0, -1.0, -1.0],
            ModelReflection::Ferro => [1.0, 1.0, -1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondSpec {
    pub sites: [String; 2],
    pub j: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteField {
    pub site: String,
    pub h: [f64; 3],
}

/// External field `Σ h^a_j σ^a_j`, the sum of the three parts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSpec {
    /// `h_j = h` on every site.
    pub uniform: [f64; 3],
    /// `h_j = h` on `Λ₊` and `−h` on `Λ₋`.
    pub staggered: [f64; 3],
    pub sites: Vec<SiteField>,
}

/// `−H = Σ_a Σ_{⟨jj'⟩} J^a_{jj'} σ^a_j σ^a_{j'} + Σ_a Σ_j h^a_j σ^a_j`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// `J^a` on every bond.
    pub coupling: [f64; 3],
    /// `J^a` on bonds crossing the plane, when different.
    #[serde(default)]
    pub crossing: Option<[f64; 3]>,
    /// Individual bond couplings, replacing the above.
    #[serde(default)]
    pub bonds: Vec<BondSpec>,
    #[serde(default)]
    pub field: FieldSpec,
    /// Exponent `s` of `f(x) = ‖x‖^{−s}`.
    #[serde(default)]
    pub exponent: Option<f64>,
    #[serde(default)]
    pub reflection: ModelReflection,
}

impl ModelSpec {
    fn base(kind: ModelKind, coupling: [f64; 3]) -> Self {
        Self {
            kind,
            coupling,
            crossing: None,
            bonds: Vec::new(),
            field: FieldSpec::default(),
            exponent: None,
            reflection: ModelReflection::Standard,
        }
    }

    pub fn ising(j: f64) -> Self {
        Self::base(ModelKind::Ising, [0.0, 0.0, j])
    }

    pub fn rotator(j: f64) -> Self {
        Self::base(ModelKind::Rotator, [j, j, 0.0])
    }

    pub fn heisenberg(j: f64) -> Self {
        Self::base(ModelKind::Heisenberg, [j, j, j])
    }

    pub fn long_range(j: [f64; 3], s: f64) -> Self {
        Self {
            exponent: Some(s),
            ..Self::base(ModelKind::LongRange, j)
        }
    }

    pub fn with_reflection(mut self, r: ModelReflection) -> Self {
        self.reflection = r;
        self
    }

    pub fn with_field(mut self, field: FieldSpec) -> Self {
        self.field = field;
        self
    }
}

fn allowed_axes(kind: ModelKind) -> [bool; 3] {
    match kind {
        ModelKind::Ising => [false, false, true],
        ModelKind::Rotator => [true, true, false],
        ModelKind::Heisenberg | ModelKind::LongRange => [true, true, true],
    }
}

fn check_axes(kind: ModelKind, j: &[f64; 3], what: &str) -> Result<()> {
    for (a, (&ok, &v)) in allowed_axes(kind).iter().zip(j).enumerate() {
        if !ok && v != 0.0 {
            return Err(Error::Config(format!(
                "{kind:?} model has σ{}σ{} coupling {v} in {what}",
                a + 1,
                a + 1
            )));
        }
        if !v.is_finite() {
            return Err(Error::Config(format!("non-finite coupling {v} in {what}")));
        }
    }
    Ok(())
}

fn site_bit(lat: &Lattice, label: &str) -> Result<u32> {
    lat.bit_of(label)
        .ok_or_else(|| Error::Config(format!("unknown site {label:?}; sites are {:?}", lat.ordered_labels())))
}

/// Bond couplings keyed by `(a, b)` with `a < b`.
fn bond_couplings(spec: &ModelSpec, cubic: &CubicLattice) -> Result<BTreeMap<(u32, u32), [f64; 3]>> {
    let lat = cubic.lattice();
    check_axes(spec.kind, &spec.coupling, "coupling")?;
    let mut out = BTreeMap::new();
    if spec.kind == ModelKind::LongRange {
        if spec.crossing.is_some() || !spec.bonds.is_empty() {
            return Err(Error::Config("long-range models take a single coupling J^a".into()));
        }
        let s = spec
            .exponent
            .ok_or_else(|| Error::Config("long-range model needs an exponent s".into()))?;
        if !s.is_finite() || s < 0.0 {
            return Err(Error::Config(format!("exponent s = {s} must be finite and ≥ 0")));
        }
        let n = lat.len() as u32;
        for a in 0..n {
            for b in a + 1..n {
                let f = cubic.distance(a, b).powf(-s);
                out.insert((a, b), spec.coupling.map(|j| j * f));
            }
        }
        return Ok(out);
    }
    if spec.exponent.is_some() {
        return Err(Error::Config("exponent s applies to long-range models only".into()));
    }
    let crossing = spec.crossing.unwrap_or(spec.coupling);
    check_axes(spec.kind, &crossing, "crossing")?;
    for (a, b) in cubic.bonds() {
        let j = if lat.side(a) != lat.side(b) { crossing } else { spec.coupling };
        out.insert((a, b), j);
    }
    for bond in &spec.bonds {
        check_axes(spec.kind, &bond.j, "bond")?;
        let a = site_bit(lat, &bond.sites[0])?;
        let b = site_bit(lat, &bond.sites[1])?;
        let key = (a.min(b), a.max(b));
        if !out.contains_key(&key) {
            return Err(Error::Config(format!(
                "sites {} and {} are not nearest neighbours",
                bond.sites[0], bond.sites[1]
            )));
        }
        out.insert(key, bond.j);
    }
    Ok(out)
}

fn site_fields(spec: &ModelSpec, cubic: &CubicLattice) -> Result<Vec<[f64; 3]>> {
    let lat = cubic.lattice();
    let mut h = vec![[0.0; 3]; lat.len()];
    for (bit, hb) in h.iter_mut().enumerate() {
        let sign = if lat.side(bit as u32) == Side::Plus { 1.0 } else { -1.0 };
        for a in 0..3 {
            hb[a] = spec.field.uniform[a] + sign * spec.field.staggered[a];
        }
    }
    for sf in &spec.field.sites {
        let b = site_bit(lat, &sf.site)?;
        for a in 0..3 {
            h[b as usize][a] += sf.h[a];
        }
    }
    for (b, hb) in h.iter().enumerate() {
        if hb.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite field at {}", lat.label(b as u32))));
        }
    }
    Ok(h)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Checks the declared symmetries: `J^a_{jj'} = J^a_{ϑ(j)ϑ(j')}` and the
/// field parity of the declared reflection.
pub fn check_model_symmetry(spec: &ModelSpec, cubic: &CubicLattice) -> Result<()> {
    let lat = cubic.lattice();
    let bonds = bond_couplings(spec, cubic)?;
    for (&(a, b), j) in &bonds {
        let (ma, mb) = (lat.mirror_bit(a), lat.mirror_bit(b));
        let mirrored = bonds.get(&(ma.min(mb), ma.max(mb))).copied().unwrap_or([0.0; 3]);
        if let Some(x) = (0..3).find(|&x| !close(j[x], mirrored[x])) {
            return Err(Error::SymmetryViolation {
                site: format!("{}-{}", lat.label(a), lat.label(b)),
                mirror: format!("{}-{}", lat.label(ma), lat.label(mb)),
                detail: format!(
                    "J{} = {} but the mirrored bond has {}",
                    x + 1,
                    j[x],
                    mirrored[x]
                ),
            });
        }
    }
    let h = site_fields(spec, cubic)?;
    let parity = spec.reflection.field_parity();
    for k in 0..lat.half() {
        let (p, m) = (lat.plus_bit(k), lat.minus_bit(k));
        for a in 0..3 {
            let (hp, hm) = (h[p as usize][a], h[m as usize][a]);
            if !close(hm, parity[a] * hp) {
                let rule = if parity[a] > 0.0 { "symmetric" } else { "antisymmetric" };
                return Err(Error::SymmetryViolation {
                    site: lat.label(p).to_string(),
                    mirror: lat.label(m).to_string(),
                    detail: format!(
                        "field h{} must be {rule} under the {:?} reflection, got {hp} and {hm}",
                        a + 1,
                        spec.reflection
                    ),
                });
            }
        }
    }
    Ok(())
}

/// `H` as a spin element, after checking the declared symmetries.
pub fn model_hamiltonian(spec: &ModelSpec, cubic: &CubicLattice) -> Result<SpinElement> {
    check_model_symmetry(spec, cubic)?;
    let lat = cubic.lattice();
    let mut minus_h = SpinElement::zero(lat);
    for ((a, b), j) in bond_couplings(spec, cubic)? {
        for (x, &v) in j.iter().enumerate() {
            let letter = x as u8 + 1;
            let (sa, sb) = (PauliString::single(a, letter), PauliString::single(b, letter));
            let s = PauliString { x: sa.x | sb.x, z: sa.z | sb.z };
            minus_h.add_term(s, Complex64::new(v, 0.0));
        }
    }
    for (b, hb) in site_fields(spec, cubic)?.into_iter().enumerate() {
        for (x, &v) in hb.iter().enumerate() {
            minus_h.add_term(PauliString::single(b as u32, x as u8 + 1), Complex64::new(v, 0.0));
        }
    }
    Ok(-&minus_h)
}

pub fn build_model(spec: &ModelSpec, cubic: &CubicLattice) -> Result<SpinCouplings> {
    Ok(extract_spin_couplings(&model_hamiltonian(spec, cubic)?))
}

/// `f(ϑ(x) − x') = ‖ϑ(x) − x'‖^{−s}` for `x, x' ∈ Λ₊` in plus order.
pub fn f_matrix(cubic: &CubicLattice, s: f64) -> CMatrix {
    let lat = cubic.lattice();
    let m = lat.half();
    CMatrix::from_fn(m, m, |i, j| {
        Complex64::new(cubic.distance(lat.minus_bit(i), lat.plus_bit(j)).powf(-s), 0.0)
    })
}
