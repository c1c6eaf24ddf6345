//! TOML run configurations and their translation into core objects.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rp_core::hamiltonian::{build_hamiltonian, CouplingMatrix};
use rp_core::matrix_rep::Functional;
use rp_core::models::{build_cubic, build_model, model_hamiltonian, ModelKind, ModelReflection, ModelSpec};
use rp_core::random::{random_majorana_couplings, random_spin_couplings, J0Kind};
use rp_core::spin::{
    build_spin_hamiltonian, reflected_by, sigma3_rotation, GaugeAssignment, Mat2, SpinCouplings, SpinElement,
    SpinLabel, SpinReflection,
};
use rp_core::{AlgebraElement, BasisIndex, Lattice, TwistChoice};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    Majorana,
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Criterion,
    Oracle,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Boltzmann,
    #[default]
    Gibbs,
}

impl From<FunctionalKind> for Functional {
    fn from(f: FunctionalKind) -> Self {
        match f {
            FunctionalKind::Boltzmann => Functional::Boltzmann,
            FunctionalKind::Gibbs => Functional::Gibbs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Zeta {
    #[serde(rename = "+i", alias = "i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl Zeta {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "+i" | "i" => Ok(Zeta::PlusI),
            "-i" => Ok(Zeta::MinusI),
            other => Err(CliError::Config(format!("zeta must be +i or -i, got {other:?}"))),
        }
    }
}

impl From<Zeta> for TwistChoice {
    fn from(z: Zeta) -> Self {
        match z {
            Zeta::PlusI => TwistChoice::PlusI,
            Zeta::MinusI => TwistChoice::MinusI,
        }
    }
}

/// A complex number, written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex([f64; 2]),
}

impl Value {
    pub fn complex(self) -> Complex64 {
        match self {
            Value::Real(x) => Complex64::new(x, 0.0),
            Value::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Lattice given by one of: a number of `+` sites, explicit mirror pairs, or
/// a site list with an involution map and a `+` side.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub plus_sites: Option<usize>,
    pub pairs: Option<Vec<[String; 2]>>,
    pub sites: Option<Vec<String>>,
    pub involution: Option<BTreeMap<String, String>>,
    pub plus: Option<Vec<String>>,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice, CliError> {
        let explicit = self.sites.is_some() || self.involution.is_some() || self.plus.is_some();
        let given = [self.plus_sites.is_some(), self.pairs.is_some(), explicit];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Config(
                "[lattice] needs exactly one of plus_sites, pairs, or sites/involution/plus".into(),
            ));
        }
        if let Some(m) = self.plus_sites {
            return Ok(Lattice::with_plus_sites(m)?);
        }
        if let Some(pairs) = &self.pairs {
            return Ok(Lattice::from_pairs(pairs.iter().map(|[p, m]| (p.clone(), m.clone())))?);
        }
        let missing = |what: &str| CliError::Config(format!("[lattice] is missing {what}"));
        let sites = self.sites.as_ref().ok_or_else(|| missing("sites"))?;
        let involution = self.involution.as_ref().ok_or_else(|| missing("involution"))?;
        let plus = self.plus.as_ref().ok_or_else(|| missing("plus"))?;
        Ok(Lattice::from_involution(sites, involution, plus)?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicSpec {
    pub dim: usize,
    pub half_extent: usize,
}

/// One coupling entry `J[row][col]`. Rows and columns are sets of `+` site
/// labels; spin entries also carry one Pauli letter per site.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingRecord {
    #[serde(default)]
    pub row: Vec<String>,
    #[serde(default)]
    pub col: Vec<String>,
    #[serde(default)]
    pub row_letters: Vec<u8>,
    #[serde(default)]
    pub col_letters: Vec<u8>,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Psd,
    Negative,
}

/// Random reflection invariant couplings on the configured lattice.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    pub kind: RandomKind,
    #[serde(default = "default_upper")]
    pub upper: f64,
}

fn default_upper() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionKind {
    #[default]
    Standard,
    Ferro,
    Gauge,
}

/// `g_j` for one `+` site, either a full matrix `[[a, b], [c, d]]` of complex
/// entries or the rotation `e^{iθσ³}`. The mirror site gets `g_j*`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSite {
    pub site: String,
    pub matrix: Option<[[Value; 2]; 2]>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    #[serde(default)]
    pub site: Vec<GaugeSite>,
}

fn default_beta() -> Vec<f64> {
    vec![0.01, 0.1, 1.0]
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub algebra: Option<AlgebraKind>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub functional: FunctionalKind,
    pub zeta: Option<Zeta>,
    pub reflection: Option<ReflectionKind>,
    pub lattice: Option<LatticeSpec>,
    pub cubic: Option<CubicSpec>,
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub coupling: Vec<CouplingRecord>,
    pub random: Option<RandomSpec>,
    pub gauge: Option<GaugeSpec>,
}

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub beta: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub zeta: Option<Zeta>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(b) = &o.beta {
            self.beta = b.clone();
        }
        if let Some(t) = o.tolerance {
            self.tolerance = t;
        }
        if let Some(z) = o.zeta {
            self.zeta = Some(z);
        }
    }

    pub fn algebra(&self) -> AlgebraKind {
        match (self.algebra, &self.model) {
            (Some(a), _) => a,
            (None, Some(_)) => AlgebraKind::Spin,
            (None, None) => AlgebraKind::Majorana,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.beta.is_empty() {
            return Err(CliError::Config("beta list is empty".into()));
        }
        if let Some(b) = self.beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(CliError::Config(format!("beta = {b} must be finite and ≥ 0")));
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            return Err(CliError::Config(format!("tolerance {} must be finite and ≥ 0", self.tolerance)));
        }
        let sources = [self.model.is_some(), !self.coupling.is_empty(), self.random.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::Config(
                "give exactly one of [model], [[coupling]] entries or [random]".into(),
            ));
        }
        if self.model.is_some() {
            if self.algebra() != AlgebraKind::Spin {
                return Err(CliError::Config("[model] describes a spin system; set algebra = \"spin\"".into()));
            }
            if self.cubic.is_none() || self.lattice.is_some() {
                return Err(CliError::Config("[model] needs a [cubic] lattice and no [lattice] table".into()));
            }
            if self.reflection.is_some() || self.gauge.is_some() {
                return Err(CliError::Config("set the reflection of a model inside [model]".into()));
            }
        } else if self.lattice.is_none() || self.cubic.is_some() {
            return Err(CliError::Config("explicit couplings need a [lattice] table and no [cubic]".into()));
        }
        if self.algebra() == AlgebraKind::Majorana && (self.reflection.is_some() || self.gauge.is_some()) {
            return Err(CliError::Config("reflection and [gauge] apply to spin systems only".into()));
        }
        if self.reflection == Some(ReflectionKind::Gauge) && self.gauge.is_none() {
            return Err(CliError::Config("reflection = \"gauge\" needs a [gauge] table".into()));
        }
        if self.gauge.is_some() && self.reflection != Some(ReflectionKind::Gauge) {
            return Err(CliError::Config("a [gauge] table needs reflection = \"gauge\"".into()));
        }
        Ok(())
    }

    /// Validates the configuration and assembles the Hamiltonian.
    pub fn problem(&self) -> Result<Problem, CliError> {
        self.validate()?;
        match self.algebra() {
            AlgebraKind::Majorana => self.majorana_problem(),
            AlgebraKind::Spin => self.spin_problem(),
        }
    }

    fn twist(&self) -> TwistChoice {
        self.zeta.unwrap_or(Zeta::PlusI).into()
    }

    fn majorana_problem(&self) -> Result<Problem, CliError> {
        let lat = Arc::new(self.lattice.as_ref().expect("validated").build()?);
        let twist = self.twist();
        let couplings = if let Some(r) = self.random {
            random_majorana_couplings(&mut ChaCha8Rng::seed_from_u64(r.seed), &lat, twist, r.j0_kind())?
        } else {
            let mut j = CouplingMatrix::new(&lat, twist);
            for (k, rec) in self.coupling.iter().enumerate() {
                if !rec.row_letters.is_empty() || !rec.col_letters.is_empty() {
                    return Err(CliError::Config(format!("coupling {k}: Pauli letters need algebra = \"spin\"")));
                }
                let row = BasisIndex::from_tuple(&plus_positions(&lat, &rec.row, k)?);
                let col = BasisIndex::from_tuple(&plus_positions(&lat, &rec.col, k)?);
                j.add(row, col, rec.value.complex());
            }
            j
        };
        let hamiltonian = build_hamiltonian(&couplings);
        Ok(Problem::Majorana(MajoranaProblem { couplings, hamiltonian }))
    }

    fn spin_problem(&self) -> Result<Problem, CliError> {
        if let Some(model) = &self.model {
            let c = self.cubic.expect("validated");
            let cubic = build_cubic(c.dim, c.half_extent)?;
            let hamiltonian = model_hamiltonian(model, &cubic)?;
            let couplings = build_model(model, &cubic)?;
            let lat = cubic.lattice().clone();
            let gauge = match model.reflection {
                ModelReflection::Standard => None,
                ModelReflection::Ferro => Some(GaugeAssignment::ferro(&lat)),
            };
            let f_matrix = (model.kind == ModelKind::LongRange)
                .then(|| rp_core::models::f_matrix(&cubic, model.exponent.unwrap_or(0.0)));
            return Ok(Problem::Spin(SpinProblem::new(lat, couplings, hamiltonian, gauge, f_matrix)?));
        }
        let lat = Arc::new(self.lattice.as_ref().expect("validated").build()?);
        let couplings = if let Some(r) = self.random {
            random_spin_couplings(&mut ChaCha8Rng::seed_from_u64(r.seed), &lat, r.j0_kind())?
        } else {
            let mut j = SpinCouplings::new(&lat);
            for (k, rec) in self.coupling.iter().enumerate() {
                let row = spin_label(&lat, &rec.row, &rec.row_letters, k)?;
                let col = spin_label(&lat, &rec.col, &rec.col_letters, k)?;
                j.add(row, col, rec.value.complex());
            }
            j
        };
        let hamiltonian = build_spin_hamiltonian(&couplings);
        let gauge = match self.reflection.unwrap_or_default() {
            ReflectionKind::Standard => None,
            ReflectionKind::Ferro => Some(GaugeAssignment::ferro(&lat)),
            ReflectionKind::Gauge => Some(gauge_assignment(&lat, self.gauge.as_ref().expect("validated"))?),
        };
        Ok(Problem::Spin(SpinProblem::new(lat, couplings, hamiltonian, gauge, None)?))
    }
}

impl RandomSpec {
    fn j0_kind(&self) -> J0Kind {
        match self.kind {
            RandomKind::Psd => J0Kind::Psd,
            RandomKind::Negative => J0Kind::Negative { upper: self.upper },
        }
    }
}

fn plus_positions(lat: &Lattice, labels: &[String], record: usize) -> Result<Vec<usize>, CliError> {
    let mut seen = BTreeSet::new();
    labels
        .iter()
        .map(|l| {
            let pos = lat
                .plus_labels()
                .iter()
                .position(|p| p == l)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "coupling {record}: {l:?} is not a + site; + sites are {:?}",
                        lat.plus_labels()
                    ))
                })?;
            if !seen.insert(pos) {
                return Err(CliError::Config(format!("coupling {record}: site {l:?} repeated")));
            }
            Ok(pos)
        })
        .collect()
}

fn spin_label(lat: &Lattice, labels: &[String], letters: &[u8], record: usize) -> Result<SpinLabel, CliError> {
    if labels.len() != letters.len() {
        return Err(CliError::Config(format!(
            "coupling {record}: {} sites but {} Pauli letters",
            labels.len(),
            letters.len()
        )));
    }
    let pos = plus_positions(lat, labels, record)?;
    let pairs: Vec<(usize, u8)> = pos.into_iter().zip(letters.iter().copied()).collect();
    SpinLabel::new(&pairs).map_err(|e| CliError::Config(format!("coupling {record}: {e}")))
}

fn gauge_assignment(lat: &Arc<Lattice>, spec: &GaugeSpec) -> Result<GaugeAssignment, CliError> {
    let identity = rp_core::spin::pauli_matrix(0);
    let mut plus: Vec<Mat2> = vec![identity; lat.half()];
    let mut seen = BTreeSet::new();
    for s in &spec.site {
        let pos = plus_positions(lat, std::slice::from_ref(&s.site), 0)
            .map_err(|_| CliError::Config(format!("gauge site {:?} is not a + site", s.site)))?[0];
        if !seen.insert(pos) {
            return Err(CliError::Config(format!("gauge site {:?} given twice", s.site)));
        }
        plus[pos] = match (s.matrix, s.theta) {
            (Some(m), None) => m.map(|row| row.map(Value::complex)),
            (None, Some(theta)) => sigma3_rotation(theta),
            _ => {
                return Err(CliError::Config(format!(
                    "gauge site {:?} needs exactly one of matrix or theta",
                    s.site
                )))
            }
        };
    }
    Ok(GaugeAssignment::from_plus(lat, &plus)?)
}

#[derive(Debug, Clone)]
pub struct MajoranaProblem {
    pub couplings: CouplingMatrix,
    pub hamiltonian: AlgebraElement,
}

#[derive(Debug, Clone)]
pub struct SpinProblem {
    pub lattice: Arc<Lattice>,
    pub couplings: SpinCouplings,
    pub hamiltonian: SpinElement,
    /// `g` of `Θ' = α_g⁻¹ Θ α_g`; `None` for the standard reflection.
    pub gauge: Option<GaugeAssignment>,
    pub reflection: SpinReflection,
    /// `f(ϑ(x) − x')` for long-range models.
    pub f_matrix: Option<rp_core::linalg::CMatrix>,
}

impl SpinProblem {
    fn new(
        lattice: Arc<Lattice>,
        couplings: SpinCouplings,
        hamiltonian: SpinElement,
        gauge: Option<GaugeAssignment>,
        f_matrix: Option<rp_core::linalg::CMatrix>,
    ) -> Result<Self, CliError> {
        let reflection = match &gauge {
            None => SpinReflection::Standard,
            Some(g) => reflected_by(g)?,
        };
        Ok(Self {
            lattice,
            couplings,
            hamiltonian,
            gauge,
            reflection,
            f_matrix,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Problem {
    Majorana(MajoranaProblem),
    Spin(SpinProblem),
}

impl Problem {
    pub fn lattice(&self) -> &Arc<Lattice> {
        match self {
            Problem::Majorana(p) => p.couplings.lattice(),
            Problem::Spin(p) => &p.lattice,
        }
    }
}
