//! Run reports: a serializable record plus a plain-text rendering.

use std::fmt::Write as _;

use serde::Serialize;

use rp_core::matrix_rep::Functional;

use crate::config::{AlgebraKind, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Reflection positive.
    Rp,
    /// Not reflection positive; a witness is reported.
    NotRp,
    /// Criterion and oracle disagree.
    Disagreement,
}

impl Verdict {
    pub fn from_psd(psd: bool) -> Self {
        if psd {
            Verdict::Rp
        } else {
            Verdict::NotRp
        }
    }

    /// Process exit status: 0 certified, 2 refuted, 1 otherwise.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Rp => 0,
            Verdict::NotRp => 2,
            Verdict::Disagreement => 1,
        }
    }

    fn text(self) -> &'static str {
        match self {
            Verdict::Rp => "reflection positive",
            Verdict::NotRp => "NOT reflection positive",
            Verdict::Disagreement => "DISAGREEMENT between criterion and oracle",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertySummary {
    pub reflection_invariant: bool,
    /// Global gauge invariance; Majorana systems only.
    pub gauge_invariant: Option<bool>,
    pub hermitian: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionSection {
    pub verdict: Verdict,
    /// The matrix whose positivity is tested.
    pub matrix: &'static str,
    pub support: Vec<String>,
    pub min_eigenvalue: f64,
    pub eigenvalues: Vec<f64>,
    pub tolerance_used: f64,
    pub marginal: bool,
    pub energy_offset: Option<f64>,
    pub witness: Option<String>,
    /// Initial slope in `β` of the form on the witness.
    pub witness_slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub beta: f64,
    pub verdict: Verdict,
    pub dimension: usize,
    pub min_eigenvalue: f64,
    pub eigenvalues: Vec<f64>,
    pub tolerance_used: f64,
    pub partition_function: [f64; 2],
    pub witness: Option<String>,
    pub witness_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSection {
    pub f_matrix: Option<Vec<f64>>,
}

/// One row of the comparison between `Θ'` for `H` and `Θ` for `α_g(H)`.
#[derive(Debug, Clone, Serialize)]
pub struct TransportRow {
    pub beta: f64,
    pub gauged_min_eigenvalue: f64,
    pub transported_min_eigenvalue: f64,
    /// `max |T* G T − G'|` over all entries.
    pub gram_deviation: f64,
    pub verdicts_equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub name: String,
    pub algebra: AlgebraKind,
    pub mode: Mode,
    pub plus_sites: Vec<String>,
    pub minus_sites: Vec<String>,
    pub twist: Option<&'static str>,
    pub reflection: &'static str,
    pub functional: Functional,
    pub tolerance: f64,
    pub properties: PropertySummary,
    pub criterion: Option<CriterionSection>,
    pub oracle: Vec<OracleSection>,
    pub spectrum: Option<SpectrumSection>,
    pub transport: Vec<TransportRow>,
    pub agreement: Option<bool>,
    pub verdict: Verdict,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} [{}] {:?} system, mode {:?}", self.name, self.command, self.algebra, self.mode);
        let _ = writeln!(s, "  Λ+ = {{{}}}", self.plus_sites.join(", "));
        let _ = writeln!(s, "  Λ- = {{{}}}", self.minus_sites.join(", "));
        if let Some(t) = self.twist {
            let _ = writeln!(s, "  ζ = {t}");
        }
        let _ = writeln!(s, "  reflection: {}, functional: {:?}, tolerance {:e}", self.reflection, self.functional, self.tolerance);
        let p = &self.properties;
        let _ = write!(s, "  properties: reflection invariant {}, hermitian {}", yes(p.reflection_invariant), yes(p.hermitian));
        if let Some(gi) = p.gauge_invariant {
            let _ = write!(s, ", gauge invariant {}", yes(gi));
        }
        s.push('\n');
        if let Some(c) = &self.criterion {
            let _ = writeln!(s, "criterion: {} ≥ 0 on {} indices: {}", c.matrix, c.support.len(), c.verdict.text());
            let _ = writeln!(s, "  min eigenvalue {:.10} (threshold −{:e})", c.min_eigenvalue, c.tolerance_used);
            if let Some(e) = c.energy_offset {
                let _ = writeln!(s, "  energy offset E = {e}");
            }
            if self.spectrum.is_some() {
                let _ = writeln!(s, "  support: {}", c.support.join(" "));
                let _ = writeln!(s, "  eigenvalues: {}", list(&c.eigenvalues));
            }
            if let (Some(w), Some(slope)) = (&c.witness, c.witness_slope) {
                let _ = writeln!(s, "  witness A = {w}");
                let _ = writeln!(s, "  d/dβ ⟨A,A⟩ at β = 0: {slope:.10}");
            }
        }
        if !self.oracle.is_empty() {
            let _ = writeln!(s, "oracle: Gram matrix over {} basis elements", self.oracle[0].dimension);
            let _ = writeln!(s, "  {:>10}  {:>16}  {:>22}  verdict", "beta", "min eigenvalue", "Z");
            for o in &self.oracle {
                let _ = writeln!(
                    s,
                    "  {:>10}  {:>16.10}  {:>22}  {}",
                    o.beta,
                    o.min_eigenvalue,
                    format!("{:.8}{:+.2e}i", o.partition_function[0], o.partition_function[1]),
                    o.verdict.text()
                );
                if self.spectrum.is_some() {
                    let _ = writeln!(s, "    eigenvalues: {}", list(&o.eigenvalues));
                }
            }
            if let Some(o) = self.oracle.iter().find(|o| o.witness.is_some()) {
                let _ = writeln!(
                    s,
                    "  witness at beta {}: A = {} with ⟨A,A⟩ = {:.10}",
                    o.beta,
                    o.witness.as_deref().unwrap_or(""),
                    o.witness_value.unwrap_or(f64::NAN)
                );
            }
        }
        if let Some(SpectrumSection { f_matrix: Some(f) }) = &self.spectrum {
            let _ = writeln!(s, "f-matrix eigenvalues: {}", list(f));
        }
        if !self.transport.is_empty() {
            let _ = writeln!(s, "gauge transport: Θ' for H against Θ for α_g(H)");
            let _ = writeln!(s, "  {:>10}  {:>16}  {:>16}  {:>12}  equal", "beta", "min eig Θ'", "min eig Θ", "|T*GT - G'|");
            for t in &self.transport {
                let _ = writeln!(
                    s,
                    "  {:>10}  {:>16.10}  {:>16.10}  {:>12.3e}  {}",
                    t.beta,
                    t.gauged_min_eigenvalue,
                    t.transported_min_eigenvalue,
                    t.gram_deviation,
                    yes(t.verdicts_equal)
                );
            }
        }
        if let Some(a) = self.agreement {
            let _ = writeln!(s, "criterion and oracle agree: {}", yes(a));
        }
        let _ = writeln!(s, "verdict: {}", self.verdict.text());
        s
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{bundled, run, Command};

    #[test]
    fn exit_codes() {
        assert_eq!(Verdict::Rp.exit_code(), 0);
        assert_eq!(Verdict::NotRp.exit_code(), 2);
        assert_eq!(Verdict::Disagreement.exit_code(), 1);
        assert_eq!(Verdict::from_psd(false), Verdict::NotRp);
    }

    #[test]
    fn renderings_carry_the_verdict() {
        let report = run(&bundled::load("majorana_random_neg").unwrap(), Command::Spectrum).unwrap();
        let text = report.to_text();
        assert!(text.ends_with("verdict: NOT reflection positive\n"), "{text}");
        assert!(text.contains("witness A = "));
        assert!(text.contains("ζ = -i"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["verdict"], "not_rp");
        assert_eq!(json["twist"], "-i");
        assert_eq!(json["oracle"].as_array().unwrap().len(), 3);
    }
}
