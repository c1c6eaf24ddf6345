//! Executes a configuration and assembles the report.

use rp_core::hamiltonian::{check_properties, criterion};
use rp_core::linalg::{herm_eigen, HermMatrix};
use rp_core::matrix_rep::{rp_oracle, Functional, Representation, RpReport};
use rp_core::spin::{
    extract_spin_couplings, gauge_transform, reflection_symmetrized, spin_criterion, spin_properties,
    spin_properties_tol, spin_rp_oracle, SpinCouplings, SpinElement, SpinReflection,
};
use rp_core::{Error, TwistChoice};

use crate::config::{MajoranaProblem, Mode, Problem, RunConfig, SpinProblem};
use crate::report::{
    CriterionSection, OracleSection, PropertySummary, Report, SpectrumSection, TransportRow, Verdict,
};
use crate::CliError;

/// Relative tolerance for reflection invariance of gauge transported
/// couplings, which carry round-off from the conjugation.
const TRANSPORT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Runs the configured mode.
    Check,
    /// Oracle only.
    Oracle,
    /// As `Check`, listing all spectra.
    Spectrum,
    /// Both paths, plus the gauge transport table for gauged reflections.
    Demo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Oracle => "oracle",
            Command::Spectrum => "spectrum",
            Command::Demo => "demo",
        }
    }

    fn mode(self, configured: Mode) -> Mode {
        match self {
            Command::Oracle => Mode::Oracle,
            Command::Demo => Mode::Both,
            Command::Check | Command::Spectrum => configured,
        }
    }
}

pub fn run(cfg: &RunConfig, command: Command) -> Result<Report, CliError> {
    let problem = cfg.problem()?;
    let mode = command.mode(cfg.mode);
    let lat = problem.lattice().clone();
    let functional: Functional = cfg.functional.into();
    let mut report = Report {
        command: command.name(),
        name: cfg.name.clone().unwrap_or_else(|| "unnamed".into()),
        algebra: cfg.algebra(),
        mode,
        plus_sites: lat.plus_labels().to_vec(),
        minus_sites: lat.minus_labels().to_vec(),
        twist: None,
        reflection: "standard",
        functional,
        tolerance: cfg.tolerance,
        properties: PropertySummary {
            reflection_invariant: false,
            gauge_invariant: None,
            hermitian: false,
        },
        criterion: None,
        oracle: Vec::new(),
        spectrum: None,
        transport: Vec::new(),
        agreement: None,
        verdict: Verdict::Rp,
    };
    match &problem {
        Problem::Majorana(p) => run_majorana(cfg, p, mode, &mut report)?,
        Problem::Spin(p) => run_spin(cfg, p, mode, command, &mut report)?,
    }
    if command == Command::Spectrum {
        let f_matrix = match &problem {
            Problem::Spin(SpinProblem { f_matrix: Some(f), .. }) => Some(herm_eigen(&HermMatrix::new(f.clone())?)?.values),
            _ => None,
        };
        report.spectrum = Some(SpectrumSection { f_matrix });
    }
    finish(&mut report);
    Ok(report)
}

fn finish(report: &mut Report) {
    let criterion = report.criterion.as_ref().map(|c| c.verdict == Verdict::Rp);
    let oracle = (!report.oracle.is_empty()).then(|| report.oracle.iter().all(|o| o.verdict == Verdict::Rp));
    report.verdict = match (criterion, oracle) {
        (Some(c), Some(o)) => {
            report.agreement = Some(c == o);
            if c == o {
                Verdict::from_psd(c)
            } else {
                Verdict::Disagreement
            }
        }
        (Some(v), None) | (None, Some(v)) => Verdict::from_psd(v),
        (None, None) => unreachable!("every mode runs at least one path"),
    };
}

fn twist_name(t: TwistChoice) -> &'static str {
    match t {
        TwistChoice::PlusI => "+i",
        TwistChoice::MinusI => "-i",
    }
}

fn run_majorana(cfg: &RunConfig, p: &MajoranaProblem, mode: Mode, report: &mut Report) -> Result<(), CliError> {
    let j = &p.couplings;
    let props = check_properties(j);
    report.twist = Some(twist_name(j.twist()));
    report.properties = PropertySummary {
        reflection_invariant: props.reflection_invariant,
        gauge_invariant: Some(props.gauge_invariant),
        hermitian: props.hermitian,
    };
    if !props.reflection_invariant {
        // the criterion names the offending entry
        criterion(j, cfg.tolerance)?;
    }
    if mode != Mode::Oracle {
        let c = criterion(j, cfg.tolerance)?;
        let lat = j.lattice();
        report.criterion = Some(CriterionSection {
            verdict: Verdict::from_psd(c.reflection_positive()),
            matrix: "J0",
            support: c.support.iter().map(|i| i.render(lat)).collect(),
            min_eigenvalue: c.certificate.min_eigenvalue,
            eigenvalues: c.certificate.eigenvalues.clone(),
            tolerance_used: c.certificate.tolerance_used,
            marginal: c.certificate.marginal,
            energy_offset: Some(c.e),
            witness: c.witness.as_ref().map(|w| w.render()),
            witness_slope: c.witness_slope,
        });
    }
    if mode != Mode::Criterion {
        let rep = Representation::new(j.lattice())?;
        for &beta in &cfg.beta {
            let r = rp_oracle(&p.hamiltonian, beta, &rep, j.twist(), cfg.functional.into(), cfg.tolerance)?;
            report.oracle.push(oracle_section(&r, |w| w.render()));
        }
    }
    Ok(())
}

fn oracle_section<W>(r: &RpReport<W>, render: impl Fn(&W) -> String) -> OracleSection {
    OracleSection {
        beta: r.beta,
        verdict: Verdict::from_psd(r.reflection_positive()),
        dimension: r.labels.len(),
        min_eigenvalue: r.certificate.min_eigenvalue,
        eigenvalues: r.certificate.eigenvalues.clone(),
        tolerance_used: r.certificate.tolerance_used,
        partition_function: [r.partition_function.re, r.partition_function.im],
        witness: r.witness.as_ref().map(render),
        witness_value: r.witness_value,
    }
}

/// Couplings the standard criterion is applied to: those of `H` itself, or
/// of `α_g(H)` for a gauged reflection.
fn criterion_couplings(p: &SpinProblem) -> Result<(SpinCouplings, bool, bool), CliError> {
    match &p.gauge {
        None => {
            let props = spin_properties(&p.couplings);
            Ok((p.couplings.clone(), props.reflection_invariant, props.hermitian))
        }
        Some(g) => {
            let transported = extract_spin_couplings(&gauge_transform(g, &p.hamiltonian)?);
            let props = spin_properties_tol(&transported, TRANSPORT_REL_TOL);
            let hermitian = spin_properties(&p.couplings).hermitian;
            Ok((reflection_symmetrized(&transported), props.reflection_invariant, hermitian))
        }
    }
}

fn run_spin(cfg: &RunConfig, p: &SpinProblem, mode: Mode, command: Command, report: &mut Report) -> Result<(), CliError> {
    report.reflection = match &p.reflection {
        SpinReflection::Standard => "standard",
        SpinReflection::Gauge(_) => "gauge",
    };
    let (couplings, invariant, hermitian) = criterion_couplings(p)?;
    report.properties = PropertySummary {
        reflection_invariant: invariant,
        gauge_invariant: None,
        hermitian,
    };
    if !invariant {
        let what = if p.gauge.is_some() { "the gauged reflection" } else { "the standard reflection" };
        return Err(Error::NotReflectionInvariant(format!("H is not invariant under {what}")).into());
    }
    if mode != Mode::Oracle {
        let c = spin_criterion(&couplings, cfg.tolerance)?;
        let lat = &p.lattice;
        let witness = c.witness.as_ref().map(|x| match &p.gauge {
            // X ∈ 𝔄₊ refutes α_g(H) under Θ, so α_g⁻¹(X) refutes H under Θ'
            Some(g) => g.inverse_transform(x).render(),
            None => x.render(),
        });
        report.criterion = Some(CriterionSection {
            verdict: Verdict::from_psd(c.reflection_positive()),
            matrix: if p.gauge.is_some() { "i^(k+k') J0 of α_g(H)" } else { "i^(k+k') J0" },
            support: c.support.iter().map(|l| l.render(lat)).collect(),
            min_eigenvalue: c.certificate.min_eigenvalue,
            eigenvalues: c.certificate.eigenvalues.clone(),
            tolerance_used: c.certificate.tolerance_used,
            marginal: c.certificate.marginal,
            energy_offset: None,
            witness,
            witness_slope: c.witness_slope,
        });
    }
    if mode != Mode::Criterion {
        for &beta in &cfg.beta {
            let r = spin_rp_oracle(&p.hamiltonian, &p.reflection, beta, cfg.functional.into(), cfg.tolerance)?;
            report.oracle.push(oracle_section(&r, SpinElement::render));
        }
    }
    if command == Command::Demo {
        if let Some(g) = &p.gauge {
            let hp = gauge_transform(g, &p.hamiltonian)?;
            let t = g.transfer_matrix();
            for &beta in &cfg.beta {
                let primed = spin_rp_oracle(&p.hamiltonian, &p.reflection, beta, cfg.functional.into(), cfg.tolerance)?;
                let plain = spin_rp_oracle(&hp, &SpinReflection::Standard, beta, cfg.functional.into(), cfg.tolerance)?;
                let transported = &(&t.adjoint() * &plain.gram) * &t;
                report.transport.push(TransportRow {
                    beta,
                    gauged_min_eigenvalue: primed.certificate.min_eigenvalue,
                    transported_min_eigenvalue: plain.certificate.min_eigenvalue,
                    gram_deviation: (&transported - &primed.gram).max_abs(),
                    verdicts_equal: primed.reflection_positive() == plain.reflection_positive(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn majorana_pair_is_certified_by_both_paths() {
        let report = run(&bundled::load("majorana_pair").unwrap(), Command::Check).unwrap();
        assert_eq!(report.verdict, Verdict::Rp);
        assert_eq!(report.agreement, Some(true));
        let c = report.criterion.as_ref().unwrap();
        assert_eq!(c.support, ["(0)"]);
        assert_eq!(c.witness, None);
        assert_eq!(report.oracle.len(), 2);
    }

    #[test]
    fn refutations_carry_witnesses() {
        let report = run(&bundled::load("majorana_pair_neg").unwrap(), Command::Check).unwrap();
        assert_eq!(report.verdict, Verdict::NotRp);
        let c = report.criterion.unwrap();
        assert!(c.witness.is_some());
        assert!(c.witness_slope.unwrap() < 0.0);
        let o = report.oracle.iter().find(|o| o.verdict == Verdict::NotRp).unwrap();
        assert!(o.witness_value.unwrap() < 0.0);
    }

    #[test]
    fn oracle_command_skips_the_criterion() {
        let report = run(&bundled::load("ising_afm_chain4").unwrap(), Command::Oracle).unwrap();
        assert!(report.criterion.is_none());
        assert_eq!(report.agreement, None);
        assert_eq!(report.verdict, Verdict::Rp);
    }

    #[test]
    fn spectrum_lists_the_f_matrix() {
        let report = run(&bundled::load("long_range_heisenberg").unwrap(), Command::Spectrum).unwrap();
        let f = report.spectrum.unwrap().f_matrix.unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn demo_transports_gauged_reflections() {
        let report = run(&bundled::load("rotator_ferro").unwrap(), Command::Demo).unwrap();
        assert_eq!(report.reflection, "gauge");
        assert_eq!(report.transport.len(), 3);
        assert!(report.transport.iter().all(|t| t.verdicts_equal && t.gram_deviation <= 1e-9));
        assert_eq!(report.verdict, Verdict::Rp);
    }

    #[test]
    fn non_invariant_spin_hamiltonians_are_errors() {
        let cfg = RunConfig::from_toml(
            "algebra = \"spin\"\n[lattice]\nplus_sites = 1\n[[coupling]]\nrow = [\"0\"]\ncol = []\n\
             row_letters = [1]\nvalue = 1.0\n",
        )
        .unwrap();
        assert!(matches!(run(&cfg, Command::Check), Err(CliError::Core(Error::NotReflectionInvariant(_)))));
    }
}
