//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command as Process;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rp_core::hamiltonian::{build_hamiltonian, criterion, CouplingMatrix};
use rp_core::matrix_rep::{gram_matrix, partition_function, rp_oracle, trace_against, Functional, Representation};
use rp_core::models::{build_cubic, build_model, model_hamiltonian, ModelReflection, ModelSpec};
use rp_core::random::{
    random_full_psd_couplings, random_majorana_couplings, random_plus_element, random_spin_couplings, J0Kind,
};
use rp_core::spin::{
    build_spin_hamiltonian, extract_spin_couplings, gauge_transform, kitaev_rp_oracle, spin_criterion, spin_form,
    spin_rp_oracle, GaugeAssignment, SpinElement, SpinReflection,
};
use rp_core::{
    basis_element, plus_basis, reflect, twisted_product, AlgebraElement, BasisIndex, Lattice, MajoranaWord,
    TwistChoice,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const TWISTS: [TwistChoice; 2] = [TwistChoice::PlusI, TwistChoice::MinusI];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lattice(m: usize) -> Arc<Lattice> {
    Arc::new(Lattice::with_plus_sites(m).unwrap())
}

fn random_element(rng: &mut ChaCha8Rng, lat: &Arc<Lattice>, mask: u64) -> AlgebraElement {
    let mut a = AlgebraElement::zero(lat);
    for _ in 0..rng.gen_range(1..=6) {
        let w = MajoranaWord::from_mask(rng.gen::<u64>() & mask);
        a.add_term(w, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    a
}

fn full_mask(lat: &Lattice) -> u64 {
    (1u64 << lat.len()) - 1
}

fn within(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn algebra_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = 1000;
    for case in 0..cases {
        let lat = lattice(1 + case % 4);
        let twist = TWISTS[case % 2];
        let n = lat.len() as u32;
        let id = AlgebraElement::identity(&lat);

        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (ci, cj) = (AlgebraElement::generator(&lat, i), AlgebraElement::generator(&lat, j));
        let anti = &(&ci * &cj) + &(&cj * &ci);
        let expected = if i == j { &id * c(2.0, 0.0) } else { AlgebraElement::zero(&lat) };
        ensure!(anti == expected, "case {case}: Clifford relation fails for ({i}, {j})");

        let w = MajoranaWord::from_mask(rng.gen::<u64>() & full_mask(&lat));
        let k = w.degree() as i64;
        let sign = if (k * (k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mono = AlgebraElement::monomial(&lat, w, z);
        ensure!(
            mono.adjoint() == AlgebraElement::monomial(&lat, w, z.conj() * sign),
            "case {case}: adjoint rule fails on a word of degree {k}"
        );

        let a = random_element(&mut rng, &lat, full_mask(&lat));
        let b = random_element(&mut rng, &lat, full_mask(&lat));
        ensure!(id.trace() == c(1.0, 0.0), "case {case}: Tr(I) ≠ 1");
        let norm2: f64 = a.terms().map(|(_, z)| z.norm_sqr()).sum();
        let tr_aa = (&a.adjoint() * &a).trace();
        ensure!(within(tr_aa, c(norm2, 0.0), 1e-12) && norm2 > 0.0, "case {case}: Tr(A*A) = {tr_aa}, expected {norm2}");
        ensure!(
            within((&a * &b).trace(), (&b * &a).trace(), 1e-12),
            "case {case}: trace is not cyclic"
        );
        ensure!(within(reflect(&a).trace(), a.trace().conj(), 1e-12), "case {case}: Tr(Θ(A)) ≠ conj Tr(A)");
        let ap = random_element(&mut rng, &lat, lat.plus_mask());
        let am = reflect(&random_element(&mut rng, &lat, lat.plus_mask()));
        ensure!(
            within((&am * &ap).trace(), am.trace() * ap.trace(), 1e-12),
            "case {case}: trace does not factorize"
        );

        let basis = plus_basis(&lat);
        let pick = |rng: &mut ChaCha8Rng| basis[rng.gen_range(0..basis.len())];
        let (i0, i0p) = (pick(&mut rng), pick(&mut rng));
        let (i1, i1p) = if rng.gen_bool(0.5) { (i0, i0p) } else { (pick(&mut rng), pick(&mut rng)) };
        let b0 = basis_element(&lat, twist, i0, i0p);
        let b1 = basis_element(&lat, twist, i1, i1p);
        let delta = if i0 == i1 && i0p == i1p { 1.0 } else { 0.0 };
        ensure!(
            within((&b0.adjoint() * &b1).trace(), c(delta, 0.0), 1e-12),
            "case {case}: basis orthogonality fails"
        );
        ensure!(
            reflect(&b0) == basis_element(&lat, twist, i0p, i0),
            "case {case}: Θ does not permute the basis"
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}, limit 10 s");
    Ok(format!("{cases} randomized cases on |Λ| ≤ 8 in {elapsed:.2?}"))
}

fn majorana_cross_validation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for case in 0..100 {
        let lat = lattice(1 + case % 3);
        let twist = TWISTS[case % 2];
        let j = random_majorana_couplings(&mut rng, &lat, twist, J0Kind::Psd).map_err(|e| e.to_string())?;
        ensure!(criterion(&j, 1e-9).unwrap().reflection_positive(), "PSD case {case}: criterion rejects");
        let rep = Representation::new(&lat).unwrap();
        let h = build_hamiltonian(&j);
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let r = rp_oracle(&h, beta, &rep, twist, Functional::Boltzmann, 1e-8).unwrap();
            let rel = r.certificate.min_eigenvalue / r.gram.max_abs();
            worst = worst.min(rel);
            ensure!(rel >= -1e-8, "PSD case {case} at beta {beta}: relative min eigenvalue {rel:e}");
        }
    }
    for case in 0..100 {
        let lat = lattice(1 + case % 3);
        let twist = TWISTS[case % 2];
        let j = random_majorana_couplings(&mut rng, &lat, twist, J0Kind::Negative { upper: 0.1 }).unwrap();
        ensure!(!criterion(&j, 1e-9).unwrap().reflection_positive(), "negative case {case}: criterion accepts");
        let rep = Representation::new(&lat).unwrap();
        let h = build_hamiltonian(&j);
        let refuted = [1.0, 0.5, 0.1, 0.01, 0.001].iter().any(|&beta| {
            !rp_oracle(&h, beta, &rep, twist, Functional::Boltzmann, 1e-8).unwrap().reflection_positive()
        });
        ensure!(refuted, "negative case {case} is RP on the whole grid");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}, limit 60 s");
    Ok(format!("100 PSD + 100 negative, worst relative eigenvalue {worst:.2e}, in {elapsed:.2?}"))
}

fn spin_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let lat = lattice(1 + case % 2);
        let j = random_spin_couplings(&mut rng, &lat, J0Kind::Psd).unwrap();
        ensure!(spin_criterion(&j, 1e-9).unwrap().reflection_positive(), "PSD case {case}: criterion rejects");
        let h = build_spin_hamiltonian(&j);
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let r = spin_rp_oracle(&h, &SpinReflection::Standard, beta, Functional::Boltzmann, 1e-8).unwrap();
            ensure!(
                r.certificate.min_eigenvalue >= -1e-8 * r.gram.max_abs(),
                "PSD case {case} at beta {beta}"
            );
        }
    }
    for case in 0..100 {
        let lat = lattice(1 + case % 2);
        let j = random_spin_couplings(&mut rng, &lat, J0Kind::Negative { upper: 0.1 }).unwrap();
        ensure!(!spin_criterion(&j, 1e-9).unwrap().reflection_positive(), "negative case {case}: criterion accepts");
        let h = build_spin_hamiltonian(&j);
        let refuted = [1.0, 0.5, 0.1, 0.01, 0.001].iter().any(|&beta| {
            !spin_rp_oracle(&h, &SpinReflection::Standard, beta, Functional::Boltzmann, 1e-8)
                .unwrap()
                .reflection_positive()
        });
        ensure!(refuted, "negative case {case} is RP on the whole grid");
    }
    let mut max_dev: f64 = 0.0;
    let kitaev_cases = 24;
    for case in 0..kitaev_cases {
        let lat = lattice(1 + case % 2);
        let kind = if case % 2 == 0 { J0Kind::Psd } else { J0Kind::Negative { upper: 0.1 } };
        let h = build_spin_hamiltonian(&random_spin_couplings(&mut rng, &lat, kind).unwrap());
        let beta = [0.05, 0.5][case / 2 % 2];
        let direct = spin_rp_oracle(&h, &SpinReflection::Standard, beta, Functional::Gibbs, 1e-9).unwrap();
        let mapped = kitaev_rp_oracle(&h, beta, Functional::Gibbs, 1e-9).unwrap();
        ensure!(direct.reflection_positive() == mapped.reflection_positive(), "Kitaev case {case}: verdicts differ");
        for (a, b) in direct.certificate.eigenvalues.iter().zip(&mapped.certificate.eigenvalues) {
            max_dev = max_dev.max((a - b).abs());
        }
        ensure!(max_dev <= 1e-8, "Kitaev case {case}: spectra differ by {max_dev:e}");
    }
    Ok(format!("100 PSD + 100 negative; {kitaev_cases} Kitaev comparisons, max spectral deviation {max_dev:.1e}"))
}

fn closed_forms() -> Outcome {
    let lat = lattice(1);
    let rep = Representation::new(&lat).unwrap();
    let one = BasisIndex::from_tuple(&[0]);
    let mut j = CouplingMatrix::new(&lat, TwistChoice::PlusI);
    j.set(one, one, c(1.0, 0.0));
    let h = build_hamiltonian(&j);
    for beta in [0.25, 0.5, 1.0, 2.0] {
        let g = gram_matrix(&h, beta, &rep, TwistChoice::PlusI, Functional::Boltzmann).unwrap().matrix;
        let expected = [[beta.cosh(), 0.0], [0.0, beta.sinh()]];
        for (r, row) in expected.iter().enumerate() {
            for (col, &v) in row.iter().enumerate() {
                ensure!(within(g[(r, col)], c(v, 0.0), 1e-10), "Majorana Gram entry ({r},{col}) at beta {beta}");
            }
        }
    }
    ensure!(partition_function(&h, 0.0, &rep).unwrap() == c(1.0, 0.0), "Z_0 ≠ 1 exactly");
    let mut prev = 1.0;
    for k in 1..=20 {
        let beta = 0.2 * k as f64;
        let z = partition_function(&h, beta, &rep).unwrap();
        ensure!(within(z, c(beta.cosh(), 0.0), 1e-10), "Z at beta {beta} is {z}");
        ensure!(z.re >= prev, "Z decreases at beta {beta}");
        prev = z.re;
    }

    let cubic = build_cubic(1, 0).unwrap();
    let sl = cubic.lattice();
    let coupling = 0.7;
    let hs = model_hamiltonian(&ModelSpec::ising(coupling), &cubic).unwrap();
    let x = SpinElement::sigma(sl, sl.plus_bit(0), 3);
    for beta in [0.25, 1.0, 2.0] {
        let v = spin_form(&hs, &x, beta).unwrap();
        ensure!(within(v, c(-(beta * coupling).sinh(), 0.0), 1e-10), "Ising form at beta {beta} is {v}");
        let r = spin_rp_oracle(&hs, &SpinReflection::Standard, beta, Functional::Boltzmann, 1e-9).unwrap();
        ensure!(
            within(r.partition_function, c((beta * coupling).cosh(), 0.0), 1e-10),
            "Ising Z at beta {beta}"
        );
    }
    Ok("Majorana Gram diag(cosh, sinh), Ising −sinh(βJ), Z = cosh(βJ) with Z_0 = 1".into())
}

fn lower_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut margin = f64::INFINITY;
    for case in 0..200 {
        let lat = lattice(1 + case % 3);
        let twist = TWISTS[case % 2];
        let j = random_full_psd_couplings(&mut rng, &lat, twist).unwrap();
        let rep = Representation::new(&lat).unwrap();
        let r = rep.boltzmann_matrix(&build_hamiltonian(&j), 1.0).unwrap();
        let a = random_plus_element(&mut rng, &lat);
        let value = trace_against(&twisted_product(&reflect(&a), &a, twist).unwrap(), &r, &rep).re;
        let bound = a.trace().norm_sqr();
        margin = margin.min(value - bound);
        ensure!(value >= bound - 1e-10, "case {case}: ⟨A,A⟩ = {value} < |a|² = {bound}");
    }
    Ok(format!("200 random A, smallest margin {margin:.3e}"))
}

fn model_verdicts() -> Outcome {
    let cubic = build_cubic(1, 1).unwrap();
    let lat = cubic.lattice();
    let oracle = |h: &SpinElement, refl: &SpinReflection| {
        [0.01, 0.3, 1.0]
            .iter()
            .all(|&b| spin_rp_oracle(h, refl, b, Functional::Gibbs, 1e-9).unwrap().reflection_positive())
    };
    let crit = |spec: &ModelSpec| spin_criterion(&build_model(spec, &cubic).unwrap(), 1e-9).unwrap().reflection_positive();
    for (name, spec, expected) in [
        ("Ising AFM", ModelSpec::ising(-1.0), true),
        ("Heisenberg AFM", ModelSpec::heisenberg(-1.0), true),
        ("Ising FM", ModelSpec::ising(1.0), false),
        ("Heisenberg FM", ModelSpec::heisenberg(1.0), false),
    ] {
        let h = model_hamiltonian(&spec, &cubic).unwrap();
        ensure!(crit(&spec) == expected, "{name}: criterion verdict");
        ensure!(oracle(&h, &SpinReflection::Standard) == expected, "{name}: oracle verdict");
    }

    let spec = ModelSpec::rotator(1.0).with_reflection(ModelReflection::Ferro);
    let h = model_hamiltonian(&spec, &cubic).unwrap();
    let g = GaugeAssignment::ferro(lat);
    let theta = ModelReflection::Ferro.spin_reflection(lat);
    let hp = gauge_transform(&g, &h).unwrap();
    ensure!(
        spin_criterion(&extract_spin_couplings(&hp), 1e-9).unwrap().reflection_positive(),
        "ferro rotator: criterion for α_g(H)"
    );
    ensure!(oracle(&h, &theta), "ferro rotator: oracle under Θ'");
    ensure!(!oracle(&h, &SpinReflection::Standard), "ferro rotator: RP under the standard reflection");
    let t = g.transfer_matrix();
    let mut dev: f64 = 0.0;
    for beta in [0.1, 0.5, 1.0] {
        let primed = spin_rp_oracle(&h, &theta, beta, Functional::Gibbs, 1e-9).unwrap();
        let plain = spin_rp_oracle(&hp, &SpinReflection::Standard, beta, Functional::Gibbs, 1e-9).unwrap();
        dev = dev.max((&(&(&t.adjoint() * &plain.gram) * &t) - &primed.gram).max_abs());
    }
    ensure!(dev <= 1e-9, "gauge transport deviates by {dev:e}");

    let mut patterns = 0;
    for a in [-1.0, 0.0, 0.6] {
        for b in [-0.5, 0.3] {
            for cc in [-0.8, 0.0, 1.0] {
                let j3 = [a, b, cc];
                let expected = j3.iter().all(|&v| v <= 0.0);
                let spec = ModelSpec::long_range(j3, 1.0);
                let h = model_hamiltonian(&spec, &cubic).unwrap();
                ensure!(crit(&spec) == expected, "long range {j3:?}: criterion verdict");
                ensure!(oracle(&h, &SpinReflection::Standard) == expected, "long range {j3:?}: oracle verdict");
                patterns += 1;
            }
        }
    }
    Ok(format!("AFM/FM chains, ferro rotator (transport deviation {dev:.1e}), {patterns} long-range sign patterns"))
}

fn cli_agreement() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_rp-certify");
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for name in rp_certify::bundled::names() {
        let path = configs.join(format!("{name}.toml"));
        let run = |args: &[&str]| Process::new(bin).args(args).output().map_err(|e| e.to_string());
        let first = run(&["check", path.to_str().unwrap(), "--json"])?;
        let second = run(&["check", path.to_str().unwrap(), "--json"])?;
        ensure!(first.stdout == second.stdout, "{name}: JSON differs between runs");
        let demo = run(&["demo", name, "--json"])?;
        let report: serde_json::Value = serde_json::from_slice(&first.stdout).map_err(|e| format!("{name}: {e}"))?;
        ensure!(report["agreement"] == serde_json::Value::Bool(true), "{name}: criterion and oracle disagree");
        let expected = match report["verdict"].as_str() {
            Some("rp") => 0,
            Some("not_rp") => 2,
            other => return Err(format!("{name}: unexpected verdict {other:?}")),
        };
        ensure!(first.status.code() == Some(expected), "{name}: exit {:?}, expected {expected}", first.status.code());
        ensure!(demo.status.code() == Some(expected), "{name}: demo exit {:?}", demo.status.code());
        count += 1;
    }
    let dir = std::env::temp_dir().join(format!("rp-certify-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let bad = dir.join("fixed_point.toml");
    std::fs::write(&bad, "algebra = \"majorana\"\n[lattice]\npairs = [[\"a\", \"a\"]]\n[[coupling]]\nrow = [\"a\"]\ncol = [\"a\"]\nvalue = 1.0\n")
        .map_err(|e| e.to_string())?;
    let out = Process::new(bin).args(["check", bad.to_str().unwrap()]).output().map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure!(out.status.code() == Some(1), "malformed config exits with {:?}", out.status.code());
    Ok(format!("{count} bundled configs agree, exit codes 0/2/1 honoured, JSON byte-identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("algebra identity suite", algebra_identities),
        ("Majorana criterion vs oracle", majorana_cross_validation),
        ("spin criterion vs oracle, Kitaev path", spin_cross_validation),
        ("closed-form anchors", closed_forms),
        ("lower bound |Tr A|²", lower_bound),
        ("model verdicts", model_verdicts),
        ("CLI agreement and determinism", cli_agreement),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
