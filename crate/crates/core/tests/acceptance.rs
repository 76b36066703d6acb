//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 once every criterion has been evaluated, so failing criteria show
//! up in the log without aborting the workspace run. Set
//! `WLAB_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use wlab::consts::{clifford_area, clifford_willmore};
use wlab::experiments::{self, Check, SweepConfig};
use wlab::moebius::{GradedGrid, MoebiusParam, TorusImage};
use wlab::morse;
use wlab::sphere::{basic_integrals, SphereGrid};
use wlab::surface::{area, willmore_energy, CliffordTorus, ParamSurface};
use wlab::{AmbientMetric, CurvatureData, WlabError};

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_checks(checks: &[&Check]) -> Outcome {
    let passed = checks.iter().all(|c| c.passed);
    let detail = checks
        .iter()
        .map(|c| format!("{}{}={:.6e}", if c.passed { "" } else { "!" }, c.name, c.value))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn pick<'a>(checks: &'a [Check], needles: &[&str]) -> Vec<&'a Check> {
    checks.iter().filter(|c| needles.iter().any(|n| c.name.contains(n))).collect()
}

fn flat_base_values() -> Outcome {
    let s = ParamSurface::torus(CliffordTorus, 256, 256);
    let am = AmbientMetric::flat();
    let w = willmore_energy(&s, &am).unwrap();
    let a = area(&s, &am).unwrap();
    let ew = (w / clifford_willmore() - 1.0).abs();
    let ea = (a / clifford_area() - 1.0).abs();
    Outcome { passed: ew <= 1e-10 && ea <= 1e-10, detail: format!("W rel err {ew:.2e}, area rel err {ea:.2e} at 256²") }
}

fn moebius_invariance() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in [0.3, 0.5, 0.9] {
        let t = TorusImage::new(&MoebiusParam::radial(r).unwrap()).unwrap();
        let s = t.surface(&GradedGrid::default(), 256);
        let e = (willmore_energy(&s, &AmbientMetric::flat()).unwrap() / clifford_willmore() - 1.0).abs();
        ok &= e <= 1e-6;
        parts.push(format!("|ω|={r}: {e:.2e}"));
    }
    Outcome { passed: ok, detail: parts.join(", ") }
}

fn xi_asymptotics() -> Outcome {
    let rep = experiments::xi_sweep(&[0.2, 0.1, 0.05, 0.025, 0.02]).unwrap();
    from_checks(&rep.checks.iter().collect::<Vec<_>>())
}

fn psi0_checks() -> Outcome {
    let rep = experiments::psi_sweep(&[0.1, 0.05, 0.025], (64, 64)).unwrap();
    from_checks(&pick(&rep.checks, &["integral of psi0", "decreasing"]))
}

fn appendix() -> Outcome {
    let curv = CurvatureData::from_eigenvalues([1.0, 2.0, 3.0]);
    let (rep, _) = experiments::appendix_sweep(&[0.2, 0.1, 0.05, 0.025], &curv, &SphereGrid::default()).unwrap();
    let worst = basic_integrals().iter().map(|b| (b.value - b.exact).abs()).fold(0.0f64, f64::max);
    let mut o = from_checks(&rep.checks.iter().collect::<Vec<_>>());
    o.passed &= worst <= 1e-10;
    o.detail.push_str(&format!("; basic integrals max err={worst:.2e}"));
    o
}

fn el_residual() -> Outcome {
    let rep = experiments::el_residual_sweep(&SweepConfig::el_default()).unwrap();
    from_checks(&pick(&rep.checks, &["eps-order"]))
}

fn energy_expansion() -> Outcome {
    let rep = experiments::energy_expansion_check(&SweepConfig::energy_default()).unwrap();
    from_checks(&pick(&rep.checks, &["residual eps-order", "coefficient"]))
}

fn derivative() -> Outcome {
    match experiments::derivative_check(&SweepConfig::derivative_default()) {
        Ok(rep) => from_checks(&rep.checks.iter().collect::<Vec<_>>()),
        Err(e) => Outcome { passed: false, detail: e.to_string() },
    }
}

fn so3_morse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut triples = 0;
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    while triples < 20 {
        let a: [f64; 3] = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        if (a[0] - a[1]).abs().min((a[1] - a[2]).abs()).min((a[0] - a[2]).abs()) < 0.05 {
            continue;
        }
        triples += 1;
        let rep = morse::f_critical_search(a, 500, triples as u64).unwrap();
        worst = worst.max(rep.max_spectrum_error);
        if rep.points.len() != 24 || morse::index_counts(&rep.points) != [4, 8, 8, 4] {
            bad.push(format!("{a:?}"));
        }
    }
    let degenerate = matches!(morse::f_critical_enumerate([2.0, 2.0, 2.0]), Err(WlabError::NotMorse(_)));
    Outcome {
        passed: bad.is_empty() && worst <= 1e-6 && degenerate,
        detail: format!(
            "{triples} triples, {} off-pattern, max spectrum err {worst:.2e}, degenerate rejected: {degenerate}",
            bad.len()
        ),
    }
}

fn counting_tables() -> Outcome {
    let presets = [
        ("s3", [1, 1, 1, 1, 1, 1, 0]),
        ("s2xs1", [1, 2, 3, 3, 2, 1, 0]),
        ("t3", [1, 4, 7, 7, 4, 1, 0]),
    ];
    let presets_ok = presets.iter().all(|(n, want)| morse::tilde_beta(morse::betti_preset(n).unwrap()) == *want);
    let pts = morse::f_critical_enumerate([1.0, 2.0, 3.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut bound_ok, mut consistent) = (true, true);
    for _ in 0..100 {
        let c: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..8));
        let b = rng.random_range(0..6);
        let t = morse::morse_table([1, b, b, 1], c);
        bound_ok &= t.bound >= 2;
        consistent &= morse::tilde_c_from_points(c, &pts) == Some(t.tilde_c);
    }
    Outcome {
        passed: presets_ok && bound_ok && consistent,
        detail: format!("presets exact: {presets_ok}; bound >= 2: {bound_ok}; 𝓕<0 count = closed form: {consistent}"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("flat Willmore base values", flat_base_values),
        ("Moebius invariance", moebius_invariance),
        ("xi_eta asymptotics", xi_asymptotics),
        ("psi0 checks", psi0_checks),
        ("cutoff integrals on the limit sphere", appendix),
        ("EL residual eps-order", el_residual),
        ("energy expansion", energy_expansion),
        ("derivative asymptotics", derivative),
        ("SO(3) Morse analysis", so3_morse),
        ("counting tables", counting_tables),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!(
            "[{}] {name} ({:.1} s): {}",
            if o.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var("WLAB_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
