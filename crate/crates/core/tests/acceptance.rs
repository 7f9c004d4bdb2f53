//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria that are known not to hold at the prescribed sizes are listed in
//! `KNOWN_FAILURES`; the test fails if the set of failing criteria changes in
//! either direction.

use ff8v::suites::studies::{decay_study, free_energy_study};
use ff8v::suites::{run_suite, Bound, SuiteConfig, SuiteReport};
use std::io::Write;
use std::time::{Duration, Instant};

const SEED: u64 = 7;
const SWITCHING_BUDGET: Duration = Duration::from_secs(5);
const XOR_BUDGET: Duration = Duration::from_secs(10);
const TOTAL_BUDGET: Duration = Duration::from_secs(600);
const SLOPE_REL_TOL: f64 = 0.02;
const SLOPE_SEPARATION: f64 = 0.10;
const FREE_ENERGY_GAP: f64 = 1e-3;
const DECAY_RANGE: (usize, usize) = (10, 40);
const FREE_ENERGY_SIZES: [usize; 3] = [2, 4, 6];
const CUBE_FORM_DIMENSION: u64 = 6;

/// Eight-vertex decay slope against the k-slope, and free-energy gap at n = 6.
const KNOWN_FAILURES: [u32; 2] = [9, 12];

struct Line {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn suite(name: &str, cfg: SuiteConfig) -> (SuiteReport, Duration) {
    let start = Instant::now();
    let report = run_suite(name, &SuiteConfig { seed: SEED, ..cfg }).unwrap();
    (report, start.elapsed())
}

fn default_suite(name: &str) -> (SuiteReport, Duration) {
    suite(name, SuiteConfig::default())
}

/// Passing check with the expected tolerance and number of instances.
fn check_ok(r: &SuiteReport, name: &str, limit: f64, min_instances: usize) -> (bool, String) {
    match r.check(name) {
        Some(c) => {
            let ok = c.pass && c.instances >= min_instances && (c.bound == Bound::AtLeast || c.limit <= limit);
            (ok, format!("{name} {:.2e}/{:.0e} x{}", c.worst, c.limit, c.instances))
        }
        None => (false, format!("{name} missing")),
    }
}

fn all_ok(parts: Vec<(bool, String)>) -> (bool, String) {
    let pass = parts.iter().all(|p| p.0);
    (pass, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut push = |id, title, (pass, detail): (bool, String)| lines.push(Line { id, title, pass, detail });

    let (switching, t_switch) = suite("switching", SuiteConfig { graph: Some("cube".into()), trials: Some(20), ..Default::default() });
    let (mut ok, mut detail) = check_ok(&switching, "partition_switching", 1e-10, 20);
    ok &= t_switch < SWITCHING_BUDGET;
    detail += &format!("; {:.2}s", t_switch.as_secs_f64());
    push(1, "switching identity on the cube", (ok, detail));

    let (xor, t_xor) = suite("xor", SuiteConfig { graph: Some("cube".into()), ..Default::default() });
    let (mut ok, mut detail) = check_ok(&xor, "total_variation", 1e-12, 1);
    ok &= t_xor < XOR_BUDGET;
    detail += &format!("; {:.2}s", t_xor.as_secs_f64());
    push(2, "XOR coupling on the cube", (ok, detail));

    let (sphere, _) = default_suite("kasteleyn-sphere");
    push(3, "sphere Pfaffian identity", all_ok(vec![
        check_ok(&sphere, "pfaffian_square", 1e-10, 20),
        check_ok(&sphere, "sphere_partition", 1e-10, 20),
    ]));

    let (torus, _) = default_suite("kasteleyn-torus");
    push(4, "torus four-Pfaffian identity", all_ok(vec![
        check_ok(&torus, "sign_calibration", 0.0, 1),
        check_ok(&torus, "four_pfaffian", 1e-9, 20),
        check_ok(&torus, "frozen_sign_partition", 1e-9, 20),
    ]));

    let (poly, _) = default_suite("poly-switch");
    let (fact, _) = default_suite("factorization");
    push(5, "polynomial switching and factorization", all_ok(vec![
        check_ok(&poly, "polynomial_switching", 1e-8, 1),
        check_ok(&fact, "factorization", 1e-8, 1),
        check_ok(&fact, "fitted_abs_constant", 1e-8, 1),
    ]));

    push(6, "inverse switching and commutator", all_ok(vec![
        check_ok(&switching, "inverse_switching", 1e-10, 20),
        check_ok(&switching, "commutator", 1e-10, 20),
        check_ok(&torus, "twisted_inverse_switching", 1e-10, 20),
        check_ok(&torus, "commutator", 1e-10, 20),
    ]));

    let (ybe, _) = suite("ybe", SuiteConfig { trials: Some(50), ..Default::default() });
    push(7, "checkerboard Yang-Baxter equations", all_ok(vec![
        check_ok(&ybe, "ybe_residual", 1e-10, 50),
        check_ok(&ybe, "relation_count", 0.0, 50),
        check_ok(&ybe, "perturbation_sensitivity", 0.0, 50),
    ]));

    let (local, _) = suite("local-inverse", SuiteConfig { k2: Some(0.09), l2: Some(0.49), ..Default::default() });
    let rows = local.metrics.get("rows").and_then(|v| v.as_u64()).unwrap_or(0);
    push(8, "local inverse at (k, l) = (0.3, 0.7)", all_ok(vec![
        check_ok(&local, "row_identity", 1e-7, 1),
        (rows >= 50, format!("{rows} rows")),
        check_ok(&local, "contour_shift", 1e-10, 1),
        check_ok(&local, "oracle_agreement", 1e-6, 1),
    ]));

    let rs: Vec<usize> = (DECAY_RANGE.0..=DECAY_RANGE.1).collect();
    let mut parts = Vec::new();
    for k in [0.3, 0.5] {
        let s = decay_study(k, None, &rs).unwrap();
        let e = rel(s.fit_k.slope, s.rate_k.unwrap());
        parts.push((e <= SLOPE_REL_TOL, format!("k={k} slope rel err {e:.4}")));
    }
    let s = decay_study(0.3, Some(0.7), &rs).unwrap();
    let to_k = rel(s.fit.slope, s.fit_k.slope);
    let to_l = rel(s.fit.slope, s.fit_l.as_ref().unwrap().slope);
    parts.push((to_k <= SLOPE_REL_TOL, format!("8V vs k-slope {to_k:.4}")));
    parts.push((to_l > SLOPE_SEPARATION, format!("8V vs l-slope {to_l:.4}")));
    push(9, "correlation decay rates", all_ok(parts));

    let (mono, _) = default_suite("monotonicity");
    push(10, "monotonicity of the decay rate", check_ok(&mono, "strictly_increasing", 0.0, 5));

    let (exponent, _) = default_suite("exponent");
    push(11, "critical exponent", all_ok(vec![
        check_ok(&exponent, "scaled_ratio", 2.0, 1),
        check_ok(&exponent, "equal_angle_limit", 0.05, 1),
    ]));

    let fe = free_energy_study(0.09, 0.49, &FREE_ENERGY_SIZES).unwrap();
    let last = fe.finite.last().unwrap().gap;
    let gaps: Vec<String> = fe.finite.iter().map(|t| format!("{:.2e}", t.gap)).collect();
    push(12, "free energy against finite tori", (
        fe.monotone && last <= FREE_ENERGY_GAP,
        format!("gaps [{}], monotone {}, final limit {FREE_ENERGY_GAP:.0e}", gaps.join(", "), fe.monotone),
    ));

    let (forms, _) = default_suite("forms");
    let dim = |key: &str| forms.metrics.get(key).and_then(|v| v.as_u64()).unwrap_or(0);
    push(13, "form duality, Fourier and Poisson", all_ok(vec![
        (dim("dim_image") == CUBE_FORM_DIMENSION && dim("dim_kernel") == CUBE_FORM_DIMENSION,
         format!("dims {} = {}", dim("dim_image"), dim("dim_kernel"))),
        check_ok(&forms, "image_equals_kernel", 0.0, 1),
        check_ok(&forms, "adjointness", 0.0, 1),
        check_ok(&forms, "fourier_involution", 1e-12, 1),
        check_ok(&forms, "poisson", 1e-12, 1),
        check_ok(&forms, "poisson_partition", 1e-12, 1),
    ]));

    let total = start.elapsed();
    push(14, "full run within budget", (total < TOTAL_BUDGET, format!("{:.1}s", total.as_secs_f64())));

    // written past the test harness capture so the lines appear in every run
    let mut out = std::io::stdout().lock();
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {:>2} {verdict} {}: {}", l.id, l.title, l.detail).unwrap();
    }
    let failing: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert_eq!(lines.len(), 14);
    assert_eq!(failing, KNOWN_FAILURES, "failing criteria changed");
}
