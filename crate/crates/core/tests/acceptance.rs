//! Acceptance run: one line per criterion, exit status 1 if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use expapprox::bandlimited::{exp_type_estimate, vp_approx, SincExpansion, SpectrumGrid};
use expapprox::harness::{verify_inequality, CheckParams, Fixture};
use expapprox::numerics::QuadratureConfig;
use expapprox::report::CSV_HEADER;
use expapprox::steklov::t_iterate;
use expapprox::transference::transfer_derivative_check;
use expapprox::weights::{ap_constant, extremal_dual, ApScan, Weight, WeightedSpaceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

struct Row {
    check_id: String,
    p: String,
    weight: String,
    r: String,
    param: String,
    lhs: f64,
    rhs: f64,
    constant: f64,
    pass: bool,
}

impl Row {
    fn part(&self) -> Option<&str> {
        self.param.split(';').find_map(|kv| kv.strip_prefix("part="))
    }

    fn label(&self) -> String {
        format!("{} p={} {} r={} {}", self.check_id, self.p, self.weight, self.r, self.param)
    }
}

fn parse_csv(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("unexpected header".into());
    }
    let num = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(format!("malformed row `{line}`"));
            }
            Ok(Row {
                check_id: f[0].into(),
                p: f[1].into(),
                weight: f[2].into(),
                r: f[3].into(),
                param: f[5].into(),
                lhs: num(f[6]),
                rhs: num(f[7]),
                constant: num(f[8]),
                pass: f[10] == "true",
            })
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// All rows selected by `pick` pass; `expected` is the row count of the default grid.
fn rows_pass(rows: &[Row], expected: usize, pick: impl Fn(&Row) -> bool) -> Outcome {
    let sel: Vec<&Row> = rows.iter().filter(|r| pick(r)).collect();
    let bad: Vec<String> = sel.iter().filter(|r| !r.pass).map(|r| r.label()).collect();
    let mut detail = format!("{} rows, {} violations", sel.len(), bad.len());
    if let Some(first) = bad.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(sel.len() == expected && bad.is_empty(), detail)
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn l2() -> WeightedSpaceParams {
    WeightedSpaceParams::unweighted(2.0).unwrap()
}

fn ap_closed_form() -> Outcome {
    let est = ap_constant(&Weight::power(0.5), 2.0, &ApScan::default()).unwrap();
    let closed = est.closed_form.unwrap_or(f64::NAN);
    let scan_rel = (est.origin_anchored / (4.0 / 3.0) - 1.0).abs();
    let bad = ap_constant(&Weight::power(-2.0), 2.0, &ApScan::default()).unwrap();
    let flagged = !bad.in_ap() && WeightedSpaceParams::new(2.0, Weight::power(-2.0)).unwrap().ap().is_err();
    outcome(
        (closed - 4.0 / 3.0).abs() < 1e-15 && scan_rel < 1e-2 && flagged,
        format!("closed form {closed}, origin-anchored scan rel err {scan_rel:.2e}, power(-2) flagged {flagged}"),
    )
}

fn vp_reproduction(rng: &mut ChaCha8Rng) -> Outcome {
    let grid: Vec<f64> = (0..=64).map(|i| -8.0 + 0.25 * i as f64).collect();
    let mut worst = 0.0f64;
    for i in 0..5 {
        let sigma = if i % 2 == 0 { 1.0 } else { 2.0 };
        let first = rng.gen_range(-3..=0);
        let coeffs: Vec<f64> = (0..rng.gen_range(3..=7)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = SincExpansion::new(sigma, first, coeffs).unwrap();
        let gf = g.to_function("g", 0);
        let j = vp_approx(&gf, sigma, &cfg()).unwrap();
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for &x in &grid {
            let v = g.eval(x);
            diff = diff.max((j.eval(x).unwrap() - v).abs());
            scale = scale.max(v.abs());
        }
        worst = worst.max(diff / scale);
    }
    outcome(worst <= 1e-4, format!("max sup error / sup|g| = {worst:.3e}"))
}

fn vp_type() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["gaussian", "bump"] {
        let f = Fixture::by_name(name).unwrap().f;
        for sigma in [1.0, 2.0, 4.0] {
            let j = vp_approx(&f, sigma, &cfg()).unwrap();
            let t = exp_type_estimate(&j, sigma, &SpectrumGrid::default()).unwrap();
            worst = worst.max(t / (2.0 * sigma));
        }
    }
    outcome(worst <= 1.05, format!("max type / 2sigma = {worst:.4}"))
}

fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn nested_t(f: &dyn Fn(f64) -> f64, x: f64, delta: f64, j: usize) -> f64 {
    if j == 0 {
        return f(x);
    }
    simpson(&|s| nested_t(f, x + s, delta, j - 1), 0.0, delta, 32) / delta
}

fn oracle_coherence(rng: &mut ChaCha8Rng) -> Outcome {
    let fx = Fixture::by_name("gaussian").unwrap().f;
    let f = |x: f64| (-x * x).exp();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = rng.gen_range(-2.5..2.5);
        let delta = rng.gen_range(0.05..1.0);
        let j = rng.gen_range(1..=4);
        let t = t_iterate(&fx, delta, j, &cfg()).unwrap().eval(x).unwrap();
        worst = worst.max((t - nested_t(&f, x, delta, j)).abs());
    }
    let g = Fixture::by_name("gaussian").unwrap().f;
    let w = extremal_dual(&g, &l2(), &cfg()).unwrap();
    let deriv = [1, 2].iter().all(|&k| transfer_derivative_check(&g, &w, k, 0.5, &cfg()).map(|r| r.pass).unwrap_or(false));
    outcome(worst <= 1e-6 && deriv, format!("max |T^j - nested| = {worst:.2e}; transfer derivative k=1,2 pass {deriv}"))
}

fn substitution_noted() -> bool {
    let g = Fixture::by_name("gaussian").unwrap();
    let p = CheckParams { r: Some(1), delta: Some(0.25), ..CheckParams::default() };
    verify_inequality("inverse", &g, &l2(), &p, &cfg()).map(|r| r.notes.contains("upper bounds")).unwrap_or(false)
}

fn run_default_suite(out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_expapprox"))
        .args(["verify", "--suite", "default", "--out"])
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let bytes = std::fs::read(out).map_err(|e| e.to_string())?;
    println!("  verify --suite default exited with {}", status.code().unwrap_or(-1));
    Ok(bytes)
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let timed = |name: &'static str, f: &mut dyn FnMut() -> Outcome, results: &mut Vec<(&str, Outcome, f64)>| {
        let t0 = Instant::now();
        let o = f();
        let secs = t0.elapsed().as_secs_f64();
        println!("{} {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o, secs));
    };

    timed("A_p closed form", &mut ap_closed_form, &mut results);

    let dir = std::env::temp_dir().join(format!("expapprox-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b): (PathBuf, PathBuf) = (dir.join("run1.csv"), dir.join("run2.csv"));
    let t0 = Instant::now();
    let first = run_default_suite(&a);
    let suite_secs = t0.elapsed().as_secs_f64();
    println!("  default suite took {suite_secs:.1}s");
    let rows = first.as_ref().map_err(|e| e.clone()).and_then(|bytes| parse_csv(&String::from_utf8_lossy(bytes)));
    let from_rows = |pick: &dyn Fn(&[Row]) -> Outcome| match &rows {
        Ok(r) => pick(r),
        Err(e) => outcome(false, format!("no report: {e}")),
    };

    timed("duality", &mut || from_rows(&|r| rows_pass(r, 24, |x| x.check_id == "duality")), &mut results);
    timed("Steklov boundedness", &mut || from_rows(&|r| rows_pass(r, 144, |x| x.check_id == "steklov_bound")), &mut results);
    timed("dlVP reproduction", &mut || vp_reproduction(&mut rng), &mut results);
    timed("dlVP type", &mut vp_type, &mut results);
    timed(
        "Jackson",
        &mut || {
            from_rows(&|r| {
                let mut o = rows_pass(r, 192, |x| x.check_id == "jackson");
                let ratio = r
                    .iter()
                    .filter(|x| x.check_id == "jackson" && x.rhs > 0.0)
                    .map(|x| x.lhs * x.constant / x.rhs)
                    .fold(0.0, f64::max);
                o.detail.push_str(&format!("; max lhs/Omega = {ratio:.4}"));
                o
            })
        },
        &mut results,
    );
    timed(
        "K-Omega equivalence",
        &mut || {
            from_rows(&|r| {
                let mut o = rows_pass(r, 224, |x| x.check_id == "k_equiv_upper");
                let positive = r.iter().filter(|x| x.check_id == "k_equiv_upper").all(|x| x.lhs > 0.0);
                o.pass &= positive;
                o.detail.push_str(&format!("; all K_est > 0 {positive}"));
                o
            })
        },
        &mut results,
    );
    timed("quasi-monotonicity", &mut || from_rows(&|r| rows_pass(r, 672, |x| x.check_id == "quasi_monotone")), &mut results);
    timed(
        "Marchaud and inverse",
        &mut || {
            from_rows(&|r| {
                let mut o = rows_pass(r, 576, |x| x.check_id == "marchaud" || x.check_id == "inverse");
                let noted = substitution_noted();
                o.pass &= noted;
                o.detail.push_str(&format!("; substitution noted {noted}"));
                o
            })
        },
        &mut results,
    );
    timed(
        "convergence",
        &mut || {
            from_rows(&|r| {
                rows_pass(r, 96, |x| {
                    matches!(x.check_id.as_str(), "k_converge" | "mollifier_converge")
                        || (x.check_id == "modulus_props" && x.part() == Some("zero_limit"))
                        || (x.check_id == "vp_properties" && x.part() == Some("convergence"))
                })
            })
        },
        &mut results,
    );
    timed("oracle coherence", &mut || oracle_coherence(&mut rng), &mut results);
    timed(
        "determinism",
        &mut || match (&first, run_default_suite(&b)) {
            (Ok(x), Ok(y)) => outcome(x == &y && !x.is_empty(), format!("{} bytes, identical {}", x.len(), x == &y)),
            (Err(e), _) => outcome(false, e.clone()),
            (_, Err(e)) => outcome(false, e),
        },
        &mut results,
    );
    let _ = std::fs::remove_dir_all(&dir);

    let failed = results.iter().filter(|(_, o, _)| !o.pass).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
