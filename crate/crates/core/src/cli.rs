//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bandlimited::{deviation_oracle, deviation_upper, exp_type_estimate, vp_approx, OracleConfig, SpectrumGrid};
use crate::error::Error;
use crate::harness::{default_spaces, run_suite, Fixture, SpaceSpec, SuiteRanges, CHECK_IDS, FIXTURE_NAMES};
use crate::numerics::QuadratureConfig;
use crate::report::{fmt_g12, to_csv, to_json, InequalityReport};
use crate::steklov::modulus;
use crate::weights::{ap_constant, weighted_norm, ApScan, Weight, WeightedSpaceParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "expapprox", version, about = "Weighted approximation by entire functions of exponential type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weighted norm of a fixture
    Norm(Common),
    /// Averaged modulus of smoothness Ω_r(f, δ)
    Modulus(Common),
    /// de la Vallée Poussin approximant J(f, σ): norm, error and spectral type
    Vp(Common),
    /// Upper bounds for the best approximation A_σ(f)
    Deviation(Common),
    /// Muckenhoupt A_p constant of a weight
    Apconst(Common),
    /// Run registry checks and write a report
    Verify(Common),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Fixture name
    #[arg(long)]
    f: Option<String>,
    /// Exponent p >= 1
    #[arg(long)]
    p: Option<f64>,
    /// Weight as const:<c>, power:<alpha> or tab:<x/v,...>
    #[arg(long)]
    weight: Option<String>,
    /// Smoothness order
    #[arg(long)]
    r: Option<usize>,
    /// Derivative order
    #[arg(long)]
    k: Option<usize>,
    /// Exponential type
    #[arg(long)]
    sigma: Option<f64>,
    /// Step
    #[arg(long)]
    delta: Option<f64>,
    /// Report path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Relative quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Initial truncation radius of line integrals
    #[arg(long = "L")]
    l: Option<f64>,
    /// JSON or TOML file with the same keys; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named suite for verify: default or quick
    #[arg(long)]
    suite: Option<String>,
}

/// Config file schema. Keys mirror the flags; `fixtures`, `spaces` and
/// `ranges` configure `verify`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub f: Option<String>,
    pub p: Option<f64>,
    pub weight: Option<String>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub suite: Option<String>,
    pub fixtures: Option<Vec<String>>,
    pub spaces: Option<Vec<SpaceSpec>>,
    pub ranges: Option<SuiteRanges>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if json {
            serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
        } else {
            toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Norm,
    Modulus,
    Vp,
    Deviation,
    Apconst,
    Verify,
}

/// Fully resolved and validated run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub f: String,
    pub p: f64,
    pub weight: String,
    pub r: usize,
    pub k: usize,
    pub sigma: f64,
    pub delta: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quad: QuadratureConfig,
    pub fixtures: Vec<String>,
    pub spaces: Vec<SpaceSpec>,
    pub ranges: SuiteRanges,
}

fn resolve(command: CommandKind, c: Common) -> Result<RunConfig, String> {
    let file = match &c.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let suite = c.suite.or(file.suite);
    let (mut fixtures, mut spaces, mut ranges): (Vec<String>, Vec<SpaceSpec>, SuiteRanges) = match suite.as_deref() {
        None | Some("default") => (FIXTURE_NAMES.iter().map(|s| s.to_string()).collect(), default_spaces(), SuiteRanges::default()),
        Some("quick") => (
            vec!["gaussian".into(), "indicator".into()],
            vec![
                SpaceSpec { p: 2.0, weight: "const:1".into() },
                SpaceSpec { p: 2.0, weight: "power:0.5".into() },
            ],
            SuiteRanges::quick(),
        ),
        Some(other) => return Err(format!("--suite: unknown suite `{other}`; expected default or quick")),
    };
    if let Some(v) = file.fixtures {
        fixtures = v;
    }
    if let Some(v) = file.spaces {
        spaces = v;
    }
    if let Some(v) = file.ranges {
        ranges = v;
    }
    let f = c.f.or(file.f);
    let p = c.p.or(file.p);
    let weight = c.weight.or(file.weight);
    let r = c.r.or(file.r);
    let k = c.k.or(file.k);
    let sigma = c.sigma.or(file.sigma);
    let delta = c.delta.or(file.delta);
    if let Some(f) = &f {
        fixtures = vec![f.clone()];
    }
    if p.is_some() || weight.is_some() {
        spaces = vec![SpaceSpec {
            p: p.unwrap_or(2.0),
            weight: weight.clone().unwrap_or_else(|| "const:1".into()),
        }];
    }
    if let Some(r) = r {
        ranges.r = vec![r];
    }
    if let Some(k) = k {
        ranges.k = vec![k];
    }
    if let Some(s) = sigma {
        ranges.sigma = vec![s];
    }
    if let Some(d) = delta {
        ranges.delta = vec![d];
    }
    let mut quad = QuadratureConfig::default();
    if let Some(t) = c.tol.or(file.tol) {
        if !(t > 0.0 && t < 1.0) {
            return Err(format!("--tol: expected a value in (0, 1), got {t}"));
        }
        quad.rel_tol = t;
    }
    if let Some(l) = c.l.or(file.l) {
        if !(l > 0.0 && l.is_finite()) {
            return Err(format!("--L: expected a positive radius, got {l}"));
        }
        quad.truncation_radius = l;
        quad.max_radius = quad.max_radius.max(l);
    }
    let cfg = RunConfig {
        command,
        f: f.unwrap_or_else(|| "gaussian".into()),
        p: p.unwrap_or(2.0),
        weight: weight.unwrap_or_else(|| "const:1".into()),
        r: r.unwrap_or(1),
        k: k.unwrap_or(1),
        sigma: sigma.unwrap_or(1.0),
        delta: delta.unwrap_or(0.25),
        out: c.out.or(file.out),
        format: c.format.or(file.format).unwrap_or(Format::Csv),
        quad,
        fixtures,
        spaces,
        ranges,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(format!("--p: expected a finite value >= 1, got {}", self.p));
        }
        if self.r == 0 {
            return Err("--r: expected an order >= 1".into());
        }
        if self.k == 0 {
            return Err("--k: expected an order >= 1".into());
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(format!("--sigma: expected a positive type, got {}", self.sigma));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(format!("--delta: expected a positive step, got {}", self.delta));
        }
        Weight::parse(&self.weight).map_err(|e| format!("--weight: {e}"))?;
        for name in self.fixtures.iter().chain(std::iter::once(&self.f)) {
            Fixture::by_name(name).map_err(|e| format!("--f: {e}"))?;
        }
        for s in &self.spaces {
            s.resolve().map_err(|e| format!("spaces: {e}"))?;
        }
        self.ranges.validate().map_err(|e| match e {
            Error::UnknownCheck(c) => format!("ranges.checks: unknown check `{c}`; known: {}", CHECK_IDS.join(", ")),
            e => format!("ranges: {e}"),
        })?;
        Ok(())
    }

    fn space(&self) -> crate::Result<WeightedSpaceParams> {
        WeightedSpaceParams::new(self.p, Weight::parse(&self.weight)?)
    }
}

/// Parses `argv` (program name first) into a validated config.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (kind, common) = match cli.command {
        Command::Norm(c) => (CommandKind::Norm, c),
        Command::Modulus(c) => (CommandKind::Modulus, c),
        Command::Vp(c) => (CommandKind::Vp, c),
        Command::Deviation(c) => (CommandKind::Deviation, c),
        Command::Apconst(c) => (CommandKind::Apconst, c),
        Command::Verify(c) => (CommandKind::Verify, c),
    };
    resolve(kind, common).map_err(|msg| clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{msg}\n")))
}

fn write_out(path: &Path, body: &str) -> Result<(), String> {
    std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Key/value results of the single-quantity commands.
fn render_values(values: &[(String, String)], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in values {
                let _ = writeln!(s, "{k},{v}");
            }
            s
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                values.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
            let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("values serialize");
            s.push('\n');
            s
        }
    }
}

fn compute(cfg: &RunConfig) -> crate::Result<Vec<(String, String)>> {
    let q = &cfg.quad;
    let g = |v: f64| fmt_g12(v);
    Ok(match cfg.command {
        CommandKind::Norm => {
            let f = Fixture::by_name(&cfg.f)?.f;
            vec![("norm".into(), g(weighted_norm(&f, &cfg.space()?, q)?))]
        }
        CommandKind::Modulus => {
            let f = Fixture::by_name(&cfg.f)?.f;
            vec![("modulus".into(), g(modulus(&f, cfg.delta, cfg.r, &cfg.space()?, q)?))]
        }
        CommandKind::Vp => {
            let f = Fixture::by_name(&cfg.f)?.f;
            let sp = cfg.space()?;
            let j = vp_approx(&f, cfg.sigma, q)?;
            vec![
                ("vp_norm".into(), g(weighted_norm(&j, &sp, q)?)),
                ("vp_error".into(), g(weighted_norm(&f.sub(&j), &sp, q)?)),
                ("type_estimate".into(), g(exp_type_estimate(&j, cfg.sigma, &SpectrumGrid::default())?)),
                ("type_bound".into(), g(2.0 * cfg.sigma)),
            ]
        }
        CommandKind::Deviation => {
            let f = Fixture::by_name(&cfg.f)?.f;
            let sp = cfg.space()?;
            let vp = deviation_upper(&f, cfg.sigma, &sp, q)?.upper;
            let oc = OracleConfig::default();
            let mut out = vec![("vp_upper".into(), g(vp))];
            match deviation_oracle(&f, cfg.sigma, &sp, &oc, q) {
                Ok(o) => {
                    out.push((format!("oracle_upper_n{}", oc.n), g(o.upper)));
                    out.push(("best_upper".into(), g(o.upper.min(vp))));
                }
                Err(e) => {
                    out.push((format!("oracle_upper_n{}", oc.n), format!("error: {e}")));
                    out.push(("best_upper".into(), g(vp)));
                }
            }
            out
        }
        CommandKind::Apconst => {
            let w = Weight::parse(&cfg.weight)?;
            let est = ap_constant(&w, cfg.p, &ApScan::default())?;
            let mut out = Vec::new();
            if let Some(cf) = est.closed_form {
                out.push(("closed_form".into(), g(cf)));
            }
            out.push(("scan_origin_anchored".into(), g(est.origin_anchored)));
            out.push(("scan_all_intervals".into(), g(est.scanned)));
            out.push(("constant".into(), g(est.constant)));
            out.push(("in_ap".into(), est.in_ap().to_string()));
            out
        }
        CommandKind::Verify => unreachable!("verify is dispatched separately"),
    })
}

fn summary(reports: &[InequalityReport]) -> String {
    let mut s = String::new();
    let mut counts: std::collections::BTreeMap<&str, (usize, usize)> = Default::default();
    for r in reports {
        let e = counts.entry(&r.check_id).or_default();
        e.1 += 1;
        if r.pass {
            e.0 += 1;
        }
    }
    for (id, (pass, total)) in &counts {
        let _ = writeln!(s, "{id:22} {pass:5}/{total:<5}");
    }
    let failed: Vec<&InequalityReport> = reports.iter().filter(|r| !r.pass).collect();
    let passed = reports.len() - failed.len();
    let _ = writeln!(s, "passed {passed} of {} checks", reports.len());
    for r in failed {
        let _ = writeln!(
            s,
            "FAIL {} p={} {} r={} k={} {} lhs={} rhs={} {}",
            r.check_id,
            fmt_g12(r.params.p),
            r.params.weight,
            r.params.r.map_or("-".into(), |v| v.to_string()),
            r.params.k.map_or("-".into(), |v| v.to_string()),
            r.params.param,
            fmt_g12(r.lhs),
            fmt_g12(r.rhs),
            r.notes
        );
    }
    s
}

fn verify(cfg: &RunConfig, stdout: &mut dyn std::io::Write) -> Result<i32, String> {
    let corpus = cfg.fixtures.iter().map(|n| Fixture::by_name(n)).collect::<crate::Result<Vec<_>>>().map_err(|e| e.to_string())?;
    let spaces = cfg.spaces.iter().map(|s| s.resolve()).collect::<crate::Result<Vec<_>>>().map_err(|e| e.to_string())?;
    let reports = run_suite(&corpus, &spaces, &cfg.ranges, &cfg.quad);
    let body = match cfg.format {
        Format::Csv => to_csv(&reports),
        Format::Json => to_json(&reports),
    };
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("expapprox_report.{ext}")));
    write_out(&path, &body)?;
    let _ = write!(stdout, "{}", summary(&reports));
    let _ = writeln!(stdout, "report written to {}", path.display());
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_FAIL })
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_with_output(argv, &mut stdout.lock())
}

pub fn run_with_output<I, T>(argv: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{}", e.render());
            } else {
                eprint!("{}", e.render());
            }
            return code;
        }
    };
    if cfg.command == CommandKind::Verify {
        return match verify(&cfg, stdout) {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("error: {msg}");
                EXIT_FAIL
            }
        };
    }
    match compute(&cfg) {
        Ok(values) => {
            for (k, v) in &values {
                let _ = writeln!(stdout, "{k} = {v}");
            }
            if let Some(path) = &cfg.out {
                if let Err(msg) = write_out(path, &render_values(&values, cfg.format)) {
                    eprintln!("error: {msg}");
                    return EXIT_FAIL;
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}
