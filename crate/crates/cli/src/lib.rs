//! `utm` command-line front end: solve, transform, verify and zeros.

pub mod checks;
pub mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::Context as _;
use serde::Serialize;
use serde_json::json;
use utm_core::contour::build_contour_deformed;
use utm_core::datum::{builtin_datum, Domain, ProblemId, Tabulated};
use utm_core::solver::{solve_heat_sine, solve_utm, HeatOptions, SolutionQuery, SolverOptions};
use utm_core::spectral::Sign;
use utm_core::transform::{TransformOptions, TransformPair};
use utm_core::zeros::{certify_contour_clearance, find_zeros};
use utm_core::{Datum, UtmError, C64};

pub use checks::CheckRecord;
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Transform,
    Verify,
    Zeros,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Solve => "solve",
            Command::Transform => "transform",
            Command::Verify => "verify",
            Command::Zeros => "zeros",
        })
    }
}

/// Invalid input detected before or during setup.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn is_config_error(e: &UtmError) -> bool {
    matches!(
        e,
        UtmError::DomainMismatch { .. }
            | UtmError::UnknownDatum(_)
            | UtmError::Incompatible(_)
            | UtmError::InvalidContour(_)
            | UtmError::InvalidDeformation { .. }
            | UtmError::BadTable(_)
            | UtmError::MissingDerivative { .. }
            | UtmError::TransformUndefined { .. }
    )
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<ConfigError>().is_some()
        || err.downcast_ref::<UtmError>().is_some_and(is_config_error)
        || err.downcast_ref::<toml::de::Error>().is_some()
        || err.downcast_ref::<csv::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        EXIT_CONFIG
    } else {
        EXIT_VERIFY
    }
}

macro_rules! config_bail {
    ($($arg:tt)*) => { return Err(ConfigError(format!($($arg)*)).into()) };
}

/// Fully resolved run settings, echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub command: Command,
    pub problem: ProblemId,
    pub datum: String,
    pub datum_file: Option<PathBuf>,
    pub decay_rate: Option<f64>,
    pub radius: f64,
    pub delta: Option<f64>,
    pub indent_radius: Option<f64>,
    pub below_axis: bool,
    pub x_grid: Vec<f64>,
    pub t: Vec<f64>,
    pub lambda: Vec<(f64, f64)>,
    pub suite: String,
    pub seed: u64,
    pub margin: f64,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub contour_out: Option<PathBuf>,
    pub samples_json: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20240601;

fn parse_lambda(s: &str) -> anyhow::Result<(f64, f64)> {
    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
    match (re.trim().parse(), im.trim().parse()) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => config_bail!("cannot parse spectral point {s:?}; expected re:im"),
    }
}

impl Settings {
    pub fn resolve(command: Command, cfg: &RunConfig) -> anyhow::Result<Self> {
        let problem = match cfg.problem.as_deref() {
            Some(p) => ProblemId::parse(p).ok_or_else(|| ConfigError(format!("unknown problem {p:?}")))?,
            None if command == Command::Zeros => ProblemId::FiniteIntervalKdV,
            None => config_bail!("--problem is required"),
        };
        let datum = match (&cfg.datum, &cfg.datum_file) {
            (Some(_), Some(_)) => config_bail!("give either --datum or --datum-file, not both"),
            (Some(d), None) => d.clone(),
            (None, Some(p)) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "table".into()),
            (None, None) if command == Command::Zeros => String::new(),
            (None, None) => config_bail!("--datum or --datum-file is required"),
        };
        let radius = cfg.radius.unwrap_or(match command {
            Command::Solve | Command::Zeros => 40.0,
            _ => 60.0,
        });
        if !(radius.is_finite() && radius > 0.0) {
            config_bail!("radius must be positive");
        }
        let (lo, hi, n) = match problem {
            ProblemId::FiniteIntervalKdV => (0.05, 0.95, 19),
            _ => (0.1, 5.0, 50),
        };
        let x_min = cfg.x_min.unwrap_or(lo);
        let x_max = cfg.x_max.unwrap_or(hi);
        let n = cfg.x_grid.unwrap_or(n);
        if n == 0 || !(x_min <= x_max) {
            config_bail!("empty x grid");
        }
        let x_grid = if n == 1 { vec![x_min] } else { (0..n).map(|k| x_min + (x_max - x_min) * k as f64 / (n - 1) as f64).collect() };
        let t = cfg.t.clone().unwrap_or_else(|| vec![0.0]);
        if t.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            config_bail!("times must be finite and non-negative");
        }
        let lambda = cfg.lambda.iter().flatten().map(String::as_str).map(parse_lambda).collect::<anyhow::Result<_>>()?;
        let margin = cfg.margin.unwrap_or(0.1);
        if let Some(d) = cfg.delta {
            let max = utm_core::contour::max_deformation::<f64>();
            if !(0.0..max).contains(&d) {
                return Err(UtmError::InvalidDeformation { delta: d, max }.into());
            }
        }
        Ok(Settings {
            command,
            problem,
            datum,
            datum_file: cfg.datum_file.clone(),
            decay_rate: cfg.decay_rate,
            radius,
            delta: cfg.delta,
            indent_radius: cfg.indent_radius,
            below_axis: cfg.below_axis.unwrap_or(false),
            x_grid,
            t,
            lambda,
            suite: cfg.suite.clone().unwrap_or_else(|| "all".into()),
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
            margin,
            out: cfg.out.clone(),
            manifest: cfg.manifest.clone(),
            contour_out: cfg.contour_out.clone(),
            samples_json: cfg.samples_json.clone(),
        })
    }

    pub fn load_datum(&self) -> anyhow::Result<Datum> {
        let domain = self.problem.domain();
        let datum = match &self.datum_file {
            Some(path) => read_table(path, domain, self.decay_rate, &self.datum)?,
            None => builtin_datum::<f64>(&self.datum)?,
        };
        if datum.domain() != domain {
            return Err(UtmError::DomainMismatch { datum: datum.domain().to_string(), problem: domain.to_string() }.into());
        }
        Ok(datum)
    }
}

/// Reads a CSV table with columns x, f, f', f'', f''' (header optional).
pub fn read_table(path: &Path, domain: Domain, decay_rate: Option<f64>, label: &str) -> anyhow::Result<Datum> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut cols: [Vec<f64>; 5] = Default::default();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: Vec<Option<f64>> = rec.iter().map(|s| s.parse().ok()).collect();
        if row == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        if parsed.len() != 5 || parsed.iter().any(Option::is_none) {
            config_bail!("{}: row {} needs five numeric columns", path.display(), row + 1);
        }
        for (c, v) in cols.iter_mut().zip(parsed) {
            c.push(v.unwrap_or_default());
        }
    }
    let [x, f, f1, f2, f3] = cols;
    let decay = match domain {
        Domain::HalfLine => Some(decay_rate.unwrap_or(0.5)),
        Domain::UnitInterval => None,
    };
    Ok(Datum::tabulated(label, domain, decay, Tabulated::new(x, f, f1, f2, f3)?)?)
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Result of one run: exit status plus the check records for the manifest.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit: i32,
    pub checks: Vec<CheckRecord>,
}

pub fn run(command: Command, cfg: &RunConfig) -> anyhow::Result<RunOutcome> {
    let start = Instant::now();
    let settings = Settings::resolve(command, cfg)?;
    let checks = match command {
        Command::Solve => solve(&settings)?,
        Command::Transform => transform(&settings)?,
        Command::Verify => verify(&settings)?,
        Command::Zeros => zeros(&settings)?,
    };
    if let Some(path) = &settings.manifest {
        let manifest = json!({
            "config": settings,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "checks": checks,
            "wall_time_s": start.elapsed().as_secs_f64(),
        });
        write_json(path, &manifest)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(RunOutcome { exit: if failed > 0 { EXIT_VERIFY } else { EXIT_OK }, checks })
}

fn solve(s: &Settings) -> anyhow::Result<Vec<CheckRecord>> {
    let datum = Arc::new(s.load_datum()?);
    let mut rows = Vec::new();
    if s.problem == ProblemId::HalfLineHeat {
        let opts = HeatOptions { radius: s.radius, ..HeatOptions::default() };
        for &x in &s.x_grid {
            for &t in &s.t {
                let (v, e) = if t == 0.0 { (datum.value(x), 0.0) } else { solve_heat_sine(&datum, x, t, &opts)? };
                rows.push((x, t, v, e));
            }
        }
    } else {
        let horizon = s.t.iter().copied().fold(0.0, f64::max).max(1.0);
        let topts = TransformOptions { radius: s.radius.max(60.0), indent_radius: s.indent_radius, ..TransformOptions::default() };
        let query = SolutionQuery {
            problem: s.problem,
            datum: datum.clone(),
            x_grid: s.x_grid.clone(),
            t_grid: s.t.clone(),
            horizon,
            options: SolverOptions {
                radius: s.radius,
                delta: s.delta,
                indent_radius: s.indent_radius,
                transform: topts,
                ..SolverOptions::default()
            },
        };
        let field = solve_utm(&query)?;
        for (i, &x) in field.x_grid.iter().enumerate() {
            for (j, &t) in field.t_grid.iter().enumerate() {
                rows.push((x, t, field.values[i][j], field.errors[i][j]));
            }
        }
    }
    let mut w = csv::Writer::from_writer(open_out(&s.out)?);
    w.write_record(["x", "t", "q_re", "q_im", "err_est"])?;
    for (x, t, v, e) in rows {
        w.write_record([fmt_num(x), fmt_num(t), fmt_num(v.re), fmt_num(v.im), fmt_num(e)])?;
    }
    w.flush()?;
    Ok(Vec::new())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSample {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub abs_err_est: Option<f64>,
}

fn sign_name(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn transform(s: &Settings) -> anyhow::Result<Vec<CheckRecord>> {
    if s.problem == ProblemId::HalfLineHeat {
        config_bail!("transform applies to the fi and hl problems; heat uses the sine transform inside solve");
    }
    let datum = Arc::new(s.load_datum()?);
    let topts = TransformOptions {
        radius: s.radius,
        indent_radius: s.indent_radius,
        below_axis: s.below_axis,
        ..TransformOptions::default()
    };
    let pair = TransformPair::for_datum(s.problem, &datum, topts)?;
    let delta = s.delta.unwrap_or(0.0);
    let mut points: Vec<(Sign, C64)> = Vec::new();
    let mut polylines = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let path = if delta == 0.0 {
            pair.path(sign).clone()
        } else {
            let opts = pair.path(sign).spec.map(|c| c.options).unwrap_or_default();
            build_contour_deformed(s.problem, sign, s.radius, opts, delta)?
        };
        let poly = path.polyline(33);
        if s.lambda.is_empty() {
            points.extend(poly.iter().map(|&(_, _, re, im)| (sign, C64::new(re, im))));
        }
        polylines.push((sign, poly));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut samples = Vec::with_capacity(points.len());
    if !s.lambda.is_empty() {
        // a requested point is kept on each branch whose transform is defined there
        let mut kept = Vec::with_capacity(points.len());
        for &(re, im) in &s.lambda {
            let z = C64::new(re, im);
            let mut last = None;
            for sign in [Sign::Plus, Sign::Minus] {
                match pair.forward(&datum, z, sign) {
                    Ok(_) => kept.push((sign, z)),
                    Err(e @ UtmError::TransformUndefined { .. }) => {
                        eprintln!("skipping lambda = {re}{im:+}i on {}: {e}", sign_name(sign));
                        last = Some(e);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            if let (Some(e), false) = (last, kept.iter().any(|p| p.1 == z)) {
                return Err(e.into());
            }
        }
        kept.sort_by_key(|p| p.0 == Sign::Minus);
        points = kept;
    }
    for &(sign, z) in &points {
        let v = pair.forward(&datum, z, sign)?;
        let err = pair.forward_by_kernel_quadrature(&datum, z, sign).ok().map(|q| (q - v).norm());
        rows.push((sign, z, v));
        samples.push(SpectralSample { lambda_re: z.re, lambda_im: z.im, value_re: v.re, value_im: v.im, abs_err_est: err });
    }
    let mut w = csv::Writer::from_writer(open_out(&s.out)?);
    w.write_record(["contour", "lambda_re", "lambda_im", "F_re", "F_im"])?;
    for (sign, z, v) in rows {
        w.write_record([sign_name(sign).to_string(), fmt_num(z.re), fmt_num(z.im), fmt_num(v.re), fmt_num(v.im)])?;
    }
    w.flush()?;
    if let Some(path) = &s.contour_out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["seg_index", "t_param", "re", "im"])?;
        // Gamma^+ segments first, then Gamma^- numbered on from there
        let mut offset = 0;
        for (_, poly) in &polylines {
            for &(idx, tp, re, im) in poly {
                w.write_record([(offset + idx).to_string(), fmt_num(tp), fmt_num(re), fmt_num(im)])?;
            }
            offset += poly.last().map_or(0, |p| p.0 + 1);
        }
        w.flush()?;
    }
    if let Some(path) = &s.samples_json {
        write_json(path, &samples)?;
    }
    Ok(Vec::new())
}

fn verify(s: &Settings) -> anyhow::Result<Vec<CheckRecord>> {
    let datum = s.load_datum()?;
    if s.problem != ProblemId::HalfLineHeat {
        let compat = utm_core::datum::check_compatibility(&datum, s.problem, 1e-12)?;
        if !compat.passed {
            return Err(UtmError::Incompatible(format!("{} fails {:?}", datum.label(), compat.satisfied)).into());
        }
    }
    let ctx = checks::CheckContext {
        radius: s.radius,
        indent_radius: s.indent_radius,
        below_axis: s.below_axis,
        seed: s.seed,
        ..checks::CheckContext::new(s.problem, datum)
    };
    let records = checks::run_suite(&ctx, &s.suite)?;
    let mut out = open_out(&s.out)?;
    serde_json::to_writer_pretty(&mut out, &records)?;
    writeln!(out)?;
    out.flush()?;
    Ok(records)
}

fn zeros(s: &Settings) -> anyhow::Result<Vec<CheckRecord>> {
    if s.problem != ProblemId::FiniteIntervalKdV {
        config_bail!("zeros applies to the finite-interval problem only");
    }
    let zs = find_zeros::<f64>(s.radius)?;
    let mut w = csv::Writer::from_writer(open_out(&s.out)?);
    w.write_record(["re", "im", "multiplicity", "residual", "region_tag"])?;
    for z in &zs {
        w.write_record([
            fmt_num(z.location.re),
            fmt_num(z.location.im),
            z.multiplicity.to_string(),
            fmt_num(z.residual),
            z.region_tag.to_string(),
        ])?;
    }
    w.flush()?;
    let delta = s.delta.unwrap_or(0.0);
    let report = certify_contour_clearance(&zs, s.radius, s.margin, delta)?;
    let record = CheckRecord {
        check_id: "zeros_clearance".into(),
        problem: s.problem.short_name().into(),
        datum: String::new(),
        params: json!({ "radius": s.radius, "margin": s.margin, "delta": delta, "zeros": zs.len(), "swept": report.swept }),
        magnitude: report.min_distance,
        tolerance: s.margin,
        pass: report.pass,
    };
    if !record.pass {
        eprintln!("contour clearance {:.3e} below margin {}", report.min_distance, s.margin);
    }
    Ok(vec![record])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(problem: &str, datum: &str) -> RunConfig {
        RunConfig { problem: Some(problem.into()), datum: Some(datum.into()), ..RunConfig::default() }
    }

    #[test]
    fn defaults_follow_the_problem() {
        let s = Settings::resolve(Command::Verify, &cfg("fi", "fi_poly1")).unwrap();
        assert_eq!(s.radius, 60.0);
        assert_eq!(s.x_grid.len(), 19);
        assert!((s.x_grid[0] - 0.05).abs() < 1e-15 && (s.x_grid[18] - 0.95).abs() < 1e-15);
        let s = Settings::resolve(Command::Solve, &cfg("hl", "hl_exp1")).unwrap();
        assert_eq!(s.radius, 40.0);
        assert_eq!(s.x_grid.len(), 50);
        assert_eq!(s.t, [0.0]);
        assert_eq!(Settings::resolve(Command::Zeros, &RunConfig::default()).unwrap().problem, ProblemId::FiniteIntervalKdV);
    }

    #[test]
    fn config_errors_map_to_exit_2() {
        let bad = [
            RunConfig { problem: Some("kdv".into()), ..cfg("fi", "fi_poly1") },
            RunConfig { delta: Some(-0.1), ..cfg("fi", "fi_poly1") },
            RunConfig { lambda: Some(vec!["1:x".into()]), ..cfg("fi", "fi_poly1") },
            RunConfig { x_grid: Some(0), ..cfg("fi", "fi_poly1") },
            RunConfig { datum: None, ..cfg("fi", "fi_poly1") },
        ];
        for c in bad {
            let err = Settings::resolve(Command::Solve, &c).unwrap_err();
            assert_eq!(exit_code(&err), EXIT_CONFIG, "{err}");
        }
        let err = Settings::resolve(Command::Solve, &cfg("hl", "fi_poly1")).unwrap().load_datum().unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
        assert_eq!(exit_code(&UtmError::NonFinite { re: 0.0, im: 0.0 }.into()), EXIT_VERIFY);
    }

    #[test]
    fn numbers_carry_17_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
    }
}
