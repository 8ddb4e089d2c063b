//! Command-line front end: `verify`, `sweep` and `analyze`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! errors (including out-of-domain parameters), 3 for I/O failures.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nks3::exec::{map_indexed, Execution};
use nks3::hypersurface::immersion::MIN_CLI_RADIUS;
use nks3::hypersurface::{
    analysis::classify_coefficients, analyze_point, classify_p_xi, make_example, spectral_report, DomainPoint, Family,
    FamilyParams, SpectralReport,
};
use nks3::verify::{self, SampleCounts, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest across-point spread of any principal curvature accepted by `sweep`.
pub const SPREAD_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "nks3", version, about = "Hopf hypersurfaces of the nearly Kähler S³×S³")]
pub struct Cli {
    /// Run sample loops on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// Tabulate principal curvatures over a parameter grid as CSV.
    Sweep(SweepArgs),
    /// Analyze one point of an example hypersurface and print JSON.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Structure,
    Hypersurface,
    Isometry,
    All,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed; falls back to NKS3_SEED, then 0.
    #[arg(long, env = "NKS3_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long)]
    pub family: Option<Family>,
    /// Radius for m1-m3.
    #[arg(long)]
    pub r: Option<f64>,
    /// Torus parameter k for m4-m6.
    #[arg(long)]
    pub k: Option<f64>,
    /// Torus parameter l; defaults to √(1−k²).
    #[arg(long)]
    pub l: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Samples per suite (per example for the hypersurface suite).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Restrict the hypersurface suite to one example.
    #[command(flatten)]
    pub example: ExampleArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: Family,
    /// Radius grid: comma list or `start:stop:step` (inclusive).
    #[arg(long)]
    pub r: Option<String>,
    /// Grid of torus parameters k, same syntax as `--r`.
    #[arg(long)]
    pub k: Option<String>,
    /// Matching grid of l; defaults to √(1−k²) for each k.
    #[arg(long)]
    pub l: Option<String>,
    /// Surface points sampled per grid value.
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    /// Chart parameters u1,..,u5.
    #[arg(long, value_parser = parse_point, default_value = "0,0,0,0,0")]
    pub at: DomainPoint,
}

/// Usage or I/O error carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

pub fn parse_point(s: &str) -> Result<DomainPoint, String> {
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 5 coordinates, got {}", v.len()))
}

/// Parses `a,b,c` or `start:stop:step` (stop included up to rounding).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [one] => one.split(',').map(parse).collect::<Result<Vec<_>, _>>()?,
        [start, stop, step] => {
            let (a, b, h) = (parse(start)?, parse(stop)?, parse(step)?);
            if !(h > 0.0) || b < a {
                return Err(format!("range `{s}` needs start ≤ stop and step > 0"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            (0..=n).map(|i| a + h * i as f64).collect()
        }
        _ => return Err(format!("grid `{s}` is neither a list nor start:stop:step")),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(format!("grid `{s}` has no usable values"));
    }
    Ok(grid)
}

fn check_radius(r: f64) -> Result<(), CliError> {
    if !(MIN_CLI_RADIUS..=1.0).contains(&r) {
        return Err(CliError::usage(format!("r = {r} is outside [{MIN_CLI_RADIUS}, 1]")));
    }
    Ok(())
}

fn torus_params(k: f64, l: Option<f64>) -> FamilyParams {
    FamilyParams::torus(k, l.unwrap_or_else(|| (1.0 - k * k).max(0.0).sqrt()))
}

impl ExampleArgs {
    fn params(&self, family: Family) -> Result<FamilyParams, CliError> {
        let params = if family.is_radius_family() {
            let r = self.r.ok_or_else(|| CliError::usage(format!("{family} needs --r")))?;
            check_radius(r)?;
            FamilyParams::radius(r)
        } else {
            let k = self.k.ok_or_else(|| CliError::usage(format!("{family} needs --k")))?;
            torus_params(k, self.l)
        };
        make_example(family, params).map_err(|e| CliError::usage(e.to_string()))?;
        Ok(params)
    }
}

/// Formats with 12 significant digits, plain notation for moderate
/// exponents, no locale.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn print_stdout(contents: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(contents.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn cmd_verify(args: &VerifyArgs, mode: Execution) -> Result<i32, CliError> {
    let seed = args.seed.seed;
    if args.samples == Some(0) {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let n = |default| args.samples.unwrap_or(default);
    let hypersurface = |seed, samples| -> Result<SuiteReport, CliError> {
        match args.example.family {
            Some(family) => {
                let params = args.example.params(family)?;
                Ok(verify::run_hypersurface_suite_with(family, params, seed, samples, mode).map_err(usage)?)
            }
            None => Ok(verify::run_hypersurface_examples(seed, samples, mode).map_err(usage)?),
        }
    };
    let report = match args.suite {
        Suite::Structure => {
            verify::run_structure_suite_with(seed, n(verify::DEFAULT_STRUCTURE_SAMPLES), mode).map_err(usage)?
        }
        Suite::Isometry => {
            verify::run_isometry_suite_with(seed, n(verify::DEFAULT_ISOMETRY_SAMPLES), mode).map_err(usage)?
        }
        Suite::Hypersurface => hypersurface(seed, n(verify::DEFAULT_HYPERSURFACE_SAMPLES))?,
        Suite::All => {
            let counts = args.samples.map(SampleCounts::uniform).unwrap_or_default();
            if args.example.family.is_some() {
                return Err(CliError::usage("--family applies to --suite hypersurface only"));
            }
            verify::run_all(seed, counts, mode).map_err(usage)?
        }
    };
    let text = report.to_json();
    if let Some(path) = &args.out {
        write_output(path, &text)?;
    }
    print_stdout(&format!("{text}\n"))?;
    for c in report.failures() {
        eprintln!("FAIL {}: {:e} > {:e} ({})", c.id, c.max_residual, c.tolerance, c.anchor);
    }
    eprintln!(
        "{}: {}/{} checks passed in {:.0} ms",
        report.suite,
        report.checks.iter().filter(|c| c.pass).count(),
        report.checks.len(),
        report.duration_ms
    );
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAILED })
}

fn usage(e: nks3::GeometryError) -> CliError {
    CliError::usage(e.to_string())
}

/// One CSV row of a sweep: the spectrum averaged over sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub params: FamilyParams,
    pub eigenvalues: [f64; 5],
    pub mult_pattern: String,
    pub trace: f64,
    pub pxi_class: String,
    pub theta: Option<f64>,
    /// Largest across-point range of any eigenvalue.
    pub spread: f64,
}

pub const SWEEP_HEADER: [&str; 13] = [
    "family",
    "r",
    "k",
    "l",
    "ev1",
    "ev2",
    "ev3",
    "ev4",
    "ev5",
    "mult_pattern",
    "traceA",
    "pxi_class",
    "theta",
];

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        let (k, l) = self.params.kl().unzip();
        let mut rec = vec![self.family.to_string(), opt(self.params.r()), opt(k), opt(l)];
        rec.extend(self.eigenvalues.iter().map(|v| format_sig(*v)));
        rec.push(self.mult_pattern.clone());
        rec.push(format_sig(self.trace));
        rec.push(self.pxi_class.clone());
        rec.push(opt(self.theta));
        rec
    }
}

fn sweep_point(family: Family, params: FamilyParams, seed: u64, index: usize) -> Option<SpectralReport> {
    let m = make_example(family, params).ok()?;
    let (m, u) = verify::random_surface_point(&m, seed, index);
    analyze_point(&m, &u).ok().map(|data| spectral_report(&data))
}

/// Spectral rows for every grid value, in grid order. Points are evaluated
/// in parallel under `mode`.
pub fn sweep_rows(family: Family, grid: &[FamilyParams], samples: usize, seed: u64, mode: Execution) -> Vec<SweepRow> {
    let reports = map_indexed(mode, grid.len() * samples, |i| {
        let params = grid[i / samples];
        sweep_point(family, params, seed, i % samples)
    });
    grid.iter()
        .zip(reports.chunks(samples))
        .map(|(params, chunk)| summarize(family, *params, chunk))
        .collect()
}

fn summarize(family: Family, params: FamilyParams, chunk: &[Option<SpectralReport>]) -> SweepRow {
    let ok: Vec<&SpectralReport> = chunk.iter().flatten().collect();
    if ok.len() != chunk.len() || ok.is_empty() {
        return SweepRow {
            family,
            params,
            eigenvalues: [f64::NAN; 5],
            mult_pattern: String::new(),
            trace: f64::NAN,
            pxi_class: "OTHER".into(),
            theta: None,
            spread: f64::NAN,
        };
    }
    let n = ok.len() as f64;
    let mut eigenvalues = [0.0; 5];
    let mut spread = 0.0f64;
    for (j, ev) in eigenvalues.iter_mut().enumerate() {
        let vals = ok.iter().map(|r| r.eigenvalues[j]);
        *ev = vals.clone().sum::<f64>() / n;
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        spread = spread.max(hi - lo);
    }
    let first = ok[0];
    let theta = first.theta.map(|_| ok.iter().filter_map(|r| r.theta).sum::<f64>() / n);
    SweepRow {
        family,
        params,
        eigenvalues,
        mult_pattern: first.mult_pattern(),
        trace: ok.iter().map(|r| r.trace).sum::<f64>() / n,
        pxi_class: classify_coefficients(first.a, first.b).name().to_string(),
        theta,
        spread,
    }
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<FamilyParams>, CliError> {
    let family = args.family;
    if family.is_radius_family() {
        if args.k.is_some() || args.l.is_some() {
            return Err(CliError::usage(format!("{family} takes --r, not --k/--l")));
        }
        let rs = parse_grid(
            args.r
                .as_deref()
                .ok_or_else(|| CliError::usage(format!("{family} needs --r")))?,
        )
        .map_err(CliError::usage)?;
        rs.iter().try_for_each(|r| check_radius(*r))?;
        Ok(rs.into_iter().map(FamilyParams::radius).collect())
    } else {
        if args.r.is_some() {
            return Err(CliError::usage(format!(
                "{family} takes --k (and optionally --l), not --r"
            )));
        }
        let ks = parse_grid(
            args.k
                .as_deref()
                .ok_or_else(|| CliError::usage(format!("{family} needs --k")))?,
        )
        .map_err(CliError::usage)?;
        let ls = match &args.l {
            Some(l) => {
                let ls = parse_grid(l).map_err(CliError::usage)?;
                if ls.len() != ks.len() {
                    return Err(CliError::usage("--k and --l grids must have the same length"));
                }
                ls.into_iter().map(Some).collect()
            }
            None => vec![None; ks.len()],
        };
        let grid: Vec<FamilyParams> = ks.iter().zip(ls).map(|(k, l)| torus_params(*k, l)).collect();
        for p in &grid {
            make_example(family, *p).map_err(usage)?;
        }
        Ok(grid)
    }
}

pub fn cmd_sweep(args: &SweepArgs, mode: Execution) -> Result<i32, CliError> {
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let grid = sweep_grid(args)?;
    let rows = sweep_rows(args.family, &grid, args.samples, args.seed.seed, mode);

    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError {
        code: EXIT_IO,
        message: e.to_string(),
    };
    writer.write_record(SWEEP_HEADER).map_err(io_err)?;
    for row in &rows {
        writer.write_record(row.record()).map_err(io_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError {
        code: EXIT_IO,
        message: e.to_string(),
    })?;
    let text = String::from_utf8(bytes).expect("csv output is UTF-8");
    match &args.out {
        Some(path) => write_output(path, &text)?,
        None => print_stdout(&text)?,
    }

    let mut status = EXIT_OK;
    for row in &rows {
        if !(row.spread <= SPREAD_TOL) {
            eprintln!(
                "{} {}: eigenvalue spread {:e} exceeds {SPREAD_TOL:e}",
                row.family, row.params, row.spread
            );
            status = EXIT_FAILED;
        }
    }
    Ok(status)
}

/// JSON document for one analyzed point.
pub fn analysis_json(family: Family, params: FamilyParams, u: &DomainPoint) -> Result<Value, CliError> {
    let m = make_example(family, params).map_err(usage)?;
    let data = analyze_point(&m, u).map_err(usage)?;
    let report = spectral_report(&data);
    let class = classify_p_xi(&data).map(|c| c.name()).unwrap_or("OTHER");
    let mat = |m: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..5).map(|i| (0..5).map(|j| m(i, j)).collect()).collect()
    };
    Ok(json!({
        "family": family,
        "params": params,
        "at": u,
        "point": data.point.to_array(),
        "normal": data.normal.0.as_slice(),
        "structure": data.structure.0.as_slice(),
        "alpha": data.alpha,
        "eigenvalues": report.eigenvalues,
        "multiplicities": report.multiplicities,
        "mult_pattern": report.mult_pattern(),
        "trace": report.trace,
        "mean_curvature": report.mean_curvature,
        "hopf_residual": report.hopf_residual,
        "symmetry_residual": data.symmetry_residual,
        "distribution_dim": report.distribution_dim,
        "pxi": {"a": report.a, "b": report.b, "c": report.c},
        "pxi_class": class,
        "theta": report.theta,
        "holomorphic_p_defect": report.holomorphic_p_defect,
        "alpha_coincides": report.alpha_coincides,
        "shape": mat(&|i, j| data.shape[(i, j)]),
        "phi": mat(&|i, j| data.phi[(i, j)]),
        "eta": data.eta.as_slice(),
    }))
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let family = args
        .example
        .family
        .ok_or_else(|| CliError::usage("--family is required"))?;
    let params = args.example.params(family)?;
    let doc = analysis_json(family, params, &args.at)?;
    print_stdout(&format!(
        "{}\n",
        serde_json::to_string_pretty(&doc).expect("serializable")
    ))?;
    Ok(EXIT_OK)
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mode = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, mode),
        Command::Sweep(a) => cmd_sweep(a, mode),
        Command::Analyze(a) => cmd_analyze(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {}", e.message);
        e.code
    })
}
