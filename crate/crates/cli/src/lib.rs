//! Command-line front end for `fockext`: seeded experiments with JSON reports
//! and versioned CSV tables, plus the acceptance suite behind `reproduce`.
//!
//! Every report has the shape
//! `{command, config, results, diagnostics: {seed, stderr, runtime}}` where
//! `config` echoes every effective flag value and can be fed back through
//! `--config`.

pub mod acceptance;
mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "FOCKEXT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fockext", version, about = "Weighted L² extension experiments on curves in ℂ²")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Master seed; per-task seeds are derived from it.
    #[arg(long, default_value_t = 7, global = true)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write the command's table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Record wall-clock runtime in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Read flag values from a key=value or JSON file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CurveArgs {
    /// line, crossing, parallel, model, sine or comb.
    #[arg(long, default_value = "line")]
    pub curve: String,
    /// Model curve parameter `s` in `xy = s`.
    #[arg(long = "model-s", default_value_t = 0.1, allow_hyphen_values = true)]
    pub model_s: f64,
    /// Sine window `±1..±nmax`.
    #[arg(long, default_value_t = 2)]
    pub nmax: i64,
    /// Number of comb teeth `K`.
    #[arg(long, default_value_t = 8)]
    pub teeth: usize,
    /// Distance between the parallel lines.
    #[arg(long, default_value_t = 1.0)]
    pub sep: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The constants C_{j,|s|} and their substitution identity.
    Constants {
        #[arg(long, default_value = "-4..4", allow_hyphen_values = true)]
        j: String,
        /// Comma list of |s| values.
        #[arg(long, default_value = "0.1")]
        s: String,
        /// Clipping radius ε (requires ε² > |s|).
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Density ratios D_r(W; z) over radii and centers.
    Density {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value = "4,8,16")]
        radii: String,
        /// Points `x_re,x_im,y_re,y_im` separated by `;`.
        #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
        centers: String,
        /// Diagonal of a quadratic weight `λ₁|x|² + λ₂|y|²`.
        #[arg(long, default_value = "1,1")]
        weight: String,
        #[arg(long = "n-mc", default_value_t = 4000)]
        n_mc: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Uniform-flatness checks at one scale.
    Flatness {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long = "region-r", default_value_t = 1.0)]
        region_r: f64,
        /// Region center; defaults to `(0, nmax·π)` for the sine curve and the origin otherwise.
        #[arg(long = "region-center", allow_hyphen_values = true)]
        region_center: Option<String>,
        #[arg(long, default_value_t = 3000)]
        grid: usize,
        /// Points at which to measure the graph deviation.
        #[arg(long, allow_hyphen_values = true)]
        graph: Option<String>,
        #[arg(long = "area-r", default_value_t = 2.0)]
        area_r: f64,
        #[arg(long = "n-mc", default_value_t = 2000)]
        n_mc: usize,
        #[arg(long, default_value_t = 3)]
        strict: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Extension from the model curve xy = s (clipped when --eps is given).
    ExtendModel {
        #[arg(long, default_value_t = 0.1)]
        s: f64,
        /// Phase of s in radians.
        #[arg(long = "s-arg", default_value_t = 0.0, allow_hyphen_values = true)]
        s_arg: f64,
        /// Laurent order N of the random datum.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Explicit Laurent coefficients `re,im;…` (2N+1 of them, from a₋N).
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        /// Translation center for the clipped extension.
        #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
        c: String,
        /// Degree of the random ambient datum in clipped mode.
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal-norm polynomial extension from point constraints.
    ExtendMin {
        #[command(flatten)]
        curve: CurveArgs,
        /// Number of random constraint points sampled on the curve.
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, default_value_t = 6)]
        degree: usize,
        #[arg(long = "region-r", default_value_t = 1.5)]
        region_r: f64,
        /// CSV with columns x_re,x_im,y_re,y_im,v_re,v_im instead of random data.
        #[arg(long)]
        constraints: Option<PathBuf>,
        /// Also solve in the full Fock space with the reproducing kernel.
        #[arg(long)]
        kernel: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Branch-by-branch extension across a union of lines.
    Crossing {
        /// Forms `a_re,a_im,b_re,b_im,c_re,c_im` of `a x + b y + c`, separated by `;`.
        #[arg(long, default_value = "1,0,0,0,0,0;0,0,1,0,0,0", allow_hyphen_values = true)]
        forms: String,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Branch order as a comma list.
        #[arg(long)]
        order: Option<String>,
        /// Use the data x on {y = 0} and y² on {x = 0} instead of random data.
        #[arg(long)]
        example: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Growth of minimal interpolation norms on the comb.
    Counterexample {
        #[arg(long, default_value = "1..8")]
        k: String,
        /// kernel or truncated.
        #[arg(long, default_value = "kernel")]
        mode: String,
        /// Polynomial degree in truncated mode.
        #[arg(long, default_value_t = 40)]
        degree: usize,
        #[arg(long, default_value_t = 100.0)]
        threshold: f64,
        /// Also sweep the comb's density at these radii.
        #[arg(long)]
        scan: Option<String>,
        #[arg(long, default_value_t = 8)]
        teeth: usize,
        #[arg(long = "n-mc", default_value_t = 4000)]
        n_mc: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
    Reproduce {
        #[arg(long, default_value = "1..12")]
        only: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants { .. } => "constants",
            Command::Density { .. } => "density",
            Command::Flatness { .. } => "flatness",
            Command::ExtendModel { .. } => "extend-model",
            Command::ExtendMin { .. } => "extend-min",
            Command::Crossing { .. } => "crossing",
            Command::Counterexample { .. } => "counterexample",
            Command::Reproduce { .. } => "reproduce",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Constants { common, .. }
            | Command::Density { common, .. }
            | Command::Flatness { common, .. }
            | Command::ExtendModel { common, .. }
            | Command::ExtendMin { common, .. }
            | Command::Crossing { common, .. }
            | Command::Counterexample { common, .. }
            | Command::Reproduce { common, .. } => common,
        }
    }
}

/// What a command produced, before the report envelope is added.
pub(crate) struct Output {
    pub results: Value,
    pub stderr: Option<f64>,
    pub table: Option<fockext::report::Table>,
    /// Lines for standard error (the `reproduce` summary).
    pub lines: Vec<String>,
    pub exit: i32,
}

pub(crate) enum Failure {
    Usage(String),
    Numeric(fockext::Error),
}

impl From<fockext::Error> for Failure {
    fn from(e: fockext::Error) -> Self {
        Failure::Numeric(e)
    }
}

/// Splices `--config` file entries in front of the explicit flags.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let pos = argv.iter().position(|a| a == "--config");
    let inline = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| s.starts_with("--config=")));
    let (path, cut) = match (pos, inline) {
        (Some(i), _) => {
            let p = argv.get(i + 1).ok_or("--config needs a path")?.clone();
            (PathBuf::from(p), (i, 2))
        }
        (None, Some(i)) => {
            let s = argv[i].to_str().expect("checked utf-8");
            (PathBuf::from(&s["--config=".len()..]), (i, 1))
        }
        (None, None) => return Ok(argv),
    };
    let extra = config::config_args(&path)?;
    let mut rest: Vec<OsString> = argv;
    rest.drain(cut.0..cut.0 + cut.1);
    // program, subcommand, config entries, explicit flags
    let split = 2.min(rest.len());
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(rest[split..].iter().cloned());
    Ok(out)
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // a second initialization in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `argv` (including the program name), runs the command and writes
/// its report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    let common = cli.command.common().clone();
    let start = Instant::now();
    let config = commands::config_of(&cli.command);
    let outcome = commands::execute(&cli.command);
    let runtime = common.timing.then(|| start.elapsed().as_secs_f64());
    let (report, code, table, lines) = match outcome {
        Ok(out) => (
            json!({
                "command": cli.command.name(),
                "config": config,
                "results": out.results,
                "diagnostics": {"seed": common.seed, "stderr": out.stderr, "runtime": runtime},
            }),
            out.exit,
            out.table,
            out.lines,
        ),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Numeric(e)) => (
            json!({
                "command": cli.command.name(),
                "config": config,
                "results": Value::Null,
                "diagnostics": {"seed": common.seed, "stderr": Value::Null, "runtime": runtime, "error": e.to_string()},
            }),
            EXIT_NUMERIC,
            None,
            vec![format!("numerical failure: {e}")],
        ),
    };
    for l in &lines {
        eprintln!("{l}");
    }
    let text = fockext::report::to_json_string(&report);
    let written = match &common.json {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&common.csv, table) {
        (Some(p), Some(t)) => fs::write(p, t.to_csv()).map_err(|e| format!("cannot write {}: {e}", p.display())),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    code
}
