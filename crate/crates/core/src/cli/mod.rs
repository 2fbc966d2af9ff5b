//! The `stframe` command line.
//!
//! Exit codes: 0 when every requested check passes, 1 for a negative
//! mathematical verdict, 2 for usage, input or output errors, 3 when the
//! frame search fails.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::DEFAULT_TOL;
use crate::frames::SearchOptions;
use crate::sources::{gallery, load_spec};
use crate::tensor::Curvature4;
use report::{render_json, ErrorOut, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEARCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "stframe", version, about = "Curvature identities, weakly Einstein checks and Singer-Thorpe frames in dimension four")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Residual of the universal quadratic curvature identity.
    Identity(SourceArgs),
    /// Einstein and weakly Einstein verdicts, Ricci spectrum, forbidden patterns.
    Check(SourceArgs),
    /// Generalized Singer-Thorpe frame and its sign cases.
    Frame(SourceArgs),
    /// Integrand vectors, f, and Euler/Pontryagin numbers when a volume is known.
    Invariants(SourceArgs),
    /// Identity residual over seeded random tensors.
    Fuzz(FuzzArgs),
    /// Run the reference geometries and compare with their known values.
    Gallery(GalleryArgs),
}

#[derive(Debug, Clone, Args)]
struct Params {
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
}

impl Params {
    fn pairs(&self) -> Vec<(&'static str, f64)> {
        [("a", self.a), ("b", self.b), ("c", self.c), ("c1", self.c1), ("c2", self.c2), ("m", self.m)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Write the machine report to PATH (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    json: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "tol-mult", default_value_t = 1e-6)]
    tol_mult: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total volume, overriding the input's.
    #[arg(long)]
    volume: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct SourceArgs {
    /// Geometry document (JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "gallery")]
    input: Option<PathBuf>,
    /// Reference geometry by name.
    #[arg(long, value_name = "NAME")]
    gallery: Option<String>,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
#[group(id = "mode", required = true, multiple = false, args = ["list", "name", "all"])]
struct GalleryArgs {
    #[arg(long)]
    list: bool,
    #[arg(long, value_name = "NAME")]
    name: Option<String>,
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    common: Common,
}

/// A resolved input geometry.
pub(crate) struct Loaded {
    pub tensor: Curvature4<f64>,
    pub echo: Value,
    pub volume: Option<f64>,
}

/// Failure carrying its exit code.
pub(crate) struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, kind, message: message.into() }
    }
}

fn load(src: &SourceArgs) -> Result<Loaded, Failure> {
    let params = src.params.pairs();
    match (&src.input, &src.gallery) {
        (Some(path), _) => {
            if !params.is_empty() {
                return Err(Failure::usage("usage", "gallery parameters need --gallery"));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage("io", format!("cannot read {}: {e}", path.display())))?;
            let spec = load_spec(&text).map_err(|e| Failure::usage("input", e.to_string()))?;
            let realized = spec.realize::<f64>().map_err(|e| Failure::usage("input", e.to_string()))?;
            Ok(Loaded { tensor: realized.tensor, echo: spec.to_json(), volume: realized.volume })
        }
        (None, Some(name)) => {
            let entry = gallery::<f64>(name, &params).map_err(|e| Failure::usage("input", e.to_string()))?;
            let mut echo = json!({"kind": "gallery", "name": name});
            for (k, v) in &entry.meta.params {
                echo[k.as_str()] = json!(v);
            }
            Ok(Loaded { tensor: entry.tensor, echo, volume: entry.meta.volume })
        }
        (None, None) => Err(Failure::usage("usage", "one of --input FILE or --gallery NAME is required")),
    }
}

fn options(common: &Common) -> Result<SearchOptions, Failure> {
    for (name, v) in [("--tol", common.tol), ("--tol-mult", common.tol_mult)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Failure::usage("usage", format!("{name} must be a positive number")));
        }
    }
    if let Some(v) = common.volume {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Failure::usage("usage", "--volume must be a positive number"));
        }
    }
    Ok(SearchOptions { tol: common.tol, tol_mult: common.tol_mult, seed: common.seed, ..SearchOptions::default() })
}

/// Parses `args` (program name first), runs the subcommand and writes the
/// human summary to `out`, diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };

    let (name, common) = match &cli.command {
        Command::Identity(s) => ("identity", &s.common),
        Command::Check(s) => ("check", &s.common),
        Command::Frame(s) => ("frame", &s.common),
        Command::Invariants(s) => ("invariants", &s.common),
        Command::Fuzz(f) => ("fuzz", &f.common),
        Command::Gallery(g) => ("gallery", &g.common),
    };
    let mut report = RunReport { command: name.to_string(), ..RunReport::default() };
    let mut human = String::new();

    let outcome = options(common).and_then(|opts| {
        report.tolerances = (&opts).into();
        match &cli.command {
            Command::Identity(s) => load(s).map(|l| commands::identity(&l, &opts, &mut report, &mut human)),
            Command::Check(s) => load(s).map(|l| commands::check(&l, &opts, &mut report, &mut human)),
            Command::Frame(s) => load(s).and_then(|l| commands::frame(&l, &opts, &mut report, &mut human)),
            Command::Invariants(s) => {
                load(s).and_then(|l| commands::invariants(&l, &opts, common.volume, &mut report, &mut human))
            }
            Command::Fuzz(f) => Ok(commands::fuzz(f.count, &opts, &mut report, &mut human)),
            Command::Gallery(g) => {
                if g.list {
                    Ok(commands::gallery_list(&mut report, &mut human))
                } else if let Some(n) = &g.name {
                    commands::gallery_run(&[(n.as_str(), g.params.pairs())], &opts, &mut report, &mut human)
                } else {
                    if !g.params.pairs().is_empty() {
                        return Err(Failure::usage("usage", "--all runs every entry at its default parameters"));
                    }
                    let all: Vec<_> = crate::sources::gallery_names().into_iter().map(|(n, _)| (n, Vec::new())).collect();
                    commands::gallery_run(&all, &opts, &mut report, &mut human)
                }
            }
        }
    });

    let code = match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "stframe {name}: {}: {}", f.kind, f.message);
            report.error = Some(ErrorOut { kind: f.kind.to_string(), message: f.message });
            f.code
        }
    };
    report.exit_code = code;

    let machine_to_stdout = common.json.as_deref() == Some("-");
    if !machine_to_stdout {
        let _ = out.write_all(human.as_bytes());
    }
    if let Some(target) = &common.json {
        let value = serde_json::to_value(&report).expect("report serializes");
        let text = render_json(&value);
        if machine_to_stdout {
            let _ = out.write_all(text.as_bytes());
        } else if let Err(e) = std::fs::write(target, text) {
            let _ = writeln!(err, "stframe {name}: io: cannot write {target}: {e}");
            return EXIT_USAGE;
        }
    }
    code
}
