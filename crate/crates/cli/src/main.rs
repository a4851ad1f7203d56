use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use voa_cli::config::{ConfigError, RunConfig, Suite};
use voa_cli::{lab, output, suites};
use voa_core::models::{ModelDescriptor, ModelKind, NullVectors};
use voa_core::Scalar;

#[derive(Parser)]
#[command(name = "voa", version, about = "Exact vertex-algebra checks and a smeared-field lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model and its vertex algebra and print a summary.
    Build(Args),
    /// Run verification suites.
    Verify(Args),
    /// Run the floating-point lab on the model's generator.
    Smear(Args),
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Heisenberg,
    Virasoro,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum NullArg {
    Reject,
    Keep,
    Quotient,
}

#[derive(clap::Args)]
struct Args {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Degree up to which checks are exact.
    #[arg(long)]
    depth: Option<usize>,
    /// Central charge for the Virasoro model, e.g. 1/2.
    #[arg(long)]
    c: Option<Scalar>,
    /// Extra degrees kept above the depth.
    #[arg(long)]
    headroom: Option<usize>,
    #[arg(long, value_enum)]
    null_vectors: Option<NullArg>,
    /// Suite to run; repeat for several. Defaults to all.
    #[arg(long = "suite", value_enum)]
    suites: Vec<Suite>,
    /// Ascending Fourier cutoffs for the decay experiment.
    #[arg(long, value_delimiter = ',')]
    cutoffs: Vec<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Directory for report files; without it the report goes to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Write wall-clock timings to timings.json (or stderr).
    #[arg(long)]
    timings: bool,
}

fn resolve(args: &Args) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(ModelDescriptor::heisenberg(4)),
    };
    let depth = args.depth.unwrap_or(cfg.model.depth);
    match (args.model, &args.c) {
        (Some(ModelArg::Heisenberg), Some(_)) => return Err(ConfigError::Invalid("--c applies only to the virasoro model".into())),
        (Some(ModelArg::Heisenberg), None) => cfg.model.model = ModelKind::Heisenberg,
        (Some(ModelArg::Virasoro), Some(c)) => cfg.model.model = ModelKind::Virasoro { c: c.clone() },
        (Some(ModelArg::Virasoro), None) => match &cfg.model.model {
            ModelKind::Virasoro { .. } => {}
            ModelKind::Heisenberg => return Err(ConfigError::Invalid("--model virasoro needs --c".into())),
        },
        (None, Some(c)) => match &mut cfg.model.model {
            ModelKind::Virasoro { c: old } => *old = c.clone(),
            ModelKind::Heisenberg => return Err(ConfigError::Invalid("--c applies only to the virasoro model".into())),
        },
        (None, None) => {}
    }
    cfg.model.depth = depth;
    if let Some(h) = args.headroom {
        cfg.model.headroom = Some(h);
    }
    if let Some(n) = args.null_vectors {
        cfg.model.null_vectors = match n {
            NullArg::Reject => NullVectors::Reject,
            NullArg::Keep => NullVectors::Keep,
            NullArg::Quotient => NullVectors::Quotient,
        };
    }
    if !args.suites.is_empty() {
        cfg.suites = args.suites.clone();
    }
    if !args.cutoffs.is_empty() {
        cfg.cutoffs = args.cutoffs.clone();
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = t;
    }
    if args.out_dir.is_some() {
        cfg.out_dir = args.out_dir.clone();
    }
    if args.json || args.csv {
        cfg.json = args.json;
        cfg.csv = args.csv;
    }
    cfg.timings |= args.timings;
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("VOA_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError::Invalid(format!("VOA_THREADS={v}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ConfigError::Invalid(e.to_string()))
}

struct Timings(Vec<(String, f64)>);

impl Timings {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }
}

/// Writes `files` to the output directory, or the first one to stdout.
fn emit(cfg: &RunConfig, files: Vec<(String, String)>) -> std::io::Result<()> {
    match &cfg.out_dir {
        Some(dir) => files.iter().try_for_each(|(name, body)| output::write(dir, name, body)),
        None => {
            if let Some((_, body)) = files.first() {
                print!("{body}");
            }
            Ok(())
        }
    }
}

fn say(cfg: &RunConfig, lines: &[String]) {
    for l in lines {
        if cfg.out_dir.is_some() {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
}

fn run(command: &Command, cfg: &RunConfig) -> Result<i32, Box<dyn std::error::Error>> {
    let mut timings = Timings(Vec::new());
    let built = match timings.time("build", || suites::build(&cfg.model)) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(e.exit_code());
        }
    };
    let code = match command {
        Command::Build(_) => {
            emit(cfg, vec![("build.json".into(), output::build_summary(&built))])?;
            0
        }
        Command::Verify(_) => {
            let reports = match timings.time("verify", || suites::verify(&built, &cfg.suite_list())) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(e.exit_code());
                }
            };
            let mut files = Vec::new();
            if cfg.json {
                files.push(("report.json".into(), output::reports_json(&reports)));
            }
            if cfg.csv {
                files.push(("report.csv".into(), output::reports_csv(&reports)));
            }
            emit(cfg, files)?;
            say(cfg, &output::summary_lines(&reports));
            suites::exit_code(&reports)
        }
        Command::Smear(_) => {
            let out = match timings.time("smear", || lab::run_lab(&built, &cfg.cutoffs, cfg.tolerance)) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(e.exit_code());
                }
            };
            let mut files = Vec::new();
            if cfg.json {
                files.push(("smear.json".into(), output::lab_json(&out)));
            }
            if cfg.csv {
                files.extend(output::lab_csv(&out).into_iter().map(|(n, b)| (n.to_string(), b)));
            }
            emit(cfg, files)?;
            let reports = [out.report];
            say(cfg, &output::summary_lines(&reports));
            suites::exit_code(&reports)
        }
    };
    if cfg.timings {
        let body = timings.0.iter().map(|(k, v)| format!("  \"{k}\": {v:.6}")).collect::<Vec<_>>().join(",\n");
        let body = format!("{{\n{body}\n}}\n");
        match &cfg.out_dir {
            Some(dir) => output::write(dir, "timings.json", &body)?,
            None => eprint!("{body}"),
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Build(a) | Command::Verify(a) | Command::Smear(a) => a,
    };
    let cfg = match init_threads().and_then(|_| resolve(args)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli.command, &cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
