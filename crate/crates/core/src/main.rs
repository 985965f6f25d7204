use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latpoly::cli::{self, Format, JobSpec, Mode, Model, ModelKind, Sweep, WeightSource};
use latpoly::engines::DEFAULT_MAX_T;
use latpoly::Error;

#[derive(Parser)]
#[command(name = "latpoly", version, about = "Exact weighted lattice-path polynomials in a strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one partition function
    Compute(Common),
    /// Run several engines on a grid of queries and compare
    Crosscheck(Common),
    /// Time engines over a sweep of t or L and print CSV
    Bench(BenchArgs),
    /// Print the truncated generating function
    Gf(Common),
}

#[derive(Args)]
struct Common {
    /// Path length (crosscheck: largest length)
    #[arg(long)]
    t: Option<usize>,
    /// Strip height
    #[arg(long = "L", id = "L")]
    strip_height: Option<usize>,
    #[arg(long)]
    y_start: Option<usize>,
    #[arg(long)]
    y_end: Option<usize>,
    /// JSON weights file
    #[arg(long, conflicts_with = "model")]
    weights: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Model parameter as key=value, repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Comma-separated: brute, tmatrix, viennot-ct, rho-ct, closed-form
    #[arg(long)]
    engines: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,
    /// Series order for gf
    #[arg(long, default_value_t = 8)]
    order: usize,
    /// Largest t the brute-force engine accepts
    #[arg(long, default_value_t = DEFAULT_MAX_T)]
    cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = SweepArg::T)]
    sweep: SweepArg,
    /// First point of the sweep
    #[arg(long)]
    from: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dmr,
    Four,
    Rogers,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Plain,
    Json,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    T,
    L,
}

fn job(mode: Mode, c: Common) -> Result<JobSpec, Error> {
    let weights = match (c.weights, c.model) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidWeights(format!("{}: {e}", path.display())))?;
            WeightSource::Spec(cli::parse_weights(&text)?)
        }
        (None, Some(m)) => {
            let mut params = BTreeMap::new();
            for p in &c.params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParams(format!("`{p}` is not KEY=VALUE")))?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
            let kind = match m {
                ModelArg::Dmr => ModelKind::Dmr,
                ModelArg::Four => ModelKind::Four,
                ModelArg::Rogers => ModelKind::Rogers,
            };
            WeightSource::Model(Model { kind, params })
        }
        (None, None) if !c.params.is_empty() => {
            return Err(Error::InvalidParams("--param needs --model".into()));
        }
        (None, None) => WeightSource::Default,
    };
    Ok(JobSpec {
        mode,
        t: c.t,
        strip_height: c.strip_height,
        y_start: c.y_start,
        y_end: c.y_end,
        weights,
        engines: c.engines.as_deref().map(cli::parse_engines).transpose()?.unwrap_or_default(),
        format: match c.format {
            FormatArg::Plain => Format::Plain,
            FormatArg::Json => Format::Json,
            FormatArg::Latex => Format::Latex,
        },
        order: c.order,
        cap: c.cap,
        ..JobSpec::default()
    })
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let spec = match args.command {
        Command::Compute(c) => job(Mode::Compute, c),
        Command::Crosscheck(c) => job(Mode::Crosscheck, c),
        Command::Gf(c) => job(Mode::Gf, c),
        Command::Bench(b) => job(Mode::Bench, b.common).map(|s| JobSpec {
            sweep: match b.sweep {
                SweepArg::T => Sweep::T,
                SweepArg::L => Sweep::L,
            },
            from: b.from,
            ..s
        }),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = spec.and_then(|s| cli::run_job(&s, &mut out));
    let _ = out.flush();
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
