//! `hartogs`: command-line front end for hartogs-core.
//!
//! Every command prints a JSON envelope (or CSV with `--format csv` where
//! the payload is a table). Exit codes: 0 success or passing check, 1 failed
//! check, 2 usage or validation error, 3 point outside the domain.

mod commands;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hartogs_core::quadrature::{Mode, QuadConfig};
use hartogs_core::Error;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "hartogs", version, about = "Bergman projection calculus on generalized Hartogs triangles")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// TOML file with a [quadrature] section; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Nodes per axis of the 4D tensor rule.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Grading exponent of the 4D rule.
    #[arg(long, global = true)]
    grading: Option<f64>,
    /// Grading exponent of planar and radial rules.
    #[arg(long, global = true)]
    planar_grading: Option<f64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (overrides HARTOGS_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Tensor,
    MonteCarlo,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Allowable-index threshold and boundary ray at exponent p.
    Index(commands::IndexArgs),
    /// L^p interval, (c,d) interval, or Sobolev failure threshold.
    Interval(commands::IntervalArgs),
    /// Sobolev irregularity witness with exact norms.
    Witness(commands::WitnessArgs),
    /// Evaluate a kernel at point pairs.
    Kernel(commands::KernelArgs),
    /// Run a verification check.
    Verify(commands::VerifyArgs),
    /// Render a lattice-point diagram as SVG.
    Diagram(commands::DiagramArgs),
}

/// What a command produced.
pub struct Output {
    pub payload: serde_json::Value,
    /// Header and rows for `--format csv`.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
    /// Raw text printed instead of an envelope.
    pub raw: Option<String>,
    pub exit: u8,
}

impl Output {
    pub fn json(payload: impl Serialize) -> Self {
        Self { payload: serde_json::to_value(payload).expect("payload serializes"), table: None, raw: None, exit: 0 }
    }

    pub fn with_table(mut self, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: Vec<String>,
    config_digest: String,
    payload: &'a serde_json::Value,
    timing_ms: u64,
}

fn build_config(g: &GlobalArgs) -> Result<QuadConfig, Error> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            QuadConfig::from_toml_str(&text)?
        }
        None => QuadConfig::default(),
    };
    if let Some(v) = g.nodes {
        cfg.nodes_per_axis = v;
    }
    if let Some(v) = g.grading {
        cfg.grading_exponent = v;
    }
    if let Some(v) = g.planar_grading {
        cfg.planar_grading_exponent = v;
    }
    if let Some(v) = g.mode {
        cfg.mode = match v {
            ModeArg::Tensor => Mode::Tensor,
            ModeArg::MonteCarlo => Mode::MonteCarlo,
        };
    }
    if let Some(v) = g.samples {
        cfg.mc_samples = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if g.threads.is_some() {
        cfg.threads = g.threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DomainMembership(_) | Error::Singularity { .. } => 3,
        _ => 2,
    }
}

fn write_csv(header: &[String], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

fn ignore_broken_pipe(e: std::io::Error) -> std::io::Result<()> {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        Ok(())
    } else {
        Err(e)
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = build_config(&cli.global).and_then(|cfg| {
        let out = match &cli.command {
            Command::Index(a) => commands::index(a),
            Command::Interval(a) => commands::interval(a),
            Command::Witness(a) => commands::witness(a),
            Command::Kernel(a) => commands::kernel(a),
            Command::Verify(a) => commands::verify(a, &cfg),
            Command::Diagram(a) => commands::diagram(a),
        }?;
        Ok((cfg, out))
    });
    let (cfg, out) = match result {
        Ok(v) => v,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code(&err));
        }
    };
    if let Some(raw) = &out.raw {
        emit(raw);
        return ExitCode::from(out.exit);
    }
    if cli.global.format == Format::Csv {
        let Some((header, rows)) = &out.table else {
            eprintln!("error: this command has no tabular output; use --format json");
            return ExitCode::from(2);
        };
        if let Err(e) = write_csv(header, rows).or_else(ignore_broken_pipe) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        return ExitCode::from(out.exit);
    }
    let envelope = Envelope {
        tool: "hartogs",
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().skip(1).collect(),
        config_digest: cfg.digest(),
        payload: &out.payload,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    emit(&format!("{}\n", serde_json::to_string_pretty(&envelope).expect("envelope serializes")));
    ExitCode::from(out.exit)
}
