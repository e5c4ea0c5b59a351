use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use seqtc_core::fibration::FibrationPresentation;
use seqtc_core::genfun::{diff_nil_check, series};
use seqtc_core::invariants::{
    htc, htc_witness, tc_sandwich, zcl, zcl_kernel_table, AssertionSet, InvariantError, SandwichOptions,
};
use seqtc_core::model::{ModelError, ModelFile};

mod report;

/// Largest default degree window; larger windows must be asked for.
const MAX_DEFAULT_WINDOW: u32 = 256;

#[derive(Parser)]
#[command(name = "seqtc", version, about = "Exact bounds for sequential parametrized topological complexity of rational fibrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check d² = 0, the relative Sullivan condition and the base/fiber split.
    Validate(Opts),
    /// Cohomology dimensions and representatives of the total algebra.
    Cohomology(Opts),
    /// Zero-divisor cup-length zcl_r.
    Zcl(Opts),
    /// Kernel of H(diagonal) degree by degree.
    KernelTable(Opts),
    /// Homological TC_r (least k with H(ρ_k) injective).
    Htc(Opts),
    /// A non-exact cocycle in the (k+1)-st kernel power.
    HtcWitness(Opts),
    /// Lower and upper bounds for TC_r with provenance.
    Tc(Opts),
    /// Series Σ TC_{r+1} z^r and its rational fit.
    Genfun(Opts),
    /// Check zcl_{r+1} − zcl_r ≥ cupl(F).
    Diffnil(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Model file.
    model: PathBuf,
    /// Number of points r.
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Witness power k (htc-witness).
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Degree window; default is twice the generator degree sum of the analyzed algebra, capped.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Fiber generators kept by an odd-degree extension (tc).
    #[arg(long, value_delimiter = ',')]
    keep: Vec<String>,
    /// Extra assertion `flag=justification` or `cohomology_vanishes_above=N: justification`.
    #[arg(long = "assert")]
    asserts: Vec<String>,
    /// Write the machine-readable report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Largest r for genfun and diffnil.
    #[arg(long, default_value_t = 5)]
    rmax: u32,
    /// Monomial budget for zcl and witness searches inside tc.
    #[arg(long, default_value_t = 6000)]
    budget: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Model { source, .. } if source.is_parse() => 2,
            _ => 1,
        }
    }
}

struct Loaded {
    model: ModelFile,
    path: String,
    assertions: AssertionSet,
}

impl Loaded {
    fn fibration(&self) -> Result<FibrationPresentation, CliError> {
        self.model.fibration().map_err(|source| CliError::Model { path: self.path.clone(), source })
    }
}

fn load(opts: &Opts) -> Result<Loaded, CliError> {
    let path = opts.model.display().to_string();
    let text = fs::read_to_string(&opts.model).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let model = ModelFile::parse(&text).map_err(|source| CliError::Model { path: path.clone(), source })?;
    let mut assertions = model.assertions.clone();
    for entry in &opts.asserts {
        assertions.parse_entry(entry)?;
    }
    Ok(Loaded { model, path, assertions })
}

/// Default window for an r-fold model: twice `Σ|base| + r Σ|fiber|`.
fn window_for(opts: &Opts, model: &ModelFile, r: u32) -> u32 {
    if let Some(n) = opts.max_degree {
        return n;
    }
    let sum: u32 = model
        .gens()
        .generators()
        .iter()
        .map(|g| if g.block.is_fiber() { r * g.degree } else { g.degree })
        .sum();
    let want = 2 * sum;
    if want > MAX_DEFAULT_WINDOW {
        eprintln!("warning: degree window capped at {MAX_DEFAULT_WINDOW} (wanted {want}); pass --max-degree to widen");
        MAX_DEFAULT_WINDOW
    } else {
        want
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    model: Option<&'a str>,
    report: &'a T,
}

struct Output {
    text: String,
    json: serde_json::Value,
    /// Exit 1 although the computation succeeded (a reported violation).
    violation: bool,
}

fn run(command: &Command) -> Result<(Output, Opts, &'static str, Option<String>), CliError> {
    let (name, opts) = match command {
        Command::Validate(o) => ("validate", o),
        Command::Cohomology(o) => ("cohomology", o),
        Command::Zcl(o) => ("zcl", o),
        Command::KernelTable(o) => ("kernel-table", o),
        Command::Htc(o) => ("htc", o),
        Command::HtcWitness(o) => ("htc-witness", o),
        Command::Tc(o) => ("tc", o),
        Command::Genfun(o) => ("genfun", o),
        Command::Diffnil(o) => ("diffnil", o),
    };
    let l = load(opts)?;
    let a = &l.assertions;
    let out = match command {
        Command::Validate(_) => {
            let rep = report::validate(&l.model).map_err(|source| CliError::Model { path: l.path.clone(), source })?;
            Output { text: rep.text(), json: to_json(&rep), violation: false }
        }
        Command::Cohomology(_) => {
            let cdga = l.model.cdga().map_err(|source| CliError::Model { path: l.path.clone(), source })?;
            let rep = report::cohomology(&cdga, window_for(opts, &l.model, 1));
            Output { text: rep.text(), json: to_json(&rep), violation: false }
        }
        Command::Zcl(_) => {
            let f = l.fibration()?;
            let rep = zcl(&f, opts.r, window_for(opts, &l.model, opts.r), a)?;
            Output { text: report::zcl_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::KernelTable(_) => {
            let f = l.fibration()?;
            let rep = zcl_kernel_table(&f, opts.r, window_for(opts, &l.model, opts.r), a)?;
            Output { text: report::kernel_table_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::Htc(_) => {
            let f = l.fibration()?;
            let rep = htc(&f, opts.r, window_for(opts, &l.model, opts.r), a)?;
            Output { text: report::htc_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::HtcWitness(_) => {
            let f = l.fibration()?;
            let rep = htc_witness(&f, opts.r, opts.k, window_for(opts, &l.model, opts.r), a)?;
            let rep = rep.ok_or_else(|| {
                CliError::Precondition(format!(
                    "no non-exact cocycle in the kernel power {} within the window",
                    opts.k + 1
                ))
            })?;
            Output { text: report::witness_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::Tc(_) => {
            let f = l.fibration()?;
            let sandwich = sandwich_opts(opts);
            let rep = tc_sandwich(&f, opts.r, window_for(opts, &l.model, opts.r), a, &sandwich)?;
            Output { text: report::tc_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::Genfun(_) => {
            let f = l.fibration()?;
            let rep = series(&f, opts.rmax, |r| window_for(opts, &l.model, r), a, &sandwich_opts(opts))?;
            Output { text: report::series_text(&rep), json: to_json(&rep), violation: false }
        }
        Command::Diffnil(_) => {
            let f = l.fibration()?;
            let rep = diff_nil_check(&f, opts.rmax, |r| window_for(opts, &l.model, r), a)?;
            Output { text: report::diffnil_text(&rep), json: to_json(&rep), violation: !rep.all_hold() }
        }
    };
    Ok((out, opts.clone(), name, l.model.name.clone()))
}

fn sandwich_opts(opts: &Opts) -> SandwichOptions {
    SandwichOptions {
        keep: (!opts.keep.is_empty()).then(|| opts.keep.clone()),
        budget: opts.budget,
        ..Default::default()
    }
}

fn to_json<T: Serialize>(rep: &T) -> serde_json::Value {
    serde_json::to_value(rep).expect("reports serialize")
}

fn write_json(path: &Path, command: &str, model: Option<&str>, report: &serde_json::Value) -> Result<(), CliError> {
    let env = Envelope { command, model, report };
    let mut text = serde_json::to_string_pretty(&env).expect("reports serialize");
    text.push('\n');
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((out, opts, name, model_name)) => {
            if opts.json.as_deref() != Some(Path::new("-")) {
                print!("{}", out.text);
            }
            if let Some(path) = &opts.json {
                if let Err(e) = write_json(path, name, model_name.as_deref(), &out.json) {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code());
                }
            }
            if out.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
