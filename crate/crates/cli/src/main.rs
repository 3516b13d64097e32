use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Mixed-state quantum gates as real transfer matrices.
///
/// Gate arguments accept a JSON gate file or `builtin:NAME` (for example
/// `builtin:H`, `builtin:CNOT`, `builtin:rot1(0.5)`, `builtin:~x`).
#[derive(Debug, Parser)]
#[command(name = "ptm", version)]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between representations (Kraus -> gate, density <-> state).
    Convert(ConvertArgs),
    /// Validate a gate, Kraus set, state or projector set.
    Check(CheckArgs),
    /// Execute a circuit file.
    Run(RunArgs),
    /// Affine SVD factorization of a trace-preserving gate.
    Decompose(DecomposeArgs),
    /// Lie closure of a set of generators.
    Closure(ClosureArgs),
    /// Test whether a two-ququat gate maps product states to product states.
    Primitive(PrimitiveArgs),
    /// Sample a projective measurement.
    Measure(MeasureArgs),
    /// Four-valued logic: truth tables, quantum realizations, laws, universality.
    Classical(ClassicalArgs),
    /// Compose gates in application order.
    Compose(ComposeArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "convert_input")]
pub struct ConvertInput {
    /// Kraus set file; prints its transfer gate.
    #[arg(long)]
    kraus: Option<PathBuf>,
    /// Density matrix file; prints its Pauli coefficients.
    #[arg(long)]
    density: Option<PathBuf>,
    /// State file; prints its density matrix.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    input: ConvertInput,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CheckArgs {
    #[arg(long)]
    gate: Option<String>,
    #[arg(long)]
    kraus: Option<PathBuf>,
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    density: Option<PathBuf>,
    #[arg(long)]
    projectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    gate: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Args)]
#[group(id = "closure_input", required = true, multiple = true)]
pub struct ClosureInput {
    /// Generator file.
    #[arg(long)]
    generators: Option<PathBuf>,
    /// Local Hermitian generators on both factors of a two-ququat system.
    #[arg(long)]
    local: bool,
}

#[derive(Debug, Args)]
pub struct ClosureArgs {
    #[command(flatten)]
    input: ClosureInput,
    /// Add this many random Hermitian generators (requires --seed).
    #[arg(long, default_value_t = 0, requires = "seed")]
    random: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = FieldArg::Complex)]
    field: FieldArg,
    #[arg(long, default_value_t = 64)]
    max_steps: usize,
}

#[derive(Debug, Args)]
pub struct PrimitiveArgs {
    #[arg(long)]
    gate: String,
    #[arg(long)]
    seed: u64,
    /// Random product states tried after the axis probes.
    #[arg(long, default_value_t = 64)]
    trials: usize,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    projectors: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Ququats the projectors act on; defaults to all of them.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    targets: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ClassicalInput {
    /// Logic expression, e.g. "x1 | ~x2".
    #[arg(long)]
    expr: Option<String>,
    /// Builtin gate name (neg, shift, box, dia, I0..I3, c0..c3, and, or, V4).
    #[arg(long)]
    name: Option<String>,
    /// Truth-table file.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Check the lattice and negation laws exhaustively.
    #[arg(long)]
    laws: bool,
    /// Bounded search over the universal generating sets.
    #[arg(long)]
    universal: bool,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    input: ClassicalInput,
    /// Print the disjunctive normal form of the gate.
    #[arg(long)]
    dnf: bool,
    /// Print the transfer gate of a single-argument gate.
    #[arg(long)]
    quantum: bool,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    #[arg(long, default_value_t = 100_000)]
    max_functions: usize,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    /// Gates in the order they are applied.
    #[arg(long = "gate", required = true, num_args = 1)]
    gates: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    match commands::dispatch(cli.command) {
        Ok(out) => {
            if json {
                print!("{}", ptm_core::io::to_json_string(&out.json));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            if json {
                print!(
                    "{}",
                    ptm_core::io::to_json_string(&serde_json::json!({ "error": e.to_string() }))
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
