use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;
mod render;

#[derive(Parser, Debug)]
#[command(
    name = "gvlat",
    version,
    about = "Structure constants, axiom checks and modular data for bosonic lattice data"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,

    /// Seed for randomized sweeps; echoed in every report that uses it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Lattice data JSON file, or `-` for stdin.
    pub file: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct LabelArgs {
    /// Restrict to these labels (comma-separated rationals, e.g. `1/2,0`).
    /// Defaults to the whole discriminant group, or `0` and `ξ` when it is
    /// infinite.
    #[arg(long = "label")]
    pub labels: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the data and summarize the discriminant group.
    Validate(Input),
    /// Dual-lattice decomposition and Smith normal form.
    Decompose(Input),
    /// Ω, F, q, θ and duals over the finite discriminant group.
    Structure {
        #[command(flatten)]
        input: Input,
        /// Largest group for which the Ω and F tables are emitted.
        #[arg(long, default_value_t = 27)]
        max_table: usize,
    },
    /// Pentagon, hexagons, balancing and ribbon-GV sweep.
    Axioms {
        #[command(flatten)]
        input: Input,
        /// Sampled tuples when the sweep is not exhaustive.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Largest discriminant group swept exhaustively.
        #[arg(long, default_value_t = 64)]
        max_exhaustive: usize,
    },
    /// Fusion product of two labels.
    Fuse {
        #[command(flatten)]
        input: Input,
        a: String,
        b: String,
    },
    /// GV dual of a label.
    Dual {
        #[command(flatten)]
        input: Input,
        a: String,
    },
    /// Characters as q-series with their factorization.
    Characters {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        labels: LabelArgs,
        #[arg(long, default_value = "10")]
        order: String,
    },
    /// T-phases in both conventions with a term-by-term check.
    Tmatrix {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        labels: LabelArgs,
        #[arg(long, default_value = "10")]
        order: String,
    },
    /// S-matrix, unitarity and the permutation S².
    Smatrix(Input),
    /// Numeric check of the S-transformation at τ = it.
    VerifyS {
        #[command(flatten)]
        input: Input,
        #[arg(long = "t", num_args = 1.., default_values_t = vec![0.8, 1.0, 1.3])]
        t: Vec<f64>,
        /// Summation radius; chosen from t when absent.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Verlinde multiplicities against coset addition.
    Verlinde {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Virasoro and current identities, skew-symmetry, contragredients.
    FockCheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 6)]
        level: u32,
        #[arg(long, default_value_t = 2)]
        mode_bound: i64,
        #[arg(long, default_value_t = 3)]
        skew_level: u32,
        /// Labels used when the discriminant group is large or infinite.
        #[arg(long, default_value_t = 9)]
        max_labels: usize,
        /// Also run the numeric associativity check on all label triples.
        #[arg(long)]
        associativity: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Simple-current extension from base data to target data.
    Extend {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Also search σ exhaustively (quotients of order at most 4).
        #[arg(long)]
        brute_force: bool,
    },
}

pub enum CliError {
    Usage(String),
    Io(String),
    Data(gvlat::Error),
}

macro_rules! data_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.into())
            }
        })*
    };
}

data_error!(
    gvlat::Error,
    gvlat::io::InputError,
    gvlat::lattice::LatticeError,
    gvlat::gvcat::GvError,
    gvlat::fock::FockError,
    gvlat::modular::ModularError,
    gvlat::extension::ExtensionError
);

/// `(pass, report body)`.
pub type Outcome = Result<(bool, Value), CliError>;

pub fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GVLAT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "GVLAT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    let seed = cli.seed;
    match &cli.command {
        Command::Validate(i) => commands::validate(i),
        Command::Decompose(i) => commands::decompose(i),
        Command::Structure { input, max_table } => commands::structure(input, *max_table),
        Command::Axioms {
            input,
            samples,
            max_exhaustive,
        } => commands::axioms(input, *samples, *max_exhaustive, seed),
        Command::Fuse { input, a, b } => commands::fuse(input, a, b),
        Command::Dual { input, a } => commands::dual(input, a),
        Command::Characters {
            input,
            labels,
            order,
        } => commands::characters(input, labels, order),
        Command::Tmatrix {
            input,
            labels,
            order,
        } => commands::tmatrix(input, labels, order),
        Command::Smatrix(i) => commands::smatrix(i),
        Command::VerifyS {
            input,
            t,
            radius,
            tol,
        } => commands::verify_s(input, t, *radius, *tol),
        Command::Verlinde { input, tol } => commands::verlinde(input, *tol),
        Command::FockCheck {
            input,
            level,
            mode_bound,
            skew_level,
            max_labels,
            associativity,
            tol,
        } => commands::fock_check(
            input,
            commands::FockOptions {
                level: *level,
                mode_bound: *mode_bound,
                skew_level: *skew_level,
                max_labels: *max_labels,
                associativity: *associativity,
                tol: *tol,
                seed,
            },
        ),
        Command::Extend {
            base,
            target,
            samples,
            brute_force,
        } => commands::extend(base, target, *samples, *brute_force, seed),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate(_) => "validate",
        Command::Decompose(_) => "decompose",
        Command::Structure { .. } => "structure",
        Command::Axioms { .. } => "axioms",
        Command::Fuse { .. } => "fuse",
        Command::Dual { .. } => "dual",
        Command::Characters { .. } => "characters",
        Command::Tmatrix { .. } => "tmatrix",
        Command::Smatrix(_) => "smatrix",
        Command::VerifyS { .. } => "verify-s",
        Command::Verlinde { .. } => "verlinde",
        Command::FockCheck { .. } => "fock-check",
        Command::Extend { .. } => "extend",
    }
}

fn emit(format: Format, report: &Value) {
    let text = match format {
        Format::Json => {
            serde_json::to_string_pretty(report).expect("reports are plain JSON") + "\n"
        }
        Format::Text => render::text(report),
    };
    // A closed pipe downstream is not an error of ours.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = command_name(&cli.command);
    match run(&cli) {
        Ok((pass, body)) => {
            let mut report = json!({ "command": command, "pass": pass });
            if let (Value::Object(out), Value::Object(fields)) = (&mut report, body) {
                out.extend(fields);
            }
            emit(cli.output, &report);
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(err) => {
            let (code, name, message) = match err {
                CliError::Usage(m) => (2, "UsageError", m),
                CliError::Io(m) => (3, "IoError", m),
                CliError::Data(e) => (3, e.name(), e.to_string()),
            };
            let report =
                json!({ "command": command, "pass": false, "error": name, "message": message });
            emit(cli.output, &report);
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
