mod build;
mod demo;
mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use symdet::char2::{partial_perm_identity, partial_permanent, square_matrix_char2};
use symdet::detsym::{det_sym_matrix, det_sym_report};
use symdet::graph::SymbolicMatrix;
use symdet::minimize::minimize;
use symdet::poly::{bounds_report, BoundsReport};
use symdet::verify::{default_trials, identity_test, identity_test_squared, Status};
use symdet::FieldSpec;

use build::{Method, Size};

#[derive(Parser)]
#[command(name = "symdet", version, about = "Compile formulas and weakly-skew circuits to determinantal representations")]
struct Cli {
    /// Reproducible mode: randomized subcommands must be given `--seed`.
    #[arg(long, global = true)]
    ci: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CircuitInput {
    /// Circuit file in the gate-list format, or a file holding one expression.
    path: Option<PathBuf>,
    /// Inline expression such as `(x+y)*z + 2*y`.
    #[arg(long, short = 'e', conflicts_with = "path")]
    expr: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Matrix,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, classify and measure a circuit (JSON report).
    Parse {
        #[command(flatten)]
        input: CircuitInput,
    },
    /// Push constants onto arrows and print the minimized circuit.
    Minimize {
        #[command(flatten)]
        input: CircuitInput,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Build a determinantal representation and check its dimension bound.
    Build {
        #[command(flatten)]
        input: CircuitInput,
        #[arg(long, value_enum)]
        method: Method,
        /// Size measure; defaults to green.
        #[arg(long, value_enum)]
        size: Option<Size>,
        #[arg(long, value_enum, default_value = "matrix")]
        format: Format,
        /// Shorthand for `--format dot`.
        #[arg(long)]
        dot: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Symmetric representation of the generic n x n determinant.
    Detsym {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "matrix")]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Symmetric matrix whose determinant is the squared polynomial in characteristic 2.
    Char2Square {
        #[command(flatten)]
        input: CircuitInput,
        #[arg(long, value_enum, default_value = "matrix")]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Partial permanent of a matrix file.
    Pperm {
        matrix: PathBuf,
        /// Check det(A + I) = per*(B)^2 over GF(2^16).
        #[arg(long)]
        check_identity: bool,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomized identity test of det(matrix) against a circuit.
    Verify {
        circuit: PathBuf,
        matrix: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        /// `p61` (default), a prime, `gf2^16`, or `gf2`.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Compare against the squared polynomial (characteristic 2).
        #[arg(long)]
        squared: bool,
        #[arg(long)]
        json: bool,
    },
    /// Size bounds for dense polynomials as CSV.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        /// Emit every (n', d') with n' <= n and d' <= d.
        #[arg(long)]
        all: bool,
    },
    /// Reproduce the worked examples.
    Demo,
}

/// Failures mapped to exit codes: usage 2, everything else 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(symdet::Error),
    Io(PathBuf, std::io::Error),
    Check(String),
}

impl From<symdet::Error> for CliError {
    fn from(e: symdet::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn diagnostic(&self) -> serde_json::Value {
        match self {
            CliError::Usage(msg) => json!({ "error": "usage", "message": msg }),
            CliError::Core(e) => {
                let debug = format!("{e:?}");
                let kind: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
                json!({ "error": kind, "message": e.to_string() })
            }
            CliError::Io(path, e) => json!({ "error": "io", "path": path.display().to_string(), "message": e.to_string() }),
            CliError::Check(msg) => json!({ "error": "check", "message": msg }),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_matrix(m: &SymbolicMatrix, format: Format, report: serde_json::Value) -> CliResult<String> {
    match format {
        Format::Matrix => Ok(m.render()),
        Format::Json => Ok(format!("{}\n", json!({ "matrix": m.to_json(), "report": report }))),
        Format::Dot => Err(CliError::Usage("dot output is not available for this subcommand".into())),
    }
}

fn seed_for(ci: bool, seed: Option<u64>) -> CliResult<u64> {
    match (ci, seed) {
        (_, Some(s)) => Ok(s),
        (true, None) => Err(CliError::Usage("--ci requires --seed for randomized subcommands".into())),
        (false, None) => Ok(0),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Parse { input } => {
            let c = input::load_circuit(&input)?;
            let class = symdet::circuit::classify(&c);
            let sizes = c.measure();
            let report = json!({
                "vars": c.vars(),
                "gates": c.len(),
                "outputs": c.outputs().len(),
                "formula": class.is_formula,
                "weakly_skew": class.is_weakly_skew,
                "skinny": sizes.skinny,
                "fat": sizes.fat,
                "var_inputs": sizes.var_inputs,
                "green": sizes.green,
            });
            println!("{report}");
            Ok(())
        }
        Command::Minimize { input, output } => {
            let c = input::load_circuit(&input)?;
            let m = minimize(&c)?;
            eprintln!("skinny size {} -> {}", c.skinny_size(), m.skinny_size());
            emit(&m.render(), &output)
        }
        Command::Build { input, method, size, format, dot, output } => {
            let c = input::load_circuit(&input)?;
            let format = if dot { Format::Dot } else { format };
            let built = build::build(&c, method, size)?;
            eprintln!("{}", built.summary());
            let report = built.report();
            if let Some(note) = &built.note {
                eprintln!("note: {note}");
            }
            let text = match format {
                Format::Dot => built.dot.clone(),
                other => render_matrix(&built.matrix, other, report)?,
            };
            emit(&text, &output)?;
            built.enforce()
        }
        Command::Detsym { n, format, output } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let m = det_sym_matrix(n);
            let r = det_sym_report(n);
            eprintln!("dim {} <= 4n^3+7 = {}; ABP {} vertices, {} arcs; {} edges", r.dim, r.bound, r.abp_vertices, r.abp_arcs, r.edges);
            let report = json!({ "n": n, "dim": r.dim, "bound": r.bound, "edges": r.edges, "holds": r.dim <= r.bound });
            emit(&render_matrix(&m, format, report)?, &output)?;
            if r.dim > r.bound {
                return Err(symdet::Error::BoundViolation { dim: r.dim, bound: r.bound }.into());
            }
            Ok(())
        }
        Command::Char2Square { input, format, output } => {
            let c = input::load_circuit(&input)?;
            let doubled = square_matrix_char2(&c)?;
            let bound = 2 * c.fat_size() + 2;
            let dim = doubled.matrix.dim();
            eprintln!("dim {dim} <= 2m+2 = {bound}");
            let report = json!({ "dim": dim, "bound": bound, "holds": dim <= bound });
            let text = match format {
                Format::Dot => doubled.graph.export_dot(),
                other => render_matrix(&doubled.matrix, other, report)?,
            };
            emit(&text, &output)?;
            if dim > bound {
                return Err(symdet::Error::BoundViolation { dim, bound }.into());
            }
            Ok(())
        }
        Command::Pperm { matrix, check_identity, field, trials, seed } => {
            if check_identity {
                let spec = input::parse_field(field.as_deref().unwrap_or("gf2^16"))?;
                let b = input::load_matrix(&matrix, &FieldSpec::Rational)?;
                let seed = seed_for(cli.ci, seed)?;
                let v = partial_perm_identity(&b, &spec, trials.unwrap_or(20), seed)?;
                println!(
                    "{}",
                    json!({ "n": v.n, "exact": v.exact, "holds": v.holds, "lhs": v.lhs, "rhs": v.rhs, "seed": seed })
                );
                if !v.holds {
                    return Err(CliError::Check("det(A + I) differs from per*(B)^2".into()));
                }
            } else {
                let spec = input::parse_field(field.as_deref().unwrap_or("q"))?;
                let b = input::load_matrix(&matrix, &spec)?;
                println!("{}", partial_permanent(&b, &spec)?);
            }
            Ok(())
        }
        Command::Verify { circuit, matrix, trials, field, seed, squared, json } => {
            let spec = input::parse_field(field.as_deref().unwrap_or("p61"))?;
            let seed = seed_for(cli.ci, seed)?;
            let c = input::load_circuit_path(&circuit)?;
            let m = input::load_matrix(&matrix, &FieldSpec::Rational)?;
            let trials = trials.unwrap_or_else(|| default_trials(&spec));
            let verdict = if squared {
                identity_test_squared(&c, &m, trials, &spec, seed)?
            } else {
                identity_test(&c, &m, trials, &spec, seed)?
            };
            if json {
                println!("{}", verdict.to_json());
            } else {
                match &verdict.status {
                    Status::VerifiedExact => println!("verified exactly (dim {})", verdict.dim),
                    Status::VerifiedRandom { trials, field } => {
                        println!("verified at {trials} random points over {field} (dim {}, seed {seed})", verdict.dim)
                    }
                    Status::Failed(w) => println!("FAILED at trial {} (seed {}): det = {}, circuit = {}", w.trial, w.seed, w.lhs, w.rhs),
                }
            }
            if verdict.verified() {
                Ok(())
            } else {
                Err(CliError::Check("determinant differs from the circuit".into()))
            }
        }
        Command::Bounds { n, d, all } => {
            if n == 0 || d == 0 {
                return Err(CliError::Usage("--n and --d must be at least 1".into()));
            }
            println!("{}", BoundsReport::CSV_HEADER);
            if all {
                for n in 1..=n {
                    for d in 1..=d {
                        println!("{}", bounds_report(n, d).csv_row());
                    }
                }
            } else {
                println!("{}", bounds_report(n, d).csv_row());
            }
            Ok(())
        }
        Command::Demo => {
            let (text, ok) = demo::run()?;
            print!("{text}");
            if ok {
                Ok(())
            } else {
                Err(CliError::Check("a worked example did not reproduce".into()))
            }
        }
    }
}
