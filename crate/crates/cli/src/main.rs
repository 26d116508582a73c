use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qlab_core::cube::{build_aq, CubeContext};
use qlab_core::dualpolar::{build_dual_polar, graph_json, DEFAULT_LAGRANGIAN_LIMIT};
use qlab_core::fq::DEFAULT_SUBSPACE_LIMIT;
use qlab_core::lattice::{build_lattice, build_rlke, build_y};
use qlab_core::operator::export_matrix;
use qlab_core::quotient::build_zeta;
use qlab_core::suites::{run_suite, Params, Suite, DEFAULT_TOL};
use qlab_core::{Error, Field, Operator, QuarterInt};

#[derive(Parser)]
#[command(name = "qlab", version, about = "Exact verification of subspace lattice, hypercube and dual polar identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    /// Weighted lattice adjacency `Y` on `L_n(q)`.
    Y,
    /// Raising operator on `L_n(q)`.
    R,
    /// Lowering operator on `L_n(q)`.
    L,
    /// Grading operator `K` on `L_n(q)`.
    K,
    /// The isometry from the cube onto profile classes of `L_n(q)`.
    Zeta,
    /// Weighted cube adjacency `A_{q^t}` on `{0,1}^n`.
    Aq,
    /// Adjacency of the dual polar graph `C_n(q)`.
    DualPolar,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print its report.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        /// Dimension parameter (`N` for lattices and cubes, `d` for dual polar graphs).
        #[arg(long, visible_alias = "d")]
        n: Option<usize>,
        #[arg(long)]
        q: Option<u64>,
        /// Tolerance for floating checks.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Largest object, in vertices, to build.
        #[arg(long)]
        limit: Option<u128>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Record wall time per case (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Build the symplectic dual polar graph `C_d(q)`.
    Dualpolar {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_LAGRANGIAN_LIMIT)]
        limit: u128,
        /// Write vertices and distance matrices as JSON.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Export an exact operator as matrix JSON.
    Export {
        #[arg(long, value_enum)]
        object: Object,
        #[arg(long, visible_alias = "d")]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Weight exponent for `aq`, an integer or a fraction with denominator 2 or 4.
        #[arg(long, default_value = "0", value_parser = parse_quarter, allow_hyphen_values = true)]
        t: QuarterInt,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_quarter(s: &str) -> Result<QuarterInt, String> {
    let bad = || format!("{s:?} is not a multiple of 1/4");
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den <= 0 || 4 % den != 0 {
        return Err(bad());
    }
    Ok(QuarterInt::quarters(num * (4 / den)))
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn write_or_print(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn export_object(object: Object, n: usize, q: u64, t: QuarterInt) -> Result<Operator, Error> {
    match object {
        Object::Aq => build_aq(&CubeContext::new(n, u32::try_from(q).map_err(|_| Error::InvalidBase(q))?, t)?),
        Object::DualPolar => {
            let g = build_dual_polar(n, &Field::new(q)?, DEFAULT_LAGRANGIAN_LIMIT)?;
            g.table.operator(1, g.ring())
        }
        _ => {
            let ctx = build_lattice(n, &Field::new(q)?, DEFAULT_SUBSPACE_LIMIT)?;
            Ok(match object {
                Object::Y => build_y(&ctx)?,
                Object::Zeta => build_zeta(&ctx)?.matrix,
                Object::R => build_rlke(&ctx)?.raise,
                Object::L => build_rlke(&ctx)?.lower,
                _ => build_rlke(&ctx)?.k,
            })
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { suite, n, q, tol, limit, format, output, timings } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
            }
            let params = Params { n, q, tol, limit, timings };
            let report = run_suite(suite, &params);
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            write_or_print(output.as_ref(), &text)?;
            Ok(report.all_passed())
        }
        Command::Dualpolar { d, q, limit, emit } => {
            let g = build_dual_polar(d, &Field::new(q)?, limit)?;
            println!("C_{d}({q}): {} vertices", g.len());
            if let Some(path) = emit {
                let json = serde_json::to_string_pretty(&graph_json(&g)?).map_err(|e| Failure::Runtime(e.to_string()))?;
                write_or_print(Some(&path), &(json + "\n"))?;
            }
            Ok(true)
        }
        Command::Export { object, n, q, t, out } => {
            let op = export_object(object, n, q, t)?;
            export_matrix(&op, &out).map_err(Failure::from)?;
            println!("wrote {}x{} matrix with {} nonzeros to {}", op.nrows(), op.ncols(), op.nnz(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
