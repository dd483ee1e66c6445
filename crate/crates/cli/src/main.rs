//! Command-line entry point.
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 inconclusive results
//! without a failure, 64 usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinor_forge_core::checks::Verdict;
use spinor_forge_core::error::Error;
use spinor_forge_core::geometry::{Spacetime, Tetrad};

use spinor_forge::config;
use spinor_forge::report::{build_report, selftest_report, ReportDocument, ReportParams};

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "spinor-forge",
    version,
    about = "Clifford-algebra self-tests and numerical frame-condition reports over Lorentzian spacetimes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded algebra, ideal and representation self-test battery
    AlgebraSelftest {
        /// Seed for the randomized property checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
        /// Corrupt the reference product table (failure-path testing)
        #[arg(long, hide = true, default_value_t = false)]
        corrupt_product_table: bool,
    },
    /// Evaluate the geometry and connection identity suites plus the
    /// frame-condition classification for a spacetime/tetrad pair
    Report {
        /// Built-in spacetime: minkowski, schwarzschild or eds
        #[arg(long, conflicts_with = "config")]
        spacetime: Option<String>,
        /// Tetrad name: inertial, static, comoving or orthonormal
        #[arg(long)]
        tetrad: Option<String>,
        /// Mass parameter for the schwarzschild spacetime
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Spacetime configuration file (expression-backed metric)
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Number of sample points
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Seed for the sample-point sequence
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for pointwise algebraic identities
        #[arg(long, default_value_t = 1e-9)]
        tol_alg: f64,
        /// Tolerance for finite-difference identities
        #[arg(long, default_value_t = 1e-5)]
        tol_geo: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(verdict) => match verdict {
            Verdict::Pass => ExitCode::SUCCESS,
            Verdict::Fail => ExitCode::from(EXIT_FAIL),
            Verdict::Inconclusive => ExitCode::from(EXIT_INCONCLUSIVE),
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Cap rayon parallelism from SPINOR_FORGE_THREADS when set.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("SPINOR_FORGE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<Verdict, Error> {
    match cli.command {
        Command::AlgebraSelftest {
            seed,
            output,
            corrupt_product_table,
        } => {
            let doc = selftest_report(seed, corrupt_product_table);
            emit(&doc, &output)?;
            Ok(doc.overall)
        }
        Command::Report {
            spacetime,
            tetrad,
            mass,
            config,
            points,
            seed,
            tol_alg,
            tol_geo,
            output,
        } => {
            if points < 1 {
                return Err(Error::Config("--points must be at least 1".into()));
            }
            if tol_alg <= 0.0 || tol_geo <= 0.0 {
                return Err(Error::Config("tolerances must be positive".into()));
            }
            let (s, t, config_path) = resolve_configuration(spacetime, tetrad, mass, config)?;
            let params = ReportParams {
                points,
                seed,
                tol_alg,
                tol_geo,
                mass: s.mass(),
                config_path,
            };
            let doc = build_report(&s, &t, &params)?;
            emit(&doc, &output)?;
            Ok(doc.overall)
        }
    }
}

fn resolve_configuration(
    spacetime: Option<String>,
    tetrad: Option<String>,
    mass: f64,
    config: Option<PathBuf>,
) -> Result<(Spacetime, Tetrad, Option<String>), Error> {
    if let Some(path) = config {
        let loaded = config::load_custom_spacetime(&path)?;
        let t = match tetrad.as_deref() {
            None => loaded.tetrad,
            Some("orthonormal") => Tetrad::orthonormalized(),
            Some("custom") if loaded.has_custom_tetrad => loaded.tetrad,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown tetrad `{other}` for a custom spacetime (use `orthonormal` or `custom`)"
                )))
            }
        };
        return Ok((loaded.spacetime, t, Some(path.display().to_string())));
    }

    let name = spacetime.ok_or_else(|| {
        Error::Config("specify either --spacetime NAME or --config PATH".into())
    })?;
    let s = match name.as_str() {
        "minkowski" => Spacetime::minkowski(),
        "schwarzschild" => {
            if mass <= 0.0 {
                return Err(Error::Config("--mass must be positive".into()));
            }
            Spacetime::schwarzschild(mass)
        }
        "eds" => Spacetime::einstein_de_sitter(),
        other => {
            return Err(Error::Config(format!(
                "unknown spacetime `{other}` (expected minkowski, schwarzschild or eds)"
            )))
        }
    };
    let t = match tetrad.as_deref() {
        None => Tetrad::default_for(&s),
        Some("inertial") if name == "minkowski" => Tetrad::identity(),
        Some("static") if name == "schwarzschild" => Tetrad::schwarzschild_static(),
        Some("comoving") if name == "eds" => Tetrad::comoving(),
        Some("orthonormal") => Tetrad::orthonormalized(),
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown tetrad `{other}` for spacetime `{name}`"
            )))
        }
    };
    Ok((s, t, None))
}

fn emit(doc: &ReportDocument, output: &OutputArgs) -> Result<(), Error> {
    let rendered = match output.format {
        Format::Json => doc.to_json(),
        Format::Text => doc.to_text(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
