//! `verikit`: command-line front end to the verification library.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage or input error, 3 resource bound
//! exceeded.

mod commands;
mod report;
mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{CommandFactory, Parser, Subcommand};
use verikit::Error;

use commands::Context;
use report::{RunReport, Verdict};

#[derive(Parser, Debug)]
#[command(name = "verikit", version, about = "Checks constructions, bounds and identities from six extremal problems")]
struct Cli {
    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomised check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Wall-clock limit for exhaustive searches.
    #[arg(long, global = true, value_name = "SECS")]
    time_limit_secs: Option<f64>,
    /// Include elapsed time in the report (makes output non-deterministic).
    #[arg(long, global = true)]
    timing: bool,
    /// In tables, print long lists in full.
    #[arg(long, global = true)]
    full: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residue sets A and B modulo a prime and the product of A.
    Residues {
        #[arg(long)]
        prime: u64,
        /// Show A and B in full in the table.
        #[arg(long)]
        list_sets: bool,
        /// Also check every odd prime up to M.
        #[arg(long, value_name = "M")]
        sweep_max: Option<u64>,
    },
    /// Beam packings of the n x n x n cube.
    Beams {
        #[command(subcommand)]
        cmd: BeamsCmd,
    },
    /// Lattice point sets with unit-determinant pairs, and Farey sequences.
    Pairs {
        #[command(subcommand)]
        cmd: PairsCmd,
    },
    /// Exact interpolation and overdetermined point sets.
    Overdet {
        #[command(subcommand)]
        cmd: OverdetCmd,
    },
    /// Minimal-area point on the minor arc of an acute triangle's circumcircle.
    Geo {
        #[command(subcommand)]
        cmd: GeoCmd,
    },
    /// The rearrangement gap inequality.
    Ineq {
        #[command(subcommand)]
        cmd: IneqCmd,
    },
    /// The full suite.
    All {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum BeamsCmd {
    Construct {
        #[arg(long)]
        n: u32,
    },
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    Search {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum PairsCmd {
    Count {
        #[arg(long)]
        file: PathBuf,
    },
    Construct {
        #[arg(long)]
        n: u64,
    },
    Brute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: u64,
    },
    Farey {
        #[arg(long)]
        order: u64,
    },
}

#[derive(Subcommand, Debug)]
enum OverdetCmd {
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    Count {
        #[arg(long)]
        file: PathBuf,
    },
    Construct {
        #[arg(long)]
        n: usize,
    },
    /// Searches subsets of the grid [1, xmax] x [1, ymax].
    Brute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        xmax: i64,
        #[arg(long)]
        ymax: i64,
    },
}

#[derive(Subcommand, Debug)]
enum GeoCmd {
    Scan {
        /// "ax,ay,bx,by,cx,cy"
        #[arg(long, allow_hyphen_values = true)]
        triangle: String,
        #[arg(long, default_value_t = verikit::circlegeo::DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum IneqCmd {
    /// Requires --seed.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
    },
    Permsums {
        #[arg(long)]
        n: usize,
    },
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Read entries as exact rationals.
        #[arg(long)]
        exact: bool,
    },
}

fn dispatch(cli: &Cli, ctx: &Context) -> anyhow::Result<RunReport> {
    match &cli.command {
        Command::Residues { prime, sweep_max, .. } => commands::residues(*prime, *sweep_max),
        Command::Beams { cmd } => match cmd {
            BeamsCmd::Construct { n } => commands::beams_construct(*n),
            BeamsCmd::Check { file } => commands::beams_check(file),
            BeamsCmd::Search { n, max } => commands::beams_search(ctx, *n, *max),
        },
        Command::Pairs { cmd } => match cmd {
            PairsCmd::Count { file } => commands::pairs_count(file),
            PairsCmd::Construct { n } => commands::pairs_construct(*n),
            PairsCmd::Brute { n, bound } => commands::pairs_brute(ctx, *n, *bound),
            PairsCmd::Farey { order } => commands::pairs_farey(*order),
        },
        Command::Overdet { cmd } => match cmd {
            OverdetCmd::Check { file } => commands::overdet_check(file),
            OverdetCmd::Count { file } => commands::overdet_count(file),
            OverdetCmd::Construct { n } => commands::overdet_construct(*n),
            OverdetCmd::Brute { n, xmax, ymax } => commands::overdet_brute(ctx, *n, *xmax, *ymax),
        },
        Command::Geo { cmd: GeoCmd::Scan { triangle, samples } } => commands::geo_scan(triangle, *samples),
        Command::Ineq { cmd } => match cmd {
            IneqCmd::Sample { n, trials } => {
                let seed = ctx.seed.unwrap_or_else(|| {
                    Cli::command()
                        .error(clap::error::ErrorKind::MissingRequiredArgument, "`ineq sample` requires --seed")
                        .exit()
                });
                commands::ineq_sample(*n, *trials, seed)
            }
            IneqCmd::Permsums { n } => commands::ineq_permsums(*n),
            IneqCmd::Check { file, exact } => commands::ineq_check(file, *exact),
        },
        Command::All { config } => {
            let cfg = match config {
                Some(path) => commands::read_json(path)?,
                None => suite::SuiteConfig::default(),
            };
            Ok(suite::run_all(&cfg, ctx))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceExceeded(_)) => 3,
        Some(Error::Numerical(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let time_limit = match cli.time_limit_secs {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            Cli::command().error(clap::error::ErrorKind::InvalidValue, "--time-limit-secs must be positive").exit();
        }
        other => other.map(Duration::from_secs_f64),
    };
    let ctx = Context { seed: cli.seed, time_limit };
    let start = Instant::now();
    let mut report = match dispatch(&cli, &ctx) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verikit: {e:#}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let list_sets = matches!(cli.command, Command::Residues { list_sets: true, .. });
    let text = if cli.json {
        report.to_json() + "\n"
    } else if matches!(cli.command, Command::All { .. }) && !cli.full {
        suite::summary_table(&report)
    } else {
        report.to_table(if cli.full || list_sets { None } else { Some(12) })
    };
    // A closed pipe downstream is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(match report.verdict {
        Verdict::Pass | Verdict::Skipped => 0,
        Verdict::Fail => 1,
        Verdict::Indeterminate => 3,
    })
}
