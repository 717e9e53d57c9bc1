use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gasket_core::{Dim, Mode, Rational, Scalar, Status};

mod commands;

/// Harmonic functions and energy densities on the N-dimensional Sierpinski gasket.
#[derive(Parser, Debug)]
#[command(name = "gasket", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Dimension N (the gasket has N+1 corners).
    #[arg(long = "dim", global = true, default_value_t = 2)]
    pub n: usize,
    /// exact (rational) or float (f64) arithmetic.
    #[arg(long, global = true, default_value = "exact")]
    pub mode: Mode,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write CSV output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the exact identity suite for one dimension.
    Verify {
        /// Word length for the exhaustive checks.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Shift one entry of A_1 before checking.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Density profile of a harmonic function along an edge.
    Profile {
        /// Edge `w:i:j`.
        #[arg(long, default_value = ":1:2")]
        edge: String,
        /// Boundary values, comma separated (`p/q` or decimals).
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Dyadic depth of the sample points.
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Instead of the edge profile, write every cell of level m as `word,nu_h,nu,ratio`.
        #[arg(long, value_name = "M")]
        cells: Option<usize>,
    },
    /// Decay of the ratio along a symmetric tail, or of the worst edge gap.
    Decay {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Starting cell.
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: usize,
        /// First n used in the fit.
        #[arg(long = "fit-from", default_value_t = 10)]
        fit_from: usize,
        /// Worst |gap| over {i,j}^n instead of the symmetric tail.
        #[arg(long)]
        gaps: bool,
    },
    /// Location M(s) of the edge maximum on a log-spaced grid of s.
    Maxloc {
        #[arg(long, default_value_t = 41)]
        count: usize,
        /// Decades covered on each side of 1/(N+1).
        #[arg(long, default_value_t = 3.0)]
        decades: f64,
        /// Emit the s with M(s) equal to this target instead.
        #[arg(long)]
        inverse: Option<f64>,
    },
    /// The monotone profile L on the dyadic grid.
    Derham {
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 40)]
        iterations: u32,
    },
    /// Density along an edge at the point coded by an eventually constant stream.
    ConeDensity {
        #[arg(long, default_value = ":1:2")]
        edge: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Head of the stream, letters from the edge endpoints.
        #[arg(long, default_value = "")]
        omega: String,
        /// Symbol repeated after the head.
        #[arg(long)]
        tail: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// A subcell where the energy ratio drops below eps.
    Vanish {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
}

pub fn parse_vector<T: Scalar>(text: &str, size: usize) -> Result<gasket_core::Vector<T>> {
    let values = text
        .split(',')
        .map(|s| gasket_core::scalar::parse_rational(s).with_context(|| format!("cannot parse `{s}` as a number")))
        .collect::<Result<Vec<Rational>>>()?;
    if values.len() != size {
        bail!("expected {size} boundary values, got {}", values.len());
    }
    Ok(gasket_core::Vector::new(values.iter().map(T::from_rational).collect()))
}

pub fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn run<T: Scalar>(common: &Common, command: &Command) -> Result<ExitCode> {
    let dim = Dim::new(common.n)?;
    match command {
        Command::Verify { depth, corrupt } => {
            let report = commands::verify::<T>(dim, *depth, common.seed, *corrupt)?;
            print!("{report}");
            let failed = report.count(Status::Fail);
            println!(
                "{} passed, {failed} failed, {} skipped",
                report.count(Status::Pass),
                report.count(Status::Skipped)
            );
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Profile { edge, u, depth, cells } => {
            let csv = match cells {
                Some(m) => commands::cells::<T>(dim, u, *m)?,
                None => commands::profile::<T>(dim, edge, u, *depth)?,
            };
            emit(common, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decay { u, word, i, j, n_max, fit_from, gaps } => {
            let (csv, summary) = if *gaps {
                commands::gap_decay::<T>(dim, u, word, *i, *j, *n_max)?
            } else {
                commands::tail_decay::<T>(dim, u, word, *i, *j, *n_max, *fit_from)?
            };
            emit(common, &csv)?;
            eprint!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Maxloc { count, decades, inverse } => {
            let text = match inverse {
                Some(target) => commands::maxloc_inverse(dim, *target)?,
                None => commands::maxloc(dim, *count, *decades)?,
            };
            emit(common, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Derham { depth, iterations } => {
            emit(common, &commands::derham(dim, *depth, *iterations)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConeDensity { edge, u, omega, tail, tol } => {
            emit(common, &commands::cone_density::<T>(dim, edge, u, omega, *tail, *tol)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Vanish { u, word, eps } => {
            emit(common, &commands::vanish::<T>(dim, u, word, *eps)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.common.mode {
        Mode::Exact => run::<Rational>(&cli.common, &cli.command),
        Mode::Float => run::<f64>(&cli.common, &cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
