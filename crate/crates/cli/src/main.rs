//! `veronese`: integrability checks, theorem experiments, complexification
//! checks and corpus generation, all reporting JSON.
//!
//! Exit codes: 0 success or integrable, 1 check failed, 2 invalid input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Environment variable bounding the worker pool.
pub const WORKERS_ENV: &str = "VERONESE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "veronese", version, about = "Exact integrability checks for Veronese curves of distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    /// Every coefficient of the integrability pencils vanishes.
    Full,
    /// Integrable at n+3 distinct points.
    Sparse,
    /// Integrable at n(k+1)+1 distinct points.
    Naive,
    /// Schwartz-Zippel sampling of the coefficient polynomials.
    Random,
    /// Only the listed points, no inference.
    Listed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check integrability of a curve.
    Check {
        curve: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckMode::Full)]
        mode: CheckMode,
        /// Comma-separated parameter values, e.g. `0,1/2,-3,inf`.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the n+3-point criterion with the full check on random draws.
    Theorem {
        curve: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build F on the complexification and check the four items at each t.
    Complexify {
        curve: PathBuf,
        /// n+2 distinct anchors.
        #[arg(long, required = true, allow_hyphen_values = true)]
        anchors: String,
        #[arg(long, default_value = "0,1,-1,5,inf", allow_hyphen_values = true)]
        sample_ts: String,
        /// First move the curve into the adapted chart recorded in its manifest.
        #[arg(long)]
        adapted: bool,
        /// Manifest file, when it is not embedded in the curve JSON.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one curve and its manifest.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vanishing points of a perturbation.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Shear images `x0+x1*x2,x1,x2`.
        #[arg(long, allow_hyphen_values = true)]
        map: Option<String>,
        /// Rescaling matrix, rows separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Scalar rescaling for k = 1.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "matrix")]
        unit: Option<String>,
        /// Möbius matrix `a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        /// Components of the perturbing 1-form, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// 1-based pencil to perturb.
        #[arg(long)]
        pencil: Option<usize>,
        /// Family the transformation is applied to (default flat).
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        base_seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write the standard seeded corpus with an index of content hashes.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
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
    if let Err(e) = commands::configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Check {
            curve,
            mode,
            points,
            samples,
            seed,
            out,
        } => commands::check(&curve, mode, points.as_deref(), samples, seed, out.as_deref()),
        Command::Theorem { curve, trials, seed, out } => commands::theorem(&curve, trials, seed, out.as_deref()),
        Command::Complexify {
            curve,
            anchors,
            sample_ts,
            adapted,
            manifest,
            out,
        } => commands::complexify(&curve, &anchors, &sample_ts, adapted, manifest.as_deref(), out.as_deref()),
        Command::Gen {
            family,
            k,
            n,
            seed,
            points,
            map,
            matrix,
            unit,
            g,
            beta,
            pencil,
            base,
            base_seed,
            out_dir,
        } => commands::gen(
            commands::GenArgs {
                family,
                k,
                n,
                seed,
                points,
                map,
                matrix: matrix.or(unit),
                g,
                beta,
                pencil,
                base,
                base_seed,
            },
            &out_dir,
        ),
        Command::Corpus { seed, out_dir } => commands::corpus(seed, &out_dir),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
