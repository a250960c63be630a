use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use macrobell::binning::ThreeBinSpec;
use macrobell::cli::{self, CommandOutput, OutputFormat, EXIT_ERROR};
use macrobell::repro::{write_artifacts, Fig1Config, Fig2Config, ReproTarget, SigmaScanConfig, DEFAULT_MC_TOL, DEFAULT_TOL};
use macrobell::sets::{SetKind, DEFAULT_SIGMA, DEFAULT_TRIANGLE_SAMPLES};
use macrobell::sim::{Binning, SimConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Macroscopic-locality toolkit: membership tests, line bounds, simulation and figure scans.
#[derive(Parser, Debug)]
#[command(name = "macrobell", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Base seed for every random component.
    #[arg(long, global = true, env = "MACROBELL_SEED", default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per setting pair (triangle binning).
    #[arg(long, global = true, default_value_t = DEFAULT_TRIANGLE_SAMPLES)]
    samples: usize,
    /// Bisection tolerance in the mixing weight.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Kernel width for three-binning.
    #[arg(long, global = true, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for generated files.
    #[arg(long, global = true, default_value = "macrobell-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test a behavior against a set (exit 0 inside, 1 outside, 2 undetermined, 3 error).
    Membership {
        /// Behavior file or named behavior (pr, generalized_pr_d3, white_noise:2222, isotropic_chsh:<v>).
        behavior: String,
        /// local, qsb, q1, q1-analytic, qsb3 or qtb.
        #[arg(long)]
        set: String,
    },
    /// Largest mixing weight toward `far` that stays in the set, starting from `base`.
    Bound {
        /// Functional file or name (chsh, i3322, cglmp3).
        #[arg(long)]
        functional: String,
        #[arg(long)]
        far: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        set: String,
    },
    /// Simulate macroscopic runs of N pairs and bin the intensities.
    Simulate {
        behavior: String,
        /// Pairs per run.
        #[arg(long, default_value_t = 1000)]
        pairs: u64,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = BinningArg::Sign)]
        binning: BinningArg,
    },
    /// Regenerate the CSV data behind a figure.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Rays through the I3322 slice.
        #[arg(long)]
        rays: Option<usize>,
        /// Radial grid points per ray in the slice grid.
        #[arg(long, default_value_t = 50)]
        radial: usize,
        /// Scan points on the CGLMP3 line.
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Comma-separated kernel widths for the sweep (default: log grid with 0.028).
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BinningArg {
    Sign,
    Three,
    Triangle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Target {
    Fig1Slice,
    Fig2Line,
    SigmaScan,
}

fn run(cli: Cli) -> Result<CommandOutput> {
    let c = &cli.common;
    let format = OutputFormat::from(c.format);
    let set = |name: &str| SetKind::parse(name, c.sigma, c.samples, c.seed).with_context(|| format!("set `{name}`"));
    let out = match &cli.command {
        Command::Membership { behavior, set: name } => {
            let b = cli::load_behavior(behavior).with_context(|| format!("loading `{behavior}`"))?;
            cli::cmd_membership(&b, &set(name)?, format)?
        }
        Command::Bound { functional, far, base, set: name } => {
            let f = cli::load_functional(functional).with_context(|| format!("loading `{functional}`"))?;
            let far = cli::load_behavior(far).with_context(|| format!("loading `{far}`"))?;
            let base = cli::load_behavior(base).with_context(|| format!("loading `{base}`"))?;
            cli::cmd_bound(&f, &far, &base, &set(name)?, c.tol.unwrap_or(DEFAULT_TOL), format)?
        }
        Command::Simulate { behavior, pairs, runs, binning } => {
            let b = cli::load_behavior(behavior).with_context(|| format!("loading `{behavior}`"))?;
            let binning = match binning {
                BinningArg::Sign => Binning::Sign,
                BinningArg::Three => Binning::Three(ThreeBinSpec::new(c.sigma)?),
                BinningArg::Triangle => Binning::Triangle,
            };
            let cfg = SimConfig { pairs_per_run: *pairs, runs: *runs, seed: c.seed, binning };
            cli::cmd_simulate(&b, &cfg, format)?
        }
        Command::Reproduce { target, rays, radial, points, sigmas } => {
            let tol = c.tol.unwrap_or(DEFAULT_TOL);
            let target = match target {
                Target::Fig1Slice => ReproTarget::Fig1Slice(Fig1Config {
                    rays: rays.unwrap_or(Fig1Config::default().rays),
                    radial: *radial,
                    sigma: c.sigma,
                    tol,
                }),
                Target::Fig2Line => ReproTarget::Fig2Line(Fig2Config {
                    points: *points,
                    samples: c.samples,
                    seed: c.seed,
                    tol,
                    mc_tol: c.tol.unwrap_or(DEFAULT_MC_TOL).max(tol),
                }),
                Target::SigmaScan => {
                    let d = SigmaScanConfig::default();
                    ReproTarget::SigmaScan(SigmaScanConfig {
                        sigmas: sigmas.clone().unwrap_or(d.sigmas),
                        rays: rays.unwrap_or(d.rays),
                        tol,
                    })
                }
            };
            let out = cli::cmd_reproduce(&target, format)?;
            let paths = write_artifacts(&c.out, &out.artifacts)?;
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            out
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
