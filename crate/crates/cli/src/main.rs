// Negated float comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use landau_core::Error;

mod commands;
mod config;
mod output;

use config::{Format, RunConfig, SweepKind};

#[derive(Debug, Parser)]
#[command(
    name = "landau",
    version,
    about = "Landau-level transition probabilities under a driving electric field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML (or .json) run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Replaces the seed of every white-noise component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluate sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drive parameter u, intensity x and the phases of the configured field.
    U {
        /// CSV of the u(t) and R(t) traces.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Transition probability against level n at fixed x.
    #[command(allow_negative_numbers = true)]
    Figure1 {
        /// Intensity; the usual presets are 8 and 10.
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 160)]
        n_max: usize,
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Transition probability against x at fixed level n.
    #[command(allow_negative_numbers = true)]
    Figure2 {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 30.0)]
        x_max: f64,
        #[arg(long, default_value_t = 600)]
        points: usize,
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Row P(n -> m) of the displacement operator.
    #[command(allow_negative_numbers = true)]
    Matrix {
        #[arg(long)]
        n: Option<usize>,
        /// Real displacement sqrt(x); overrides the config.
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Level, intensity or frequency sweep.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long, value_enum)]
        kind: Option<SweepKind>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Compare the analytic probabilities with a direct simulation.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Single initial level instead of the configured list.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        dimension: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// A closed downstream pipe (`| head`) ends the run quietly.
fn is_broken_pipe(e: &Error) -> bool {
    let io = match e {
        Error::Io(io) => Some(io),
        Error::Csv(c) => match c.kind() {
            csv::ErrorKind::Io(io) => Some(io),
            _ => None,
        },
        _ => None,
    };
    io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        if let Some(f) = cfg.field.as_mut() {
            f.reseed(seed);
        }
    }
    if let Some(out) = cli.out {
        cfg.output.path = Some(out);
    }
    if let Some(f) = cli.format {
        cfg.output.format = Some(f);
    }
    if cli.sequential {
        cfg.output.execution = config::ExecMode::Sequential;
    }
    cfg.validate()?;

    match cli.command {
        Command::U { trace } => {
            if trace.is_some() {
                cfg.output.trace = trace;
            }
            commands::cmd_u(&cfg)
        }
        Command::Figure1 { x, n_max, gnuplot } => {
            set_gnuplot(&mut cfg, gnuplot);
            commands::cmd_figure1(&cfg, x, n_max)
        }
        Command::Figure2 {
            n,
            x_max,
            points,
            gnuplot,
        } => {
            set_gnuplot(&mut cfg, gnuplot);
            commands::cmd_figure2(&cfg, n, x_max, points)
        }
        Command::Matrix { n, x, m_max } => {
            if let Some(n) = n {
                cfg.transitions.n = n;
            }
            if let Some(x) = x {
                cfg.transitions.alpha = None;
                cfg.transitions.x = Some(x);
            }
            if m_max.is_some() {
                cfg.transitions.m_max = m_max;
            }
            commands::cmd_matrix(&cfg)
        }
        Command::Sweep {
            kind,
            x,
            n,
            n_max,
            x_max,
            points,
            gnuplot,
        } => {
            set_gnuplot(&mut cfg, gnuplot);
            let s = &mut cfg.sweep;
            s.kind = kind.unwrap_or(s.kind);
            s.x = x.unwrap_or(s.x);
            s.n = n.unwrap_or(s.n);
            s.n_max = n_max.unwrap_or(s.n_max);
            s.x_max = x_max.unwrap_or(s.x_max);
            s.points = points.unwrap_or(s.points);
            cfg.validate()?;
            commands::cmd_sweep(&cfg)
        }
        Command::Verify { n, step, dimension } => {
            if let Some(n) = n {
                cfg.oracle.levels = vec![n];
            }
            if step.is_some() {
                cfg.oracle.step = step;
            }
            if dimension.is_some() {
                cfg.oracle.dimension = dimension;
            }
            cfg.validate()?;
            commands::cmd_verify(&cfg)
        }
    }
}

fn set_gnuplot(cfg: &mut RunConfig, gnuplot: Option<PathBuf>) {
    if gnuplot.is_some() {
        cfg.output.gnuplot = gnuplot;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
