use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modssd::teleport::TeleportOutcome;
use modssd::Complex64;

mod commands;
mod config;
mod output;

use commands::{Formula, StateKind, TeleportPoint};
use config::{Format, Overrides, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Args(String),
    #[error("{}{source}", row.map(|r| format!("row {r}: ")).unwrap_or_default())]
    Model { source: modssd::Error, row: Option<usize> },
    #[error("{0}")]
    Io(String),
}

impl From<modssd::Error> for CliError {
    fn from(source: modssd::Error) -> Self {
        CliError::Model { source, row: None }
    }
}

impl CliError {
    fn at_row(self, i: usize) -> Self {
        match self {
            CliError::Model { source, row: None } => CliError::Model { source, row: Some(i) },
            other => other,
        }
    }

    fn exit_code(&self) -> u8 {
        use modssd::Error as E;
        match self {
            CliError::Args(_) => 2,
            CliError::Io(_) => 4,
            CliError::Model { source, .. } => match source {
                E::Domain(_) | E::UnsupportedPointwise | E::Aliasing(_) => 2,
                _ => 3,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "modssd", version, about = "Reduced logical states of CV states in the modular subsystem decomposition")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Lattice spacing; `sqrt-pi` or a number
    #[arg(long, global = true, value_parser = config::parse_alpha)]
    alpha: Option<f64>,
    /// Logical dimension
    #[arg(long, global = true)]
    d: Option<i64>,
    /// csv or json (json writes one object per line)
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Rows whose quadrature residual exceeds this are flagged in `status`
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Gauge bins on each side for the numeric oracle
    #[arg(long, global = true)]
    m_max: Option<i64>,
    /// Samples per bin for the numeric oracle (odd)
    #[arg(long, global = true)]
    points_per_bin: Option<usize>,
    /// Largest accepted oracle trace distance
    #[arg(long, global = true)]
    oracle_tolerance: Option<f64>,
}

#[derive(Args)]
struct Amplitudes {
    /// Amplitude of |0>, `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    c0: Option<String>,
    /// Amplitude of |1>, `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<String>,
    /// Named state: zero, one, plus, minus, plus-i, minus-i
    #[arg(long, conflicts_with_all = ["c0", "c1", "theta"])]
    state: Option<String>,
    /// Bloch polar angle (with --phi)
    #[arg(long, conflicts_with_all = ["c0", "c1"])]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
}

impl Amplitudes {
    fn resolve(&self) -> Result<(Complex64, Complex64), CliError> {
        if let Some(name) = &self.state {
            return commands::named_amplitudes(name).ok_or_else(|| CliError::Args(format!("unknown state {name:?}")));
        }
        if let Some(theta) = self.theta {
            return Ok(modssd::states::bloch_amplitudes(theta, self.phi));
        }
        let parse = |s: &Option<String>, default: f64| match s {
            Some(v) => commands::parse_complex(v).map_err(CliError::Args),
            None => Ok(Complex64::new(default, 0.0)),
        };
        commands::normalize(parse(&self.c0, 1.0)?, parse(&self.c1, 0.0)?)
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Kind {
    Squeezed,
    Gkp,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormulaArg {
    Full,
    Hq,
    Ideal,
}

#[derive(Subcommand)]
enum Command {
    /// Logical label, gauge bin and modular position of x
    Decompose {
        #[arg(allow_negative_numbers = true)]
        x: f64,
    },
    /// Reduced logical state of a squeezed vacuum or approximate GKP state
    LogicalState {
        #[arg(long, value_enum, default_value = "gkp")]
        kind: Kind,
        /// Squeezing factor of the vacuum
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Defaults to delta
        #[arg(long)]
        kappa: Option<f64>,
        #[command(flatten)]
        amps: Amplitudes,
    },
    /// Squeezed-vacuum logical states over a dB range
    SqueezeSweep {
        #[arg(long, default_value_t = -18.0, allow_hyphen_values = true)]
        db_min: f64,
        #[arg(long, default_value_t = 18.0, allow_hyphen_values = true)]
        db_max: f64,
        #[arg(long, default_value_t = 19)]
        steps: usize,
    },
    /// Fidelity of approximate GKP states over the Bloch sphere
    GkpFidelityGrid {
        /// Quality of the spikes and envelope (delta = kappa)
        #[arg(long, default_value_t = 12.0)]
        db: f64,
        #[arg(long, default_value_t = 13)]
        theta_steps: usize,
        #[arg(long, default_value_t = 24)]
        phi_steps: usize,
    },
    /// Logical state after noisy teleportation with fixed outcomes
    TeleportPoint {
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        /// Defaults to delta
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 0.2)]
        zeta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "full")]
        formula: FormulaArg,
        /// Compare against the gauge trace of the numerically teleported state
        #[arg(long)]
        check_oracle: bool,
        #[command(flatten)]
        amps: Amplitudes,
    },
    /// Infidelity of the outcome-averaged teleported state over a dB grid
    TeleportAvgSweep {
        /// start:stop:count or a comma list
        #[arg(long, default_value = "8:18:6")]
        delta_db: String,
        #[arg(long, default_value = "8:18:6")]
        zeta_db: String,
        /// theta:phi pairs or names, comma separated
        #[arg(long, default_value = "zero,plus")]
        states: String,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let flags = Overrides {
        alpha: c.alpha,
        d: c.d,
        format: c.format,
        output: c.output.clone(),
        jobs: c.jobs,
        tolerance: c.tolerance,
        m_max: c.m_max,
        points_per_bin: c.points_per_bin,
        oracle_tolerance: c.oracle_tolerance,
    };
    let file = config::load_env_config()?;
    let default_format = if matches!(cli.command, Command::TeleportPoint { .. }) { Format::Json } else { Format::Csv };
    let set = Settings::merge(&flags, &file, default_format)?;
    let rows = match &cli.command {
        Command::Decompose { x } => commands::decompose(*x, &set)?,
        Command::LogicalState { kind, zeta, delta, kappa, amps } => {
            let kind = match kind {
                Kind::Squeezed => {
                    StateKind::Squeezed { zeta: zeta.ok_or_else(|| CliError::Args("--zeta is required".into()))? }
                }
                Kind::Gkp => {
                    let delta = delta.ok_or_else(|| CliError::Args("--delta is required".into()))?;
                    let (c0, c1) = amps.resolve()?;
                    StateKind::Gkp { delta, kappa: kappa.unwrap_or(delta), c0, c1 }
                }
            };
            commands::logical_state(&kind, &set)?
        }
        Command::SqueezeSweep { db_min, db_max, steps } => {
            let dbs = commands::linspace(*db_min, *db_max, *steps).map_err(CliError::Args)?;
            commands::squeeze_sweep(&dbs, &set)?
        }
        Command::GkpFidelityGrid { db, theta_steps, phi_steps } => {
            commands::gkp_fidelity_grid(*db, *theta_steps, *phi_steps, &set)?
        }
        Command::TeleportPoint { delta, kappa, zeta, s, t, formula, check_oracle, amps } => {
            let (c0, c1) = amps.resolve()?;
            let formula = match formula {
                FormulaArg::Full => Formula::Full,
                FormulaArg::Hq => Formula::Hq,
                FormulaArg::Ideal => Formula::Ideal,
            };
            let p = TeleportPoint {
                delta: *delta,
                kappa: kappa.unwrap_or(*delta),
                out: TeleportOutcome::new(*s, *t, *zeta)?,
                c0,
                c1,
                formula,
                check_oracle: *check_oracle,
            };
            commands::teleport_point(&p, &set)?
        }
        Command::TeleportAvgSweep { delta_db, zeta_db, states } => {
            let d = commands::parse_list(delta_db).map_err(CliError::Args)?;
            let z = commands::parse_list(zeta_db).map_err(CliError::Args)?;
            let st = commands::parse_states(states).map_err(CliError::Args)?;
            commands::teleport_avg_sweep(&d, &z, &st, &set)?
        }
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &set.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            output::write_rows(&rows, set.format, BufWriter::new(f)).map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write_rows(&rows, set.format, &mut lock).map_err(io)?;
            lock.flush().map_err(io)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
