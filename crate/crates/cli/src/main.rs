use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fieldaoi::experiment::{run, AxisRange, AxisSpec, ExperimentConfig, RunKind, Spacing, Suite};
use fieldaoi::sim::ChannelMode;
use fieldaoi::{Discipline, Scheduler};

/// Remote estimation error of a sampled Gauss-Markov field.
#[derive(Parser, Debug)]
#[command(name = "fieldaoi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form average error of one configuration.
    Analytic(Shared),
    /// Monte Carlo estimate of the average error.
    Simulate {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Error-minimizing sampling rates.
    Optimize(Shared),
    /// Analytic error over a (lambda_s, lambda_t) grid.
    Sweep {
        #[command(flatten)]
        shared: Shared,
        /// lambda_s axis as FROM:TO:POINTS (log spaced).
        #[arg(long, value_parser = parse_range)]
        lambda_s_range: Option<AxisRange>,
        /// lambda_t axis as FROM:TO:POINTS (log spaced).
        #[arg(long, value_parser = parse_range)]
        lambda_t_range: Option<AxisRange>,
    },
    /// Built-in check suites.
    Check {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        suite: Option<Suite>,
        #[command(flatten)]
        sim: SimFlags,
    },
}

#[derive(Args, Debug)]
struct Shared {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    lambda_s: Option<f64>,
    #[arg(long)]
    lambda_t: Option<f64>,
    #[arg(long, conflicts_with = "mu")]
    mu_bar: Option<f64>,
    /// Raw channel rate; needs --length.
    #[arg(long, requires = "length")]
    mu: Option<f64>,
    /// Region length for --mu.
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    discipline: Option<Discipline>,
    #[arg(long)]
    scheduler: Option<Scheduler>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimFlags {
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    /// Simulated region length.
    #[arg(long)]
    sim_length: Option<f64>,
    /// channel-level or decoupled.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<ChannelMode>,
}

fn parse_range(s: &str) -> Result<AxisRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [from, to, points] = parts.as_slice() else {
        return Err(format!("expected FROM:TO:POINTS, got `{s}`"));
    };
    Ok(AxisRange {
        from: from.parse().map_err(|e| format!("{from}: {e}"))?,
        to: to.parse().map_err(|e| format!("{to}: {e}"))?,
        points: points.parse().map_err(|e| format!("{points}: {e}"))?,
        spacing: Some(Spacing::Log),
    })
}

fn parse_mode(s: &str) -> Result<ChannelMode, String> {
    match s {
        "channel-level" | "channel_level" => Ok(ChannelMode::ChannelLevel),
        "decoupled" => Ok(ChannelMode::Decoupled),
        other => Err(format!("unknown mode `{other}` (expected channel-level or decoupled)")),
    }
}

impl Shared {
    fn overlay(&self, kind: RunKind) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            kind: Some(kind),
            seed: self.seed,
            out: self.out.clone(),
            ..Default::default()
        };
        let m = &mut c.model;
        m.a = self.a;
        m.b = self.b;
        m.lambda_s = self.lambda_s;
        m.lambda_t = self.lambda_t;
        m.mu_bar = self.mu_bar;
        m.mu = self.mu;
        m.length = self.length;
        m.discipline = self.discipline;
        m.scheduler = self.scheduler;
        c
    }
}

impl SimFlags {
    fn apply(&self, c: &mut ExperimentConfig) {
        let s = &mut c.simulate;
        s.horizon = self.horizon;
        s.warmup = self.warmup;
        s.probes = self.probes;
        s.replications = self.replications;
        s.length = self.sim_length;
        s.mode = self.mode;
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, String> {
    let (shared, overlay) = match &cli.command {
        Command::Analytic(s) => (s, s.overlay(RunKind::Analytic)),
        Command::Optimize(s) => (s, s.overlay(RunKind::Optimize)),
        Command::Simulate { shared, sim } => {
            let mut o = shared.overlay(RunKind::Simulate);
            sim.apply(&mut o);
            (shared, o)
        }
        Command::Sweep {
            shared,
            lambda_s_range,
            lambda_t_range,
        } => {
            let mut o = shared.overlay(RunKind::Sweep);
            o.sweep.lambda_s = lambda_s_range.clone().map(AxisSpec::Range);
            o.sweep.lambda_t = lambda_t_range.clone().map(AxisSpec::Range);
            (shared, o)
        }
        Command::Check { shared, suite, sim } => {
            let mut o = shared.overlay(RunKind::Check);
            o.check.suite = *suite;
            o.check.horizon = sim.horizon;
            o.check.replications = sim.replications;
            (shared, o)
        }
    };
    let base = match &shared.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    Ok(base.merged(&overlay))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            for path in &report.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
