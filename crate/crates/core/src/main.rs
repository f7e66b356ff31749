use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dgd::analysis::{nash_grid, Search};
use dgd::harness::{self, equivalence_report, nash_csv, write_equivalence_csv, ExperimentConfig};
use dgd::Result;

#[derive(Parser)]
#[command(name = "dgd", about = "Distributed gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Experiment settings; unset flags fall back to the config file, then to
/// the scenario defaults.
#[derive(Args, Default)]
struct Settings {
    /// `key = value` file using the flag names below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    observability: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    fsc_states: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    eval_every: Option<String>,
    #[arg(long)]
    eval_episodes: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    no_pass: bool,
    /// causal (default) or exclusive
    #[arg(long)]
    sum_bound: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// simplex or uniform:<half-width>
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    checkpoint_dir: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Settings {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut pairs: Vec<(String, String)> = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => Vec::new(),
        };
        let flags = [
            ("scenario", &self.scenario),
            ("algo", &self.algo),
            ("observability", &self.observability),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("epsilon", &self.epsilon),
            ("fsc-states", &self.fsc_states),
            ("trials", &self.trials),
            ("runs", &self.runs),
            ("eval-every", &self.eval_every),
            ("eval-episodes", &self.eval_episodes),
            ("seed", &self.seed),
            ("sum-bound", &self.sum_bound),
            ("theta", &self.theta),
            ("init", &self.init),
            ("max-steps", &self.max_steps),
            ("checkpoint-dir", &self.checkpoint_dir),
            ("out", &self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                pairs.push((k.to_string(), v.clone()));
            }
        }
        if self.no_pass {
            pairs.push(("no-pass".into(), "true".into()));
        }
        if self.parallel {
            pairs.push(("parallel".into(), "true".into()));
        }
        ExperimentConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate over several seeded runs; writes a learning-curve CSV.
    Run(Settings),
    /// Train DGD and the joint controller in lockstep; writes per-trial divergence.
    Equivalence(Settings),
    /// Classify a grid of coordination-game policies as Nash or not.
    Analyze {
        /// Grid intervals per axis (20 gives steps of 0.05).
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Best-response search grid intervals.
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long, default_value_t = 0.99)]
        gamma: f64,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dgd: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(s) => {
            let cfg = s.resolve()?;
            let set = harness::run_and_write(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", set.to_csv());
            }
        }
        Command::Equivalence(s) => {
            let mut cfg = s.resolve()?;
            // A short default suits the lockstep comparison.
            if s.trials.is_none() && s.config.is_none() {
                cfg.trials = if cfg.scenario.is_soccer() { 100 } else { 1000 };
            }
            let rows = equivalence_report(&cfg)?;
            let worst = rows.iter().map(|r| r.max_rel_diff).fold(0.0, f64::max);
            match &cfg.out {
                Some(p) => write_equivalence_csv(&rows, p)?,
                None => {
                    for r in &rows {
                        println!("{},{}", r.trial, harness::format_g(r.max_rel_diff));
                    }
                }
            }
            eprintln!(
                "max relative divergence over {} trials: {worst:e}",
                rows.len()
            );
        }
        Command::Analyze {
            grid,
            resolution,
            gamma,
            out,
        } => {
            let search = Search {
                intervals: resolution,
                ..Search::default()
            };
            let rows = nash_grid(grid, gamma, search);
            let text = nash_csv(&rows);
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| dgd::Error::io(&p, e))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
