//! Seeded multi-run experiments, curve aggregation and CSV artifacts.

mod config;
mod csv;
pub mod stats;

pub use config::{Algorithm, ExperimentConfig};
pub use csv::{
    format_g, nash_csv, read_csv, write_csv, write_equivalence_csv, write_nash_csv, CurveRow,
    CurveSet, EquivalenceRow,
};

use std::path::Path;

use rayon::prelude::*;

use crate::baseline_q::{q_train, QConfig};
use crate::envs::coordination;
use crate::envs::soccer::SoccerWorld;
use crate::envs::Scenario;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::learner::{
    checkpoint_text, dgd_train, initial_policies, joint_train, DgdTrainer, JointTrainer,
    LearningCurve, Trainer, TrainerConfig,
};
use crate::policy::Policy;
use crate::rng::RunStreams;

impl ExperimentConfig {
    pub fn trainer_config(&self) -> TrainerConfig {
        TrainerConfig {
            learning_rate: self.alpha,
            discount: self.gamma,
            trials: self.trials,
            eval_every: self.eval_every,
            eval_episodes: self.eval_episodes,
            sum_bound: self.sum_bound,
            max_steps: self.max_steps,
            execution: self.execution,
        }
    }

    pub fn q_config(&self) -> QConfig {
        QConfig {
            learning_rate: self.alpha,
            discount: self.gamma,
            epsilon: self.epsilon,
        }
    }
}

/// Calls `f` with the scenario's game.
fn with_game<T>(cfg: &ExperimentConfig, f: impl FnOnce(&dyn GameRunner) -> T) -> T {
    match cfg.scenario.soccer_config(!cfg.no_pass) {
        None => f(&Runner(coordination::game())),
        Some(sc) => f(&Runner(SoccerWorld::new(sc))),
    }
}

/// Object-safe view of a game for the harness.
trait GameRunner: Sync {
    fn run(&self, cfg: &ExperimentConfig, run: u64) -> Result<LearningCurve>;
    fn equivalence(&self, cfg: &ExperimentConfig) -> Result<Vec<EquivalenceRow>>;
}

struct Runner<G>(G);

impl<G: Game> GameRunner for Runner<G> {
    fn run(&self, cfg: &ExperimentConfig, run: u64) -> Result<LearningCurve> {
        let game = &self.0;
        let streams = RunStreams::new(cfg.seed, run);
        let checkpoint = |trial: usize, policies: Vec<&dyn Policy>| -> Result<()> {
            if let Some(dir) = &cfg.checkpoint_dir {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                let path = dir.join(format!("run{run}.txt"));
                std::fs::write(&path, checkpoint_text(trial, &policies))
                    .map_err(|e| Error::io(&path, e))?;
            }
            Ok(())
        };
        match cfg.algorithm {
            Algorithm::Dgd => {
                let pols = initial_policies(game, cfg.fsc_states, cfg.theta, cfg.init, &streams)?;
                let mut t = DgdTrainer::new(pols, cfg.trainer_config(), streams);
                let curve = dgd_train(game, &mut t);
                checkpoint(
                    cfg.trials,
                    t.policies().into_iter().map(|p| p as &dyn Policy).collect(),
                )?;
                Ok(curve)
            }
            Algorithm::Joint => {
                let pols = initial_policies(game, cfg.fsc_states, cfg.theta, cfg.init, &streams)?;
                let mut t = JointTrainer::new(pols, cfg.trainer_config(), streams);
                let curve = joint_train(game, &mut t);
                checkpoint(
                    cfg.trials,
                    t.controller
                        .components()
                        .iter()
                        .map(|p| p as &dyn Policy)
                        .collect(),
                )?;
                Ok(curve)
            }
            Algorithm::QCentral => {
                let max = cfg.max_steps.unwrap_or_else(|| game.default_max_steps());
                let (_, curve) = q_train(
                    game,
                    &cfg.q_config(),
                    cfg.observability,
                    max,
                    cfg.trials,
                    cfg.eval_every,
                    cfg.eval_episodes,
                    &streams,
                );
                Ok(curve)
            }
        }
    }

    fn equivalence(&self, cfg: &ExperimentConfig) -> Result<Vec<EquivalenceRow>> {
        let game = &self.0;
        let streams = RunStreams::new(cfg.seed, 0);
        let pols = initial_policies(game, cfg.fsc_states, cfg.theta, cfg.init, &streams)?;
        let tc = cfg.trainer_config();
        let mut dgd = DgdTrainer::new(pols.clone(), tc, streams);
        let mut joint = JointTrainer::new(pols, tc, streams);
        let mut rows = Vec::with_capacity(cfg.trials);
        for trial in 1..=cfg.trials {
            dgd.run_trial(game, trial as u64);
            joint.run_trial(game, trial as u64);
            rows.push(EquivalenceRow {
                trial,
                max_rel_diff: max_relative_difference(&dgd.weights(), &joint.weights()),
            });
        }
        Ok(rows)
    }
}

/// `max_k |a_k - b_k| / max(|a_k|, |b_k|)`, a pair of zeros counting as 0.
pub fn max_relative_difference(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "parameter vectors differ in length");
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Runs every seeded run (in parallel) and aggregates the curves.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CurveSet> {
    cfg.validate()?;
    let curves = with_game(cfg, |g| {
        (0..cfg.runs as u64)
            .into_par_iter()
            .map(|run| g.run(cfg, run))
            .collect::<Result<Vec<_>>>()
    })?;
    CurveSet::aggregate(curves)
}

/// Trains DGD and the joint controller side by side from the same start on
/// the same streams, recording how far their weights drift apart.
pub fn equivalence_report(cfg: &ExperimentConfig) -> Result<Vec<EquivalenceRow>> {
    let mut cfg = cfg.clone();
    cfg.algorithm = Algorithm::Dgd;
    cfg.validate()?;
    with_game(&cfg, |g| g.equivalence(&cfg))
}

/// Runs the experiment and writes its CSV to `cfg.out` (if set).
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<CurveSet> {
    let set = run_experiment(cfg)?;
    if let Some(out) = &cfg.out {
        write_csv(&set, out)?;
    }
    Ok(set)
}

/// Convenience for examples: scenario, algorithm and `key = value`
/// overrides in one call.
pub fn quick_config(
    scenario: Scenario,
    algorithm: Algorithm,
    overrides: &[(&str, &str)],
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(scenario, algorithm);
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a CSV previously written by [`write_csv`].
pub fn load_curves(path: &Path) -> Result<CurveSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_csv(&text)
}
