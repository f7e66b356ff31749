use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baseline_q::Observability;
use crate::envs::Scenario;
use crate::error::{Error, Result};
use crate::game::ExecutionMode;
use crate::learner::SumBound;
use crate::policy::WeightInit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dgd,
    Joint,
    QCentral,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dgd => "dgd",
            Algorithm::Joint => "joint",
            Algorithm::QCentral => "q-central",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dgd" => Ok(Algorithm::Dgd),
            "joint" => Ok(Algorithm::Joint),
            "q-central" => Ok(Algorithm::QCentral),
            _ => Err(Error::Config(format!(
                "unknown algorithm `{s}` (expected dgd, joint or q-central)"
            ))),
        }
    }
}

fn parse_sum_bound(s: &str) -> Result<SumBound> {
    match s {
        "causal" => Ok(SumBound::Inclusive),
        // `paper` is the older name, still accepted.
        "exclusive" | "paper" => Ok(SumBound::Exclusive),
        _ => Err(Error::Config(format!(
            "unknown sum bound `{s}` (expected causal or exclusive)"
        ))),
    }
}

fn sum_bound_name(b: SumBound) -> &'static str {
    match b {
        SumBound::Inclusive => "causal",
        SumBound::Exclusive => "exclusive",
    }
}

/// Everything needed to reproduce one multi-run experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub algorithm: Algorithm,
    pub observability: Observability,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// 1 means a reactive policy.
    pub fsc_states: usize,
    pub trials: usize,
    pub runs: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    pub no_pass: bool,
    pub sum_bound: SumBound,
    pub theta: f64,
    pub init: WeightInit,
    pub max_steps: Option<usize>,
    pub execution: ExecutionMode,
    pub out: Option<PathBuf>,
    /// Where DGD/joint runs drop their final weights, if anywhere.
    pub checkpoint_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Published hyperparameters where they exist, otherwise the documented
    /// budgets.
    pub fn defaults(scenario: Scenario, algorithm: Algorithm) -> Self {
        let soccer = scenario.is_soccer();
        let alpha = match (soccer, algorithm) {
            (false, _) => 0.003,
            (true, Algorithm::QCentral) => 0.1,
            (true, _) => 0.05,
        };
        ExperimentConfig {
            scenario,
            algorithm,
            observability: Observability::Partial,
            alpha,
            gamma: if soccer { 0.999 } else { 0.99 },
            epsilon: 0.4,
            fsc_states: 1,
            trials: if soccer { 200_000 } else { 50_000 },
            runs: 10,
            eval_every: if soccer { 2_000 } else { 500 },
            eval_episodes: if soccer { 100 } else { 200 },
            seed: 1,
            no_pass: false,
            sum_bound: SumBound::Inclusive,
            theta: 1.0,
            init: WeightInit::Simplex,
            max_steps: None,
            execution: ExecutionMode::Sequential,
            out: None,
            checkpoint_dir: None,
        }
    }

    /// Builds a config from `key = value` pairs applied in order on top of
    /// the defaults for the pairs' scenario and algorithm.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let last = |key: &str| pairs.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let scenario = last("scenario").map_or(Ok(Scenario::Coordination), str::parse)?;
        let algorithm = last("algo").map_or(Ok(Algorithm::Dgd), str::parse)?;
        let mut cfg = Self::defaults(scenario, algorithm);
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field by its command-line name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("bad value `{v}` for {key}")))
        }
        match key {
            "scenario" => self.scenario = value.parse()?,
            "algo" => self.algorithm = value.parse()?,
            "observability" => self.observability = value.parse()?,
            "alpha" => self.alpha = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "fsc-states" => self.fsc_states = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "eval-every" => self.eval_every = num(key, value)?,
            "eval-episodes" => self.eval_episodes = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "no-pass" => self.no_pass = num(key, value)?,
            "sum-bound" => self.sum_bound = parse_sum_bound(value)?,
            "theta" => self.theta = num(key, value)?,
            "init" => self.init = value.parse()?,
            "max-steps" => self.max_steps = Some(num(key, value)?),
            "parallel" => {
                self.execution = if num(key, value)? {
                    ExecutionMode::Parallel
                } else {
                    ExecutionMode::Sequential
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "checkpoint-dir" => self.checkpoint_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.runs == 0 || self.trials == 0 {
            return bad("runs and trials must be at least 1".into());
        }
        if self.eval_every == 0 || self.eval_episodes == 0 {
            return bad("eval-every and eval-episodes must be at least 1".into());
        }
        if self.max_steps == Some(0) {
            return bad("max-steps must be at least 1".into());
        }
        if self.no_pass && !self.scenario.is_soccer() {
            return bad(format!("{} has no Pass action to remove", self.scenario));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        match self.algorithm {
            Algorithm::QCentral => {
                if self.fsc_states > 1 {
                    return bad("q-central is a tabular controller; fsc-states must be 1".into());
                }
                if !(self.alpha > 0.0 && self.alpha <= 1.0) {
                    return bad(format!(
                        "q-central needs alpha in (0, 1], got {}",
                        self.alpha
                    ));
                }
                if !(0.0..=1.0).contains(&self.epsilon) {
                    return bad(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
                }
                if !(0.0..=1.0).contains(&self.gamma) {
                    return bad(format!("gamma must lie in [0, 1], got {}", self.gamma));
                }
            }
            Algorithm::Dgd | Algorithm::Joint => {
                if self.observability == Observability::Full {
                    return bad(format!("{} learns from local observations; full observability applies to q-central only", self.algorithm));
                }
                if self.fsc_states == 0 {
                    return bad("fsc-states must be at least 1".into());
                }
                if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
                    return bad(format!("alpha must be non-negative, got {}", self.alpha));
                }
                if !(0.0..1.0).contains(&self.gamma) {
                    return bad(format!("gamma must lie in [0, 1), got {}", self.gamma));
                }
            }
        }
        Ok(())
    }

    /// Reads a `key = value` file; `#` starts a comment.
    pub fn parse_file_pairs(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", n + 1)))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Vec<(String, String)>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_file_pairs(&text)
    }

    /// The config as a file `from_pairs` reads back to the same value.
    pub fn to_file_text(&self) -> String {
        let mut s = format!(
            "scenario = {}\nalgo = {}\nobservability = {}\nalpha = {}\ngamma = {}\nepsilon = {}\n\
             fsc-states = {}\ntrials = {}\nruns = {}\neval-every = {}\neval-episodes = {}\nseed = {}\n\
             no-pass = {}\nsum-bound = {}\ntheta = {}\ninit = {}\nparallel = {}\n",
            self.scenario,
            self.algorithm,
            self.observability,
            self.alpha,
            self.gamma,
            self.epsilon,
            self.fsc_states,
            self.trials,
            self.runs,
            self.eval_every,
            self.eval_episodes,
            self.seed,
            self.no_pass,
            sum_bound_name(self.sum_bound),
            self.theta,
            self.init,
            self.execution == ExecutionMode::Parallel,
        );
        if let Some(m) = self.max_steps {
            s += &format!("max-steps = {m}\n");
        }
        if let Some(p) = &self.out {
            s += &format!("out = {}\n", p.display());
        }
        if let Some(p) = &self.checkpoint_dir {
            s += &format!("checkpoint-dir = {}\n", p.display());
        }
        s
    }
}
