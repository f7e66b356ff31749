//! Episodic likelihood-ratio gradient estimation and the two training loops:
//! distributed (each agent updates its own weights from its own choices) and
//! joint (one owner updates the concatenated weights of a factored
//! controller).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    rollout, undiscounted_payoff, AgentHistory, EpisodeHistory, ExecutionMode, Game,
};
use crate::policy::{
    AgentPolicy, Choice, DecisionTrace, Layout, ParameterVector, Policy, WeightInit, WEIGHT_CLAMP,
};
use crate::rng::{Entity, EpisodeId, Purpose, RunStreams};

/// Upper bound of the inner score sum paired with reward `r(t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SumBound {
    /// `tau = 1..=t`: the action that earned `r(t)` gets credit for it.
    #[default]
    Inclusive,
    /// `tau = 1..t-1`, the strictly earlier choices only.
    Exclusive,
}

/// Running sums for one episode: the eligibility `z_t = sum_{tau} score(tau)`
/// and `total = sum_t gamma^t r(t) z_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientAccumulator {
    eligibility: Vec<f64>,
    total: Vec<f64>,
    weight: f64,
    gamma: f64,
    bound: SumBound,
}

impl GradientAccumulator {
    pub fn new(len: usize, gamma: f64, bound: SumBound) -> Self {
        GradientAccumulator {
            eligibility: vec![0.0; len],
            total: vec![0.0; len],
            weight: 1.0,
            gamma,
            bound,
        }
    }

    pub fn begin_episode(&mut self) {
        self.eligibility.iter_mut().for_each(|x| *x = 0.0);
        self.total.iter_mut().for_each(|x| *x = 0.0);
        self.weight = 1.0;
    }

    /// Adds a score that precedes every reward (the initial internal state).
    pub fn add_prelude(&mut self, add_score: impl FnOnce(&mut [f64])) {
        add_score(&mut self.eligibility);
    }

    /// Records step `t`: `add_score` adds the step's score into the
    /// eligibility, then `reward` is credited according to the sum bound.
    pub fn add_step(&mut self, add_score: impl FnOnce(&mut [f64]), reward: f64) {
        self.weight *= self.gamma;
        match self.bound {
            SumBound::Inclusive => {
                add_score(&mut self.eligibility);
                self.credit(reward);
            }
            SumBound::Exclusive => {
                self.credit(reward);
                add_score(&mut self.eligibility);
            }
        }
    }

    fn credit(&mut self, reward: f64) {
        if reward == 0.0 {
            return;
        }
        let k = self.weight * reward;
        for (t, z) in self.total.iter_mut().zip(&self.eligibility) {
            *t += k * z;
        }
    }

    pub fn gradient(&self) -> &[f64] {
        &self.total
    }

    pub fn eligibility(&self) -> &[f64] {
        &self.eligibility
    }
}

fn add_choice(policy: &dyn Policy, choice: Option<&Choice>, out: &mut [f64]) {
    if let Some(c) = choice {
        crate::policy::accumulate_choice_scores(std::iter::once(c), policy.temperature(), 1.0, out);
    }
}

fn accumulate_agent<'a>(
    acc: &mut GradientAccumulator,
    policy: &dyn Policy,
    start: Option<&Choice>,
    steps: impl Iterator<Item = (&'a DecisionTrace, f64)>,
) {
    acc.begin_episode();
    acc.add_prelude(|z| add_choice(policy, start, z));
    for (trace, reward) in steps {
        acc.add_step(|z| policy.accumulate_score(trace, 1.0, z), reward);
    }
}

/// Single-episode gradient estimate from one agent's own history.
pub fn episode_gradient(
    history: &AgentHistory,
    policy: &dyn Policy,
    gamma: f64,
    bound: SumBound,
) -> ParameterVector {
    let mut acc = GradientAccumulator::new(policy.layout().len(), gamma, bound);
    accumulate_agent(
        &mut acc,
        policy,
        history.start.choice.as_ref(),
        history.steps.iter().map(|(s, r)| (&s.trace, *r)),
    );
    ParameterVector {
        layout: policy.layout().clone(),
        values: acc.total,
    }
}

/// `w <- clamp(w + alpha * g)`; ascent on the value.
pub fn apply_update(weights: &mut [f64], gradient: &[f64], alpha: f64) {
    assert_eq!(weights.len(), gradient.len(), "gradient layout");
    for (w, g) in weights.iter_mut().zip(gradient) {
        *w = (*w + alpha * g).clamp(-WEIGHT_CLAMP, WEIGHT_CLAMP);
    }
}

/// Mean undiscounted payoff at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub trial: usize,
    pub mean_payoff: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn final_payoff(&self) -> Option<f64> {
        self.points.last().map(|p| p.mean_payoff)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainerConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub trials: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub sum_bound: SumBound,
    /// `None` uses the game's default cap.
    pub max_steps: Option<usize>,
    pub execution: ExecutionMode,
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::Config(format!(
                "discount must lie in [0, 1), got {}",
                self.discount
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.eval_every == 0 || self.eval_episodes == 0 {
            return Err(Error::Config(
                "eval_every and eval_episodes must be at least 1".into(),
            ));
        }
        if self.max_steps == Some(0) {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Anything that learns from one episode per trial and can be evaluated.
pub trait Trainer<G: Game> {
    fn run_trial(&mut self, game: &G, trial: u64);

    /// Payoff of evaluation episode `index` at checkpoint `checkpoint`.
    fn evaluation_episode(&self, game: &G, checkpoint: u64, index: u64) -> f64;
}

/// Mean payoff over `episodes` evaluation rollouts. Episodes run in
/// parallel; the sum is taken in episode order so the result is exact.
pub fn evaluate<G: Game, T: Trainer<G> + Sync>(
    trainer: &T,
    game: &G,
    checkpoint: u64,
    episodes: usize,
) -> f64 {
    let payoffs: Vec<f64> = (0..episodes as u64)
        .into_par_iter()
        .map(|i| trainer.evaluation_episode(game, checkpoint, i))
        .collect();
    payoffs.iter().sum::<f64>() / episodes as f64
}

/// Runs `trials` trials, evaluating before the first and after every
/// `eval_every`-th.
pub fn train_with_curve<G: Game, T: Trainer<G> + Sync>(
    trainer: &mut T,
    game: &G,
    trials: usize,
    eval_every: usize,
    eval_episodes: usize,
) -> LearningCurve {
    let mut curve = LearningCurve::default();
    curve.points.push(CurvePoint {
        trial: 0,
        mean_payoff: evaluate(trainer, game, 0, eval_episodes),
    });
    for trial in 1..=trials {
        trainer.run_trial(game, trial as u64);
        if trial % eval_every == 0 {
            curve.points.push(CurvePoint {
                trial,
                mean_payoff: evaluate(trainer, game, trial as u64, eval_episodes),
            });
        }
    }
    curve
}

/// Random initial policies, one per agent, each drawn from its own stream.
pub fn initial_policies<G: Game>(
    game: &G,
    internal_states: usize,
    theta: f64,
    init: WeightInit,
    streams: &RunStreams,
) -> Result<Vec<AgentPolicy>> {
    game.agents()
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut rng = streams.stream(
                EpisodeId::Free(0),
                0,
                Entity::Agent(i),
                Purpose::Initialization,
            );
            AgentPolicy::random(
                internal_states,
                spec.observation_count,
                spec.action_count,
                theta,
                init,
                &mut rng,
            )
        })
        .collect()
}

fn policy_refs<P: Policy>(policies: &[P]) -> Vec<&dyn Policy> {
    policies.iter().map(|p| p as &dyn Policy).collect()
}

fn eval_rollout<G: Game>(
    game: &G,
    policies: &[&dyn Policy],
    streams: &RunStreams,
    config: &TrainerConfig,
    checkpoint: u64,
    index: u64,
) -> f64 {
    let ep = streams.episode(EpisodeId::Eval { checkpoint, index });
    let max = config.max_steps.unwrap_or_else(|| game.default_max_steps());
    undiscounted_payoff(&rollout(game, policies, max, &ep, config.execution))
}

/// One learning agent: its policy and its private accumulator.
#[derive(Clone, Debug)]
pub struct Learner {
    pub policy: AgentPolicy,
    pub accumulator: GradientAccumulator,
}

/// Distributed gradient descent: every agent runs the same update on its own
/// weights, seeing only its own choices and the shared reward.
#[derive(Clone, Debug)]
pub struct DgdTrainer {
    pub learners: Vec<Learner>,
    pub config: TrainerConfig,
    pub streams: RunStreams,
}

impl DgdTrainer {
    pub fn new(policies: Vec<AgentPolicy>, config: TrainerConfig, streams: RunStreams) -> Self {
        let learners = policies
            .into_iter()
            .map(|policy| Learner {
                accumulator: GradientAccumulator::new(
                    policy.layout().len(),
                    config.discount,
                    config.sum_bound,
                ),
                policy,
            })
            .collect();
        DgdTrainer {
            learners,
            config,
            streams,
        }
    }

    pub fn policies(&self) -> Vec<&AgentPolicy> {
        self.learners.iter().map(|l| &l.policy).collect()
    }

    /// All agents' weights, concatenated in agent order.
    pub fn weights(&self) -> Vec<f64> {
        self.learners
            .iter()
            .flat_map(|l| l.policy.weights().iter().copied())
            .collect()
    }

    pub fn sample_episode<G: Game>(
        &self,
        game: &G,
        episode: EpisodeId,
    ) -> EpisodeHistory<G::State> {
        let refs: Vec<&dyn Policy> = self
            .learners
            .iter()
            .map(|l| &l.policy as &dyn Policy)
            .collect();
        let max = self
            .config
            .max_steps
            .unwrap_or_else(|| game.default_max_steps());
        rollout(
            game,
            &refs,
            max,
            &self.streams.episode(episode),
            self.config.execution,
        )
    }
}

impl<G: Game> Trainer<G> for DgdTrainer {
    fn run_trial(&mut self, game: &G, trial: u64) {
        let history = self.sample_episode(game, EpisodeId::Train(trial));
        let alpha = self.config.learning_rate;
        let update = |(i, learner): (usize, &mut Learner)| {
            let Learner {
                policy,
                accumulator,
            } = learner;
            accumulate_agent(
                accumulator,
                policy,
                history.starts[i].choice.as_ref(),
                history.steps.iter().map(|s| (&s.agents[i].trace, s.reward)),
            );
            apply_update(policy.weights_mut(), accumulator.gradient(), alpha);
        };
        match self.config.execution {
            ExecutionMode::Sequential => self.learners.iter_mut().enumerate().for_each(update),
            ExecutionMode::Parallel => self.learners.par_iter_mut().enumerate().for_each(update),
        }
    }

    fn evaluation_episode(&self, game: &G, checkpoint: u64, index: u64) -> f64 {
        let refs: Vec<&dyn Policy> = self
            .learners
            .iter()
            .map(|l| &l.policy as &dyn Policy)
            .collect();
        eval_rollout(game, &refs, &self.streams, &self.config, checkpoint, index)
    }
}

/// A joint policy that is the product of independent per-agent components,
/// addressed through one concatenated weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredController {
    components: Vec<AgentPolicy>,
    offsets: Vec<usize>,
    len: usize,
}

impl FactoredController {
    pub fn new(components: Vec<AgentPolicy>) -> Self {
        let mut offsets = Vec::with_capacity(components.len());
        let mut len = 0;
        for c in &components {
            offsets.push(len);
            len += c.layout().len();
        }
        FactoredController {
            components,
            offsets,
            len,
        }
    }

    pub fn components(&self) -> &[AgentPolicy] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Weight range of component `i` inside the joint vector.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.components[i].layout().len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components
            .iter()
            .flat_map(|c| c.weights().iter().copied())
            .collect()
    }

    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.len {
            return Err(Error::LayoutMismatch {
                expected: self.len,
                found: weights.len(),
            });
        }
        for i in 0..self.components.len() {
            let r = self.range(i);
            self.components[i].set_weights(&weights[r])?;
        }
        Ok(())
    }

    /// Adds `d ln Pr(joint choices) / dw` for one step, i.e. the sum of the
    /// component log-likelihood gradients, into a joint-layout buffer.
    pub fn accumulate_joint_score<'a>(
        &self,
        traces: impl Iterator<Item = &'a DecisionTrace>,
        out: &mut [f64],
    ) {
        for (i, trace) in traces.enumerate() {
            let r = self.range(i);
            self.components[i].accumulate_score(trace, 1.0, &mut out[r]);
        }
    }

    /// `ln Pr` of a joint step as the sum of component log-probabilities.
    pub fn joint_log_probability<'a>(
        &self,
        traces: impl Iterator<Item = &'a DecisionTrace>,
    ) -> f64 {
        traces
            .zip(&self.components)
            .map(|(t, c)| c.log_probability(t))
            .sum()
    }
}

/// Joint gradient descent on a factored controller: a single owner computes
/// the gradient of the joint log-likelihood over all weights.
#[derive(Clone, Debug)]
pub struct JointTrainer {
    pub controller: FactoredController,
    pub accumulator: GradientAccumulator,
    pub config: TrainerConfig,
    pub streams: RunStreams,
}

impl JointTrainer {
    pub fn new(policies: Vec<AgentPolicy>, config: TrainerConfig, streams: RunStreams) -> Self {
        let controller = FactoredController::new(policies);
        JointTrainer {
            accumulator: GradientAccumulator::new(
                controller.len(),
                config.discount,
                config.sum_bound,
            ),
            controller,
            config,
            streams,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.controller.weights()
    }

    pub fn sample_episode<G: Game>(
        &self,
        game: &G,
        episode: EpisodeId,
    ) -> EpisodeHistory<G::State> {
        let refs = policy_refs(self.controller.components());
        let max = self
            .config
            .max_steps
            .unwrap_or_else(|| game.default_max_steps());
        rollout(
            game,
            &refs,
            max,
            &self.streams.episode(episode),
            self.config.execution,
        )
    }

    /// Joint-layout gradient estimate for one sampled episode.
    pub fn episode_gradient<S>(&mut self, history: &EpisodeHistory<S>) -> &[f64] {
        let ctrl = &self.controller;
        let acc = &mut self.accumulator;
        acc.begin_episode();
        acc.add_prelude(|z| {
            for (i, start) in history.starts.iter().enumerate() {
                let r = ctrl.range(i);
                add_choice(&ctrl.components[i], start.choice.as_ref(), &mut z[r]);
            }
        });
        for step in &history.steps {
            acc.add_step(
                |z| ctrl.accumulate_joint_score(step.agents.iter().map(|a| &a.trace), z),
                step.reward,
            );
        }
        acc.gradient()
    }
}

impl<G: Game> Trainer<G> for JointTrainer {
    fn run_trial(&mut self, game: &G, trial: u64) {
        let history = self.sample_episode(game, EpisodeId::Train(trial));
        let alpha = self.config.learning_rate;
        let gradient = self.episode_gradient(&history).to_vec();
        let mut w = self.controller.weights();
        apply_update(&mut w, &gradient, alpha);
        self.controller
            .set_weights(&w)
            .expect("joint layout is fixed");
    }

    fn evaluation_episode(&self, game: &G, checkpoint: u64, index: u64) -> f64 {
        let refs = policy_refs(self.controller.components());
        eval_rollout(game, &refs, &self.streams, &self.config, checkpoint, index)
    }
}

/// Trains DGD and returns its learning curve.
pub fn dgd_train<G: Game>(game: &G, trainer: &mut DgdTrainer) -> LearningCurve {
    let c = trainer.config;
    train_with_curve(trainer, game, c.trials, c.eval_every, c.eval_episodes)
}

/// Trains the joint factored controller and returns its learning curve.
pub fn joint_train<G: Game>(game: &G, trainer: &mut JointTrainer) -> LearningCurve {
    let c = trainer.config;
    train_with_curve(trainer, game, c.trials, c.eval_every, c.eval_episodes)
}

/// Text checkpoint: a `trial N` line, then `agent i` followed by that
/// agent's parameter lines, for every agent.
pub fn checkpoint_text(trial: usize, policies: &[&dyn Policy]) -> String {
    let mut s = format!("trial {trial}\n");
    for (i, p) in policies.iter().enumerate() {
        s += &format!("agent {i}\n");
        s += &p.parameters().to_text();
    }
    s
}

/// Inverse of [`checkpoint_text`]; `layouts` gives each agent's layout.
pub fn parse_checkpoint(text: &str, layouts: &[Layout]) -> Result<(usize, Vec<ParameterVector>)> {
    let mut lines = text.lines();
    let trial = lines
        .next()
        .and_then(|l| l.strip_prefix("trial "))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("checkpoint must start with `trial N`".into()))?;
    let mut sections: Vec<String> = Vec::new();
    for line in lines {
        if let Some(i) = line.strip_prefix("agent ") {
            if i.parse::<usize>().ok() != Some(sections.len()) {
                return Err(Error::Parse(format!("unexpected `{line}`")));
            }
            sections.push(String::new());
        } else {
            let cur = sections
                .last_mut()
                .ok_or_else(|| Error::Parse("parameter line before any `agent` header".into()))?;
            cur.push_str(line);
            cur.push('\n');
        }
    }
    if sections.len() != layouts.len() {
        return Err(Error::Parse(format!(
            "{} agents in checkpoint, expected {}",
            sections.len(),
            layouts.len()
        )));
    }
    let params = sections
        .iter()
        .zip(layouts)
        .map(|(text, layout)| ParameterVector::from_text(layout.clone(), text))
        .collect::<Result<_>>()?;
    Ok((trial, params))
}
