//! Identical-payoff stochastic games, episode histories and the rollout
//! engine shared by every learner.

use std::fmt::{self, Debug, Display, Write as _};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::policy::{Choice, DecisionTrace, Policy};
use crate::rng::{sample_index, Entity, EpisodeStreams, Purpose};

/// Action and observation alphabet sizes of one agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AgentSpec {
    pub action_count: usize,
    pub observation_count: usize,
}

/// Mixed-radix encoding of joint actions; agent 0 is the most significant
/// digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointActions {
    radices: Vec<usize>,
}

impl JointActions {
    pub fn new(agents: &[AgentSpec]) -> Self {
        JointActions {
            radices: agents.iter().map(|a| a.action_count).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn encode(&self, actions: &[usize]) -> usize {
        debug_assert_eq!(actions.len(), self.radices.len());
        actions.iter().zip(&self.radices).fold(0, |acc, (&a, &r)| {
            debug_assert!(a < r);
            acc * r + a
        })
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        out
    }
}

/// Dynamics interface of an identical-payoff stochastic game.
///
/// The environment state is never handed to policies; they only see the
/// observation indices produced by [`Game::observe`].
pub trait Game: Sync {
    type State: Clone + Debug + PartialEq + Send + Sync;

    fn agents(&self) -> &[AgentSpec];

    /// Draws `s(0)` from the initial distribution.
    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    /// Draws agent `agent`'s observation of `state`.
    fn observe<R: Rng + ?Sized>(&self, state: &Self::State, agent: usize, rng: &mut R) -> usize;

    /// Samples `T(s, a)` and returns it with the shared reward `r(s, a)`.
    fn transition<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        joint: &[usize],
        rng: &mut R,
    ) -> (Self::State, f64);

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Injective key of a state, used by completely observable learners.
    fn state_key(&self, state: &Self::State) -> u64;

    /// Episode cap used when a caller does not provide one.
    fn default_max_steps(&self) -> usize;

    fn joint_actions(&self) -> JointActions {
        JointActions::new(self.agents())
    }
}

/// Result of a single environment step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome<S> {
    pub next_state: S,
    pub reward: f64,
    pub observations: Vec<usize>,
    pub terminal: bool,
}

/// Samples an initial state and every agent's first observation.
pub fn reset<G: Game, R: Rng + ?Sized>(game: &G, rng: &mut R) -> (G::State, Vec<usize>) {
    let state = game.initial_state(rng);
    let obs = (0..game.agents().len())
        .map(|i| game.observe(&state, i, rng))
        .collect();
    (state, obs)
}

/// Advances the game by one joint action.
///
/// # Panics
/// If an action index is outside its agent's alphabet or `state` is
/// terminal; both are programming errors.
pub fn step<G: Game, R: Rng + ?Sized>(
    game: &G,
    state: &G::State,
    joint: &[usize],
    rng: &mut R,
) -> StepOutcome<G::State> {
    let agents = game.agents();
    assert_eq!(joint.len(), agents.len(), "one action per agent");
    for (i, (&a, spec)) in joint.iter().zip(agents).enumerate() {
        assert!(a < spec.action_count, "agent {i}: action {a} out of range");
    }
    assert!(!game.is_terminal(state), "step called on a terminal state");
    let (next_state, reward) = game.transition(state, joint, rng);
    debug_assert!(reward.is_finite());
    let observations = (0..agents.len())
        .map(|i| game.observe(&next_state, i, rng))
        .collect();
    let terminal = game.is_terminal(&next_state);
    StepOutcome {
        next_state,
        reward,
        observations,
        terminal,
    }
}

/// A finite game given by explicit tables.
///
/// States are indices; `transitions[s][j]` lists `(s', prob)` for joint
/// action index `j` (see [`JointActions`]) and rewards are paid on the step
/// that leaves `s`.
#[derive(Clone, Debug)]
pub struct TabularGame {
    names: Vec<String>,
    initial: Vec<f64>,
    agents: Vec<AgentSpec>,
    observations: Vec<Vec<Vec<f64>>>,
    transitions: Vec<Vec<Vec<(usize, f64)>>>,
    rewards: Vec<Vec<f64>>,
    terminal: Vec<bool>,
    max_steps: usize,
}

const PROB_TOL: f64 = 1e-12;

fn check_distribution(what: &str, probs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for p in probs {
        if !(0.0..=1.0 + PROB_TOL).contains(&p) {
            return Err(Error::Model(format!(
                "{what}: probability {p} outside [0, 1]"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::Model(format!("{what}: sums to {total}, not 1")));
    }
    Ok(())
}

/// Builder for [`TabularGame`]; everything is validated in [`build`](Self::build).
#[derive(Clone, Debug, Default)]
pub struct TabularGameBuilder {
    names: Vec<String>,
    initial: Vec<f64>,
    agents: Vec<AgentSpec>,
    observations: Vec<Vec<Vec<f64>>>,
    transitions: Vec<Vec<Vec<(usize, f64)>>>,
    rewards: Vec<Vec<f64>>,
    terminal: Vec<bool>,
    max_steps: Option<usize>,
}

impl TabularGameBuilder {
    pub fn states<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.names = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn initial(mut self, dist: Vec<f64>) -> Self {
        self.initial = dist;
        self
    }

    /// Adds an agent with observation function `observe[s][o]`.
    pub fn agent(mut self, action_count: usize, observe: Vec<Vec<f64>>) -> Self {
        let observation_count = observe.first().map_or(0, Vec::len);
        self.agents.push(AgentSpec {
            action_count,
            observation_count,
        });
        self.observations.push(observe);
        self
    }

    /// Sets `T(s, j)` and `r(s, j)` for every joint action index `j`.
    pub fn dynamics(
        mut self,
        transitions: Vec<Vec<Vec<(usize, f64)>>>,
        rewards: Vec<Vec<f64>>,
    ) -> Self {
        self.transitions = transitions;
        self.rewards = rewards;
        self
    }

    pub fn terminal(mut self, terminal: Vec<bool>) -> Self {
        self.terminal = terminal;
        self
    }

    pub fn max_steps(mut self, n: usize) -> Self {
        self.max_steps = Some(n);
        self
    }

    pub fn build(self) -> Result<TabularGame> {
        let n = self.names.len();
        if n == 0 {
            return Err(Error::Model("at least one state is required".into()));
        }
        if self.initial.len() != n {
            return Err(Error::Model("initial distribution has wrong length".into()));
        }
        check_distribution("initial distribution", self.initial.iter().copied())?;
        if self.agents.is_empty() {
            return Err(Error::Model("at least one agent is required".into()));
        }
        for (i, (spec, obs)) in self.agents.iter().zip(&self.observations).enumerate() {
            if spec.action_count == 0 || spec.observation_count == 0 {
                return Err(Error::Model(format!("agent {i} has an empty alphabet")));
            }
            if obs.len() != n {
                return Err(Error::Model(format!(
                    "agent {i}: observation table needs {n} rows"
                )));
            }
            for (s, row) in obs.iter().enumerate() {
                if row.len() != spec.observation_count {
                    return Err(Error::Model(format!(
                        "agent {i}, state {s}: ragged observation row"
                    )));
                }
                check_distribution(
                    &format!("agent {i} observation of state {s}"),
                    row.iter().copied(),
                )?;
            }
        }
        let joint = JointActions::new(&self.agents).count();
        if self.transitions.len() != n || self.rewards.len() != n || self.terminal.len() != n {
            return Err(Error::Model(
                "dynamics tables need one row per state".into(),
            ));
        }
        for s in 0..n {
            if self.terminal[s] {
                continue;
            }
            if self.transitions[s].len() != joint || self.rewards[s].len() != joint {
                return Err(Error::Model(format!(
                    "state {s}: need {joint} joint-action entries"
                )));
            }
            for (j, dist) in self.transitions[s].iter().enumerate() {
                if dist.iter().any(|&(t, _)| t >= n) {
                    return Err(Error::Model(format!(
                        "state {s}, action {j}: successor out of range"
                    )));
                }
                check_distribution(
                    &format!("T(state {s}, action {j})"),
                    dist.iter().map(|&(_, p)| p),
                )?;
            }
            if self.rewards[s].iter().any(|r| !r.is_finite()) {
                return Err(Error::Model(format!("state {s}: non-finite reward")));
            }
        }
        Ok(TabularGame {
            names: self.names,
            initial: self.initial,
            agents: self.agents,
            observations: self.observations,
            transitions: self.transitions,
            rewards: self.rewards,
            terminal: self.terminal,
            max_steps: self.max_steps.unwrap_or(1000),
        })
    }
}

impl TabularGame {
    pub fn builder() -> TabularGameBuilder {
        TabularGameBuilder::default()
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.initial
    }

    pub fn observation_distribution(&self, agent: usize, state: usize) -> &[f64] {
        &self.observations[agent][state]
    }

    pub fn transition_distribution(&self, state: usize, joint_index: usize) -> &[(usize, f64)] {
        &self.transitions[state][joint_index]
    }

    pub fn reward(&self, state: usize, joint_index: usize) -> f64 {
        self.rewards[state][joint_index]
    }
}

impl Game for TabularGame {
    type State = usize;

    fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.initial, rng)
    }

    fn observe<R: Rng + ?Sized>(&self, state: &usize, agent: usize, rng: &mut R) -> usize {
        let row = &self.observations[agent][*state];
        if row.len() == 1 {
            return 0;
        }
        sample_index(row, rng)
    }

    fn transition<R: Rng + ?Sized>(
        &self,
        state: &usize,
        joint: &[usize],
        rng: &mut R,
    ) -> (usize, f64) {
        let j = self.joint_actions().encode(joint);
        let dist = &self.transitions[*state][j];
        let next = if dist.len() == 1 {
            dist[0].0
        } else {
            let probs: Vec<f64> = dist.iter().map(|&(_, p)| p).collect();
            dist[sample_index(&probs, rng)].0
        };
        (next, self.rewards[*state][j])
    }

    fn is_terminal(&self, state: &usize) -> bool {
        self.terminal[*state]
    }

    fn state_key(&self, state: &usize) -> u64 {
        *state as u64
    }

    fn default_max_steps(&self) -> usize {
        self.max_steps
    }
}

/// Where an agent's internal state started.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentStart {
    pub internal_state: usize,
    pub choice: Option<Choice>,
}

/// One agent's part of a step: `n(t-1), o(t), n(t), a(t)` and the choices
/// that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentStep {
    pub prev_internal_state: usize,
    pub observation: usize,
    pub internal_state: usize,
    pub action: usize,
    pub trace: DecisionTrace,
}

/// Step `t` of an episode. `state` is `s(t)`, the state the agents observed
/// before acting; `reward` is `r(t)`, paid after `a(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<S> {
    pub state: S,
    pub agents: Vec<AgentStep>,
    pub reward: f64,
}

/// A sampled joint history `<n(0), o(1), n(1), a(1), r(1), ...>`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeHistory<S> {
    pub starts: Vec<AgentStart>,
    pub steps: Vec<StepRecord<S>>,
    pub final_state: S,
    /// False when the episode was cut off by the step cap.
    pub terminated: bool,
}

/// An individual history `h_i = <n_i(0), o_i(1), n_i(1), a_i(1), r(1), ...>`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentHistory {
    pub start: AgentStart,
    pub steps: Vec<(AgentStep, f64)>,
}

impl<S> EpisodeHistory<S> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn agent_count(&self) -> usize {
        self.starts.len()
    }

    pub fn rewards(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.reward)
    }

    pub fn agent_view(&self, agent: usize) -> AgentHistory {
        AgentHistory {
            start: self.starts[agent].clone(),
            steps: self
                .steps
                .iter()
                .map(|s| (s.agents[agent].clone(), s.reward))
                .collect(),
        }
    }

    /// The same history with environment states erased.
    pub fn without_states(&self) -> EpisodeHistory<()> {
        EpisodeHistory {
            starts: self.starts.clone(),
            steps: self
                .steps
                .iter()
                .map(|s| StepRecord {
                    state: (),
                    agents: s.agents.clone(),
                    reward: s.reward,
                })
                .collect(),
            final_state: (),
            terminated: self.terminated,
        }
    }
}

impl EpisodeHistory<()> {
    /// Reassembles the joint history from every agent's individual history.
    pub fn from_agent_views(views: &[AgentHistory], terminated: bool) -> Result<Self> {
        let Some(first) = views.first() else {
            return Err(Error::Config("no agent histories given".into()));
        };
        let len = first.steps.len();
        if views.iter().any(|v| v.steps.len() != len) {
            return Err(Error::Config(
                "agent histories have different lengths".into(),
            ));
        }
        let mut steps = Vec::with_capacity(len);
        for t in 0..len {
            let reward = first.steps[t].1;
            if views.iter().any(|v| v.steps[t].1 != reward) {
                return Err(Error::Config(format!(
                    "agents disagree on reward at step {}",
                    t + 1
                )));
            }
            steps.push(StepRecord {
                state: (),
                agents: views.iter().map(|v| v.steps[t].0.clone()).collect(),
                reward,
            });
        }
        Ok(EpisodeHistory {
            starts: views.iter().map(|v| v.start.clone()).collect(),
            steps,
            final_state: (),
            terminated,
        })
    }
}

impl<S: Display> EpisodeHistory<S> {
    /// Line-oriented dump: a `start` line with every `n(0)`, then one line
    /// per step `t <tab> state <tab> n/o/n'/a per agent <tab> reward`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let starts: Vec<String> = self
            .starts
            .iter()
            .map(|s| s.internal_state.to_string())
            .collect();
        let _ = writeln!(out, "start\t{}", starts.join(" "));
        for (t, step) in self.steps.iter().enumerate() {
            let agents: Vec<String> = step
                .agents
                .iter()
                .map(|a| {
                    format!(
                        "{}/{}/{}/{}",
                        a.prev_internal_state, a.observation, a.internal_state, a.action
                    )
                })
                .collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:?}",
                t + 1,
                step.state,
                agents.join(" "),
                step.reward
            );
        }
        let _ = writeln!(
            out,
            "end\t{}\t{}",
            self.final_state,
            if self.terminated {
                "terminal"
            } else {
                "truncated"
            }
        );
        out
    }
}

/// `sum_{t>=1} gamma^t r(t)`; the first reward is weighted by `gamma`.
pub fn discounted_return<S>(history: &EpisodeHistory<S>, gamma: f64) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for r in history.rewards() {
        weight *= gamma;
        total += weight * r;
    }
    total
}

pub fn undiscounted_payoff<S>(history: &EpisodeHistory<S>) -> f64 {
    history.rewards().sum()
}

/// How per-step agent decisions are scheduled during a rollout. Both modes
/// produce identical histories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecutionMode {
    #[default]
    Sequential,
    Parallel,
}

impl fmt::Display for ExecutionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecutionMode::Sequential => "sequential",
            ExecutionMode::Parallel => "parallel",
        })
    }
}

/// Samples one episode with one policy per agent.
///
/// Each agent draws its decisions at step `t` from its own stream keyed by
/// `(t, Agent(i), Decision)`; the environment uses `(0, Environment, Reset)`
/// and `(t, Environment, Transition)`.
pub fn rollout<G: Game>(
    game: &G,
    policies: &[&dyn Policy],
    max_steps: usize,
    streams: &EpisodeStreams,
    mode: ExecutionMode,
) -> EpisodeHistory<G::State> {
    let m = game.agents().len();
    assert_eq!(policies.len(), m, "one policy per agent");
    assert!(max_steps >= 1, "max_steps must be at least 1");
    for (spec, p) in game.agents().iter().zip(policies) {
        assert_eq!(
            spec.action_count,
            p.action_count(),
            "policy action alphabet"
        );
        assert_eq!(
            spec.observation_count,
            p.observation_count(),
            "policy observation alphabet"
        );
    }

    let mut env_rng = streams.stream(0, Entity::Environment, Purpose::Reset);
    let (mut state, mut obs) = reset(game, &mut env_rng);

    let starts: Vec<AgentStart> = policies
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = streams.stream(0, Entity::Agent(i), Purpose::InitialInternalState);
            let (internal_state, choice) = p.sample_initial(&mut rng);
            AgentStart {
                internal_state,
                choice,
            }
        })
        .collect();
    let mut internal: Vec<usize> = starts.iter().map(|s| s.internal_state).collect();

    let mut steps = Vec::new();
    let mut terminated = game.is_terminal(&state);
    let mut t = 1u64;
    while !terminated && steps.len() < max_steps {
        let decide = |i: usize| {
            let mut rng = streams.stream(t, Entity::Agent(i), Purpose::Decision);
            let (action, next, trace) = policies[i].sample_step(internal[i], obs[i], &mut rng);
            AgentStep {
                prev_internal_state: internal[i],
                observation: obs[i],
                internal_state: next,
                action,
                trace,
            }
        };
        let agents: Vec<AgentStep> = match mode {
            ExecutionMode::Sequential => (0..m).map(decide).collect(),
            ExecutionMode::Parallel => (0..m).into_par_iter().map(decide).collect(),
        };
        let joint: Vec<usize> = agents.iter().map(|a| a.action).collect();
        let mut rng = streams.stream(t, Entity::Environment, Purpose::Transition);
        let outcome = step(game, &state, &joint, &mut rng);
        for (n, a) in internal.iter_mut().zip(&agents) {
            *n = a.internal_state;
        }
        steps.push(StepRecord {
            state,
            agents,
            reward: outcome.reward,
        });
        state = outcome.next_state;
        obs = outcome.observations;
        terminated = outcome.terminal;
        t += 1;
    }
    EpisodeHistory {
        starts,
        steps,
        final_state: state,
        terminated,
    }
}
