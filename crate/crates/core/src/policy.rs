//! Boltzmann-parameterized stochastic policies.
//!
//! Two policy classes are provided: [`SoftmaxReactivePolicy`], a table of
//! per-observation action preferences, and [`FiniteStateController`], which
//! keeps a finite internal state `n`, moves it with `eta(n, o)` and acts with
//! `psi(n)`. Both store every softmax slice contiguously in one flat weight
//! vector, and every stochastic choice they make is written to a
//! [`DecisionTrace`] that names the slice it came from. The score function
//! only needs the trace.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rng::sample_index;

/// Weights are kept inside `[-WEIGHT_CLAMP, WEIGHT_CLAMP]` after every update.
pub const WEIGHT_CLAMP: f64 = 50.0;

pub type Probs = SmallVec<[f64; 8]>;

/// Softmax at temperature `theta`, computed with max-subtraction.
pub fn softmax(weights: &[f64], theta: f64) -> Probs {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Probs = weights.iter().map(|w| ((w - max) / theta).exp()).collect();
    let total: f64 = out.iter().sum();
    for p in out.iter_mut() {
        *p /= total;
    }
    out
}

/// `ln softmax(weights)[index]`, without forming the whole distribution.
pub fn log_softmax_at(weights: &[f64], theta: f64, index: usize) -> f64 {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse: f64 = weights
        .iter()
        .map(|w| ((w - max) / theta).exp())
        .sum::<f64>()
        .ln();
    (weights[index] - max) / theta - lse
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChoiceKind {
    InitialInternalState,
    InternalTransition,
    Action,
}

/// One stochastic choice made by a policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub kind: ChoiceKind,
    /// Conditioning internal state, if any.
    pub internal_state: Option<usize>,
    /// Conditioning observation, if any.
    pub observation: Option<usize>,
    /// Start of the softmax slice in the flat weight vector.
    pub offset: usize,
    pub chosen: usize,
    /// The distribution the choice was drawn from.
    pub probs: Probs,
}

impl Choice {
    pub fn chosen_probability(&self) -> f64 {
        self.probs[self.chosen]
    }
}

/// The choices one agent made during one step (or at episode start).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecisionTrace {
    pub choices: SmallVec<[Choice; 2]>,
}

impl DecisionTrace {
    pub fn push(&mut self, choice: Choice) {
        debug_assert!(choice.chosen_probability() > 0.0);
        self.choices.push(choice);
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Named weight table inside a layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    /// `pi0(n)`: initial internal-state preferences, shape `[N]`.
    Initial,
    /// `eta(n, o) -> n'`, shape `[N, O, N]`.
    Transition,
    /// Action preferences: `[O, A]` for reactive policies, `[N, A]` for FSCs.
    Action,
}

impl Table {
    pub fn name(self) -> &'static str {
        match self {
            Table::Initial => "initial",
            Table::Transition => "transition",
            Table::Action => "action",
        }
    }
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "initial" => Ok(Table::Initial),
            "transition" => Ok(Table::Transition),
            "action" => Ok(Table::Action),
            other => Err(Error::Parse(format!("unknown weight table `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub table: Table,
    pub shape: Vec<usize>,
    pub offset: usize,
}

impl Block {
    fn len(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Mapping between flat weight indices and `(table, coordinate)` pairs.
/// Tables are row-major; the last axis of each table is the softmax axis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layout {
    blocks: Vec<Block>,
    len: usize,
}

/// A decoded position in a layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub table: Table,
    pub indices: Vec<usize>,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}[{}]", self.table.name(), idx.join(","))
    }
}

impl FromStr for Coordinate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed coordinate `{s}`"));
        let (name, rest) = s.split_once('[').ok_or_else(bad)?;
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        let indices = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coordinate {
            table: name.parse()?,
            indices,
        })
    }
}

impl Layout {
    pub fn new() -> Self {
        Layout::default()
    }

    pub fn with_block(mut self, table: Table, shape: &[usize]) -> Self {
        let block = Block {
            table,
            shape: shape.to_vec(),
            offset: self.len,
        };
        self.len += block.len();
        self.blocks.push(block);
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, table: Table) -> Option<&Block> {
        self.blocks.iter().find(|b| b.table == table)
    }

    /// Flat index of a coordinate.
    pub fn index(&self, coord: &Coordinate) -> Option<usize> {
        let block = self.block(coord.table)?;
        if coord.indices.len() != block.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (&i, &dim) in coord.indices.iter().zip(&block.shape) {
            if i >= dim {
                return None;
            }
            flat = flat * dim + i;
        }
        Some(block.offset + flat)
    }

    /// Coordinate of a flat index.
    pub fn coordinate(&self, index: usize) -> Option<Coordinate> {
        let block = self
            .blocks
            .iter()
            .find(|b| index >= b.offset && index < b.offset + b.len())?;
        let mut rem = index - block.offset;
        let mut indices = vec![0; block.shape.len()];
        for (slot, &dim) in indices.iter_mut().zip(&block.shape).rev() {
            *slot = rem % dim;
            rem /= dim;
        }
        Some(Coordinate {
            table: block.table,
            indices,
        })
    }

    /// Start of the softmax slice whose leading coordinates are `prefix`.
    fn slice_offset(&self, table: Table, prefix: &[usize]) -> usize {
        let block = self.block(table).expect("table present in layout");
        let mut flat = 0;
        for (&i, &dim) in prefix.iter().zip(&block.shape) {
            debug_assert!(i < dim);
            flat = flat * dim + i;
        }
        block.offset + flat * block.shape[block.shape.len() - 1]
    }
}

/// A flat weight vector together with its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    pub layout: Layout,
    pub values: Vec<f64>,
}

impl ParameterVector {
    pub fn zeros(layout: Layout) -> Self {
        let values = vec![0.0; layout.len()];
        ParameterVector { layout, values }
    }

    pub fn from_values(layout: Layout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::LayoutMismatch {
                expected: layout.len(),
                found: values.len(),
            });
        }
        Ok(ParameterVector { layout, values })
    }

    /// One weight per line: `index coordinate value`. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            let coord = self.layout.coordinate(i).expect("index inside layout");
            out.push_str(&format!("{i} {coord} {v:?}\n"));
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output against a known layout.
    pub fn from_text(layout: Layout, text: &str) -> Result<Self> {
        let mut values = vec![f64::NAN; layout.len()];
        let mut seen = 0usize;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(idx), Some(coord), Some(val), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::Parse(format!("malformed weight line `{line}`")));
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad index in `{line}`")))?;
            let coord: Coordinate = coord.parse()?;
            if layout.index(&coord) != Some(idx) {
                return Err(Error::Parse(format!(
                    "coordinate {coord} does not match index {idx}"
                )));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in `{line}`")))?;
            if values[idx].is_nan() {
                seen += 1;
            }
            values[idx] = val;
        }
        if seen != layout.len() {
            return Err(Error::LayoutMismatch {
                expected: layout.len(),
                found: seen,
            });
        }
        Ok(ParameterVector { layout, values })
    }
}

/// Common interface of the policy classes.
pub trait Policy: Send + Sync {
    fn layout(&self) -> &Layout;
    fn weights(&self) -> &[f64];
    fn weights_mut(&mut self) -> &mut [f64];
    fn temperature(&self) -> f64;
    fn internal_state_count(&self) -> usize;
    fn observation_count(&self) -> usize;
    fn action_count(&self) -> usize;

    /// `pi0^N`.
    fn initial_distribution(&self) -> Probs;
    /// `eta(n, o)`.
    fn transition_distribution(&self, internal_state: usize, observation: usize) -> Probs;
    /// Action distribution given the post-transition internal state and the
    /// current observation.
    fn action_distribution(&self, internal_state: usize, observation: usize) -> Probs;

    /// Draws `n(0)`. Returns the choice only when it was actually random.
    fn sample_initial(&self, rng: &mut dyn rand::RngCore) -> (usize, Option<Choice>);

    /// Draws `n' ~ eta(n, o)` then `a ~ psi(n')`. Returns
    /// `(action, next_internal_state, trace)`.
    fn sample_step(
        &self,
        prev_internal_state: usize,
        observation: usize,
        rng: &mut dyn rand::RngCore,
    ) -> (usize, usize, DecisionTrace);

    fn parameters(&self) -> ParameterVector {
        ParameterVector {
            layout: self.layout().clone(),
            values: self.weights().to_vec(),
        }
    }

    fn set_weights(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.layout().len() {
            return Err(Error::LayoutMismatch {
                expected: self.layout().len(),
                found: values.len(),
            });
        }
        self.weights_mut().copy_from_slice(values);
        Ok(())
    }

    fn set_parameters(&mut self, params: &ParameterVector) -> Result<()> {
        if &params.layout != self.layout() {
            return Err(Error::Config(
                "parameter layout does not match policy".into(),
            ));
        }
        self.set_weights(&params.values)
    }

    /// Adds `scale * d ln Pr(choice) / dw` for every choice in `trace` into
    /// `out`, which is indexed by this policy's layout.
    fn accumulate_score(&self, trace: &DecisionTrace, scale: f64, out: &mut [f64]) {
        accumulate_choice_scores(trace.choices.iter(), self.temperature(), scale, out);
    }

    fn score(&self, trace: &DecisionTrace) -> ParameterVector {
        let mut g = ParameterVector::zeros(self.layout().clone());
        self.accumulate_score(trace, 1.0, &mut g.values);
        g
    }

    /// `ln Pr(trace)` under the current weights, recomputed from scratch.
    fn log_probability(&self, trace: &DecisionTrace) -> f64 {
        let w = self.weights();
        trace
            .choices
            .iter()
            .map(|c| {
                log_softmax_at(
                    &w[c.offset..c.offset + c.probs.len()],
                    self.temperature(),
                    c.chosen,
                )
            })
            .sum()
    }
}

/// Softmax score of each choice: `(1[j = chosen] - p_j) / theta` on its slice.
pub fn accumulate_choice_scores<'a>(
    choices: impl Iterator<Item = &'a Choice>,
    theta: f64,
    scale: f64,
    out: &mut [f64],
) {
    for c in choices {
        let slice = &mut out[c.offset..c.offset + c.probs.len()];
        let k = scale / theta;
        for (j, (g, p)) in slice.iter_mut().zip(&c.probs).enumerate() {
            let indicator = if j == c.chosen { 1.0 } else { 0.0 };
            *g += k * (indicator - p);
        }
    }
}

/// How initial weights are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum WeightInit {
    /// Every weight i.i.d. `Uniform(-h, h)`.
    Uniform(f64),
    /// Every softmax row's distribution uniform on the probability simplex:
    /// `w = theta * ln E` with `E ~ Exp(1)`, centred per row.
    #[default]
    Simplex,
}

impl fmt::Display for WeightInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightInit::Uniform(h) => write!(f, "uniform:{h}"),
            WeightInit::Simplex => f.write_str("simplex"),
        }
    }
}

impl FromStr for WeightInit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "simplex" {
            return Ok(WeightInit::Simplex);
        }
        s.strip_prefix("uniform:")
            .and_then(|h| h.parse::<f64>().ok())
            .filter(|h| h.is_finite() && *h >= 0.0)
            .map(WeightInit::Uniform)
            .ok_or_else(|| {
                Error::Config(format!(
                    "bad weight init `{s}` (expected simplex or uniform:<h>)"
                ))
            })
    }
}

fn initial_weights<R: Rng + ?Sized>(
    layout: &Layout,
    theta: f64,
    init: WeightInit,
    rng: &mut R,
) -> Vec<f64> {
    match init {
        WeightInit::Uniform(h) => (0..layout.len())
            .map(|_| (2.0 * rng.gen::<f64>() - 1.0) * h)
            .collect(),
        WeightInit::Simplex => {
            let mut w = Vec::with_capacity(layout.len());
            for block in layout.blocks() {
                let row = *block.shape.last().expect("blocks have a softmax axis");
                for _ in 0..block.len() / row {
                    // 1 - U lies in (0, 1], so the log is finite.
                    let start = w.len();
                    w.extend((0..row).map(|_| theta * (-(1.0 - rng.gen::<f64>()).ln()).ln()));
                    let mean = w[start..].iter().sum::<f64>() / row as f64;
                    w[start..]
                        .iter_mut()
                        .for_each(|x| *x = (*x - mean).clamp(-WEIGHT_CLAMP, WEIGHT_CLAMP));
                }
            }
            w
        }
    }
}

fn check_temperature(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "temperature must be positive, got {theta}"
        )))
    }
}

/// Memoryless stochastic policy: `Pr(a | o) = softmax(w[o, .] / theta)[a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxReactivePolicy {
    layout: Layout,
    weights: Vec<f64>,
    observations: usize,
    actions: usize,
    theta: f64,
}

impl SoftmaxReactivePolicy {
    pub fn new(observations: usize, actions: usize, theta: f64) -> Result<Self> {
        check_temperature(theta)?;
        if observations == 0 || actions == 0 {
            return Err(Error::Config(
                "policy needs at least one observation and action".into(),
            ));
        }
        let layout = Layout::new().with_block(Table::Action, &[observations, actions]);
        Ok(SoftmaxReactivePolicy {
            weights: vec![0.0; layout.len()],
            layout,
            observations,
            actions,
            theta,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        observations: usize,
        actions: usize,
        theta: f64,
        init: WeightInit,
        rng: &mut R,
    ) -> Result<Self> {
        let mut p = Self::new(observations, actions, theta)?;
        p.weights = initial_weights(&p.layout, theta, init, rng);
        Ok(p)
    }

    fn action_offset(&self, observation: usize) -> usize {
        self.layout.slice_offset(Table::Action, &[observation])
    }
}

impl Policy for SoftmaxReactivePolicy {
    fn layout(&self) -> &Layout {
        &self.layout
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
    fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }
    fn temperature(&self) -> f64 {
        self.theta
    }
    fn internal_state_count(&self) -> usize {
        1
    }
    fn observation_count(&self) -> usize {
        self.observations
    }
    fn action_count(&self) -> usize {
        self.actions
    }

    fn initial_distribution(&self) -> Probs {
        smallvec::smallvec![1.0]
    }

    fn transition_distribution(&self, _internal_state: usize, _observation: usize) -> Probs {
        smallvec::smallvec![1.0]
    }

    fn action_distribution(&self, _internal_state: usize, observation: usize) -> Probs {
        let off = self.action_offset(observation);
        softmax(&self.weights[off..off + self.actions], self.theta)
    }

    fn sample_initial(&self, _rng: &mut dyn rand::RngCore) -> (usize, Option<Choice>) {
        (0, None)
    }

    fn sample_step(
        &self,
        _prev_internal_state: usize,
        observation: usize,
        rng: &mut dyn rand::RngCore,
    ) -> (usize, usize, DecisionTrace) {
        let probs = self.action_distribution(0, observation);
        let action = sample_index(&probs, rng);
        let mut trace = DecisionTrace::default();
        trace.push(Choice {
            kind: ChoiceKind::Action,
            internal_state: None,
            observation: Some(observation),
            offset: self.action_offset(observation),
            chosen: action,
            probs,
        });
        (action, 0, trace)
    }
}

/// Finite-state controller `<N, pi0^N, eta, psi>` with softmax tables.
///
/// Layout: `initial[n]`, then `transition[n, o, n']`, then `action[n, a]`,
/// so `M = N + N*O*N + N*A`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteStateController {
    layout: Layout,
    weights: Vec<f64>,
    internal_states: usize,
    observations: usize,
    actions: usize,
    theta: f64,
}

impl FiniteStateController {
    pub fn new(
        internal_states: usize,
        observations: usize,
        actions: usize,
        theta: f64,
    ) -> Result<Self> {
        check_temperature(theta)?;
        if internal_states == 0 || observations == 0 || actions == 0 {
            return Err(Error::Config(
                "controller needs at least one internal state, observation and action".into(),
            ));
        }
        let layout = Layout::new()
            .with_block(Table::Initial, &[internal_states])
            .with_block(
                Table::Transition,
                &[internal_states, observations, internal_states],
            )
            .with_block(Table::Action, &[internal_states, actions]);
        Ok(FiniteStateController {
            weights: vec![0.0; layout.len()],
            layout,
            internal_states,
            observations,
            actions,
            theta,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        internal_states: usize,
        observations: usize,
        actions: usize,
        theta: f64,
        init: WeightInit,
        rng: &mut R,
    ) -> Result<Self> {
        let mut c = Self::new(internal_states, observations, actions, theta)?;
        c.weights = initial_weights(&c.layout, theta, init, rng);
        Ok(c)
    }

    fn initial_offset(&self) -> usize {
        self.layout.slice_offset(Table::Initial, &[])
    }

    fn transition_offset(&self, n: usize, o: usize) -> usize {
        self.layout.slice_offset(Table::Transition, &[n, o])
    }

    fn action_offset(&self, n: usize) -> usize {
        self.layout.slice_offset(Table::Action, &[n])
    }
}

impl Policy for FiniteStateController {
    fn layout(&self) -> &Layout {
        &self.layout
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
    fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }
    fn temperature(&self) -> f64 {
        self.theta
    }
    fn internal_state_count(&self) -> usize {
        self.internal_states
    }
    fn observation_count(&self) -> usize {
        self.observations
    }
    fn action_count(&self) -> usize {
        self.actions
    }

    fn initial_distribution(&self) -> Probs {
        let off = self.initial_offset();
        softmax(&self.weights[off..off + self.internal_states], self.theta)
    }

    fn transition_distribution(&self, internal_state: usize, observation: usize) -> Probs {
        let off = self.transition_offset(internal_state, observation);
        softmax(&self.weights[off..off + self.internal_states], self.theta)
    }

    fn action_distribution(&self, internal_state: usize, _observation: usize) -> Probs {
        let off = self.action_offset(internal_state);
        softmax(&self.weights[off..off + self.actions], self.theta)
    }

    fn sample_initial(&self, rng: &mut dyn rand::RngCore) -> (usize, Option<Choice>) {
        let probs = self.initial_distribution();
        let n = sample_index(&probs, rng);
        let choice = Choice {
            kind: ChoiceKind::InitialInternalState,
            internal_state: None,
            observation: None,
            offset: self.initial_offset(),
            chosen: n,
            probs,
        };
        (n, Some(choice))
    }

    fn sample_step(
        &self,
        prev_internal_state: usize,
        observation: usize,
        rng: &mut dyn rand::RngCore,
    ) -> (usize, usize, DecisionTrace) {
        let mut trace = DecisionTrace::default();
        let eta = self.transition_distribution(prev_internal_state, observation);
        let next = sample_index(&eta, rng);
        trace.push(Choice {
            kind: ChoiceKind::InternalTransition,
            internal_state: Some(prev_internal_state),
            observation: Some(observation),
            offset: self.transition_offset(prev_internal_state, observation),
            chosen: next,
            probs: eta,
        });
        let psi = self.action_distribution(next, observation);
        let action = sample_index(&psi, rng);
        trace.push(Choice {
            kind: ChoiceKind::Action,
            internal_state: Some(next),
            observation: None,
            offset: self.action_offset(next),
            chosen: action,
            probs: psi,
        });
        (action, next, trace)
    }
}

/// Either policy class, as owned by a learner.
#[derive(Clone, Debug, PartialEq)]
pub enum AgentPolicy {
    Reactive(SoftmaxReactivePolicy),
    Fsc(FiniteStateController),
}

impl AgentPolicy {
    /// `internal_states == 1` gives a reactive table; an FSC with a single
    /// internal state could not condition its actions on observations.
    pub fn random<R: Rng + ?Sized>(
        internal_states: usize,
        observations: usize,
        actions: usize,
        theta: f64,
        init: WeightInit,
        rng: &mut R,
    ) -> Result<Self> {
        if internal_states <= 1 {
            SoftmaxReactivePolicy::random(observations, actions, theta, init, rng)
                .map(AgentPolicy::Reactive)
        } else {
            FiniteStateController::random(internal_states, observations, actions, theta, init, rng)
                .map(AgentPolicy::Fsc)
        }
    }

    fn inner(&self) -> &dyn Policy {
        match self {
            AgentPolicy::Reactive(p) => p,
            AgentPolicy::Fsc(p) => p,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Policy {
        match self {
            AgentPolicy::Reactive(p) => p,
            AgentPolicy::Fsc(p) => p,
        }
    }
}

impl Policy for AgentPolicy {
    fn layout(&self) -> &Layout {
        self.inner().layout()
    }
    fn weights(&self) -> &[f64] {
        self.inner().weights()
    }
    fn weights_mut(&mut self) -> &mut [f64] {
        self.inner_mut().weights_mut()
    }
    fn temperature(&self) -> f64 {
        self.inner().temperature()
    }
    fn internal_state_count(&self) -> usize {
        self.inner().internal_state_count()
    }
    fn observation_count(&self) -> usize {
        self.inner().observation_count()
    }
    fn action_count(&self) -> usize {
        self.inner().action_count()
    }
    fn initial_distribution(&self) -> Probs {
        self.inner().initial_distribution()
    }
    fn transition_distribution(&self, n: usize, o: usize) -> Probs {
        self.inner().transition_distribution(n, o)
    }
    fn action_distribution(&self, n: usize, o: usize) -> Probs {
        self.inner().action_distribution(n, o)
    }
    fn sample_initial(&self, rng: &mut dyn rand::RngCore) -> (usize, Option<Choice>) {
        self.inner().sample_initial(rng)
    }
    fn sample_step(
        &self,
        n: usize,
        o: usize,
        rng: &mut dyn rand::RngCore,
    ) -> (usize, usize, DecisionTrace) {
        self.inner().sample_step(n, o, rng)
    }
}
