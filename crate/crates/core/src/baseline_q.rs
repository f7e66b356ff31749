//! Central tabular Q-learning over the joint action space.
//!
//! The controller either sees the full environment state or only the
//! concatenation of the learners' local observations.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::learner::{CurvePoint, LearningCurve};
use crate::rng::{Entity, EpisodeId, EpisodeStreams, Purpose, RunStreams};

/// What the central controller conditions on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Observability {
    #[default]
    Partial,
    Full,
}

impl std::fmt::Display for Observability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Observability::Partial => "partial",
            Observability::Full => "full",
        })
    }
}

impl std::str::FromStr for Observability {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial" => Ok(Observability::Partial),
            "full" => Ok(Observability::Full),
            _ => Err(Error::Config(format!(
                "unknown observability `{s}` (expected full or partial)"
            ))),
        }
    }
}

/// Sparse Q-table; missing rows read as all zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QTable {
    actions: usize,
    rows: FxHashMap<u64, Vec<f64>>,
}

impl QTable {
    pub fn new(joint_actions: usize) -> Self {
        assert!(joint_actions > 0, "a Q-table needs at least one action");
        QTable {
            actions: joint_actions,
            rows: FxHashMap::default(),
        }
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    /// Number of keys with an explicit row.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, key: u64, action: usize) -> f64 {
        assert!(action < self.actions, "joint action {action} out of range");
        self.rows.get(&key).map_or(0.0, |r| r[action])
    }

    pub fn set(&mut self, key: u64, action: usize, value: f64) {
        assert!(action < self.actions, "joint action {action} out of range");
        self.row_mut(key)[action] = value;
    }

    fn row_mut(&mut self, key: u64) -> &mut Vec<f64> {
        let n = self.actions;
        self.rows.entry(key).or_insert_with(|| vec![0.0; n])
    }

    /// Max over every joint action, unseen entries counting as 0.
    pub fn max_value(&self, key: u64) -> f64 {
        self.rows
            .get(&key)
            .map_or(0.0, |r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Lines `key, action-index, value`, sorted by key then action.
    pub fn dump(&self, limit: usize) -> Result<String> {
        let entries = self.rows.len() * self.actions;
        if entries > limit {
            return Err(Error::BudgetExceeded { budget: limit });
        }
        let mut keys: Vec<_> = self.rows.keys().copied().collect();
        keys.sort_unstable();
        let mut out = String::new();
        for k in keys {
            for (a, v) in self.rows[&k].iter().enumerate() {
                writeln!(out, "{k}, {a}, {v:?}").unwrap();
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon: f64,
}

impl QConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config(format!(
                "Q learning rate must lie in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(Error::Config(format!(
                "discount must lie in [0, 1], got {}",
                self.discount
            )));
        }
        Ok(())
    }
}

/// One-step Q-learning backup. No bootstrap past a terminal state.
#[allow(clippy::too_many_arguments)]
pub fn q_update(
    table: &mut QTable,
    key: u64,
    joint_action: usize,
    reward: f64,
    next_key: u64,
    terminal: bool,
    alpha: f64,
    gamma: f64,
) {
    let target = if terminal {
        reward
    } else {
        reward + gamma * table.max_value(next_key)
    };
    let q = table.get(key, joint_action);
    table.set(key, joint_action, q + alpha * (target - q));
}

/// ε-greedy choice; greedy ties are broken uniformly.
pub fn select_action<R: Rng + ?Sized>(
    table: &QTable,
    key: u64,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    let n = table.action_count();
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..n);
    }
    let Some(row) = table.rows.get(&key) else {
        return rng.gen_range(0..n);
    };
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties = row.iter().filter(|&&v| v == best).count();
    let pick = if ties == 1 { 0 } else { rng.gen_range(0..ties) };
    row.iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .nth(pick)
        .map(|(a, _)| a)
        .expect("at least one maximiser")
}

/// Table key for the controller's view of a state.
fn input_key<G: Game>(
    game: &G,
    state: &G::State,
    observability: Observability,
    rng: &mut impl Rng,
) -> u64 {
    match observability {
        Observability::Full => game.state_key(state),
        Observability::Partial => {
            let mut key = 0u64;
            for (i, spec) in game.agents().iter().enumerate() {
                key = key * spec.observation_count as u64 + game.observe(state, i, rng) as u64;
            }
            key
        }
    }
}

/// Plays one training episode, backing up every transition. Returns the
/// undiscounted payoff.
pub fn q_episode<G: Game>(
    game: &G,
    table: &mut QTable,
    config: &QConfig,
    observability: Observability,
    max_steps: usize,
    streams: &EpisodeStreams,
) -> f64 {
    let joint = game.joint_actions();
    let mut env = streams.stream(0, Entity::Environment, Purpose::Reset);
    let mut state = game.initial_state(&mut env);
    let mut key = input_key(game, &state, observability, &mut env);
    let mut payoff = 0.0;
    for t in 1..=max_steps as u64 {
        let mut explore = streams.stream(t, Entity::Central, Purpose::Exploration);
        let a = select_action(table, key, config.epsilon, &mut explore);
        let mut env = streams.stream(t, Entity::Environment, Purpose::Transition);
        let (next, r) = game.transition(&state, &joint.decode(a), &mut env);
        let terminal = game.is_terminal(&next);
        let next_key = input_key(game, &next, observability, &mut env);
        q_update(
            table,
            key,
            a,
            r,
            next_key,
            terminal,
            config.learning_rate,
            config.discount,
        );
        payoff += r;
        if terminal {
            break;
        }
        state = next;
        key = next_key;
    }
    payoff
}

/// Mean payoff of the greedy policy over `episodes` evaluation episodes at
/// `checkpoint`. The table is not modified.
pub fn greedy_eval<G: Game>(
    table: &QTable,
    game: &G,
    observability: Observability,
    max_steps: usize,
    episodes: usize,
    streams: &RunStreams,
    checkpoint: u64,
) -> f64 {
    let payoffs: Vec<f64> = (0..episodes as u64)
        .into_par_iter()
        .map(|index| {
            let ep = streams.episode(EpisodeId::Eval { checkpoint, index });
            play_episode(game, table, 0.0, observability, max_steps, &ep)
        })
        .collect();
    payoffs.iter().sum::<f64>() / episodes as f64
}

/// Plays one episode with a fixed table. Returns the undiscounted payoff.
pub fn play_episode<G: Game>(
    game: &G,
    table: &QTable,
    epsilon: f64,
    observability: Observability,
    max_steps: usize,
    streams: &EpisodeStreams,
) -> f64 {
    let joint = game.joint_actions();
    let mut env = streams.stream(0, Entity::Environment, Purpose::Reset);
    let mut state = game.initial_state(&mut env);
    let mut key = input_key(game, &state, observability, &mut env);
    let mut payoff = 0.0;
    for t in 1..=max_steps as u64 {
        let mut explore = streams.stream(t, Entity::Central, Purpose::Exploration);
        let a = select_action(table, key, epsilon, &mut explore);
        let mut env = streams.stream(t, Entity::Environment, Purpose::Transition);
        let (next, r) = game.transition(&state, &joint.decode(a), &mut env);
        payoff += r;
        if game.is_terminal(&next) {
            break;
        }
        key = input_key(game, &next, observability, &mut env);
        state = next;
    }
    payoff
}

/// Trains a fresh table for `trials` episodes, recording greedy payoff at
/// trial 0 and every `eval_every` trials.
#[allow(clippy::too_many_arguments)]
pub fn q_train<G: Game>(
    game: &G,
    config: &QConfig,
    observability: Observability,
    max_steps: usize,
    trials: usize,
    eval_every: usize,
    eval_episodes: usize,
    streams: &RunStreams,
) -> (QTable, LearningCurve) {
    let mut table = QTable::new(game.joint_actions().count());
    let mut curve = LearningCurve::default();
    let eval = |table: &QTable, trial: usize| CurvePoint {
        trial,
        mean_payoff: greedy_eval(
            table,
            game,
            observability,
            max_steps,
            eval_episodes,
            streams,
            trial as u64,
        ),
    };
    curve.points.push(eval(&table, 0));
    for trial in 1..=trials {
        let ep = streams.episode(EpisodeId::Train(trial as u64));
        q_episode(game, &mut table, config, observability, max_steps, &ep);
        if trial % eval_every == 0 {
            curve.points.push(eval(&table, trial));
        }
    }
    (table, curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::soccer::{OpponentKind, SoccerConfig, SoccerWorld};
    use crate::rng::StreamRng;

    #[test]
    fn update_examples() {
        let mut t = QTable::new(4);
        q_update(&mut t, 7, 2, 1.0, 8, true, 0.1, 0.99);
        assert_eq!(t.get(7, 2), 0.1);

        let mut t = QTable::new(4);
        q_update(&mut t, 7, 0, -1.0, 8, true, 1.0, 0.99);
        assert_eq!(t.get(7, 0), -1.0);

        let mut t = QTable::new(4);
        t.set(9, 3, 2.0);
        q_update(&mut t, 1, 1, 0.0, 9, false, 0.1, 0.999);
        assert!((t.get(1, 1) - 0.1998).abs() < 1e-15);
    }

    #[test]
    fn unseen_entries_count_in_the_max() {
        let mut t = QTable::new(3);
        t.set(5, 0, -4.0);
        // Actions 1 and 2 are still 0.
        assert_eq!(t.max_value(5), 0.0);
        assert_eq!(t.max_value(6), 0.0);
    }

    #[test]
    fn greedy_and_uniform_selection() {
        let mut t = QTable::new(4);
        t.set(1, 2, 0.5);
        let mut rng = StreamRng::from_seed(3);
        for _ in 0..100 {
            assert_eq!(select_action(&t, 1, 0.0, &mut rng), 2);
        }
        let n = 100_000;
        for (eps, key) in [(1.0, 1), (0.0, 99)] {
            let mut counts = [0usize; 4];
            for _ in 0..n {
                counts[select_action(&t, key, eps, &mut rng)] += 1;
            }
            for c in counts {
                assert!((c as f64 / n as f64 - 0.25).abs() < 0.02, "{counts:?}");
            }
        }
        // Explicit all-equal row.
        let mut t = QTable::new(2);
        t.set(0, 0, 1.0);
        t.set(0, 1, 1.0);
        let ones = (0..n)
            .filter(|_| select_action(&t, 0, 0.0, &mut rng) == 1)
            .count();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn dump_is_sorted_and_gated() {
        let mut t = QTable::new(2);
        t.set(9, 1, 0.5);
        t.set(3, 0, -1.0);
        assert_eq!(
            t.dump(10).unwrap(),
            "3, 0, -1.0\n3, 1, 0.0\n9, 0, 0.0\n9, 1, 0.5\n"
        );
        assert!(matches!(
            t.dump(3),
            Err(Error::BudgetExceeded { budget: 3 })
        ));
    }

    #[test]
    fn greedy_eval_is_deterministic_and_leaves_table_alone() {
        let world = SoccerWorld::new(SoccerConfig::one_on_two(OpponentKind::Greedy));
        let streams = RunStreams::new(4, 0);
        let cfg = QConfig {
            learning_rate: 0.1,
            discount: 0.999,
            epsilon: 0.4,
        };
        let (table, _) = q_train(
            &world,
            &cfg,
            Observability::Partial,
            200,
            50,
            50,
            4,
            &streams,
        );
        let before = table.clone();
        let a = greedy_eval(&table, &world, Observability::Partial, 200, 8, &streams, 77);
        let b = greedy_eval(&table, &world, Observability::Partial, 200, 8, &streams, 77);
        assert_eq!(a, b);
        assert_eq!(table, before);
    }

    #[test]
    fn partial_keys_concatenate_observations() {
        let world = SoccerWorld::new(SoccerConfig::one_on_two(OpponentKind::Random));
        let mut rng = StreamRng::from_seed(1);
        let s = world.initial_state(&mut rng);
        let k = input_key(&world, &s, Observability::Partial, &mut rng);
        let o0 = world.observe(&s, 0, &mut rng) as u64;
        let o1 = world.observe(&s, 1, &mut rng) as u64;
        assert_eq!(k, o0 * 243 + o1);
    }

    #[test]
    fn config_bounds() {
        let ok = QConfig {
            learning_rate: 0.1,
            discount: 0.999,
            epsilon: 0.4,
        };
        assert!(ok.validate().is_ok());
        assert!(QConfig {
            learning_rate: 0.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(QConfig { epsilon: 1.5, ..ok }.validate().is_err());
    }
}
