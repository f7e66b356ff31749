//! Two-agent, six-state coordination game.
//!
//! In `s1` agent 1 alone picks the branch: `a` leads to the risky state `s2`,
//! `b` to the safe state `s3`. In `s2` matching actions pay +10 (`s4`) and
//! mismatched ones pay -10 (`s5`). `s3` always pays +5 (`s6`). Rewards are
//! paid on entry to the terminal states.
//!
//! Both agents observe `s2` as observation 1 and every other state as
//! observation 0. Actions only matter in `s1` (agent 1) and `s2` (both), so
//! each agent needs exactly two softmax slices.

use crate::game::TabularGame;

pub const ACTION_A: usize = 0;
pub const ACTION_B: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordinationState {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl CoordinationState {
    pub const ALL: [CoordinationState; 6] = [
        CoordinationState::S1,
        CoordinationState::S2,
        CoordinationState::S3,
        CoordinationState::S4,
        CoordinationState::S5,
        CoordinationState::S6,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            CoordinationState::S4 | CoordinationState::S5 | CoordinationState::S6
        )
    }

    /// Observation index seen by either agent.
    pub fn observation(self) -> usize {
        match self {
            CoordinationState::S2 => 1,
            _ => 0,
        }
    }
}

/// Deterministic transition table. `joint` is `(agent 1, agent 2)`.
///
/// # Panics
/// On terminal states.
pub fn coordination_dynamics(
    state: CoordinationState,
    joint: (usize, usize),
) -> (CoordinationState, f64) {
    use CoordinationState::*;
    match state {
        S1 if joint.0 == ACTION_A => (S2, 0.0),
        S1 => (S3, 0.0),
        S2 if joint.0 == joint.1 => (S4, 10.0),
        S2 => (S5, -10.0),
        S3 => (S6, 5.0),
        terminal => panic!("no transitions out of terminal state {terminal:?}"),
    }
}

/// The game as a [`TabularGame`] with discount-free dynamics; episodes last
/// exactly two steps.
pub fn game() -> TabularGame {
    let states = CoordinationState::ALL;
    let observe: Vec<Vec<f64>> = states
        .iter()
        .map(|s| {
            let mut row = vec![0.0; 2];
            row[s.observation()] = 1.0;
            row
        })
        .collect();
    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    for s in states {
        if s.is_terminal() {
            transitions.push(Vec::new());
            rewards.push(Vec::new());
            continue;
        }
        let mut t_row = Vec::new();
        let mut r_row = Vec::new();
        for a1 in 0..2 {
            for a2 in 0..2 {
                let (next, r) = coordination_dynamics(s, (a1, a2));
                t_row.push(vec![(next.index(), 1.0)]);
                r_row.push(r);
            }
        }
        transitions.push(t_row);
        rewards.push(r_row);
    }
    let mut initial = vec![0.0; 6];
    initial[CoordinationState::S1.index()] = 1.0;
    TabularGame::builder()
        .states(["s1", "s2", "s3", "s4", "s5", "s6"])
        .initial(initial)
        .agent(2, observe.clone())
        .agent(2, observe)
        .dynamics(transitions, rewards)
        .terminal(states.iter().map(|s| s.is_terminal()).collect())
        .max_steps(2)
        .build()
        .expect("coordination game tables are valid")
}

#[cfg(test)]
mod tests {
    use super::CoordinationState::*;
    use super::*;
    use crate::game::{reset, step, Game};
    use crate::rng::StreamRng;

    #[test]
    fn table_matches_the_game_description() {
        assert_eq!(coordination_dynamics(S1, (ACTION_A, ACTION_B)), (S2, 0.0));
        assert_eq!(coordination_dynamics(S1, (ACTION_B, ACTION_A)), (S3, 0.0));
        assert_eq!(coordination_dynamics(S2, (ACTION_A, ACTION_A)), (S4, 10.0));
        assert_eq!(coordination_dynamics(S2, (ACTION_B, ACTION_B)), (S4, 10.0));
        assert_eq!(coordination_dynamics(S2, (ACTION_A, ACTION_B)), (S5, -10.0));
        assert_eq!(coordination_dynamics(S2, (ACTION_B, ACTION_A)), (S5, -10.0));
        for a1 in 0..2 {
            for a2 in 0..2 {
                assert_eq!(coordination_dynamics(S3, (a1, a2)), (S6, 5.0));
            }
        }
    }

    #[test]
    fn starts_in_s1() {
        let g = game();
        let mut rng = StreamRng::from_seed(0);
        for _ in 0..100 {
            assert_eq!(reset(&g, &mut rng), (S1.index(), vec![0, 0]));
        }
    }

    #[test]
    fn tabular_steps_agree_with_table() {
        let g = game();
        let mut rng = StreamRng::from_seed(0);
        let out = step(&g, &S2.index(), &[0, 0], &mut rng);
        assert_eq!(
            (out.next_state, out.reward, out.terminal),
            (S4.index(), 10.0, true)
        );
        let out = step(&g, &S3.index(), &[1, 0], &mut rng);
        assert_eq!((out.next_state, out.reward), (S6.index(), 5.0));
        let out = step(&g, &S2.index(), &[0, 1], &mut rng);
        assert_eq!((out.next_state, out.reward), (S5.index(), -10.0));
        let out = step(&g, &S1.index(), &[0, 1], &mut rng);
        assert_eq!(
            (out.next_state, out.observations, out.terminal),
            (S2.index(), vec![1, 1], false)
        );
        assert_eq!(g.agents().len(), 2);
    }
}
