//! Grid soccer: two learners against one or two scripted opponents.
//!
//! Coordinates are `(x, y)` with `x` growing east and `y` growing north on a
//! 6x5 field. Goals sit just outside the west and east edges on rows
//! [`GOAL_ROWS`]. Learners start in the east half and attack the west goal;
//! opponents start in the west half and defend it.
//!
//! Player indices: `0` and `1` are the learners, `2..` the opponents.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use smallvec::SmallVec;

use crate::game::{AgentSpec, Game};

pub const WIDTH: i8 = 6;
pub const HEIGHT: i8 = 5;
/// Rows (0-based, counted from the south edge) that open onto a goal.
pub const GOAL_ROWS: [i8; 2] = [1, 2];
pub const DEFAULT_MAX_STEPS: usize = 1000;

/// Number of distinct learner observations: 3 ball flags x 3^4 neighbours.
pub const OBSERVATION_COUNT: usize = 243;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    North,
    South,
    East,
    West,
    Stay,
    Pass,
}

impl Move {
    pub const ALL: [Move; 6] = [
        Move::North,
        Move::South,
        Move::East,
        Move::West,
        Move::Stay,
        Move::Pass,
    ];

    fn delta(self) -> Option<(i8, i8)> {
        match self {
            Move::North => Some((0, 1)),
            Move::South => Some((0, -1)),
            Move::East => Some((1, 0)),
            Move::West => Some((-1, 0)),
            Move::Stay | Move::Pass => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub x: i8,
    pub y: i8,
}

impl Cell {
    pub const fn new(x: i8, y: i8) -> Self {
        Cell { x, y }
    }

    fn offset(self, (dx, dy): (i8, i8)) -> Cell {
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn on_grid(self) -> bool {
        (0..WIDTH).contains(&self.x) && (0..HEIGHT).contains(&self.y)
    }

    fn index(self) -> u64 {
        (self.y as u64) * WIDTH as u64 + self.x as u64
    }

    fn manhattan(self, other: Cell) -> i32 {
        (self.x as i32 - other.x as i32).abs() + (self.y as i32 - other.y as i32).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpponentKind {
    /// Uniform over all six actions.
    Random,
    /// Chases the ball carrier, then waits next to it; with the ball, runs
    /// for the learners' goal.
    Greedy,
    /// Heads for the 2x2 area in front of its own goal and then stays or
    /// shuffles inside it.
    Defensive,
}

impl OpponentKind {
    pub fn name(self) -> &'static str {
        match self {
            OpponentKind::Random => "random",
            OpponentKind::Greedy => "greedy",
            OpponentKind::Defensive => "defensive",
        }
    }
}

/// How a game ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    /// Ball left through the west goal: +1 for the learners.
    West,
    /// Ball left through the east goal: -1 for the learners.
    East,
}

impl Goal {
    pub fn reward(self) -> f64 {
        match self {
            Goal::West => 1.0,
            Goal::East => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SoccerState {
    pub positions: SmallVec<[Cell; 4]>,
    pub possessor: usize,
    pub goal: Option<Goal>,
}

impl SoccerState {
    pub fn occupant(&self, cell: Cell) -> Option<usize> {
        self.positions.iter().position(|&c| c == cell)
    }
}

impl fmt::Display for SoccerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.positions.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{},{}", c.x, c.y)?;
            if i == self.possessor {
                f.write_str("*")?;
            }
        }
        match self.goal {
            Some(Goal::West) => f.write_str("|west"),
            Some(Goal::East) => f.write_str("|east"),
            None => Ok(()),
        }
    }
}

/// Neighbour cell status in an observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellStatus {
    Open = 0,
    OutOfField = 1,
    Occupied = 2,
}

/// Who holds the ball, from a learner's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallHolder {
    SelfHeld = 0,
    Teammate = 1,
    OpponentSide = 2,
}

/// Local view of a learner: ball flag and the N, S, E, W neighbour cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SoccerObservation {
    pub ball: BallHolder,
    /// North, South, East, West.
    pub neighbours: [CellStatus; 4],
}

impl SoccerObservation {
    /// `ball * 81 + north * 27 + south * 9 + east * 3 + west`.
    pub fn encode(&self) -> usize {
        self.neighbours
            .iter()
            .fold(self.ball as usize, |acc, &n| acc * 3 + n as usize)
    }

    pub fn decode(mut code: usize) -> Option<Self> {
        if code >= OBSERVATION_COUNT {
            return None;
        }
        let status = |d: usize| match d {
            0 => CellStatus::Open,
            1 => CellStatus::OutOfField,
            _ => CellStatus::Occupied,
        };
        let mut neighbours = [CellStatus::Open; 4];
        for slot in neighbours.iter_mut().rev() {
            *slot = status(code % 3);
            code /= 3;
        }
        let ball = match code {
            0 => BallHolder::SelfHeld,
            1 => BallHolder::Teammate,
            _ => BallHolder::OpponentSide,
        };
        Some(SoccerObservation { ball, neighbours })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SoccerConfig {
    pub opponents: Vec<OpponentKind>,
    /// When false, learners cannot pass (their alphabet loses `Pass`).
    pub pass_enabled: bool,
    pub goal_rows: [i8; 2],
    pub max_steps: usize,
}

impl SoccerConfig {
    pub fn one_on_two(opponent: OpponentKind) -> Self {
        SoccerConfig {
            opponents: vec![opponent],
            pass_enabled: true,
            goal_rows: GOAL_ROWS,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// Greedy and defensive opponents against the two learners.
    pub fn two_on_two() -> Self {
        SoccerConfig {
            opponents: vec![OpponentKind::Greedy, OpponentKind::Defensive],
            ..Self::one_on_two(OpponentKind::Greedy)
        }
    }

    pub fn without_pass(mut self) -> Self {
        self.pass_enabled = false;
        self
    }
}

#[derive(Clone, Debug)]
pub struct SoccerWorld {
    config: SoccerConfig,
    agents: [AgentSpec; 2],
}

pub const LEARNERS: usize = 2;

impl SoccerWorld {
    pub fn new(config: SoccerConfig) -> Self {
        assert!(
            !config.opponents.is_empty() && config.opponents.len() <= 2,
            "one or two opponents"
        );
        let action_count = if config.pass_enabled { 6 } else { 5 };
        let spec = AgentSpec {
            action_count,
            observation_count: OBSERVATION_COUNT,
        };
        SoccerWorld {
            config,
            agents: [spec, spec],
        }
    }

    pub fn config(&self) -> &SoccerConfig {
        &self.config
    }

    pub fn player_count(&self) -> usize {
        LEARNERS + self.config.opponents.len()
    }

    /// Learner action index to move.
    pub fn learner_move(&self, action: usize) -> Move {
        Move::ALL[..self.agents[0].action_count][action]
    }

    fn teammate(&self, player: usize) -> Option<usize> {
        match player {
            0 => Some(1),
            1 => Some(0),
            2 if self.config.opponents.len() == 2 => Some(3),
            3 => Some(2),
            _ => None,
        }
    }

    fn in_goal_rows(&self, y: i8) -> bool {
        self.config.goal_rows.contains(&y)
    }

    /// Cells in front of the west goal.
    pub fn goal_area(&self) -> [Cell; 4] {
        let [a, b] = self.config.goal_rows;
        [
            Cell::new(0, a),
            Cell::new(0, b),
            Cell::new(1, a),
            Cell::new(1, b),
        ]
    }

    /// Learners on distinct east-half cells, opponents on distinct west-half
    /// cells, ball to a uniformly chosen player.
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> SoccerState {
        let half = |xs: std::ops::Range<i8>| -> Vec<Cell> {
            xs.flat_map(|x| (0..HEIGHT).map(move |y| Cell::new(x, y)))
                .collect()
        };
        let east = half(WIDTH / 2..WIDTH);
        let west = half(0..WIDTH / 2);
        let mut positions: SmallVec<[Cell; 4]> =
            east.choose_multiple(rng, LEARNERS).copied().collect();
        positions.extend(
            west.choose_multiple(rng, self.config.opponents.len())
                .copied(),
        );
        let possessor = rng.gen_range(0..positions.len());
        SoccerState {
            positions,
            possessor,
            goal: None,
        }
    }

    pub fn observation(&self, state: &SoccerState, learner: usize) -> SoccerObservation {
        assert!(learner < LEARNERS, "only learners observe");
        let ball = if state.possessor == learner {
            BallHolder::SelfHeld
        } else if Some(state.possessor) == self.teammate(learner) {
            BallHolder::Teammate
        } else {
            BallHolder::OpponentSide
        };
        let here = state.positions[learner];
        let mut neighbours = [CellStatus::Open; 4];
        for (slot, m) in
            neighbours
                .iter_mut()
                .zip([Move::North, Move::South, Move::East, Move::West])
        {
            let c = here.offset(m.delta().unwrap());
            *slot = if !c.on_grid() {
                CellStatus::OutOfField
            } else if state.occupant(c).is_some() {
                CellStatus::Occupied
            } else {
                CellStatus::Open
            };
        }
        SoccerObservation { ball, neighbours }
    }

    /// Action of opponent `player` (a player index `>= 2`), which sees the
    /// full state.
    pub fn opponent_action<R: Rng + ?Sized>(
        &self,
        kind: OpponentKind,
        state: &SoccerState,
        player: usize,
        rng: &mut R,
    ) -> Move {
        let me = state.positions[player];
        match kind {
            OpponentKind::Random => *Move::ALL.choose(rng).unwrap(),
            OpponentKind::Greedy if state.possessor == player => {
                let target = Cell::new(WIDTH - 1, self.nearest_goal_row(me.y));
                if me == target {
                    Move::East
                } else {
                    self.step_toward(state, me, target, rng)
                }
            }
            OpponentKind::Greedy => {
                let target = state.positions[state.possessor];
                if me.manhattan(target) <= 1 {
                    Move::Stay
                } else {
                    self.step_toward(state, me, target, rng)
                }
            }
            OpponentKind::Defensive => {
                let area = self.goal_area();
                if area.contains(&me) {
                    let inside: SmallVec<[Move; 4]> =
                        [Move::North, Move::South, Move::East, Move::West]
                            .into_iter()
                            .filter(|m| area.contains(&me.offset(m.delta().unwrap())))
                            .collect();
                    if rng.gen_bool(0.5) {
                        Move::Stay
                    } else {
                        *inside.choose(rng).unwrap()
                    }
                } else {
                    let target = *area.iter().min_by_key(|c| me.manhattan(**c)).unwrap();
                    self.step_toward(state, me, target, rng)
                }
            }
        }
    }

    fn nearest_goal_row(&self, y: i8) -> i8 {
        let [a, b] = self.config.goal_rows;
        if (y - a).abs() <= (y - b).abs() {
            a
        } else {
            b
        }
    }

    /// One Manhattan step toward `target`, preferring the axis with the
    /// larger gap (ties at random) and falling back to the other axis when
    /// the preferred cell is occupied. `Stay` when both are blocked.
    fn step_toward<R: Rng + ?Sized>(
        &self,
        state: &SoccerState,
        from: Cell,
        target: Cell,
        rng: &mut R,
    ) -> Move {
        let dx = target.x - from.x;
        let dy = target.y - from.y;
        let horizontal = match dx.signum() {
            1 => Some(Move::East),
            -1 => Some(Move::West),
            _ => None,
        };
        let vertical = match dy.signum() {
            1 => Some(Move::North),
            -1 => Some(Move::South),
            _ => None,
        };
        let horizontal_first = match dx.abs().cmp(&dy.abs()) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => rng.gen_bool(0.5),
        };
        let order = if horizontal_first {
            [horizontal, vertical]
        } else {
            [vertical, horizontal]
        };
        for m in order.into_iter().flatten() {
            let c = from.offset(m.delta().unwrap());
            if c.on_grid() && state.occupant(c).is_none() {
                return m;
            }
        }
        Move::Stay
    }

    /// Executes every player's move in the given order.
    ///
    /// A move into an occupied cell does not happen, and if the mover had the
    /// ball it goes to whoever stands in that cell at that moment. A ball
    /// carrier leaving the field through a goal ends the game. A pass hands the ball to the teammate once all
    /// moves are done.
    pub fn apply(
        &self,
        state: &SoccerState,
        moves: &[Move],
        order: &[usize],
    ) -> (SoccerState, f64) {
        debug_assert_eq!(moves.len(), state.positions.len());
        let mut next = state.clone();
        let mut pending_pass: Option<(usize, usize)> = None;
        for &p in order {
            if next.goal.is_some() {
                break;
            }
            match moves[p] {
                Move::Stay => {}
                Move::Pass => {
                    if next.possessor == p {
                        if let Some(mate) = self.teammate(p) {
                            pending_pass = Some((p, mate));
                        }
                    }
                }
                m => {
                    let target = next.positions[p].offset(m.delta().unwrap());
                    if !target.on_grid() {
                        if next.possessor == p && self.in_goal_rows(target.y) {
                            next.goal = Some(if target.x < 0 { Goal::West } else { Goal::East });
                        }
                    } else if let Some(q) = next.occupant(target) {
                        if next.possessor == p {
                            next.possessor = q;
                        }
                    } else {
                        next.positions[p] = target;
                    }
                }
            }
        }
        if next.goal.is_none() {
            if let Some((passer, mate)) = pending_pass {
                if next.possessor == passer {
                    next.possessor = mate;
                }
            }
        }
        let reward = next.goal.map_or(0.0, Goal::reward);
        (next, reward)
    }
}

impl Game for SoccerWorld {
    type State = SoccerState;

    fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> SoccerState {
        self.sample_initial(rng)
    }

    fn observe<R: Rng + ?Sized>(&self, state: &SoccerState, agent: usize, _rng: &mut R) -> usize {
        self.observation(state, agent).encode()
    }

    fn transition<R: Rng + ?Sized>(
        &self,
        state: &SoccerState,
        joint: &[usize],
        rng: &mut R,
    ) -> (SoccerState, f64) {
        let mut moves: SmallVec<[Move; 4]> = joint.iter().map(|&a| self.learner_move(a)).collect();
        for (k, &kind) in self.config.opponents.iter().enumerate() {
            moves.push(self.opponent_action(kind, state, LEARNERS + k, rng));
        }
        let mut order: SmallVec<[usize; 4]> = (0..moves.len()).collect();
        order.shuffle(rng);
        self.apply(state, &moves, &order)
    }

    fn is_terminal(&self, state: &SoccerState) -> bool {
        state.goal.is_some()
    }

    /// Five bits per player cell, two bits for the ball carrier.
    fn state_key(&self, state: &SoccerState) -> u64 {
        state
            .positions
            .iter()
            .fold(state.possessor as u64, |acc, c| (acc << 5) | c.index())
    }

    fn default_max_steps(&self) -> usize {
        self.config.max_steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use smallvec::smallvec;

    fn world(kind: OpponentKind) -> SoccerWorld {
        SoccerWorld::new(SoccerConfig::one_on_two(kind))
    }

    fn state(cells: &[(i8, i8)], possessor: usize) -> SoccerState {
        SoccerState {
            positions: cells.iter().map(|&(x, y)| Cell::new(x, y)).collect(),
            possessor,
            goal: None,
        }
    }

    #[test]
    fn reset_respects_halves_and_occupancy() {
        let w = world(OpponentKind::Random);
        let mut rng = StreamRng::from_seed(1);
        let n = 100_000;
        let mut holders = [0usize; 3];
        for _ in 0..n {
            let s = w.sample_initial(&mut rng);
            assert!(s.positions[0].x >= 3 && s.positions[1].x >= 3);
            assert!(s.positions[2].x <= 2);
            assert_ne!(s.positions[0], s.positions[1]);
            assert!(s.positions.iter().all(|c| c.on_grid()));
            holders[s.possessor] += 1;
        }
        for h in holders {
            assert!((h as f64 / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn carrier_bumping_an_occupant_loses_the_ball() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (5, 4), (2, 2)], 0);
        let moves = [Move::West, Move::Stay, Move::Stay];
        let (next, r) = w.apply(&s, &moves, &[0, 1, 2]);
        assert_eq!(next.positions[0], Cell::new(3, 2));
        assert_eq!(next.possessor, 2);
        assert_eq!(r, 0.0);

        // The occupant had not moved yet when the carrier went, so it is
        // the one standing there and it takes the ball away with it.
        let moves = [Move::West, Move::Stay, Move::North];
        let (next, _) = w.apply(&s, &moves, &[0, 2, 1]);
        assert_eq!(next.positions[0], Cell::new(3, 2));
        assert_eq!(next.possessor, 2);
        assert_eq!(next.positions[2], Cell::new(2, 3));
    }

    #[test]
    fn a_cell_vacated_earlier_in_the_step_is_free() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (5, 4), (2, 2)], 0);
        let moves = [Move::West, Move::Stay, Move::North];
        let (next, _) = w.apply(&s, &moves, &[2, 0, 1]);
        assert_eq!(next.positions[0], Cell::new(2, 2));
        assert_eq!(next.positions[2], Cell::new(2, 3));
        assert_eq!(next.possessor, 0);
    }

    #[test]
    fn bumping_the_carrier_does_not_steal() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (5, 4), (2, 2)], 0);
        let (next, _) = w.apply(&s, &[Move::Stay, Move::Stay, Move::East], &[2, 0, 1]);
        assert_eq!(next.possessor, 0);
        assert_eq!(next.positions[2], Cell::new(2, 2));
    }

    #[test]
    fn pass_lands_at_the_next_step() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (5, 4), (0, 0)], 0);
        let moves = [Move::Pass, Move::East, Move::Stay];
        let (next, _) = w.apply(&s, &moves, &[0, 1, 2]);
        assert_eq!(next.possessor, 1);
    }

    #[test]
    fn pass_without_the_ball_is_a_no_op() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (5, 4), (0, 0)], 2);
        let (next, _) = w.apply(&s, &[Move::Pass, Move::Stay, Move::Stay], &[0, 1, 2]);
        assert_eq!(next, s);
    }

    #[test]
    fn scoring_west_and_own_goal_east() {
        let w = world(OpponentKind::Random);
        let s = state(&[(0, 1), (5, 4), (3, 4)], 0);
        let (next, r) = w.apply(&s, &[Move::West, Move::Stay, Move::Stay], &[0, 1, 2]);
        assert_eq!((next.goal, r), (Some(Goal::West), 1.0));
        assert!(w.is_terminal(&next));

        let s = state(&[(5, 2), (5, 4), (3, 4)], 0);
        let (next, r) = w.apply(&s, &[Move::East, Move::Stay, Move::Stay], &[0, 1, 2]);
        assert_eq!((next.goal, r), (Some(Goal::East), -1.0));

        // Off the field outside the goal mouth: nothing happens.
        let s = state(&[(0, 4), (5, 4), (3, 4)], 0);
        let (next, r) = w.apply(&s, &[Move::West, Move::Stay, Move::Stay], &[0, 1, 2]);
        assert_eq!((next, r), (s, 0.0));

        // Without the ball a player cannot score.
        let s = state(&[(0, 1), (5, 4), (3, 4)], 2);
        let (next, r) = w.apply(&s, &[Move::West, Move::Stay, Move::Stay], &[0, 1, 2]);
        assert_eq!((next.goal, r), (None, 0.0));
    }

    #[test]
    fn earlier_mover_wins_a_contested_cell() {
        let w = world(OpponentKind::Random);
        let s = state(&[(3, 2), (3, 4), (0, 0)], 1);
        let moves = [Move::North, Move::South, Move::Stay];
        let (a, _) = w.apply(&s, &moves, &[0, 1, 2]);
        assert_eq!(a.positions[0], Cell::new(3, 3));
        assert_eq!(a.positions[1], Cell::new(3, 4));
        // Player 1 bumped into player 0 and handed over the ball.
        assert_eq!(a.possessor, 0);
        let (b, _) = w.apply(&s, &moves, &[1, 0, 2]);
        assert_eq!(b.positions[1], Cell::new(3, 3));
        assert_eq!(b.positions[0], Cell::new(3, 2));
    }

    #[test]
    fn corner_observation() {
        let w = world(OpponentKind::Random);
        let s = state(&[(5, 0), (5, 1), (0, 0)], 1);
        let o = w.observation(&s, 0);
        assert_eq!(o.ball, BallHolder::Teammate);
        assert_eq!(
            o.neighbours,
            [
                CellStatus::Occupied,
                CellStatus::OutOfField,
                CellStatus::OutOfField,
                CellStatus::Open
            ]
        );
        let o2 = w.observation(&s, 1);
        assert_eq!(o2.ball, BallHolder::SelfHeld);
        let s = state(&[(5, 0), (5, 1), (0, 0)], 2);
        assert_eq!(w.observation(&s, 0).ball, BallHolder::OpponentSide);
    }

    #[test]
    fn observation_codes_round_trip() {
        for code in 0..OBSERVATION_COUNT {
            assert_eq!(SoccerObservation::decode(code).unwrap().encode(), code);
        }
        assert!(SoccerObservation::decode(OBSERVATION_COUNT).is_none());
    }

    #[test]
    fn greedy_carrier_heads_for_the_east_goal() {
        let w = world(OpponentKind::Greedy);
        let s = state(&[(4, 4), (5, 4), (1, 2)], 2);
        let mut rng = StreamRng::from_seed(3);
        for _ in 0..100 {
            assert_eq!(
                w.opponent_action(OpponentKind::Greedy, &s, 2, &mut rng),
                Move::East
            );
        }
        let s = state(&[(4, 4), (5, 4), (5, 2)], 2);
        assert_eq!(
            w.opponent_action(OpponentKind::Greedy, &s, 2, &mut rng),
            Move::East
        );
    }

    #[test]
    fn greedy_chaser_waits_next_to_the_carrier() {
        let w = world(OpponentKind::Greedy);
        let s = state(&[(3, 2), (5, 4), (2, 2)], 0);
        let mut rng = StreamRng::from_seed(4);
        assert_eq!(
            w.opponent_action(OpponentKind::Greedy, &s, 2, &mut rng),
            Move::Stay
        );
        let s = state(&[(4, 2), (5, 4), (0, 2)], 0);
        assert_eq!(
            w.opponent_action(OpponentKind::Greedy, &s, 2, &mut rng),
            Move::East
        );
        let s = state(&[(4, 2), (5, 4), (4, 0)], 0);
        assert_eq!(
            w.opponent_action(OpponentKind::Greedy, &s, 2, &mut rng),
            Move::North
        );
    }

    #[test]
    fn defensive_never_leaves_goal_area() {
        let w = world(OpponentKind::Defensive);
        let area = w.goal_area();
        let mut rng = StreamRng::from_seed(5);
        for start in area {
            let s = SoccerState {
                positions: smallvec![Cell::new(4, 4), Cell::new(5, 0), start],
                possessor: 0,
                goal: None,
            };
            for _ in 0..10_000 {
                let m = w.opponent_action(OpponentKind::Defensive, &s, 2, &mut rng);
                let dest = start.offset(m.delta().unwrap_or((0, 0)));
                assert!(area.contains(&dest), "{m:?} from {start:?}");
                assert_ne!(m, Move::Pass);
            }
        }
    }

    #[test]
    fn defensive_walks_back_to_goal_area() {
        let w = world(OpponentKind::Defensive);
        let mut s = state(&[(5, 4), (5, 3), (2, 4)], 0);
        let mut rng = StreamRng::from_seed(6);
        for _ in 0..4 {
            let m = w.opponent_action(OpponentKind::Defensive, &s, 2, &mut rng);
            let (next, _) = w.apply(&s, &[Move::Stay, Move::Stay, m], &[2, 0, 1]);
            s = next;
        }
        assert!(w.goal_area().contains(&s.positions[2]));
    }

    #[test]
    fn random_opponent_is_uniform() {
        let w = world(OpponentKind::Random);
        let s = state(&[(4, 4), (5, 4), (1, 2)], 0);
        let mut rng = StreamRng::from_seed(7);
        let mut counts = [0usize; 6];
        let n = 100_000;
        for _ in 0..n {
            let m = w.opponent_action(OpponentKind::Random, &s, 2, &mut rng);
            counts[Move::ALL.iter().position(|&x| x == m).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 6.0).abs() < 0.02);
        }
    }

    #[test]
    fn no_pass_world_has_five_actions() {
        let w = SoccerWorld::new(SoccerConfig::one_on_two(OpponentKind::Random).without_pass());
        assert_eq!(w.agents()[0].action_count, 5);
        assert_eq!(w.learner_move(4), Move::Stay);
    }

    #[test]
    fn state_keys_are_distinct() {
        let w = SoccerWorld::new(SoccerConfig::two_on_two());
        let mut rng = StreamRng::from_seed(8);
        let mut seen = std::collections::HashMap::new();
        for _ in 0..20_000 {
            let s = w.sample_initial(&mut rng);
            let k = w.state_key(&s);
            if let Some(prev) = seen.insert(k, s.clone()) {
                assert_eq!(prev, s);
            }
        }
    }
}
