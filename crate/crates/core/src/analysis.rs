//! Exact oracles for small games: closed-form and enumerated values,
//! finite-difference gradients, best responses and Nash classification.

use crate::error::{Error, Result};
use crate::game::{Game, TabularGame};
use crate::policy::{AgentPolicy, Policy, SoftmaxReactivePolicy};

/// Probabilities of action `a`: agent 1 in `s1`, agent 1 in `s2`, agent 2 in
/// `s2`. Nothing else affects the coordination game's value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyPoint {
    pub p1_s1: f64,
    pub p1_s2: f64,
    pub p2_s2: f64,
}

impl PolicyPoint {
    pub fn new(p1_s1: f64, p1_s2: f64, p2_s2: f64) -> Result<Self> {
        for p in [p1_s1, p1_s2, p2_s2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(PolicyPoint {
            p1_s1,
            p1_s2,
            p2_s2,
        })
    }

    /// Reactive Boltzmann policies realising the point, with weights
    /// `(+l/2, -l/2)` where `l = theta * logit(p)`, clamped to
    /// `max_weight`. Agent 2's weights in `s1`/`s3` are zero (irrelevant).
    pub fn to_policies(self, theta: f64, max_weight: f64) -> Result<Vec<AgentPolicy>> {
        let half = |p: f64| (theta * (p / (1.0 - p)).ln() / 2.0).clamp(-max_weight, max_weight);
        let mut a1 = SoftmaxReactivePolicy::new(2, 2, theta)?;
        let (x, y) = (half(self.p1_s1), half(self.p1_s2));
        a1.set_weights(&[x, -x, y, -y])?;
        let mut a2 = SoftmaxReactivePolicy::new(2, 2, theta)?;
        let z = half(self.p2_s2);
        a2.set_weights(&[0.0, 0.0, z, -z])?;
        Ok(vec![AgentPolicy::Reactive(a1), AgentPolicy::Reactive(a2)])
    }
}

/// Probability that the two agents match in `s2`.
fn match_probability(p1: f64, p2: f64) -> f64 {
    p1 * p2 + (1.0 - p1) * (1.0 - p2)
}

/// Closed-form value of the coordination game; both rewards arrive at
/// step 2, hence the `gamma^2`.
pub fn coordination_value(p: PolicyPoint, gamma: f64) -> f64 {
    let c = match_probability(p.p1_s2, p.p2_s2);
    gamma * gamma * (p.p1_s1 * (20.0 * c - 10.0) + (1.0 - p.p1_s1) * 5.0)
}

/// Result of an exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactValue {
    pub value: f64,
    /// Probability of still being in a non-terminal state at the horizon.
    pub unterminated_mass: f64,
}

#[derive(Clone, Debug)]
struct Branch {
    prob: f64,
    state: usize,
    internal: Vec<usize>,
    obs: Vec<usize>,
}

/// Every `(product, prob)` over per-factor outcome lists.
fn product<T: Clone>(factors: &[Vec<(T, f64)>]) -> Vec<(Vec<T>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for (prefix, p) in &out {
            for (x, q) in f {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push((v, p * q));
            }
        }
        out = next;
    }
    out
}

fn nonzero(probs: &[f64]) -> Vec<(usize, f64)> {
    probs
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .collect()
}

/// Expected discounted return by enumerating every history up to
/// `horizon`, internal-state branches included. Fails once more than
/// `budget` live branches would be needed.
pub fn exact_value(
    game: &TabularGame,
    policies: &[&dyn Policy],
    gamma: f64,
    horizon: usize,
    budget: usize,
) -> Result<ExactValue> {
    let m = game.agents().len();
    if policies.len() != m {
        return Err(Error::Model(format!(
            "{} policies for {m} agents",
            policies.len()
        )));
    }
    let joint = game.joint_actions();
    let check = |n: usize| {
        if n > budget {
            Err(Error::BudgetExceeded { budget })
        } else {
            Ok(())
        }
    };

    let mut frontier = Vec::new();
    for (s, ps) in nonzero(game.initial_distribution()) {
        let mut factors: Vec<Vec<((usize, usize), f64)>> = Vec::with_capacity(m);
        for (i, pol) in policies.iter().enumerate() {
            let starts = nonzero(&pol.initial_distribution());
            let obs = nonzero(game.observation_distribution(i, s));
            factors.push(
                starts
                    .iter()
                    .flat_map(|&(n, pn)| obs.iter().map(move |&(o, po)| ((n, o), pn * po)))
                    .collect(),
            );
        }
        for (combo, p) in product(&factors) {
            frontier.push(Branch {
                prob: ps * p,
                state: s,
                internal: combo.iter().map(|c| c.0).collect(),
                obs: combo.iter().map(|c| c.1).collect(),
            });
        }
        check(frontier.len())?;
    }

    let mut value = 0.0;
    let mut weight = 1.0;
    for _ in 0..horizon {
        weight *= gamma;
        let mut next_frontier = Vec::new();
        for b in frontier {
            if game.is_terminal(&b.state) {
                continue;
            }
            // Per agent: (next internal state, action) pairs.
            let decisions: Vec<Vec<((usize, usize), f64)>> = policies
                .iter()
                .enumerate()
                .map(|(i, pol)| {
                    let mut v = Vec::new();
                    for (n2, pn) in nonzero(&pol.transition_distribution(b.internal[i], b.obs[i])) {
                        for (a, pa) in nonzero(&pol.action_distribution(n2, b.obs[i])) {
                            v.push(((n2, a), pn * pa));
                        }
                    }
                    v
                })
                .collect();
            for (combo, pd) in product(&decisions) {
                let actions: Vec<usize> = combo.iter().map(|c| c.1).collect();
                let j = joint.encode(&actions);
                let p = b.prob * pd;
                value += p * weight * game.reward(b.state, j);
                for &(s2, pt) in game.transition_distribution(b.state, j) {
                    if pt == 0.0 {
                        continue;
                    }
                    let obs_factors: Vec<Vec<(usize, f64)>> = (0..m)
                        .map(|i| nonzero(game.observation_distribution(i, s2)))
                        .collect();
                    for (obs, po) in product(&obs_factors) {
                        next_frontier.push(Branch {
                            prob: p * pt * po,
                            state: s2,
                            internal: combo.iter().map(|c| c.0).collect(),
                            obs,
                        });
                    }
                }
                check(next_frontier.len())?;
            }
        }
        frontier = next_frontier;
    }
    let unterminated_mass = frontier
        .iter()
        .filter(|b| !game.is_terminal(&b.state))
        .map(|b| b.prob)
        .sum();
    Ok(ExactValue {
        value,
        unterminated_mass,
    })
}

/// Exact value with the concatenated weights `w` loaded into copies of
/// `policies` (in agent order).
pub fn exact_value_at_weights(
    game: &TabularGame,
    policies: &[AgentPolicy],
    w: &[f64],
    gamma: f64,
    horizon: usize,
) -> Result<f64> {
    let mut owned = policies.to_vec();
    let mut off = 0;
    for p in &mut owned {
        let n = p.layout().len();
        let slice = w.get(off..off + n).ok_or(Error::LayoutMismatch {
            expected: off + n,
            found: w.len(),
        })?;
        p.set_weights(slice)?;
        off += n;
    }
    if off != w.len() {
        return Err(Error::LayoutMismatch {
            expected: off,
            found: w.len(),
        });
    }
    let refs: Vec<&dyn Policy> = owned.iter().map(|p| p as &dyn Policy).collect();
    Ok(exact_value(game, &refs, gamma, horizon, 1 << 20)?.value)
}

/// Central differences `(f(x + h e_k) - f(x - h e_k)) / 2h`.
pub fn finite_diff_gradient(f: impl Fn(&[f64]) -> f64, point: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "step must be positive");
    let mut x = point.to_vec();
    (0..point.len())
        .map(|k| {
            x[k] = point[k] + h;
            let up = f(&x);
            x[k] = point[k] - h;
            let down = f(&x);
            x[k] = point[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// A common-payoff game over box-bounded per-agent strategy vectors.
pub trait ProfileValue {
    fn agent_count(&self) -> usize;
    fn dims(&self, agent: usize) -> usize;
    fn bounds(&self, _agent: usize) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn value(&self, profile: &[Vec<f64>]) -> f64;
}

/// The coordination game in probability coordinates: agent 0 plays
/// `[p1_s1, p1_s2]`, agent 1 plays `[p2_s2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinationProfile {
    pub gamma: f64,
}

impl CoordinationProfile {
    pub fn profile(p: PolicyPoint) -> Vec<Vec<f64>> {
        vec![vec![p.p1_s1, p.p1_s2], vec![p.p2_s2]]
    }
}

impl ProfileValue for CoordinationProfile {
    fn agent_count(&self) -> usize {
        2
    }
    fn dims(&self, agent: usize) -> usize {
        [2, 1][agent]
    }
    fn value(&self, profile: &[Vec<f64>]) -> f64 {
        let p = PolicyPoint {
            p1_s1: profile[0][0],
            p1_s2: profile[0][1],
            p2_s2: profile[1][0],
        };
        coordination_value(p, self.gamma)
    }
}

/// Grid resolution and refinement tolerance for best-response search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Search {
    /// Grid intervals per dimension.
    pub intervals: usize,
    pub refine_tol: f64,
}

impl Default for Search {
    fn default() -> Self {
        Search {
            intervals: 1000,
            refine_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponseReport {
    pub agent: usize,
    pub current: f64,
    pub best: f64,
    pub gap: f64,
    pub argmax: Vec<f64>,
}

fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

/// Best unilateral deviation for `agent`: exhaustive grid (exact grid
/// points `lo + k (hi - lo) / intervals`), then coordinate-wise
/// golden-section refinement inside the neighbouring cells.
pub fn best_response_gap(
    model: &impl ProfileValue,
    profile: &[Vec<f64>],
    agent: usize,
    search: Search,
) -> BestResponseReport {
    let d = model.dims(agent);
    let (lo, hi) = model.bounds(agent);
    let n = search.intervals;
    let grid = |k: usize| {
        if k == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / n as f64
        }
    };
    let current = model.value(profile);

    let mut trial = profile.to_vec();
    let mut eval = |x: &[f64]| {
        trial[agent].copy_from_slice(x);
        model.value(&trial)
    };
    let mut best_x = profile[agent].clone();
    let mut best = current;
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for (xi, &k) in x.iter_mut().zip(&idx) {
            *xi = grid(k);
        }
        let v = eval(&x);
        if v > best {
            best = v;
            best_x.copy_from_slice(&x);
        }
        // Odometer increment.
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] <= n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }

    let cell = (hi - lo) / n as f64;
    for _ in 0..3 {
        for k in 0..d {
            let a = (best_x[k] - cell).max(lo);
            let b = (best_x[k] + cell).min(hi);
            let mut probe = best_x.clone();
            let (xk, v) = golden_max(
                |t| {
                    probe[k] = t;
                    eval(&probe)
                },
                a,
                b,
                search.refine_tol,
            );
            if v > best {
                best = v;
                best_x[k] = xk;
            }
        }
    }
    BestResponseReport {
        agent,
        current,
        best,
        gap: best - current,
        argmax: best_x,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NashReport {
    pub is_nash: bool,
    pub agents: Vec<BestResponseReport>,
}

/// Default equilibrium tolerance for exact oracles.
pub const NASH_EPS: f64 = 1e-9;

/// Nash iff no agent can gain more than `eps` by deviating alone.
pub fn is_nash(
    model: &impl ProfileValue,
    profile: &[Vec<f64>],
    eps: f64,
    search: Search,
) -> NashReport {
    let agents: Vec<_> = (0..model.agent_count())
        .map(|i| best_response_gap(model, profile, i, search))
        .collect();
    NashReport {
        is_nash: agents.iter().all(|r| r.gap <= eps),
        agents,
    }
}

/// Smallest loss `V(profile) - V(perturbed)` over `+-delta` moves of single
/// coordinates that stay inside the bounds. Positive means every such
/// unilateral perturbation strictly hurts.
pub fn strict_margin(model: &impl ProfileValue, profile: &[Vec<f64>], delta: f64) -> f64 {
    let v = model.value(profile);
    let mut margin = f64::INFINITY;
    let mut p = profile.to_vec();
    for i in 0..model.agent_count() {
        let (lo, hi) = model.bounds(i);
        for k in 0..model.dims(i) {
            let orig = p[i][k];
            for s in [-delta, delta] {
                let x = orig + s;
                if x < lo || x > hi {
                    continue;
                }
                p[i][k] = x;
                margin = margin.min(v - model.value(&p));
            }
            p[i][k] = orig;
        }
    }
    margin
}

/// One row of a grid classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NashRow {
    pub point: PolicyPoint,
    pub value: f64,
    pub gap_agent1: f64,
    pub gap_agent2: f64,
    pub is_nash: bool,
}

/// Classifies every point `(i, j, k) / intervals` of the unit cube.
pub fn nash_grid(intervals: usize, gamma: f64, search: Search) -> Vec<NashRow> {
    use rayon::prelude::*;
    let n = intervals;
    let g = |k: usize| k as f64 / n as f64;
    let model = CoordinationProfile { gamma };
    let points: Vec<PolicyPoint> = (0..=n)
        .flat_map(|i| (0..=n).flat_map(move |j| (0..=n).map(move |k| (i, j, k))))
        .map(|(i, j, k)| PolicyPoint {
            p1_s1: g(i),
            p1_s2: g(j),
            p2_s2: g(k),
        })
        .collect();
    points
        .into_par_iter()
        .map(|point| {
            let r = is_nash(
                &model,
                &CoordinationProfile::profile(point),
                NASH_EPS,
                search,
            );
            NashRow {
                point,
                value: coordination_value(point, gamma),
                gap_agent1: r.agents[0].gap,
                gap_agent2: r.agents[1].gap,
                is_nash: r.is_nash,
            }
        })
        .collect()
}

/// Separable `V(x, y) = f(x) g(y)` on the unit square: `f` has a lower mode
/// at `a` and a higher one at `b`, `g` peaks at `c`. `(a, c)` is a local
/// maximum, yet agent 1 gains by jumping to `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeFixture {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub width: f64,
    /// Height of the mode at `b` relative to the one at `a`.
    pub ratio: f64,
}

impl Default for TwoModeFixture {
    fn default() -> Self {
        TwoModeFixture {
            a: 0.25,
            b: 0.75,
            c: 0.5,
            width: 0.08,
            ratio: 2.0,
        }
    }
}

impl TwoModeFixture {
    fn bump(x: f64, at: f64, width: f64) -> f64 {
        (-(x - at).powi(2) / (2.0 * width * width)).exp()
    }

    pub fn f(&self, x: f64) -> f64 {
        Self::bump(x, self.a, self.width) + self.ratio * Self::bump(x, self.b, self.width)
    }

    pub fn g(&self, y: f64) -> f64 {
        Self::bump(y, self.c, 2.0 * self.width)
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.f(x) * self.g(y)
    }

    /// Plain gradient ascent (finite-difference gradient) from `start`;
    /// returns the final point and the number of steps taken.
    pub fn ascend(
        &self,
        start: [f64; 2],
        rate: f64,
        tol: f64,
        max_steps: usize,
    ) -> ([f64; 2], usize) {
        let mut p = start;
        for step in 0..max_steps {
            let g = finite_diff_gradient(|w| self.value_at(w[0], w[1]), &p, 1e-6);
            if g.iter().map(|x| x * x).sum::<f64>().sqrt() < tol {
                return (p, step);
            }
            p[0] = (p[0] + rate * g[0]).clamp(0.0, 1.0);
            p[1] = (p[1] + rate * g[1]).clamp(0.0, 1.0);
        }
        (p, max_steps)
    }
}

impl ProfileValue for TwoModeFixture {
    fn agent_count(&self) -> usize {
        2
    }
    fn dims(&self, _agent: usize) -> usize {
        1
    }
    fn value(&self, profile: &[Vec<f64>]) -> f64 {
        self.value_at(profile[0][0], profile[1][0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::coordination;

    const G: f64 = 0.99;

    fn pt(a: f64, b: f64, c: f64) -> PolicyPoint {
        PolicyPoint::new(a, b, c).unwrap()
    }

    fn exact(p: PolicyPoint, gamma: f64) -> ExactValue {
        let game = coordination::game();
        let pols = p.to_policies(1.0, 1e3).unwrap();
        let refs: Vec<&dyn Policy> = pols.iter().map(|x| x as &dyn Policy).collect();
        exact_value(&game, &refs, gamma, 2, 1000).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert!((coordination_value(pt(1.0, 1.0, 1.0), G) - 9.801).abs() < 1e-12);
        for (q, r) in [(0.0, 1.0), (0.3, 0.7), (1.0, 0.0)] {
            assert!((coordination_value(pt(0.0, q, r), G) - G * G * 5.0).abs() < 1e-12);
        }
        assert_eq!(coordination_value(pt(1.0, 0.5, 0.5), G), 0.0);
    }

    #[test]
    fn enumeration_examples() {
        let e = exact(pt(0.5, 0.5, 0.5), G);
        assert!((e.value - G * G * 2.5).abs() < 1e-12);
        assert_eq!(e.unterminated_mass, 0.0);
        assert_eq!(exact(pt(0.3, 0.6, 0.1), 0.0).value, 0.0);
    }

    #[test]
    fn enumeration_agrees_with_closed_form() {
        let n = 20;
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let p = pt(
                        i as f64 / n as f64,
                        j as f64 / n as f64,
                        k as f64 / n as f64,
                    );
                    let a = coordination_value(p, G);
                    let b = exact(p, G).value;
                    assert!((a - b).abs() < 1e-12, "{p:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn short_horizon_reports_unfinished_mass() {
        let e = exact(pt(0.5, 0.5, 0.5), G);
        assert_eq!(e.unterminated_mass, 0.0);
        let game = coordination::game();
        let pols = pt(0.5, 0.5, 0.5).to_policies(1.0, 50.0).unwrap();
        let refs: Vec<&dyn Policy> = pols.iter().map(|x| x as &dyn Policy).collect();
        let e = exact_value(&game, &refs, G, 1, 1000).unwrap();
        assert_eq!(e.value, 0.0);
        assert!((e.unterminated_mass - 1.0).abs() < 1e-15);
        assert!(matches!(
            exact_value(&game, &refs, G, 2, 3),
            Err(Error::BudgetExceeded { budget: 3 })
        ));
    }

    #[test]
    fn finite_differences() {
        assert_eq!(
            finite_diff_gradient(|_| 4.0, &[1.0, 2.0], 1e-3),
            vec![0.0, 0.0]
        );
        let f = |x: &[f64]| coordination_value(pt(x[0], x[1], x[2]), G);
        let g = finite_diff_gradient(f, &[0.5, 1.0 - 1e-4, 1.0 - 1e-4], 1e-5);
        // At p12 = p22 = 1 - 1e-4 the match probability is ~1.
        assert!((g[0] - G * G * 5.0).abs() < 1e-2, "{g:?}");
    }

    #[test]
    fn best_response_examples() {
        let m = CoordinationProfile { gamma: G };
        let s = Search::default();
        for p in [pt(1.0, 1.0, 1.0), pt(0.0, 0.5, 0.5)] {
            let prof = CoordinationProfile::profile(p);
            for agent in 0..2 {
                assert!(best_response_gap(&m, &prof, agent, s).gap.abs() < 1e-12);
            }
        }
        let r = best_response_gap(&m, &CoordinationProfile::profile(pt(0.0, 1.0, 0.9)), 0, s);
        assert!((r.gap - G * G * 3.0).abs() < 1e-9, "{r:?}");
        assert_eq!(r.argmax, vec![1.0, 1.0]);
    }

    #[test]
    fn nash_region() {
        let m = CoordinationProfile { gamma: G };
        let s = Search::default();
        for q in 0..=10 {
            let q = q as f64 / 10.0;
            for r in [0.25, 0.3, 0.5, 0.75] {
                assert!(
                    is_nash(
                        &m,
                        &CoordinationProfile::profile(pt(0.0, q, r)),
                        NASH_EPS,
                        s
                    )
                    .is_nash
                );
            }
            for r in [0.2, 0.8, 0.24, 0.76] {
                assert!(
                    !is_nash(
                        &m,
                        &CoordinationProfile::profile(pt(0.0, q, r)),
                        NASH_EPS,
                        s
                    )
                    .is_nash
                );
            }
        }
        for p in [pt(1.0, 1.0, 1.0), pt(1.0, 0.0, 0.0)] {
            let prof = CoordinationProfile::profile(p);
            assert!(is_nash(&m, &prof, NASH_EPS, s).is_nash);
            assert!(strict_margin(&m, &prof, 1e-3) > 0.0);
        }
        // Sub-optimal equilibria are not strict.
        assert!(strict_margin(&m, &CoordinationProfile::profile(pt(0.0, 0.5, 0.5)), 1e-3) <= 0.0);
    }

    #[test]
    fn two_mode_fixture_has_a_non_nash_local_optimum() {
        let fx = TwoModeFixture::default();
        let (end, steps) = fx.ascend([0.2, 0.35], 0.01, 1e-9, 200_000);
        assert!(steps < 200_000);
        assert!(
            (end[0] - fx.a).abs() < 1e-4 && (end[1] - fx.c).abs() < 1e-4,
            "{end:?}"
        );
        let prof = vec![vec![end[0]], vec![end[1]]];
        assert!(strict_margin(&fx, &prof, 1e-3) > 0.0);
        let r = best_response_gap(&fx, &prof, 0, Search::default());
        assert!(r.gap > 0.1 && (r.argmax[0] - fx.b).abs() < 1e-3, "{r:?}");
    }
}
