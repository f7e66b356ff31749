//! Compares the mean of single-episode gradient estimates with the exact
//! gradient of the coordination game's value at a random weight vector.
//!
//!     cargo run --release --example gradient_check [episodes]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dgd::analysis::{exact_value_at_weights, finite_diff_gradient};
use dgd::envs::coordination;
use dgd::game::ExecutionMode;
use dgd::learner::{episode_gradient, DgdTrainer, SumBound, TrainerConfig};
use dgd::policy::{AgentPolicy, Policy, SoftmaxReactivePolicy};
use dgd::rng::{EpisodeId, RunStreams};

fn main() -> dgd::Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .map_or(Ok(200_000), |s| s.parse())
        .expect("episode count");
    let gamma = 0.99;
    let game = coordination::game();
    let mut rng = StdRng::seed_from_u64(42);
    let w: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut pols = Vec::new();
    for i in 0..2 {
        let mut p = SoftmaxReactivePolicy::new(2, 2, 1.0)?;
        p.set_weights(&w[4 * i..4 * i + 4])?;
        pols.push(AgentPolicy::Reactive(p));
    }
    let exact = finite_diff_gradient(
        |x| exact_value_at_weights(&game, &pols, x, gamma, 2).unwrap(),
        &w,
        1e-5,
    );

    let cfg = TrainerConfig {
        learning_rate: 0.0,
        discount: gamma,
        trials: 0,
        eval_every: 1,
        eval_episodes: 1,
        sum_bound: SumBound::Inclusive,
        max_steps: None,
        execution: ExecutionMode::Sequential,
    };
    let trainer = DgdTrainer::new(pols.clone(), cfg, RunStreams::new(42, 0));
    let mut sum = [0.0; 8];
    let mut sq = [0.0; 8];
    for e in 0..n {
        let h = trainer.sample_episode(&game, EpisodeId::Free(e));
        for (i, p) in pols.iter().enumerate() {
            let g = episode_gradient(
                &h.agent_view(i),
                p as &dyn Policy,
                gamma,
                SumBound::Inclusive,
            );
            for (k, v) in g.values.iter().enumerate() {
                sum[4 * i + k] += v;
                sq[4 * i + k] += v * v;
            }
        }
    }
    println!(
        "{:<28} {:>10} {:>10} {:>8}",
        "weight", "estimate", "exact", "z"
    );
    let layout = pols[0].layout();
    for k in 0..8 {
        let mean = sum[k] / n as f64;
        let se = ((sq[k] / n as f64 - mean * mean) / n as f64).sqrt();
        let name = format!("agent {} {}", k / 4, layout.coordinate(k % 4).unwrap());
        let z = if se > 0.0 {
            (mean - exact[k]) / se
        } else {
            0.0
        };
        println!("{name:<28} {mean:>10.5} {:>10.5} {z:>8.2}", exact[k]);
    }
    Ok(())
}
