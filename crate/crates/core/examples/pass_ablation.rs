//! Removes the Pass action from the learners and measures the damage
//! against each opponent.
//!
//!     cargo run --release --example pass_ablation [trials]

use dgd::envs::soccer::OpponentKind;
use dgd::envs::Scenario;
use dgd::harness::stats::sign_test;
use dgd::harness::{quick_config, run_experiment, Algorithm};

fn main() -> dgd::Result<()> {
    let trials = std::env::args().nth(1).unwrap_or_else(|| "20000".into());
    let base = [("trials", trials.as_str()), ("eval-every", trials.as_str())];
    for kind in [
        OpponentKind::Defensive,
        OpponentKind::Greedy,
        OpponentKind::Random,
    ] {
        let scenario = Scenario::Soccer(kind);
        let with = run_experiment(&quick_config(scenario, Algorithm::Dgd, &base)?)?.final_payoffs();
        let mut pairs = base.to_vec();
        pairs.push(("no-pass", "true"));
        let without =
            run_experiment(&quick_config(scenario, Algorithm::Dgd, &pairs)?)?.final_payoffs();
        let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let t = sign_test(&with, &without);
        println!(
            "{:<10} with Pass {:.3}  without {:.3}  wins/losses/ties {}/{}/{}  p = {:.4}",
            kind.name(),
            mean(&with),
            mean(&without),
            t.wins,
            t.losses,
            t.ties,
            t.p_greater
        );
    }
    Ok(())
}
