//! Two learners against a greedy and a defensive opponent. The full state
//! space is too large for a tabular central learner, so only the
//! local-observation Q-learner is compared.
//!
//!     cargo run --release --example two_vs_two [trials]

use dgd::envs::Scenario;
use dgd::harness::{quick_config, run_experiment, Algorithm};

fn main() -> dgd::Result<()> {
    let trials = std::env::args().nth(1).unwrap_or_else(|| "20000".into());
    let every = (trials.parse::<usize>().expect("trial count") / 4)
        .max(1)
        .to_string();
    for (label, algo) in [("DGD", Algorithm::Dgd), ("central Q", Algorithm::QCentral)] {
        let cfg = quick_config(
            Scenario::SoccerTwoOnTwo,
            algo,
            &[("trials", &trials), ("eval-every", &every), ("runs", "5")],
        )?;
        let set = run_experiment(&cfg)?;
        for r in &set.rows {
            println!(
                "{label:<10} trial {:>7}  mean {:>6.3}  std {:.3}",
                r.trial, r.mean_payoff, r.std_payoff
            );
        }
    }
    Ok(())
}
