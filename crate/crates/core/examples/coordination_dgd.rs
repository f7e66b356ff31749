//! Two agents learn the two-step coordination game with distributed
//! gradient descent. Prints the learning curve averaged over ten runs.
//!
//!     cargo run --release --example coordination_dgd [trials]

use dgd::envs::Scenario;
use dgd::harness::{quick_config, run_experiment, Algorithm};

fn main() -> dgd::Result<()> {
    let trials = std::env::args().nth(1).unwrap_or_else(|| "50000".into());
    let cfg = quick_config(
        Scenario::Coordination,
        Algorithm::Dgd,
        &[("trials", &trials), ("eval-every", "2500")],
    )?;
    let set = run_experiment(&cfg)?;
    println!("{:>7}  {:>6}  {:>6}", "trial", "mean", "std");
    for r in &set.rows {
        println!(
            "{:>7}  {:>6.3}  {:>6.3}",
            r.trial, r.mean_payoff, r.std_payoff
        );
    }
    let finals = set.final_payoffs();
    println!("final payoff per run: {finals:.2?}");
    Ok(())
}
