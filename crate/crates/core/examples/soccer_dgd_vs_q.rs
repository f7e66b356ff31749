//! Partially observable soccer: two learners against one fixed opponent.
//! Compares DGD with a central Q-learner that sees either the two local
//! observations or the full state.
//!
//!     cargo run --release --example soccer_dgd_vs_q [greedy|defensive|random] [trials]

use dgd::envs::Scenario;
use dgd::harness::stats::sign_test;
use dgd::harness::{quick_config, run_experiment, Algorithm};

fn main() -> dgd::Result<()> {
    let opponent = std::env::args().nth(1).unwrap_or_else(|| "greedy".into());
    let trials = std::env::args().nth(2).unwrap_or_else(|| "20000".into());
    let scenario: Scenario = format!("soccer-{opponent}").parse()?;
    let every = (trials.parse::<usize>().expect("trial count") / 4)
        .max(1)
        .to_string();
    let base = [("trials", trials.as_str()), ("eval-every", every.as_str())];

    let mut finals = Vec::new();
    for (label, algo, obs) in [
        ("DGD", Algorithm::Dgd, "partial"),
        ("Q, local observations", Algorithm::QCentral, "partial"),
        ("Q, full state", Algorithm::QCentral, "full"),
    ] {
        let mut pairs = base.to_vec();
        pairs.push(("observability", obs));
        let set = run_experiment(&quick_config(scenario, algo, &pairs)?)?;
        let curve: Vec<String> = set
            .rows
            .iter()
            .map(|r| format!("{:.3}", r.mean_payoff))
            .collect();
        println!("{label:<22} {}", curve.join("  "));
        finals.push(set.final_payoffs());
    }
    let t = sign_test(&finals[0], &finals[1]);
    println!(
        "DGD beats local-observation Q on {} of {} seeds ({} ties), one-sided p = {:.4}",
        t.wins,
        finals[0].len(),
        t.ties,
        t.p_greater
    );
    Ok(())
}
