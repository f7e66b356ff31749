//! Learners with four-state finite-state controllers instead of reactive
//! tables; the internal state lets them remember, e.g., that they just
//! passed. Also writes each run's final weights as checkpoint files.
//!
//!     cargo run --release --example fsc_soccer [trials]

use dgd::envs::soccer::OpponentKind;
use dgd::envs::Scenario;
use dgd::harness::{quick_config, run_experiment, Algorithm};
use dgd::learner::parse_checkpoint;
use dgd::policy::{FiniteStateController, Policy};

fn main() -> dgd::Result<()> {
    let trials = std::env::args().nth(1).unwrap_or_else(|| "10000".into());
    let dir = std::env::temp_dir().join("dgd-fsc-checkpoints");
    let dir_s = dir.to_string_lossy().into_owned();
    let every = (trials.parse::<usize>().expect("trial count") / 5)
        .max(1)
        .to_string();
    for states in ["1", "4"] {
        let cfg = quick_config(
            Scenario::Soccer(OpponentKind::Greedy),
            Algorithm::Dgd,
            &[
                ("trials", &trials),
                ("eval-every", &every),
                ("runs", "4"),
                ("fsc-states", states),
                ("checkpoint-dir", &dir_s),
            ],
        )?;
        let set = run_experiment(&cfg)?;
        let curve: Vec<String> = set
            .rows
            .iter()
            .map(|r| format!("{:.3}", r.mean_payoff))
            .collect();
        println!("{states} internal state(s): {}", curve.join("  "));
    }

    // The last config written was the 4-state one.
    let text =
        std::fs::read_to_string(dir.join("run0.txt")).map_err(|e| dgd::Error::io(&dir, e))?;
    let layout = FiniteStateController::new(4, 243, 6, 1.0)?.layout().clone();
    let (trial, params) = parse_checkpoint(&text, &[layout.clone(), layout])?;
    println!(
        "checkpoint after trial {trial}: {} weights per agent in {}",
        params[0].values.len(),
        dir.display()
    );
    Ok(())
}
