//! Trains each agent separately and, in lockstep, one central learner over
//! the joint parameter vector. With shared random streams the two produce
//! the same weights after every trial.
//!
//!     cargo run --release --example dgd_joint_equivalence

use dgd::envs::soccer::OpponentKind;
use dgd::envs::Scenario;
use dgd::harness::{equivalence_report, quick_config, Algorithm};

fn main() -> dgd::Result<()> {
    for (scenario, trials) in [
        (Scenario::Coordination, "1000"),
        (Scenario::Soccer(OpponentKind::Greedy), "100"),
        (Scenario::SoccerTwoOnTwo, "50"),
    ] {
        let cfg = quick_config(
            scenario,
            Algorithm::Dgd,
            &[("trials", trials), ("fsc-states", "2")],
        )?;
        let rows = equivalence_report(&cfg)?;
        let worst = rows.iter().map(|r| r.max_rel_diff).fold(0.0, f64::max);
        println!(
            "{:<18} {trials:>5} trials  max relative divergence {worst:e}",
            scenario.to_string()
        );
    }
    Ok(())
}
