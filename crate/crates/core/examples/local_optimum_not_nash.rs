//! A separable two-agent payoff with two modes along agent 1's axis:
//! gradient ascent settles on the lower one, where each agent's gradient
//! vanishes, yet agent 1 could do far better by jumping to the other mode.
//!
//!     cargo run --release --example local_optimum_not_nash

use dgd::analysis::{best_response_gap, strict_margin, Search, TwoModeFixture};

fn main() {
    let fx = TwoModeFixture::default();
    let (end, steps) = fx.ascend([0.2, 0.35], 0.01, 1e-9, 200_000);
    let prof = vec![vec![end[0]], vec![end[1]]];
    println!(
        "ascent from (0.2, 0.35) stopped at ({:.4}, {:.4}) after {steps} steps",
        end[0], end[1]
    );
    println!(
        "value there {:.4}, local margin {:.2e}",
        fx.value_at(end[0], end[1]),
        strict_margin(&fx, &prof, 1e-3)
    );
    for agent in 0..2 {
        let r = best_response_gap(&fx, &prof, agent, Search::default());
        println!(
            "agent {}: best response {:.4} gains {:.4}",
            agent + 1,
            r.argmax[0],
            r.gap
        );
    }
}
