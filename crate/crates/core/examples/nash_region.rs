//! Classifies coordination-game policies as Nash equilibria or not and
//! prints the region where agent 1 always takes the safe branch.
//!
//!     cargo run --release --example nash_region

use dgd::analysis::{
    best_response_gap, is_nash, strict_margin, CoordinationProfile, PolicyPoint, Search, NASH_EPS,
};

fn main() -> dgd::Result<()> {
    let model = CoordinationProfile { gamma: 0.99 };
    let search = Search::default();

    println!("agent 1 safe (p1_s1 = 0); rows p1_s2, columns p2_s2; N = Nash");
    print!("      ");
    for j in 0..=20 {
        print!("{:>4}", j * 5);
    }
    println!();
    for i in 0..=10 {
        let q = i as f64 / 10.0;
        print!("{q:>5.1} ");
        for j in 0..=20 {
            let r = j as f64 / 20.0;
            let prof = CoordinationProfile::profile(PolicyPoint::new(0.0, q, r)?);
            let mark = if is_nash(&model, &prof, NASH_EPS, search).is_nash {
                "N"
            } else {
                "."
            };
            print!("{mark:>4}");
        }
        println!();
    }

    for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, 0.0, 0.0), (0.0, 0.5, 0.5)] {
        let prof = CoordinationProfile::profile(PolicyPoint::new(a, b, c)?);
        println!(
            "{{{a}, {b}; {c}}}: Nash {}, strict margin {:.4}",
            is_nash(&model, &prof, NASH_EPS, search).is_nash,
            strict_margin(&model, &prof, 1e-3)
        );
    }
    let off = CoordinationProfile::profile(PolicyPoint::new(0.0, 1.0, 0.9)?);
    let r = best_response_gap(&model, &off, 0, search);
    println!(
        "{{0, 1; 0.9}}: agent 1 gains {:.4} by switching to {:?}",
        r.gap, r.argmax
    );
    Ok(())
}
