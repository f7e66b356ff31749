//! Paired sign tests over per-seed results.

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
fn upper_tail(k: usize, n: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    // Exact for the small n used here: sum the binomial coefficients.
    let mut c = 1.0f64; // C(n, 0)
    let mut total = 0.0;
    for i in 0..=n {
        if i >= k {
            total += c;
        }
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    total / 2f64.powi(n as i32)
}

/// Outcome of a paired sign test; ties are dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignTest {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// `P(wins >= observed)` under the null.
    pub p_greater: f64,
    pub p_two_sided: f64,
}

pub fn sign_test(a: &[f64], b: &[f64]) -> SignTest {
    assert_eq!(a.len(), b.len(), "paired samples");
    let wins = a.iter().zip(b).filter(|(x, y)| x > y).count();
    let losses = a.iter().zip(b).filter(|(x, y)| x < y).count();
    let n = wins + losses;
    let p_greater = upper_tail(wins, n);
    let p_less = upper_tail(losses, n);
    SignTest {
        wins,
        losses,
        ties: a.len() - n,
        p_greater,
        p_two_sided: (2.0 * p_greater.min(p_less)).min(1.0),
    }
}
