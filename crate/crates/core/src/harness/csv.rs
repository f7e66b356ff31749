use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::NashRow;
use crate::error::{Error, Result};
use crate::learner::LearningCurve;

/// Aggregate of all runs at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub trial: usize,
    pub mean_payoff: f64,
    /// Sample standard deviation across runs (0 for a single run).
    pub std_payoff: f64,
    pub runs: usize,
}

/// Per-checkpoint mean and spread over runs, plus the runs themselves when
/// they are known (not after reading a CSV back).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveSet {
    pub rows: Vec<CurveRow>,
    pub per_run: Vec<LearningCurve>,
}

impl CurveSet {
    pub fn aggregate(curves: Vec<LearningCurve>) -> Result<Self> {
        let first = curves
            .first()
            .ok_or_else(|| Error::Config("no runs to aggregate".into()))?;
        let n = curves.len();
        let mut rows = Vec::with_capacity(first.points.len());
        for (k, p) in first.points.iter().enumerate() {
            let values: Vec<f64> = curves
                .iter()
                .map(|c| match c.points.get(k) {
                    Some(q) if q.trial == p.trial => Ok(q.mean_payoff),
                    _ => Err(Error::Config("runs disagree on checkpoints".into())),
                })
                .collect::<Result<_>>()?;
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            rows.push(CurveRow {
                trial: p.trial,
                mean_payoff: mean,
                std_payoff: std,
                runs: n,
            });
        }
        Ok(CurveSet {
            rows,
            per_run: curves,
        })
    }

    /// Each run's payoff at the last checkpoint.
    pub fn final_payoffs(&self) -> Vec<f64> {
        self.per_run
            .iter()
            .filter_map(LearningCurve::final_payoff)
            .collect()
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.rows.last().map(|r| r.mean_payoff)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,mean_payoff,std_payoff,runs\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{}",
                r.trial,
                format_g(r.mean_payoff),
                format_g(r.std_payoff),
                r.runs
            )
            .unwrap();
        }
        s
    }
}

/// `printf("%g")`: 6 significant digits, trailing zeros dropped, exponent
/// form below 1e-4 and from 1e6 up.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub fn write_csv(set: &CurveSet, path: &Path) -> Result<()> {
    std::fs::write(path, set.to_csv()).map_err(|e| Error::io(path, e))
}

/// Parses the output of [`CurveSet::to_csv`].
pub fn read_csv(text: &str) -> Result<CurveSet> {
    let mut lines = text.lines();
    if lines.next() != Some("trial,mean_payoff,std_payoff,runs") {
        return Err(Error::Parse("missing curve CSV header".into()));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let bad = || Error::Parse(format!("row {}: `{line}`", n + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad());
        }
        rows.push(CurveRow {
            trial: f[0].parse().map_err(|_| bad())?,
            mean_payoff: f[1].parse().map_err(|_| bad())?,
            std_payoff: f[2].parse().map_err(|_| bad())?,
            runs: f[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(CurveSet {
        rows,
        per_run: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub trial: usize,
    pub max_rel_diff: f64,
}

pub fn write_equivalence_csv(rows: &[EquivalenceRow], path: &Path) -> Result<()> {
    let mut s = String::from("trial,max_rel_diff\n");
    for r in rows {
        writeln!(s, "{},{}", r.trial, format_g(r.max_rel_diff)).unwrap();
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn nash_csv(rows: &[NashRow]) -> String {
    let mut s = String::from("p1_s1,p1_s2,p2_s2,value,gap_agent1,gap_agent2,nash\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            format_g(r.point.p1_s1),
            format_g(r.point.p1_s2),
            format_g(r.point.p2_s2),
            format_g(r.value),
            format_g(r.gap_agent1),
            format_g(r.gap_agent2),
            r.is_nash
        )
        .unwrap();
    }
    s
}

pub fn write_nash_csv(rows: &[NashRow], path: &Path) -> Result<()> {
    std::fs::write(path, nash_csv(rows)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::CurvePoint;

    fn curve(points: &[(usize, f64)]) -> LearningCurve {
        LearningCurve {
            points: points
                .iter()
                .map(|&(trial, mean_payoff)| CurvePoint { trial, mean_payoff })
                .collect(),
        }
    }

    #[test]
    fn g_formatting() {
        let cases = [
            (9.801, "9.801"),
            (0.0, "0"),
            (1.0, "1"),
            (-0.5, "-0.5"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1.0 / 3.0, "0.333333"),
            (2.0 / 3.0 * 100.0, "66.6667"),
            (999999.5, "1e+06"),
            (1e-17, "1e-17"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g(x), s, "{x}");
        }
    }

    #[test]
    fn aggregation_and_csv_lines() {
        let set = CurveSet::aggregate(vec![
            curve(&[(0, 1.0), (10, 3.0)]),
            curve(&[(0, 3.0), (10, 3.0)]),
        ])
        .unwrap();
        assert_eq!(set.rows[0].mean_payoff, 2.0);
        assert!((set.rows[0].std_payoff - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(set.rows[1].std_payoff, 0.0);
        assert_eq!(
            set.to_csv(),
            "trial,mean_payoff,std_payoff,runs\n0,2,1.41421,2\n10,3,0,2\n"
        );
        let single = CurveSet::aggregate(vec![curve(&[(0, 0.25)])]).unwrap();
        assert_eq!(single.rows[0].std_payoff, 0.0);
        assert!(CurveSet::aggregate(vec![curve(&[(0, 1.0)]), curve(&[(5, 1.0)])]).is_err());
        assert!(CurveSet::aggregate(vec![]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let set = CurveSet::aggregate(vec![
            curve(&[(0, -0.96), (2000, 0.123456789)]),
            curve(&[(0, 0.4), (2000, 1.0 / 7.0)]),
        ])
        .unwrap();
        let back = read_csv(&set.to_csv()).unwrap();
        assert_eq!(back.rows.len(), 2);
        for (a, b) in set.rows.iter().zip(&back.rows) {
            assert_eq!((a.trial, a.runs), (b.trial, b.runs));
            assert!(
                (a.mean_payoff - b.mean_payoff).abs() <= 5e-6 * a.mean_payoff.abs().max(1e-300)
            );
            assert!((a.std_payoff - b.std_payoff).abs() <= 5e-6 * a.std_payoff.abs().max(1e-300));
        }
        assert!(read_csv("wrong\n").is_err());
        assert!(read_csv("trial,mean_payoff,std_payoff,runs\n1,2\n").is_err());
    }
}
