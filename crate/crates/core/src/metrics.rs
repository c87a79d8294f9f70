//! Per-instance and per-batch statistics, and the CSV report format.
//!
//! Quartiles use linear interpolation between order statistics (the "type 7"
//! rule). Regret is aggregated as total actual task time over total ideal task
//! time, minus one, in percent.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ipp::Plan;

/// (Q1, median, Q3) of `values`. Empty input gives NaNs.
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    (quantile_sorted(&v, 0.25), quantile_sorted(&v, 0.5), quantile_sorted(&v, 0.75))
}

pub fn median(values: &[f64]) -> f64 {
    quartiles(values).1
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    match v.len() {
        0 => f64::NAN,
        1 => v[0],
        n => {
            let h = (n - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = h - lo as f64;
            // Keep infinities intact instead of producing NaN from inf - inf.
            if frac == 0.0 || v[lo] == v[hi] {
                v[lo]
            } else {
                v[lo] + frac * (v[hi] - v[lo])
            }
        }
    }
}

/// Latest task completion, in minutes.
pub fn makespan_minutes(plan: &Plan) -> f64 {
    plan.makespan_from_tasks().secs() / 60.0
}

/// Percentage excess of summed actual over summed ideal durations, given as
/// `(actual, ideal)` seconds per task. Zero when there is no ideal time.
pub fn regret_from(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (actual, ideal) = pairs.into_iter().fold((0.0, 0.0), |(a, i), (x, y)| (a + x, i + y));
    if ideal > 0.0 {
        100.0 * (actual / ideal - 1.0)
    } else {
        0.0
    }
}

pub fn regret(plan: &Plan) -> f64 {
    regret_from(plan.tasks.iter().map(|t| (t.actual().secs(), t.ideal.secs())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub name: String,
    pub robots: usize,
    pub seed: u64,
    pub feasible: bool,
    pub makespan_min: f64,
    pub regret_pct: f64,
    pub wall_s: f64,
    pub visited: usize,
    /// Minutes, when simulated; infinite when no collision happened.
    pub ttf_min: Option<f64>,
}

impl InstanceReport {
    pub fn from_plan(name: &str, robots: usize, seed: u64, plan: &Plan) -> InstanceReport {
        InstanceReport {
            name: name.to_string(),
            robots,
            seed,
            feasible: true,
            makespan_min: makespan_minutes(plan),
            regret_pct: regret(plan),
            wall_s: plan.stats.wall,
            visited: plan.stats.visited,
            ttf_min: None,
        }
    }

    pub fn infeasible(name: &str, robots: usize, seed: u64, wall_s: f64) -> InstanceReport {
        InstanceReport {
            name: name.to_string(),
            robots,
            seed,
            feasible: false,
            makespan_min: f64::NAN,
            regret_pct: f64::NAN,
            wall_s,
            visited: 0,
            ttf_min: None,
        }
    }
}

pub type Quartiles = (f64, f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub instances: usize,
    pub failures: usize,
    pub makespan_min: Quartiles,
    pub regret_pct: Quartiles,
    pub wall_s: Quartiles,
    pub visited: Quartiles,
    pub ttf_min: Option<Quartiles>,
}

impl BatchReport {
    /// Statistics over the feasible instances; failures are only counted.
    pub fn new(rows: &[InstanceReport]) -> BatchReport {
        let ok: Vec<&InstanceReport> = rows.iter().filter(|r| r.feasible).collect();
        let q = |f: &dyn Fn(&InstanceReport) -> f64| quartiles(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
        let ttf: Vec<f64> = ok.iter().filter_map(|r| r.ttf_min).collect();
        BatchReport {
            instances: rows.len(),
            failures: rows.len() - ok.len(),
            makespan_min: q(&|r| r.makespan_min),
            regret_pct: q(&|r| r.regret_pct),
            wall_s: q(&|r| r.wall_s),
            visited: q(&|r| r.visited as f64),
            ttf_min: (!ttf.is_empty()).then(|| quartiles(&ttf)),
        }
    }
}

pub const CSV_COLUMNS: [&str; 9] = ["name", "robots", "seed", "feasible", "makespan_min", "regret_pct", "wall_s", "visited", "ttf_min"];

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.4}")
    }
}

/// One row per instance, then `# q1`, `# median` and `# q3` footer rows.
pub fn to_csv(rows: &[InstanceReport]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let ttf = r.ttf_min.map(num).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.name,
            r.robots,
            r.seed,
            r.feasible,
            num(r.makespan_min),
            num(r.regret_pct),
            num(r.wall_s),
            r.visited,
            ttf
        );
    }
    if !rows.is_empty() {
        let b = BatchReport::new(rows);
        let ttf = b.ttf_min.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        for (label, pick) in [("# q1", 0), ("# median", 1), ("# q3", 2)] {
            let g = |q: Quartiles| num([q.0, q.1, q.2][pick]);
            let _ = writeln!(
                out,
                "{label},,,{},{},{},{},{},{}",
                b.instances - b.failures,
                g(b.makespan_min),
                g(b.regret_pct),
                g(b.wall_s),
                g(b.visited),
                g(ttf)
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_interpolate() {
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0]), (1.75, 2.5, 3.25));
        assert_eq!(quartiles(&[4.0, 1.0, 3.0, 2.0]), (1.75, 2.5, 3.25));
        assert_eq!(quartiles(&[7.0]), (7.0, 7.0, 7.0));
        assert!(quartiles(&[]).1.is_nan());
    }

    #[test]
    fn quartiles_keep_infinity() {
        let inf = f64::INFINITY;
        assert_eq!(quartiles(&[1.0, inf, inf, inf]), (inf, inf, inf));
        assert_eq!(median(&[1.0, 2.0, inf]), 2.0);
    }

    #[test]
    fn ten_second_wait_on_hundred_second_task() {
        assert!((regret_from([(110.0, 100.0)]) - 10.0).abs() < 1e-12);
        assert_eq!(regret_from([(50.0, 50.0), (20.0, 20.0)]), 0.0);
        assert_eq!(regret_from(std::iter::empty()), 0.0);
    }

    #[test]
    fn csv_has_fixed_header_and_footer() {
        let row = InstanceReport {
            name: "a".into(),
            robots: 2,
            seed: 3,
            feasible: true,
            makespan_min: 10.0,
            regret_pct: 5.0,
            wall_s: 0.5,
            visited: 100,
            ttf_min: Some(f64::INFINITY),
        };
        let csv = to_csv(&[row.clone(), InstanceReport::infeasible("b", 2, 4, 1.0)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines[1], "a,2,3,true,10.0000,5.0000,0.5000,100,inf");
        assert_eq!(lines[2], "b,2,4,false,,,1.0000,0,");
        assert!(lines[3].starts_with("# q1,,,1,10.0000"));
        assert_eq!(lines.len(), 6);
        assert_eq!(to_csv(&[]).lines().count(), 1);
    }
}
