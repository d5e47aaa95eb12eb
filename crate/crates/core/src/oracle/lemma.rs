use serde::Serialize;

use super::{compute_dependence_profile, DependenceProfile, EventTable, ExactDistribution};
use super::{SupportPredicate, SLACK};
use crate::error::{Error, Result};
use crate::stats::Statistic;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaRow {
    pub t: f64,
    pub exact_tail: f64,
    /// `2 exp(-2 M t^2 / D_N + log(1 + p))`.
    pub bound_conc1: f64,
    /// `(1 + min{C_N, Delta_N}) / (M t^2)`.
    pub bound_conc2: f64,
    pub ok1: bool,
    pub ok2: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub profile: DependenceProfile,
    pub rows: Vec<LemmaRow>,
    /// Set when `min{C_N, Delta_N} < -1`, which makes the second bound
    /// negative.
    pub negative_second_bound: bool,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.ok1 && r.ok2)
    }

    pub fn violations(&self) -> usize {
        self.rows
            .iter()
            .map(|r| usize::from(!r.ok1) + usize::from(!r.ok2))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,exact_tail,bound_conc1,bound_conc2,ok1,ok2\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t, r.exact_tail, r.bound_conc1, r.bound_conc2, r.ok1, r.ok2
            ));
        }
        out
    }
}

/// Compares exact tail probabilities with both concentration bounds at every
/// `t` in `t_grid`, allowing `1e-12` of arithmetic slack.
pub fn verify_lemma1(
    dist: &ExactDistribution,
    stat: &Statistic,
    t_grid: &[f64],
) -> Result<LemmaReport> {
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "t must be positive, got {t}"
        )));
    }
    let profile = compute_dependence_profile(dist, stat, &SupportPredicate::All)?;
    let table = EventTable::build(dist, stat)?;
    let theta = table.theta_star();
    let m = profile.units as f64;
    let min_cd = profile.min_signed();
    let rows = t_grid
        .iter()
        .map(|&t| {
            let exact_tail = table.tail(&theta, t);
            let bound_conc1 =
                2.0 * (-2.0 * m * t * t / profile.d_n + (profile.bins as f64).ln()).exp();
            let bound_conc2 = (1.0 + min_cd) / (m * t * t);
            LemmaRow {
                t,
                exact_tail,
                bound_conc1,
                bound_conc2,
                ok1: exact_tail <= bound_conc1 + SLACK,
                ok2: exact_tail <= bound_conc2 + SLACK,
            }
        })
        .collect();
    Ok(LemmaReport {
        negative_second_bound: min_cd < -1.0,
        profile,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpec;

    fn bernoulli(n: usize, p: f64) -> ModelSpec {
        ModelSpec::Bernoulli {
            directed: false,
            probs: vec![vec![p; n]; n],
        }
    }

    #[test]
    fn holds_on_three_node_degrees() {
        let d = ExactDistribution::from_model(&bernoulli(3, 0.5), None).unwrap();
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let report = verify_lemma1(&d, &Statistic::degree(), &grid).unwrap();
        assert!(report.holds(), "{}", report.to_csv());
        assert_eq!(report.rows.len(), 9);
        assert!(!report.negative_second_bound);
        // D_N = 70/27 here
        let r = &report.rows[2];
        let expected = 2.0 * (-2.0 * 3.0 * 0.09 / (70.0 / 27.0) + 3f64.ln()).exp();
        assert!((r.bound_conc1 - expected).abs() < 1e-12);
    }

    #[test]
    fn point_mass_has_no_tail() {
        let d = ExactDistribution::from_model(&bernoulli(3, 0.0), None).unwrap();
        let report = verify_lemma1(&d, &Statistic::degree(), &[0.01, 0.5]).unwrap();
        assert!(report.rows.iter().all(|r| r.exact_tail == 0.0));
        assert!(report.holds());
        assert!(report
            .to_csv()
            .starts_with("t,exact_tail,bound_conc1,bound_conc2,ok1,ok2\n"));
    }

    #[test]
    fn rejects_non_positive_t() {
        let d = ExactDistribution::from_model(&bernoulli(3, 0.5), None).unwrap();
        assert!(verify_lemma1(&d, &Statistic::degree(), &[0.1, 0.0]).is_err());
    }
}
