//! Simulation studies, the block-subsampling experiment, and their CSV and
//! SVG outputs.

mod classes;
mod plot;
mod studies;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use classes::{generate_synthetic_classes, run_subsample, SubsampleOutput, SyntheticClasses};
pub use plot::{box_stats, emit_svg_boxplot, render_svg, BoxStats};
pub use studies::{
    expected_degree_slope, log_log_slope, max_expected_degree, run_study1, run_study2,
    ExpectedDegreeSlope,
};

use crate::error::{Error, Result};
use crate::models::{CurvedErgm, EtaConvention, McmcConfig};
use crate::stats::StatisticKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyId {
    Study1,
    Study2,
    Subsample,
}

impl StudyId {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyId::Study1 => "study1",
            StudyId::Study2 => "study2",
            StudyId::Subsample => "subsample",
        }
    }

    fn key(self) -> u64 {
        match self {
            StudyId::Study1 => 1,
            StudyId::Study2 => 2,
            StudyId::Subsample => 3,
        }
    }
}

/// Parameters of the synthetic school-class network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub blocks: usize,
    pub size_low: usize,
    pub size_high: usize,
    pub response_rate_median: f64,
    /// Per-block edge probabilities are drawn uniformly from this range.
    pub density_low: f64,
    pub density_high: f64,
}

impl Default for ClassConfig {
    fn default() -> Self {
        ClassConfig {
            blocks: 304,
            size_low: 15,
            size_high: 33,
            response_rate_median: 0.87,
            density_low: 0.1,
            density_high: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study_id: StudyId,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub theta_star_samples: usize,
    pub master_seed: u64,
    pub kinds: Vec<StatisticKind>,
    /// Study 1 model.
    pub ergm: CurvedErgm,
    pub burn_in: u64,
    /// Toggles between retained MCMC draws; `10 N^2` when absent.
    pub thin: Option<u64>,
    pub chains: usize,
    /// Study 2 sparsity exponents.
    pub alpha_list: Vec<f64>,
    /// Study 2: draw the node parameters once per `(N, alpha)` instead of
    /// once per replicate.
    pub fix_theta: bool,
    #[serde(rename = "K_list")]
    pub k_list: Vec<usize>,
    pub classes: ClassConfig,
}

impl StudyConfig {
    pub fn defaults(study_id: StudyId) -> Self {
        let mcmc = McmcConfig::default();
        let mut cfg = StudyConfig {
            study_id,
            n_list: vec![25, 50, 75, 100],
            replications: 500,
            theta_star_samples: 2500,
            master_seed: 1,
            kinds: vec![
                StatisticKind::Degree,
                StatisticKind::EdgewiseSharedPartner,
                StatisticKind::GeodesicDistance,
            ],
            ergm: CurvedErgm::new(-3.5, 0.4, 0.75, EtaConvention::AsPrinted),
            burn_in: mcmc.burn_in,
            thin: None,
            chains: mcmc.chains,
            alpha_list: vec![0.0, 0.25],
            fix_theta: false,
            k_list: vec![1, 5, 25, 50, 100, 200],
            classes: ClassConfig::default(),
        };
        match study_id {
            StudyId::Study1 => {}
            StudyId::Study2 => cfg.n_list = vec![10, 25, 50, 75, 100],
            StudyId::Subsample => {
                cfg.n_list = Vec::new();
                cfg.kinds = vec![StatisticKind::WithinBlockOutDegree];
            }
        }
        cfg
    }

    /// Reads a JSON object whose fields override the defaults of its
    /// `study_id` (or of `fallback` when the document has none).
    pub fn from_json(text: &str, fallback: Option<StudyId>) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        Self::from_value(doc, fallback)
    }

    pub fn from_value(doc: Value, fallback: Option<StudyId>) -> Result<Self> {
        let Value::Object(fields) = doc else {
            return Err(Error::InvalidArgument(
                "config must be a JSON object".into(),
            ));
        };
        let study_id = match fields.get("study_id") {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::InvalidArgument(format!("config: study_id: {e}")))?,
            None => {
                fallback.ok_or_else(|| Error::InvalidArgument("config lacks study_id".into()))?
            }
        };
        let mut merged = serde_json::to_value(Self::defaults(study_id)).expect("serializable");
        for (key, value) in fields {
            match (merged.get_mut(&key), value) {
                (Some(Value::Object(base)), Value::Object(over)) => base.extend(over),
                (Some(slot), value) => *slot = value,
                (None, _) => {
                    return Err(Error::InvalidArgument(format!(
                        "config: unknown field '{key}'"
                    )))
                }
            }
        }
        let cfg: StudyConfig = serde_json::from_value(merged)
            .map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidArgument(
                "replications must be at least 1".into(),
            ));
        }
        if self.theta_star_samples < 2 {
            return Err(Error::InvalidArgument(
                "theta_star_samples must be at least 2".into(),
            ));
        }
        if self.study_id != StudyId::Subsample && self.n_list.iter().any(|&n| n < 3) {
            return Err(Error::InvalidArgument("every N must be at least 3".into()));
        }
        if self.chains == 0 {
            return Err(Error::InvalidArgument("chains must be at least 1".into()));
        }
        if self.alpha_list.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("alpha values must be finite".into()));
        }
        self.ergm.validate()
    }

    /// MCMC schedule used at `n` nodes.
    pub fn mcmc(&self, n: usize) -> McmcConfig {
        McmcConfig {
            burn_in: self.burn_in,
            thin: self.thin.unwrap_or(10 * (n as u64) * (n as u64)),
            chains: self.chains,
        }
    }
}

/// One `l_inf` error measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationResult {
    pub study: StudyId,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub replicate: usize,
    pub kind: StatisticKind,
    /// `None` when the replicate had an empty basis.
    pub linf_error: Option<f64>,
    pub skipped: bool,
}

pub const RESULTS_HEADER: &str = "study,N,alpha,K,replicate,kind,linf_error,skipped";

pub fn results_to_csv(rows: &[ReplicationResult]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.study.as_str(),
            r.n,
            opt(r.alpha.map(|a| a.to_string())),
            opt(r.k.map(|k| k.to_string())),
            r.replicate,
            r.kind,
            opt(r.linf_error.map(|e| e.to_string())),
            r.skipped
        ));
    }
    out
}

/// θ* estimate for one cell of a study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaStarSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: Option<f64>,
    pub kind: StatisticKind,
    pub mean: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub max_std_error: f64,
    pub sum_std_error: f64,
    pub n_samples: usize,
    pub skipped: usize,
}

impl ThetaStarSummary {
    fn new(n: usize, alpha: Option<f64>, est: crate::models::ThetaStarEstimate) -> Self {
        ThetaStarSummary {
            n,
            alpha,
            kind: est.kind,
            max_std_error: est.max_std_error(),
            sum_std_error: est.std_errors.iter().sum(),
            mean: est.mean,
            std_errors: est.std_errors,
            n_samples: est.n_samples,
            skipped: est.skipped,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyOutput {
    pub config: StudyConfig,
    pub rows: Vec<ReplicationResult>,
    pub theta_star: Vec<ThetaStarSummary>,
    /// Study 2 only.
    pub expected_degree: Vec<ExpectedDegreeSlope>,
}

impl StudyOutput {
    pub fn to_csv(&self) -> String {
        results_to_csv(&self.rows)
    }

    /// Errors of one kind (and alpha, if given) at `n`, skipping empty
    /// replicates.
    pub fn errors(&self, n: usize, alpha: Option<f64>, kind: StatisticKind) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.kind == kind && (alpha.is_none() || r.alpha == alpha))
            .filter_map(|r| r.linf_error)
            .collect()
    }

    /// Run metadata: the full config plus the MCMC schedule per N.
    pub fn metadata(&self) -> Value {
        let schedules: Vec<Value> = self
            .config
            .n_list
            .iter()
            .map(|&n| serde_json::json!({"N": n, "mcmc": self.config.mcmc(n)}))
            .collect();
        serde_json::json!({
            "config": self.config,
            "eta_convention": self.config.ergm.eta_convention,
            "mcmc_schedules": schedules,
            "theta_star": self.theta_star,
            "expected_degree": self.expected_degree,
            "skipped_replicates": self.rows.iter().filter(|r| r.skipped).count(),
        })
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (R's default type 7). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub fn iqr(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.75) - quantile(&v, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_overrides_defaults() {
        let cfg = StudyConfig::from_json(
            r#"{"study_id": "study1", "N_list": [25, 50], "replications": 100,
                "ergm": {"theta2": 0.5}}"#,
            None,
        )
        .unwrap();
        assert_eq!(cfg.n_list, vec![25, 50]);
        assert_eq!(cfg.theta_star_samples, 2500);
        assert_eq!(cfg.ergm.theta1, -3.5);
        assert_eq!(cfg.ergm.theta2, 0.5);
        assert_eq!(cfg.mcmc(25).thin, 6250);
        let s2 = StudyConfig::from_json("{}", Some(StudyId::Study2)).unwrap();
        assert_eq!(s2.n_list, vec![10, 25, 50, 75, 100]);
        assert_eq!(s2.alpha_list, vec![0.0, 0.25]);
        let sub = StudyConfig::defaults(StudyId::Subsample);
        assert_eq!(sub.k_list, vec![1, 5, 25, 50, 100, 200]);
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(
            StudyConfig::from_json(r#"{"study_id": "study1", "replicates": 3}"#, None).is_err()
        );
        assert!(StudyConfig::from_json(r#"{"replications": 3}"#, None).is_err());
        assert!(
            StudyConfig::from_json(r#"{"study_id": "study1", "replications": 0}"#, None).is_err()
        );
        assert!(
            StudyConfig::from_json(r#"{"study_id": "study2", "theta_star_samples": 1}"#, None)
                .is_err()
        );
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(iqr(&[4.0, 1.0, 3.0, 2.0]), 1.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn csv_header_and_blanks() {
        let row = ReplicationResult {
            study: StudyId::Study1,
            n: 25,
            alpha: None,
            k: None,
            replicate: 0,
            kind: StatisticKind::EdgewiseSharedPartner,
            linf_error: None,
            skipped: true,
        };
        assert_eq!(
            results_to_csv(&[row]),
            "study,N,alpha,K,replicate,kind,linf_error,skipped\nstudy1,25,,,0,esp,,true\n"
        );
    }
}
