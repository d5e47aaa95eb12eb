use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::{ReplicationResult, StudyConfig, StudyId, StudyOutput, ThetaStarSummary};
use crate::error::Result;
use crate::graph::Graph;
use crate::models::{
    beta_model_probs, sample_bernoulli, sample_ergm_chains, ErgmChain, ThetaStarEstimate,
};
use crate::rng::{stream, Rng};
use crate::stats::{linf_distance, Statistic};

const THETA_STAR: u64 = 0;
const REPLICATE: u64 = 1;
const FIXED_PARAMS: u64 = 2;

fn statistics(cfg: &StudyConfig) -> Result<Vec<Statistic>> {
    cfg.kinds.iter().map(|&k| Statistic::simple(k)).collect()
}

/// `l_inf` error of each statistic on `g`; `None` for an empty basis.
fn replicate_errors(
    stats: &[Statistic],
    theta: &[ThetaStarEstimate],
    g: &Graph,
) -> Result<Vec<Option<f64>>> {
    stats
        .iter()
        .zip(theta)
        .map(|(stat, est)| {
            let events = stat.unit_events(g)?;
            if events.unit_count() == 0 {
                return Ok(None);
            }
            let f = events.distribution(stat.kind());
            Ok(Some(linf_distance(&f.values, &est.mean)?))
        })
        .collect()
}

fn push_rows(
    out: &mut Vec<ReplicationResult>,
    study: StudyId,
    n: usize,
    alpha: Option<f64>,
    stats: &[Statistic],
    per_replicate: Vec<Vec<Option<f64>>>,
) {
    for (replicate, errors) in per_replicate.into_iter().enumerate() {
        for (stat, linf_error) in stats.iter().zip(errors) {
            out.push(ReplicationResult {
                study,
                n,
                alpha,
                k: None,
                replicate,
                kind: stat.kind(),
                skipped: linf_error.is_none(),
                linf_error,
            });
        }
    }
}

/// Curved-ERGM study: for each N, θ* of every kind from
/// `theta_star_samples` MCMC draws, then one independently burned-in chain
/// per replicate.
pub fn run_study1(cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let stats = statistics(cfg)?;
    let seed = cfg.master_seed;
    let study = StudyId::Study1.key();
    let mut rows = Vec::new();
    let mut theta_star = Vec::new();
    for &n in &cfg.n_list {
        let mcmc = cfg.mcmc(n);
        let keys = [study, n as u64, THETA_STAR];
        let graphs = sample_ergm_chains(&cfg.ergm, n, cfg.theta_star_samples, &mcmc, seed, &keys)?;
        let theta = stats
            .iter()
            .map(|s| ThetaStarEstimate::from_graphs(s, n, &graphs))
            .collect::<Result<Vec<_>>>()?;
        drop(graphs);
        let per_replicate = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream(seed, &[study, n as u64, REPLICATE, r]);
                let mut chain = ErgmChain::new(&cfg.ergm, n)?;
                chain.run(mcmc.burn_in, &mut rng);
                replicate_errors(&stats, &theta, &chain.graph())
            })
            .collect::<Result<Vec<_>>>()?;
        push_rows(&mut rows, StudyId::Study1, n, None, &stats, per_replicate);
        theta_star.extend(theta.into_iter().map(|t| ThetaStarSummary::new(n, None, t)));
    }
    Ok(StudyOutput {
        config: cfg.clone(),
        rows,
        theta_star,
        expected_degree: Vec::new(),
    })
}

/// `max_i sum_{j != i} logistic(theta_i + theta_j)`.
pub fn max_expected_degree(theta: &[f64]) -> f64 {
    beta_model_probs(theta)
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Growth of the largest expected degree with N at one `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedDegreeSlope {
    pub alpha: f64,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    /// Mean over replicates of the largest expected degree given the drawn
    /// node parameters.
    pub sampled: Vec<f64>,
    /// Largest expected degree with every node parameter at `-alpha ln N`.
    pub centered: Vec<f64>,
    pub sampled_slope: f64,
    pub centered_slope: f64,
    /// `1 - 2 alpha`.
    pub target_slope: f64,
}

/// Slopes for `alpha` over `n_list` given the per-N sampled means.
pub fn expected_degree_slope(
    alpha: f64,
    n_list: &[usize],
    sampled: Vec<f64>,
) -> ExpectedDegreeSlope {
    let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let centered: Vec<f64> = n_list
        .iter()
        .map(|&n| max_expected_degree(&vec![-alpha * (n as f64).ln(); n]))
        .collect();
    ExpectedDegreeSlope {
        alpha,
        n_list: n_list.to_vec(),
        sampled_slope: log_log_slope(&xs, &sampled),
        centered_slope: log_log_slope(&xs, &centered),
        sampled,
        centered,
        target_slope: 1.0 - 2.0 * alpha,
    }
}

fn draw_theta(n: usize, alpha: f64, rng: &mut Rng) -> Vec<f64> {
    let normal = Normal::new(-alpha * (n as f64).ln(), 1.0).expect("finite mean, unit sd");
    (0..n).map(|_| normal.sample(rng)).collect()
}

/// β-model study: node parameters `theta_i ~ N(-alpha ln N, 1)`, redrawn for
/// every θ* sample and replicate unless `fix_theta` is set.
pub fn run_study2(cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let stats = statistics(cfg)?;
    let seed = cfg.master_seed;
    let study = StudyId::Study2.key();
    let mut rows = Vec::new();
    let mut theta_star = Vec::new();
    let mut sampled_degree = vec![Vec::new(); cfg.alpha_list.len()];
    for &n in &cfg.n_list {
        for (ai, &alpha) in cfg.alpha_list.iter().enumerate() {
            let cell = [study, n as u64, alpha.to_bits()];
            let key = |kind: u64, index: u64| [cell[0], cell[1], cell[2], kind, index];
            let fixed = cfg
                .fix_theta
                .then(|| draw_theta(n, alpha, &mut stream(seed, &key(FIXED_PARAMS, 0))));
            let draw = |rng: &mut Rng| -> Result<(Vec<f64>, Graph)> {
                let theta = match &fixed {
                    Some(t) => t.clone(),
                    None => draw_theta(n, alpha, rng),
                };
                let g = sample_bernoulli(&beta_model_probs(&theta), false, rng)?;
                Ok((theta, g))
            };
            let graphs = (0..cfg.theta_star_samples as u64)
                .into_par_iter()
                .map(|s| Ok(draw(&mut stream(seed, &key(THETA_STAR, s)))?.1))
                .collect::<Result<Vec<Graph>>>()?;
            let theta = stats
                .iter()
                .map(|s| ThetaStarEstimate::from_graphs(s, n, &graphs))
                .collect::<Result<Vec<_>>>()?;
            drop(graphs);
            let per_replicate = (0..cfg.replications as u64)
                .into_par_iter()
                .map(|r| {
                    let (params, g) = draw(&mut stream(seed, &key(REPLICATE, r)))?;
                    Ok((
                        max_expected_degree(&params),
                        replicate_errors(&stats, &theta, &g)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let (degrees, errors): (Vec<f64>, Vec<_>) = per_replicate.into_iter().unzip();
            sampled_degree[ai].push(degrees.iter().sum::<f64>() / degrees.len() as f64);
            push_rows(&mut rows, StudyId::Study2, n, Some(alpha), &stats, errors);
            theta_star.extend(
                theta
                    .into_iter()
                    .map(|t| ThetaStarSummary::new(n, Some(alpha), t)),
            );
        }
    }
    let expected_degree = if cfg.n_list.len() >= 2 {
        cfg.alpha_list
            .iter()
            .zip(sampled_degree)
            .map(|(&alpha, sampled)| expected_degree_slope(alpha, &cfg.n_list, sampled))
            .collect()
    } else {
        Vec::new()
    };
    Ok(StudyOutput {
        config: cfg.clone(),
        rows,
        theta_star,
        expected_degree,
    })
}
