//! Monte Carlo estimation of the expected empirical distribution.

use rayon::prelude::*;
use serde::Serialize;

use super::{CurvedErgm, ErgmChain, McmcConfig, ModelSpec};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Rng};
use crate::stats::{Statistic, StatisticKind};

/// Per-bin sample mean of the empirical distribution, with standard errors
/// `sd / sqrt(n_samples)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaStarEstimate {
    pub kind: StatisticKind,
    pub mean: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Replicates that contributed.
    pub n_samples: usize,
    /// Replicates with an empty basis (zero-edge graphs for ESP).
    pub skipped: usize,
}

impl ThetaStarEstimate {
    pub fn max_std_error(&self) -> f64 {
        self.std_errors.iter().copied().fold(0.0, f64::max)
    }

    fn from_samples(
        kind: StatisticKind,
        bins: usize,
        samples: &[Option<Vec<f64>>],
    ) -> Result<Self> {
        let used: Vec<&Vec<f64>> = samples.iter().flatten().collect();
        let skipped = samples.len() - used.len();
        if used.len() < 2 {
            return Err(Error::UndefinedDistribution(format!(
                "only {} of {} replicates had a non-empty basis",
                used.len(),
                samples.len()
            )));
        }
        let n = used.len() as f64;
        let mut mean = vec![0.0; bins];
        for v in &used {
            for (m, x) in mean.iter_mut().zip(v.iter()) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; bins];
        for v in &used {
            for ((s, x), m) in var.iter_mut().zip(v.iter()).zip(&mean) {
                *s += (x - m).powi(2);
            }
        }
        let std_errors = var
            .iter()
            .map(|s| (s / (n - 1.0)).sqrt() / n.sqrt())
            .collect();
        Ok(ThetaStarEstimate {
            kind,
            mean,
            std_errors,
            n_samples: used.len(),
            skipped,
        })
    }
}

fn distribution_values(stat: &Statistic, g: &Graph) -> Result<Option<Vec<f64>>> {
    let events = stat.unit_events(g)?;
    if events.unit_count() == 0 {
        return Ok(None);
    }
    Ok(Some(events.distribution(stat.kind()).values))
}

/// Estimates from `n_samples` independent draws of `draw`, sample `s` using
/// the stream `(seed, s)`. Parallel, but the result is independent of the
/// thread count.
pub fn estimate_with<F>(
    stat: &Statistic,
    n: usize,
    n_samples: usize,
    seed: u64,
    draw: F,
) -> Result<ThetaStarEstimate>
where
    F: Fn(&mut Rng) -> Result<Graph> + Sync,
{
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "n_samples must be at least 2".into(),
        ));
    }
    let samples = (0..n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, &[s]);
            distribution_values(stat, &draw(&mut rng)?)
        })
        .collect::<Result<Vec<_>>>()?;
    ThetaStarEstimate::from_samples(stat.kind(), stat.bin_count(n), &samples)
}

/// `count` draws from the curved ERGM on `n` nodes, spread over
/// `mcmc.chains` parallel chains. Chain `c` uses stream `(seed, keys..., c)`,
/// is burned in for `mcmc.burn_in` toggles and thinned by `mcmc.thin`.
pub fn sample_ergm_chains(
    spec: &CurvedErgm,
    n: usize,
    count: usize,
    mcmc: &McmcConfig,
    seed: u64,
    keys: &[u64],
) -> Result<Vec<Graph>> {
    let chains = mcmc.chains.clamp(1, count.max(1));
    let per_chain = count.div_ceil(chains);
    let per: Vec<Vec<Graph>> = (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut path = keys.to_vec();
            path.push(c);
            let mut rng = stream(seed, &path);
            let mut chain = ErgmChain::new(spec, n)?;
            chain.run(mcmc.burn_in, &mut rng);
            let mut out = Vec::with_capacity(per_chain);
            for s in 0..per_chain {
                if s > 0 {
                    chain.run(mcmc.thin, &mut rng);
                }
                out.push(chain.graph());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().take(count).collect())
}

impl ThetaStarEstimate {
    /// Estimate from already drawn graphs on `n` nodes.
    pub fn from_graphs(stat: &Statistic, n: usize, graphs: &[Graph]) -> Result<Self> {
        let samples = graphs
            .par_iter()
            .map(|g| distribution_values(stat, g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(stat.kind(), stat.bin_count(n), &samples)
    }
}

/// Monte Carlo estimate of the expected empirical distribution under `spec`.
///
/// Independent-edge models draw every sample from its own stream. The curved
/// ERGM uses [`sample_ergm_chains`] with stream keys `[]`.
pub fn estimate_theta_star(
    spec: &ModelSpec,
    stat: &Statistic,
    n: Option<usize>,
    n_samples: usize,
    mcmc: &McmcConfig,
    seed: u64,
) -> Result<ThetaStarEstimate> {
    spec.validate()?;
    let n = spec.resolve_nodes(n)?;
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "n_samples must be at least 2".into(),
        ));
    }
    match spec {
        ModelSpec::CurvedErgm(e) => {
            let graphs = sample_ergm_chains(e, n, n_samples, mcmc, seed, &[])?;
            ThetaStarEstimate::from_graphs(stat, n, &graphs)
        }
        _ => estimate_with(stat, n, n_samples, seed, |rng| {
            spec.sample(Some(n), mcmc, rng)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homogeneous(n: usize, p: f64) -> ModelSpec {
        ModelSpec::Bernoulli {
            directed: false,
            probs: vec![vec![p; n]; n],
        }
    }

    #[test]
    fn complete_graph_point_mass() {
        let est = estimate_theta_star(
            &homogeneous(5, 1.0),
            &Statistic::degree(),
            None,
            20,
            &McmcConfig::default(),
            1,
        )
        .unwrap();
        assert_eq!(est.mean, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(est.std_errors.iter().all(|&s| s == 0.0));
        assert_eq!(est.n_samples, 20);
    }

    #[test]
    fn esp_skips_empty_graphs() {
        let est = estimate_theta_star(
            &homogeneous(4, 0.2),
            &Statistic::esp(),
            None,
            400,
            &McmcConfig::default(),
            2,
        )
        .unwrap();
        assert!(est.skipped > 0);
        assert_eq!(est.skipped + est.n_samples, 400);
        let all_empty = estimate_theta_star(
            &homogeneous(4, 0.0),
            &Statistic::esp(),
            None,
            10,
            &McmcConfig::default(),
            2,
        );
        assert!(matches!(all_empty, Err(Error::UndefinedDistribution(_))));
    }

    #[test]
    fn rejects_single_sample() {
        assert!(estimate_theta_star(
            &homogeneous(4, 0.5),
            &Statistic::degree(),
            None,
            1,
            &McmcConfig::default(),
            0
        )
        .is_err());
    }
}
