use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;

use super::{ClassConfig, ReplicationResult, StudyConfig, StudyId};
use crate::error::{Error, Result};
use crate::graph::{BlockStructure, Graph};
use crate::rng::{stream, Rng};
use crate::stats::{linf_distance, Statistic, StatisticKind};

/// Directed network of disjoint classes with within-class edges only.
#[derive(Clone, Debug)]
pub struct SyntheticClasses {
    pub graph: Graph,
    pub blocks: BlockStructure,
    /// Sorted node indices of respondents.
    pub respondents: Vec<usize>,
    pub densities: Vec<f64>,
    pub response_rates: Vec<f64>,
}

/// Block sizes uniform on `[size_low, size_high]`; each block gets a
/// density uniform on `[density_low, density_high]` and a response rate
/// `median^(2u)` with `u` uniform on `[0, 1]`, so the median rate across
/// blocks is `response_rate_median`.
pub fn generate_synthetic_classes(cfg: &ClassConfig, rng: &mut Rng) -> Result<SyntheticClasses> {
    if cfg.blocks == 0 || cfg.size_low < 2 || cfg.size_low > cfg.size_high {
        return Err(Error::InvalidArgument(format!(
            "need at least one block and 2 <= size_low <= size_high, got {} blocks of {}..={}",
            cfg.blocks, cfg.size_low, cfg.size_high
        )));
    }
    let median = cfg.response_rate_median;
    if !(median > 0.0 && median <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "response_rate_median must lie in (0, 1], got {median}"
        )));
    }
    if !(0.0 <= cfg.density_low && cfg.density_low <= cfg.density_high && cfg.density_high <= 1.0) {
        return Err(Error::InvalidArgument(
            "densities must satisfy 0 <= low <= high <= 1".into(),
        ));
    }
    let sizes: Vec<usize> = (0..cfg.blocks)
        .map(|_| rng.gen_range(cfg.size_low..=cfg.size_high))
        .collect();
    let blocks = BlockStructure::from_sizes(&sizes)?;
    let mut graph = Graph::new(blocks.node_count(), true)?;
    let mut densities = Vec::with_capacity(cfg.blocks);
    let mut response_rates = Vec::with_capacity(cfg.blocks);
    let mut respondents = Vec::new();
    for b in 0..cfg.blocks {
        let p = rng.gen_range(cfg.density_low..=cfg.density_high);
        let rate = median.powf(2.0 * rng.gen::<f64>());
        let members = blocks.members(b);
        for &i in members {
            for &j in members {
                if i != j && rng.gen::<f64>() < p {
                    graph.set_edge(i, j, true)?;
                }
            }
        }
        for &i in members {
            if rate >= 1.0 || rng.gen::<f64>() < rate {
                respondents.push(i);
            }
        }
        densities.push(p);
        response_rates.push(rate);
    }
    Ok(SyntheticClasses {
        graph,
        blocks,
        respondents,
        densities,
        response_rates,
    })
}

#[derive(Clone, Debug)]
pub struct SubsampleOutput {
    pub rows: Vec<ReplicationResult>,
    /// Within-block out-degree distribution over all respondents.
    pub reference: Vec<f64>,
    /// `(K, replicate, distribution)` for every subsample with respondents.
    pub distributions: Vec<(usize, usize, Vec<f64>)>,
}

impl SubsampleOutput {
    pub fn to_csv(&self) -> String {
        super::results_to_csv(&self.rows)
    }

    /// Long format `K,replicate,k,value`.
    pub fn bins_to_csv(&self) -> String {
        let mut out = String::from("K,replicate,k,value\n");
        for (k_blocks, replicate, dist) in &self.distributions {
            for (k, v) in dist.iter().enumerate() {
                out.push_str(&format!("{k_blocks},{replicate},{k},{v}\n"));
            }
        }
        out
    }

    pub fn errors(&self, k: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.k == Some(k))
            .filter_map(|r| r.linf_error)
            .collect()
    }
}

fn normalize(counts: &[u64]) -> Option<Vec<f64>> {
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Subsamples whole blocks without replacement and compares the
/// respondents' within-block out-degree distribution with the one over all
/// respondents. Replicate `r` at size `K` uses stream
/// `(master_seed, 3, K, r)`.
pub fn run_subsample(
    graph: &Graph,
    blocks: &BlockStructure,
    respondents: &[usize],
    cfg: &StudyConfig,
) -> Result<SubsampleOutput> {
    cfg.validate()?;
    let block_count = blocks.block_count();
    if let Some(&k) = cfg.k_list.iter().find(|&&k| k == 0 || k > block_count) {
        return Err(Error::InvalidArgument(format!(
            "subsample size {k} must lie in 1..={block_count}"
        )));
    }
    let stat = Statistic::within_block_out_degree(blocks.clone(), Some(respondents.to_vec()))?;
    let events = stat.unit_events(graph)?;
    let respondents = stat.respondents().expect("set above");
    let bins = events.bins;
    let mut block_counts = vec![vec![0u64; bins]; block_count];
    for (&node, &c) in respondents.iter().zip(&events.categories) {
        block_counts[blocks.block_of(node)][c] += 1;
    }
    let total: Vec<u64> = (0..bins)
        .map(|k| block_counts.iter().map(|c| c[k]).sum())
        .collect();
    let reference = normalize(&total)
        .ok_or_else(|| Error::UndefinedDistribution("the network has no respondents".into()))?;

    let mut rows = Vec::new();
    let mut distributions = Vec::new();
    for &k_blocks in &cfg.k_list {
        let draws = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream(
                    cfg.master_seed,
                    &[StudyId::Subsample.key(), k_blocks as u64, r],
                );
                let chosen = index::sample(&mut rng, block_count, k_blocks);
                let mut counts = vec![0u64; bins];
                let mut nodes = 0;
                for b in chosen.iter() {
                    nodes += blocks.members(b).len();
                    for (c, x) in counts.iter_mut().zip(&block_counts[b]) {
                        *c += x;
                    }
                }
                (nodes, normalize(&counts))
            })
            .collect::<Vec<_>>();
        for (replicate, (nodes, dist)) in draws.into_iter().enumerate() {
            let linf_error = match &dist {
                Some(d) => Some(linf_distance(d, &reference)?),
                None => None,
            };
            rows.push(ReplicationResult {
                study: StudyId::Subsample,
                n: nodes,
                alpha: None,
                k: Some(k_blocks),
                replicate,
                kind: StatisticKind::WithinBlockOutDegree,
                skipped: linf_error.is_none(),
                linf_error,
            });
            if let Some(d) = dist {
                distributions.push((k_blocks, replicate, d));
            }
        }
    }
    Ok(SubsampleOutput {
        rows,
        reference,
        distributions,
    })
}
