//! Exhaustive enumeration over small graph spaces: exact probabilities,
//! expectations, tail probabilities and dependence coefficients.

mod lemma;
mod profile;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lemma::{verify_lemma1, LemmaReport, LemmaRow};
pub use profile::{compute_dependence_profile, DependenceProfile};

use crate::error::{Error, Result};
use crate::graph::{canonical_pairs, Graph};
use crate::models::ModelSpec;
use crate::stats::{linf_distance, Statistic};

/// Largest number of free (non-degenerate) node pairs enumerated.
pub const MAX_FREE_PAIRS: usize = 20;

/// Slack used when comparing exact probabilities against thresholds.
pub const SLACK: f64 = 1e-12;

/// Restriction of the graph space used for conditioning and for
/// support-restricted dependence coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SupportPredicate {
    #[default]
    All,
    EdgeCount(usize),
    MaxEdges(usize),
    /// Bound on (out-)degrees.
    MaxDegree(usize),
}

impl SupportPredicate {
    pub fn contains(&self, g: &Graph) -> bool {
        match *self {
            SupportPredicate::All => true,
            SupportPredicate::EdgeCount(m) => g.edge_count() == m,
            SupportPredicate::MaxEdges(m) => g.edge_count() <= m,
            SupportPredicate::MaxDegree(d) => (0..g.n()).all(|i| g.out_degree(i) <= d),
        }
    }

    /// Whether every graph accepted by `self` is accepted by `other`, as far
    /// as can be decided without enumeration.
    pub fn is_within(&self, other: &SupportPredicate) -> bool {
        use SupportPredicate::*;
        match (*self, *other) {
            (_, All) => true,
            (EdgeCount(a), EdgeCount(b)) => a == b,
            (EdgeCount(a), MaxEdges(b)) | (MaxEdges(a), MaxEdges(b)) => a <= b,
            (MaxDegree(a), MaxDegree(b)) => a <= b,
            _ => false,
        }
    }
}

impl fmt::Display for SupportPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportPredicate::All => f.write_str("all"),
            SupportPredicate::EdgeCount(m) => write!(f, "edges={m}"),
            SupportPredicate::MaxEdges(m) => write!(f, "max-edges={m}"),
            SupportPredicate::MaxDegree(d) => write!(f, "max-degree={d}"),
        }
    }
}

impl FromStr for SupportPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(SupportPredicate::All);
        }
        let bad = || Error::InvalidArgument(format!("unknown support predicate '{s}'"));
        let (name, value) = s.split_once('=').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        match name.trim() {
            "edges" => Ok(SupportPredicate::EdgeCount(value)),
            "max-edges" => Ok(SupportPredicate::MaxEdges(value)),
            "max-degree" => Ok(SupportPredicate::MaxDegree(value)),
            _ => Err(bad()),
        }
    }
}

impl From<SupportPredicate> for String {
    fn from(p: SupportPredicate) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for SupportPredicate {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Exact law of a random graph on a small node set.
///
/// Graphs are edge bitmasks over [`canonical_pairs`]. Pairs the model fixes
/// with probability zero or one are not enumerated, so only graphs
/// consistent with those are stored; every other graph has probability
/// zero. States are kept in increasing mask order.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    n: usize,
    directed: bool,
    pair_count: usize,
    states: Vec<u64>,
    probs: Vec<f64>,
}

fn deposit(bits: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .filter(|(b, _)| bits >> b & 1 == 1)
        .fold(0, |m, (_, &q)| m | 1 << q)
}

impl ExactDistribution {
    /// Enumerates the law of `spec` on `n` nodes (or the node count the
    /// spec implies).
    pub fn from_model(spec: &ModelSpec, n: Option<usize>) -> Result<Self> {
        spec.validate()?;
        let n = spec.resolve_nodes(n)?;
        let directed = spec.is_directed();
        let fixed = spec.fixed_pairs(n);
        if fixed.len() > 64 {
            return Err(Error::StateSpaceTooLarge {
                bits: fixed.len(),
                limit: MAX_FREE_PAIRS,
            });
        }
        let free: Vec<usize> = (0..fixed.len()).filter(|&q| fixed[q].is_none()).collect();
        if free.len() > MAX_FREE_PAIRS {
            return Err(Error::StateSpaceTooLarge {
                bits: free.len(),
                limit: MAX_FREE_PAIRS,
            });
        }
        let base = (0..fixed.len())
            .filter(|&q| fixed[q] == Some(true))
            .fold(0u64, |m, q| m | 1 << q);
        let mut states: Vec<u64> = (0..1u64 << free.len())
            .map(|s| base | deposit(s, &free))
            .collect();
        states.sort_unstable();
        let log_weights: Vec<f64> = states
            .par_iter()
            .map(|&mask| Graph::from_mask(n, directed, mask).map(|g| spec.log_weight(&g)))
            .collect::<Result<_>>()?;
        Self::from_log_weights(n, directed, states, log_weights)
    }

    /// Normalizes `log_weights` (log-sum-exp) over `states`, which must be
    /// sorted and distinct.
    pub fn from_log_weights(
        n: usize,
        directed: bool,
        states: Vec<u64>,
        log_weights: Vec<f64>,
    ) -> Result<Self> {
        let pair_count = canonical_pairs(n, directed).len();
        if states.len() != log_weights.len() || states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "states must be sorted, distinct and match the weights".into(),
            ));
        }
        let max = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidModel(
                "no graph has positive probability".into(),
            ));
        }
        let total: f64 = log_weights.iter().map(|w| (w - max).exp()).sum();
        let log_z = max + total.ln();
        let probs = log_weights.iter().map(|w| (w - log_z).exp()).collect();
        Ok(ExactDistribution {
            n,
            directed,
            pair_count,
            states,
            probs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of node pairs; the full state space has `2^pair_count` graphs.
    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    /// Number of enumerated graphs.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `(mask, probability)` in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.states.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn graph(&self, mask: u64) -> Graph {
        Graph::from_mask(self.n, self.directed, mask).expect("mask fits the pair count")
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn probability_of_mask(&self, mask: u64) -> f64 {
        self.states
            .binary_search(&mask)
            .map_or(0.0, |pos| self.probs[pos])
    }

    pub fn probability(&self, g: &Graph) -> f64 {
        if g.n() != self.n || g.is_directed() != self.directed {
            return 0.0;
        }
        g.to_mask().map_or(0.0, |m| self.probability_of_mask(m))
    }

    /// Probability of the set of graphs satisfying `pred`.
    pub fn mass(&self, pred: &SupportPredicate) -> f64 {
        self.iter()
            .filter(|&(m, _)| pred.contains(&self.graph(m)))
            .map(|(_, p)| p)
            .sum()
    }

    /// Conditional law given `pred`.
    pub fn condition(&self, pred: &SupportPredicate) -> Result<Self> {
        let (states, probs): (Vec<u64>, Vec<f64>) = self
            .iter()
            .filter(|&(m, p)| p > 0.0 && pred.contains(&self.graph(m)))
            .unzip();
        let mass: f64 = probs.iter().sum();
        if mass <= 0.0 {
            return Err(Error::UndefinedDistribution(format!(
                "support '{pred}' has probability zero"
            )));
        }
        Ok(ExactDistribution {
            n: self.n,
            directed: self.directed,
            pair_count: self.pair_count,
            states,
            probs: probs.into_iter().map(|p| p / mass).collect(),
        })
    }

    /// Total variation distance to empirical state frequencies.
    pub fn tv_to_frequencies(&self, counts: &std::collections::BTreeMap<u64, u64>) -> f64 {
        let total: u64 = counts.values().sum();
        let mut l1 = 0.0;
        for (m, p) in self.iter() {
            let f = counts.get(&m).copied().unwrap_or(0) as f64 / total as f64;
            l1 += (p - f).abs();
        }
        for (m, &c) in counts {
            if self.states.binary_search(m).is_err() {
                l1 += c as f64 / total as f64;
            }
        }
        l1 / 2.0
    }
}

/// One-hot events `B_{k,i}` of one graph: column `i` is one-hot at the event
/// realized by basis unit `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventMatrix {
    pub bins: usize,
    pub categories: Vec<usize>,
}

impl EventMatrix {
    pub fn units(&self) -> usize {
        self.categories.len()
    }

    pub fn get(&self, k: usize, i: usize) -> bool {
        self.categories[i] == k
    }

    /// Row-major `bins x units` 0/1 array.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.bins)
            .map(|k| self.categories.iter().map(|&c| u8::from(c == k)).collect())
            .collect()
    }
}

pub fn event_matrix(g: &Graph, stat: &Statistic) -> Result<EventMatrix> {
    let events = stat.unit_events(g)?;
    Ok(EventMatrix {
        bins: events.bins,
        categories: events.categories,
    })
}

/// Event categories of every positive-probability graph, with a common
/// basis size.
pub(crate) struct EventTable {
    pub units: usize,
    pub bins: usize,
    /// `categories[s * units + i]`.
    pub categories: Vec<u8>,
    pub probs: Vec<f64>,
    pub graphs: Vec<Graph>,
}

impl EventTable {
    pub fn build(dist: &ExactDistribution, stat: &Statistic) -> Result<Self> {
        let rows: Vec<(Graph, f64, Vec<usize>)> = dist
            .iter()
            .filter(|&(_, p)| p > 0.0)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(m, p)| {
                let g = dist.graph(m);
                let cats = stat.unit_events(&g)?.categories;
                Ok((g, p, cats))
            })
            .collect::<Result<_>>()?;
        let units = rows.first().map_or(0, |r| r.2.len());
        if let Some(r) = rows.iter().find(|r| r.2.len() != units) {
            return Err(Error::RandomBasisCount(units, r.2.len()));
        }
        if units == 0 {
            return Err(Error::UndefinedDistribution(
                "the basis is empty on every graph in the support".into(),
            ));
        }
        let bins = stat.bin_count(dist.n());
        if bins > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "{bins} bins exceed the enumeration limit"
            )));
        }
        let mut table = EventTable {
            units,
            bins,
            categories: Vec::with_capacity(rows.len() * units),
            probs: Vec::with_capacity(rows.len()),
            graphs: Vec::with_capacity(rows.len()),
        };
        for (g, p, cats) in rows {
            table.categories.extend(cats.iter().map(|&c| c as u8));
            table.probs.push(p);
            table.graphs.push(g);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn row(&self, s: usize) -> &[u8] {
        &self.categories[s * self.units..(s + 1) * self.units]
    }

    pub fn empirical(&self, s: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.bins];
        for &c in self.row(s) {
            v[c as usize] += 1.0;
        }
        v.iter_mut().for_each(|x| *x /= self.units as f64);
        v
    }

    pub fn theta_star(&self) -> Vec<f64> {
        let mut theta = vec![0.0; self.bins];
        for s in 0..self.len() {
            for (t, f) in theta.iter_mut().zip(self.empirical(s)) {
                *t += self.probs[s] * f;
            }
        }
        theta
    }

    pub fn tail(&self, theta: &[f64], t: f64) -> f64 {
        (0..self.len())
            .filter(|&s| {
                linf_distance(&self.empirical(s), theta).expect("equal lengths") >= t - SLACK
            })
            .map(|s| self.probs[s])
            .sum()
    }
}

/// Exact expectation of the empirical distribution. The basis size must be
/// the same on every graph in the support (condition ESP on an edge count).
pub fn exact_theta_star(dist: &ExactDistribution, stat: &Statistic) -> Result<Vec<f64>> {
    Ok(EventTable::build(dist, stat)?.theta_star())
}

/// Exact `P(||F - theta*||_inf >= t)`. Deviations within `1e-12` below `t`
/// count as exceeding it.
pub fn exact_tail_prob(dist: &ExactDistribution, stat: &Statistic, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t must be positive, got {t}"
        )));
    }
    let table = EventTable::build(dist, stat)?;
    let theta = table.theta_star();
    Ok(table.tail(&theta, t))
}
