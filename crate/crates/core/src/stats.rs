//! Sequences of graph statistics and their empirical distributions.
//!
//! Every statistic here is built from a basis of `M` units (nodes, edges or
//! node pairs), each of which realizes exactly one of `p + 1` mutually
//! exclusive events. [`UnitEvents`] records the event index per unit; the
//! empirical distribution is the histogram of those indices divided by `M`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BlockStructure, Graph};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    Degree,
    OutDegree,
    InDegree,
    #[serde(rename = "esp")]
    EdgewiseSharedPartner,
    #[serde(rename = "geodesic")]
    GeodesicDistance,
    WithinBlockOutDegree,
    /// Undirected counterpart of [`StatisticKind::WithinBlockOutDegree`].
    WithinBlockDegree,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 7] = [
        StatisticKind::Degree,
        StatisticKind::OutDegree,
        StatisticKind::InDegree,
        StatisticKind::EdgewiseSharedPartner,
        StatisticKind::GeodesicDistance,
        StatisticKind::WithinBlockOutDegree,
        StatisticKind::WithinBlockDegree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatisticKind::Degree => "degree",
            StatisticKind::OutDegree => "out-degree",
            StatisticKind::InDegree => "in-degree",
            StatisticKind::EdgewiseSharedPartner => "esp",
            StatisticKind::GeodesicDistance => "geodesic",
            StatisticKind::WithinBlockOutDegree => "within-block-out-degree",
            StatisticKind::WithinBlockDegree => "within-block-degree",
        }
    }

    /// Whether the statistic is defined on directed (true) or undirected
    /// (false) graphs.
    pub fn needs_directed(self) -> bool {
        matches!(
            self,
            StatisticKind::OutDegree
                | StatisticKind::InDegree
                | StatisticKind::WithinBlockOutDegree
        )
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown statistic `{s}`")))
    }
}

/// A statistic kind together with the parameters it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Statistic {
    kind: StatisticKind,
    blocks: Option<BlockStructure>,
    respondents: Option<Vec<usize>>,
}

impl Statistic {
    /// Kinds that need no parameters.
    pub fn simple(kind: StatisticKind) -> Result<Self> {
        match kind {
            StatisticKind::WithinBlockOutDegree | StatisticKind::WithinBlockDegree => Err(
                Error::InvalidArgument(format!("{kind} needs a block structure")),
            ),
            _ => Ok(Statistic {
                kind,
                blocks: None,
                respondents: None,
            }),
        }
    }

    pub fn degree() -> Self {
        Statistic::simple(StatisticKind::Degree).unwrap()
    }

    pub fn esp() -> Self {
        Statistic::simple(StatisticKind::EdgewiseSharedPartner).unwrap()
    }

    pub fn geodesic() -> Self {
        Statistic::simple(StatisticKind::GeodesicDistance).unwrap()
    }

    /// Within-block out-degree over `respondents` (0-based, deduplicated and
    /// sorted here). `None` means every node responds.
    pub fn within_block_out_degree(
        blocks: BlockStructure,
        respondents: Option<Vec<usize>>,
    ) -> Result<Self> {
        let respondents = match respondents {
            None => None,
            Some(mut r) => {
                r.sort_unstable();
                r.dedup();
                if r.is_empty() {
                    return Err(Error::InvalidArgument("respondent set is empty".into()));
                }
                if let Some(&bad) = r.iter().find(|&&i| i >= blocks.node_count()) {
                    return Err(Error::NodeOutOfRange {
                        node: bad,
                        n: blocks.node_count(),
                    });
                }
                Some(r)
            }
        };
        Ok(Statistic {
            kind: StatisticKind::WithinBlockOutDegree,
            blocks: Some(blocks),
            respondents,
        })
    }

    pub fn within_block_degree(blocks: BlockStructure) -> Self {
        Statistic {
            kind: StatisticKind::WithinBlockDegree,
            blocks: Some(blocks),
            respondents: None,
        }
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn blocks(&self) -> Option<&BlockStructure> {
        self.blocks.as_ref()
    }

    pub fn respondents(&self) -> Option<&[usize]> {
        self.respondents.as_deref()
    }

    /// Number of event bins `p + 1` on graphs with `n` nodes.
    pub fn bin_count(&self, n: usize) -> usize {
        match self.kind {
            StatisticKind::Degree | StatisticKind::OutDegree | StatisticKind::InDegree => n,
            StatisticKind::EdgewiseSharedPartner => n.saturating_sub(1).max(1),
            StatisticKind::GeodesicDistance => n,
            StatisticKind::WithinBlockOutDegree | StatisticKind::WithinBlockDegree => {
                self.blocks.as_ref().map_or(1, |b| b.max_block_size())
            }
        }
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        let directed = self.kind.needs_directed();
        if g.is_directed() != directed {
            return Err(Error::KindMismatch {
                kind: self.kind,
                expected: if directed {
                    "a directed"
                } else {
                    "an undirected"
                },
            });
        }
        if let Some(b) = &self.blocks {
            if b.node_count() != g.n() {
                return Err(Error::InvalidBlocks(format!(
                    "block structure covers {} nodes, graph has {}",
                    b.node_count(),
                    g.n()
                )));
            }
        }
        if self.kind == StatisticKind::GeodesicDistance && g.n() < 2 {
            return Err(Error::UndefinedDistribution(
                "geodesic distances need at least two nodes".into(),
            ));
        }
        Ok(())
    }

    /// Event index realized by each basis unit of `g`.
    pub fn unit_events(&self, g: &Graph) -> Result<UnitEvents> {
        self.check_graph(g)?;
        let n = g.n();
        let categories = match self.kind {
            StatisticKind::Degree | StatisticKind::OutDegree => {
                (0..n).map(|i| g.out_degree(i)).collect()
            }
            StatisticKind::InDegree => g.in_degrees(),
            StatisticKind::EdgewiseSharedPartner => g
                .edges()
                .into_iter()
                .map(|(i, j)| g.common_neighbors(i, j))
                .collect(),
            StatisticKind::GeodesicDistance => geodesic_categories(g),
            StatisticKind::WithinBlockOutDegree | StatisticKind::WithinBlockDegree => {
                let blocks = self.blocks.as_ref().expect("checked at construction");
                let within = |i: usize| {
                    g.neighbors(i)
                        .filter(|&j| blocks.block_of(j) == blocks.block_of(i))
                        .count()
                };
                match &self.respondents {
                    Some(r) => r.iter().map(|&i| within(i)).collect(),
                    None => (0..n).map(within).collect(),
                }
            }
        };
        Ok(UnitEvents {
            bins: self.bin_count(n),
            categories,
        })
    }

    pub fn distribution(&self, g: &Graph) -> Result<EmpiricalDistribution> {
        let events = self.unit_events(g)?;
        if events.unit_count() == 0 {
            return Err(Error::UndefinedDistribution(format!(
                "{} has an empty basis (M = 0)",
                self.kind
            )));
        }
        Ok(events.distribution(self.kind))
    }
}

/// Shortest-path category of each unordered pair `i < j`: `d - 1` for
/// distance `d`, `n - 1` when unreachable.
fn geodesic_categories(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for &d in &dist[s + 1..] {
            out.push(if d == usize::MAX { n - 1 } else { d - 1 });
        }
    }
    out
}

/// One-hot event matrix of a single graph, stored by column: unit `i`
/// realizes event `categories[i]` out of `bins`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitEvents {
    pub bins: usize,
    pub categories: Vec<usize>,
}

impl UnitEvents {
    pub fn unit_count(&self) -> usize {
        self.categories.len()
    }

    /// Indicator `B_{k,i}`.
    pub fn indicator(&self, k: usize, i: usize) -> bool {
        self.categories[i] == k
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bins];
        for &c in &self.categories {
            counts[c] += 1;
        }
        counts
    }

    pub fn distribution(&self, kind: StatisticKind) -> EmpiricalDistribution {
        let m = self.unit_count();
        let values = self
            .counts()
            .into_iter()
            .map(|c| if m == 0 { 0.0 } else { c as f64 / m as f64 })
            .collect();
        EmpiricalDistribution {
            kind,
            basis_count: m,
            values,
        }
    }
}

/// Proportions `s_k / M` over the event bins of one statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub kind: StatisticKind,
    pub basis_count: usize,
    pub values: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Bin labels: `0..` for counts; for geodesic distances `1..=N-1`
    /// followed by `inf`.
    pub fn labels(&self) -> Vec<String> {
        bin_labels(self.kind, self.values.len())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,M,k,value\n");
        for (label, v) in self.labels().iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.kind, self.basis_count, label, v
            ));
        }
        out
    }
}

pub fn bin_labels(kind: StatisticKind, bins: usize) -> Vec<String> {
    match kind {
        StatisticKind::GeodesicDistance => (1..bins)
            .map(|d| d.to_string())
            .chain(std::iter::once("inf".to_string()))
            .collect(),
        _ => (0..bins).map(|k| k.to_string()).collect(),
    }
}

pub fn degree_distribution(g: &Graph) -> Result<EmpiricalDistribution> {
    Statistic::degree().distribution(g)
}

pub fn out_degree_distribution(g: &Graph) -> Result<EmpiricalDistribution> {
    Statistic::simple(StatisticKind::OutDegree)?.distribution(g)
}

pub fn in_degree_distribution(g: &Graph) -> Result<EmpiricalDistribution> {
    Statistic::simple(StatisticKind::InDegree)?.distribution(g)
}

pub fn esp_distribution(g: &Graph) -> Result<EmpiricalDistribution> {
    Statistic::esp().distribution(g)
}

pub fn geodesic_distribution(g: &Graph) -> Result<EmpiricalDistribution> {
    Statistic::geodesic().distribution(g)
}

/// `respondents` are 0-based node ids.
pub fn within_block_outdegree_distribution(
    g: &Graph,
    blocks: &BlockStructure,
    respondents: &[usize],
) -> Result<EmpiricalDistribution> {
    Statistic::within_block_out_degree(blocks.clone(), Some(respondents.to_vec()))?.distribution(g)
}

/// `max_k |a_k - b_k|`.
pub fn linf_error(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<f64> {
    linf_distance(&a.values, &b.values)
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::BinMismatch(a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
