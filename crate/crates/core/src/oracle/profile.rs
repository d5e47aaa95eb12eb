use std::collections::BTreeMap;

use serde::Serialize;

use super::{EventTable, ExactDistribution, SupportPredicate};
use crate::error::{Error, Result};
use crate::stats::{Statistic, StatisticKind};

/// Exact dependence coefficients of the event indicators `B_{k,i}`.
#[derive(Clone, Debug, Serialize)]
pub struct DependenceProfile {
    pub kind: StatisticKind,
    /// Basis size `M`.
    pub units: usize,
    /// Number of events `p + 1`.
    pub bins: usize,
    /// Sum of same-event covariances, divided by `M`.
    pub c_n: f64,
    /// Conditional-probability form of the same quantity; `None` when some
    /// event has probability zero.
    pub delta_n: Option<f64>,
    pub delta_n_diagnostic: Option<String>,
    /// Average expected total variation between conditional and marginal
    /// laws of unit categories.
    pub prop1_bound: f64,
    pub d_per_k: Vec<f64>,
    pub d_n: f64,
    /// `delta_table[k][i][j]` for units `i < j` (0-based); zero elsewhere.
    pub delta_table: Vec<Vec<Vec<f64>>>,
    /// `covariances[k][i][j] = Cov(B_{k,i}, B_{k,j})`.
    pub covariances: Vec<Vec<Vec<f64>>>,
    pub support: SupportPredicate,
}

impl DependenceProfile {
    /// `min{C_N, Delta_N}`, falling back to `C_N` when `Delta_N` is undefined.
    pub fn min_signed(&self) -> f64 {
        self.delta_n.map_or(self.c_n, |d| d.min(self.c_n))
    }

    /// `min{|C_N|, |Delta_N|}`, falling back to `|C_N|`.
    pub fn min_abs(&self) -> f64 {
        self.delta_n
            .map_or(self.c_n.abs(), |d| d.abs().min(self.c_n.abs()))
    }

    /// Rows `quantity,k,value`; `k` is empty for scalar quantities.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,k,value\n");
        out.push_str(&format!("M,,{}\n", self.units));
        out.push_str(&format!("p,,{}\n", self.bins - 1));
        out.push_str(&format!("C_N,,{}\n", self.c_n));
        if let Some(d) = self.delta_n {
            out.push_str(&format!("Delta_N,,{d}\n"));
        }
        out.push_str(&format!("prop1_bound,,{}\n", self.prop1_bound));
        for (k, d) in self.d_per_k.iter().enumerate() {
            out.push_str(&format!("D_N_k,{k},{d}\n"));
        }
        out.push_str(&format!("D_N,,{}\n", self.d_n));
        out
    }
}

#[derive(Default)]
struct PrefixStats {
    total: f64,
    on: Vec<f64>,
    feasible: bool,
}

/// `delta[i][j]` for one event: the largest change in `P(B_j = 1 | prefix)`
/// between feasible prefixes of length `i + 1` that differ only in the last
/// coordinate.
fn delta_for_event(patterns: &BTreeMap<u64, (f64, bool)>, units: usize) -> Vec<Vec<f64>> {
    let mut delta = vec![vec![0.0; units]; units];
    for i in 0..units.saturating_sub(1) {
        let len = i + 1;
        let low = (1u64 << len) - 1;
        let mut prefixes: BTreeMap<u64, PrefixStats> = BTreeMap::new();
        for (&pattern, &(mass, in_support)) in patterns {
            let entry = prefixes
                .entry(pattern & low)
                .or_insert_with(|| PrefixStats {
                    on: vec![0.0; units],
                    ..Default::default()
                });
            entry.total += mass;
            entry.feasible |= in_support;
            for j in len..units {
                if pattern >> j & 1 == 1 {
                    entry.on[j] += mass;
                }
            }
        }
        for (&b0, s0) in prefixes.range(..) {
            if b0 >> i & 1 == 1 || !s0.feasible || s0.total <= 0.0 {
                continue;
            }
            let Some(s1) = prefixes.get(&(b0 | 1 << i)) else {
                continue;
            };
            if !s1.feasible || s1.total <= 0.0 {
                continue;
            }
            for j in len..units {
                let d = (s0.on[j] / s0.total - s1.on[j] / s1.total).abs();
                if d > delta[i][j] {
                    delta[i][j] = d;
                }
            }
        }
    }
    delta
}

/// Exact dependence coefficients of `stat` under `dist`.
///
/// `support` restricts which conditioning prefixes count in the `delta`
/// maxima; conditional laws themselves are always taken under `dist`.
/// Prefixes of probability zero never count.
pub fn compute_dependence_profile(
    dist: &ExactDistribution,
    stat: &Statistic,
    support: &SupportPredicate,
) -> Result<DependenceProfile> {
    let table = EventTable::build(dist, stat)?;
    let (m, bins) = (table.units, table.bins);
    if m > 63 {
        return Err(Error::InvalidArgument(format!(
            "{m} basis units exceed the enumeration limit"
        )));
    }
    let in_support: Vec<bool> = table.graphs.iter().map(|g| support.contains(g)).collect();
    if !in_support.iter().any(|&b| b) {
        return Err(Error::UndefinedDistribution(format!(
            "support '{support}' has probability zero"
        )));
    }

    // joint[(i * m + j) * bins^2 + a * bins + b] = P(c_i = a, c_j = b)
    let kk = bins * bins;
    let mut joint = vec![0.0; m * m * kk];
    let mut marginal = vec![vec![0.0; m]; bins];
    for s in 0..table.len() {
        let (row, p) = (table.row(s), table.probs[s]);
        for i in 0..m {
            let a = row[i] as usize;
            marginal[a][i] += p;
            for j in 0..m {
                if i != j {
                    joint[(i * m + j) * kk + a * bins + row[j] as usize] += p;
                }
            }
        }
    }
    let pair = |i: usize, j: usize, a: usize, b: usize| joint[(i * m + j) * kk + a * bins + b];
    let mf = m as f64;

    let mut covariances = vec![vec![vec![0.0; m]; m]; bins];
    let mut c_n = 0.0;
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            for (k, q) in marginal.iter().enumerate() {
                let cov = pair(i, j, k, k) - q[i] * q[j];
                covariances[k][i][j] = cov;
                c_n += cov;
            }
        }
    }
    c_n /= mf;

    let zero = (0..bins)
        .flat_map(|k| (0..m).map(move |i| (k, i)))
        .find(|&(k, i)| marginal[k][i] <= 0.0);
    let (delta_n, delta_n_diagnostic) = match zero {
        Some((k, i)) => (
            None,
            Some(format!("event {k} has probability zero for unit {i}")),
        ),
        None => {
            let mut total = 0.0;
            for i in 0..m {
                for (k, q) in marginal.iter().enumerate() {
                    let dev: f64 = (0..m)
                        .filter(|&j| j != i)
                        .map(|j| pair(i, j, k, k) / q[i] - q[j])
                        .sum();
                    total += q[i] * dev;
                }
            }
            (Some(total / mf), None)
        }
    };

    let mut prop1_bound = 0.0;
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            for a in 0..bins {
                let qa = marginal[a][i];
                if qa <= 0.0 {
                    continue;
                }
                let tv: f64 = (0..bins)
                    .map(|b| (pair(i, j, a, b) / qa - marginal[b][j]).abs())
                    .sum::<f64>()
                    / 2.0;
                prop1_bound += qa * tv;
            }
        }
    }
    prop1_bound /= mf;

    let mut delta_table = Vec::with_capacity(bins);
    let mut d_per_k = Vec::with_capacity(bins);
    for k in 0..bins {
        let mut patterns: BTreeMap<u64, (f64, bool)> = BTreeMap::new();
        for s in 0..table.len() {
            let pattern = table
                .row(s)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c as usize == k)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            let e = patterns.entry(pattern).or_insert((0.0, false));
            e.0 += table.probs[s];
            e.1 |= in_support[s];
        }
        let delta = delta_for_event(&patterns, m);
        let d: f64 = (0..m)
            .map(|i| (1.0 + delta[i][i + 1..].iter().sum::<f64>()).powi(2))
            .sum::<f64>()
            / mf;
        d_per_k.push(d);
        delta_table.push(delta);
    }
    let d_n = d_per_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(DependenceProfile {
        kind: stat.kind(),
        units: m,
        bins,
        c_n,
        delta_n,
        delta_n_diagnostic,
        prop1_bound,
        d_per_k,
        d_n,
        delta_table,
        covariances,
        support: *support,
    })
}
