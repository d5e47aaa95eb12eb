//! Curved exponential-family random graph model with geometrically weighted
//! edgewise shared partner terms, and a Metropolis sampler for it.
//!
//! The log-weight of `x` is `theta1 * |x| + sum_k eta_k * s_k(x)` where
//! `s_k` counts edges whose endpoints share exactly `k` partners.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Rng;

/// How the geometric weights `eta_k` are formed.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaConvention {
    /// `theta2 * e^theta3 * (1 - (1 - e^theta3)^k)`.
    #[default]
    AsPrinted,
    /// `theta2 * e^theta3 * (1 - (1 - e^-theta3)^k)`, the usual GWESP form.
    #[serde(rename = "standard-gwesp")]
    StandardGwesp,
}

impl EtaConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            EtaConvention::AsPrinted => "as-printed",
            EtaConvention::StandardGwesp => "standard-gwesp",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvedErgm {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    #[serde(default)]
    pub eta_convention: EtaConvention,
}

impl CurvedErgm {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, eta_convention: EtaConvention) -> Self {
        CurvedErgm {
            theta1,
            theta2,
            theta3,
            eta_convention,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.theta1, self.theta2, self.theta3]
            .iter()
            .all(|t| t.is_finite())
        {
            return Err(Error::InvalidModel("ERGM parameters must be finite".into()));
        }
        if self.theta3 < 0.0 {
            return Err(Error::InvalidModel(format!(
                "theta3 must be non-negative, got {}",
                self.theta3
            )));
        }
        Ok(())
    }

    /// `weights[k]` is the log-weight contribution of one edge with `k`
    /// shared partners on `n` nodes: zero for `k = 0`, `eta_k` otherwise.
    pub fn esp_weights(&self, n: usize) -> Vec<f64> {
        let top = n.saturating_sub(2);
        std::iter::once(0.0)
            .chain((1..=top).map(|k| {
                gwesp_eta(k, self.theta2, self.theta3, self.eta_convention).expect("k >= 1")
            }))
            .collect()
    }
}

pub fn gwesp_eta(k: usize, theta2: f64, theta3: f64, convention: EtaConvention) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("eta_k is defined for k >= 1".into()));
    }
    let inner = match convention {
        EtaConvention::AsPrinted => theta3.exp(),
        EtaConvention::StandardGwesp => (-theta3).exp(),
    };
    let k = i32::try_from(k).map_err(|_| Error::InvalidArgument("k too large".into()))?;
    Ok(theta2 * theta3.exp() * (1.0 - (1.0 - inner).powi(k)))
}

/// Full recount of the log-weight. `g` must be undirected.
pub fn ergm_log_weight(g: &Graph, spec: &CurvedErgm) -> f64 {
    let weights = spec.esp_weights(g.n());
    let mut total = spec.theta1 * g.edge_count() as f64;
    for (i, j) in g.edges() {
        total += weights[g.common_neighbors(i, j)];
    }
    total
}

/// MCMC schedule, counted in proposed toggles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub burn_in: u64,
    /// Toggles between retained samples.
    pub thin: u64,
    /// Independent chains used when many samples are needed.
    #[serde(default = "default_chains")]
    pub chains: usize,
}

fn default_chains() -> usize {
    8
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            burn_in: 100_000,
            thin: 1_000,
            chains: default_chains(),
        }
    }
}

impl McmcConfig {
    /// Default study schedule for `n` nodes: thinning of `10 n^2` toggles.
    pub fn for_nodes(n: usize) -> Self {
        McmcConfig {
            thin: 10 * (n as u64) * (n as u64),
            ..McmcConfig::default()
        }
    }
}

/// Metropolis chain over undirected graphs with uniform single-pair toggles.
#[derive(Clone, Debug)]
pub struct ErgmChain {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: usize,
    theta1: f64,
    weights: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

impl ErgmChain {
    /// Starts from the empty graph.
    pub fn new(spec: &CurvedErgm, n: usize) -> Result<Self> {
        spec.validate()?;
        if n < 2 {
            return Err(Error::InvalidArgument(
                "the ERGM chain needs at least two nodes".into(),
            ));
        }
        let words = n.div_ceil(64);
        Ok(ErgmChain {
            n,
            words,
            rows: vec![0; n * words],
            edges: 0,
            theta1: spec.theta1,
            weights: spec.esp_weights(n),
            accepted: 0,
            proposed: 0,
        })
    }

    pub fn from_graph(spec: &CurvedErgm, g: &Graph) -> Result<Self> {
        if g.is_directed() {
            return Err(Error::InvalidModel("the curved ERGM is undirected".into()));
        }
        let mut chain = ErgmChain::new(spec, g.n())?;
        for (i, j) in g.edges() {
            chain.flip(i, j);
        }
        Ok(chain)
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize, j: usize) {
        let present = self.has(i, j);
        self.rows[i * self.words + j / 64] ^= 1 << (j % 64);
        self.rows[j * self.words + i / 64] ^= 1 << (i % 64);
        if present {
            self.edges -= 1;
        } else {
            self.edges += 1;
        }
    }

    fn shared(&self, i: usize, j: usize) -> usize {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Change in log-weight from toggling `{i, j}`, computed from the two
    /// endpoint neighborhoods only.
    pub fn toggle_delta(&self, i: usize, j: usize) -> f64 {
        let present = self.has(i, j);
        let w = &self.weights;
        let mut add = self.theta1 + w[self.shared(i, j)];
        let adjust = usize::from(present);
        for word in 0..self.words {
            let mut common = self.rows[i * self.words + word] & self.rows[j * self.words + word];
            while common != 0 {
                let h = word * 64 + common.trailing_zeros() as usize;
                common &= common - 1;
                // shared-partner counts of (i,h) and (j,h) without the edge {i,j}
                let a = self.shared(i, h) - adjust;
                let b = self.shared(j, h) - adjust;
                add += w[a + 1] - w[a] + w[b + 1] - w[b];
            }
        }
        if present {
            -add
        } else {
            add
        }
    }

    /// One Metropolis step. Returns whether the toggle was accepted.
    pub fn step(&mut self, rng: &mut Rng) -> bool {
        let i = rng.gen_range(0..self.n);
        let mut j = rng.gen_range(0..self.n - 1);
        if j >= i {
            j += 1;
        }
        let delta = self.toggle_delta(i, j);
        self.proposed += 1;
        if delta >= 0.0 || rng.gen::<f64>() < delta.exp() {
            self.flip(i, j);
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    pub fn run(&mut self, steps: u64, rng: &mut Rng) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Whether `{i, j}` is currently an edge.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.has(i, j)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.n, false).expect("n >= 2");
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has(i, j) {
                    g.set_edge(i, j, true).expect("valid pair");
                }
            }
        }
        g
    }
}

/// Runs one chain from the empty graph: `burn_in` toggles, then `count`
/// samples spaced `thin` toggles apart.
pub fn mcmc_sample_ergm(
    spec: &CurvedErgm,
    n: usize,
    burn_in: u64,
    thin: u64,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Graph>> {
    if n < 3 {
        return Err(Error::InvalidArgument("ERGM sampling needs n >= 3".into()));
    }
    if burn_in == 0 || thin == 0 || count == 0 {
        return Err(Error::InvalidArgument(
            "burn_in, thin and count must be positive".into(),
        ));
    }
    let mut chain = ErgmChain::new(spec, n)?;
    chain.run(burn_in, rng);
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        if s > 0 {
            chain.run(thin, rng);
        }
        out.push(chain.graph());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::logistic;
    use crate::rng::stream;

    const STUDY: (f64, f64, f64) = (-3.5, 0.4, 0.75);

    fn study_spec() -> CurvedErgm {
        CurvedErgm::new(STUDY.0, STUDY.1, STUDY.2, EtaConvention::AsPrinted)
    }

    #[test]
    fn eta_examples() {
        let eta = gwesp_eta(1, 0.4, 0.75, EtaConvention::AsPrinted).unwrap();
        let expected = 0.4 * 0.75f64.exp() * 0.75f64.exp();
        assert!((eta - expected).abs() < 1e-15);
        assert!((eta - 1.792_67).abs() < 1e-5);
        assert_eq!(
            gwesp_eta(1, 0.0, 0.9, EtaConvention::AsPrinted).unwrap(),
            0.0
        );
        for conv in [EtaConvention::AsPrinted, EtaConvention::StandardGwesp] {
            assert_eq!(gwesp_eta(1, 1.0, 0.0, conv).unwrap(), 1.0);
        }
        assert!(gwesp_eta(0, 1.0, 0.5, EtaConvention::AsPrinted).is_err());
        // standard form: 1 - (1 - e^-t) = e^-t, so eta_1 = theta2
        let std1 = gwesp_eta(1, 0.4, 0.75, EtaConvention::StandardGwesp).unwrap();
        assert!((std1 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn log_weight_examples() {
        let spec = study_spec();
        assert_eq!(ergm_log_weight(&Graph::new(5, false).unwrap(), &spec), 0.0);
        let single = Graph::from_edges(5, false, &[(1, 3)]).unwrap();
        assert_eq!(ergm_log_weight(&single, &spec), -3.5);
        let k3 = Graph::from_edges(3, false, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = ergm_log_weight(&k3, &spec);
        assert!(
            (w - (-10.5 + 3.0 * 0.4 * 1.5f64.exp())).abs() < 1e-12,
            "{w}"
        );
        assert!((w - (-5.12196)).abs() < 2e-5);
    }

    #[test]
    fn change_statistic_matches_full_recount() {
        let spec = CurvedErgm::new(-0.5, 0.7, 0.4, EtaConvention::AsPrinted);
        let mut rng = stream(11, &[]);
        for n in [3, 5, 9, 70] {
            let mut chain = ErgmChain::new(&spec, n).unwrap();
            for _ in 0..400 {
                let i = rng.gen_range(0..n);
                let j = (i + 1 + rng.gen_range(0..n - 1)) % n;
                let before = ergm_log_weight(&chain.graph(), &spec);
                let delta = chain.toggle_delta(i, j);
                chain.flip(i, j);
                let after = ergm_log_weight(&chain.graph(), &spec);
                assert!(
                    (after - before - delta).abs() < 1e-9,
                    "n={n}: {after} - {before} != {delta}"
                );
            }
        }
    }

    #[test]
    fn zero_delta_is_always_accepted() {
        // theta1 = 0, theta2 = 0: every toggle has delta 0
        let spec = CurvedErgm::new(0.0, 0.0, 0.0, EtaConvention::AsPrinted);
        let mut chain = ErgmChain::new(&spec, 6).unwrap();
        let mut rng = stream(2, &[]);
        for _ in 0..1000 {
            assert!(chain.step(&mut rng));
        }
        assert_eq!(chain.acceptance_rate(), 1.0);
    }

    #[test]
    fn independent_case_edge_frequency() {
        let spec = CurvedErgm::new(0.0, 0.0, 0.5, EtaConvention::AsPrinted);
        let n = 10;
        let mut chain = ErgmChain::new(&spec, n).unwrap();
        let mut rng = stream(5, &[]);
        chain.run(10_000, &mut rng);
        let steps = 200_000;
        let mut density = 0.0;
        for _ in 0..steps {
            chain.step(&mut rng);
            density += chain.edge_count() as f64 / 45.0;
        }
        let freq = density / steps as f64;
        assert!((freq - logistic(0.0)).abs() < 0.01, "{freq}");
    }

    #[test]
    fn sampler_is_reproducible() {
        let spec = study_spec();
        let a = mcmc_sample_ergm(&spec, 12, 500, 50, 5, &mut stream(3, &[1])).unwrap();
        let b = mcmc_sample_ergm(&spec, 12, 500, 50, 5, &mut stream(3, &[1])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(mcmc_sample_ergm(&spec, 2, 1, 1, 1, &mut stream(3, &[])).is_err());
        assert!(mcmc_sample_ergm(&spec, 5, 0, 1, 1, &mut stream(3, &[])).is_err());
    }
}
