//! Random graph models and samplers.
//!
//! [`ModelSpec`] round-trips through JSON with a `variant` discriminator:
//!
//! ```json
//! {"variant": "bernoulli", "directed": false, "probs": [[0, 0.5], [0.5, 0]]}
//! {"variant": "beta-model", "theta": [0.5, -0.5, 0.2, 0.0]}
//! {"variant": "curved-ergm", "theta1": -3.5, "theta2": 0.4, "theta3": 0.75,
//!  "eta_convention": "as-printed"}
//! {"variant": "local-dependence", "directed": true, "blocks": [1, 1, 2, 2],
//!  "within": [{"variant": "bernoulli", ...}, ...], "between": 0.0}
//! ```
//!
//! Block labels in JSON are 1-based. `between` is either one probability for
//! every cross-block pair or a full `n x n` matrix.

mod ergm;
mod theta_star;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use ergm::{
    ergm_log_weight, gwesp_eta, mcmc_sample_ergm, CurvedErgm, ErgmChain, EtaConvention, McmcConfig,
};
pub use theta_star::{estimate_theta_star, estimate_with, sample_ergm_chains, ThetaStarEstimate};

use crate::error::{Error, Result};
use crate::graph::{canonical_pairs, BlockStructure, Graph};
use crate::rng::Rng;

/// Probabilities for cross-block pairs of a local-dependence model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeProbs {
    Constant(f64),
    Matrix(Vec<Vec<f64>>),
}

impl EdgeProbs {
    fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            EdgeProbs::Constant(p) => *p,
            EdgeProbs::Matrix(m) => m[i][j],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Independent edges; `probs[i][j]` is the probability of `(i, j)`.
    /// Must be symmetric when undirected. The diagonal is ignored.
    Bernoulli {
        #[serde(default)]
        directed: bool,
        probs: Vec<Vec<f64>>,
    },
    /// Undirected, logit of edge `{i, j}` is `theta[i] + theta[j]`.
    BetaModel {
        theta: Vec<f64>,
    },
    CurvedErgm(CurvedErgm),
    /// Within-block subgraphs follow their own specs, cross-block edges are
    /// independent Bernoulli draws.
    LocalDependence {
        #[serde(default)]
        directed: bool,
        blocks: BlockStructure,
        within: Vec<ModelSpec>,
        between: EdgeProbs,
    },
}

/// `1 / (1 + exp(-x))`, saturating cleanly for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Edge probability matrix of the beta-model. Diagonal is zero.
pub fn beta_model_probs(theta: &[f64]) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = logistic(theta[i] + theta[j]);
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    p
}

fn check_probs(probs: &[Vec<f64>], directed: bool) -> Result<()> {
    let n = probs.len();
    if n == 0 {
        return Err(Error::InvalidModel("empty probability matrix".into()));
    }
    for (i, row) in probs.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidModel(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        for (j, &p) in row.iter().enumerate() {
            if i == j {
                continue;
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidModel(format!(
                    "probability {p} at ({}, {}) outside [0, 1]",
                    i + 1,
                    j + 1
                )));
            }
            if !directed && p != probs[j][i] {
                return Err(Error::InvalidModel(format!(
                    "undirected probabilities not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Draws each pair independently. Deterministic given the generator state.
pub fn sample_bernoulli(probs: &[Vec<f64>], directed: bool, rng: &mut Rng) -> Result<Graph> {
    check_probs(probs, directed)?;
    let n = probs.len();
    let mut g = Graph::new(n, directed)?;
    for (i, j) in canonical_pairs(n, directed) {
        if rng.gen::<f64>() < probs[i][j] {
            g.set_edge(i, j, true)?;
        }
    }
    Ok(g)
}

fn log_bernoulli(p: f64, present: bool) -> f64 {
    if present {
        p.ln()
    } else {
        (1.0 - p).ln()
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Bernoulli { directed, probs } => check_probs(probs, *directed),
            ModelSpec::BetaModel { theta } => {
                if theta.is_empty() {
                    return Err(Error::InvalidModel("empty theta".into()));
                }
                if theta.iter().any(|t| !t.is_finite()) {
                    return Err(Error::InvalidModel("theta entries must be finite".into()));
                }
                Ok(())
            }
            ModelSpec::CurvedErgm(e) => e.validate(),
            ModelSpec::LocalDependence {
                directed,
                blocks,
                within,
                between,
            } => {
                if within.len() != blocks.block_count() {
                    return Err(Error::InvalidModel(format!(
                        "{} within-block specs for {} blocks",
                        within.len(),
                        blocks.block_count()
                    )));
                }
                for (b, spec) in within.iter().enumerate() {
                    spec.validate()?;
                    if matches!(spec, ModelSpec::LocalDependence { .. }) {
                        return Err(Error::InvalidModel("nested local dependence".into()));
                    }
                    if spec.is_directed() != *directed {
                        return Err(Error::InvalidModel(format!(
                            "block {} spec directedness differs from the model",
                            b + 1
                        )));
                    }
                    if let Some(m) = spec.node_count() {
                        if m != blocks.members(b).len() {
                            return Err(Error::InvalidModel(format!(
                                "block {} has {} nodes but its spec has {m}",
                                b + 1,
                                blocks.members(b).len()
                            )));
                        }
                    }
                }
                match between {
                    EdgeProbs::Constant(p) if !(0.0..=1.0).contains(p) => Err(Error::InvalidModel(
                        format!("between probability {p} outside [0, 1]"),
                    )),
                    EdgeProbs::Matrix(m) => {
                        if m.len() != blocks.node_count() {
                            return Err(Error::InvalidModel(
                                "between matrix dimension differs from node count".into(),
                            ));
                        }
                        check_probs(m, *directed)
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn is_directed(&self) -> bool {
        match self {
            ModelSpec::Bernoulli { directed, .. } | ModelSpec::LocalDependence { directed, .. } => {
                *directed
            }
            ModelSpec::BetaModel { .. } | ModelSpec::CurvedErgm(_) => false,
        }
    }

    /// Node count fixed by the spec; `None` for the curved ERGM, which is
    /// defined for every `n`.
    pub fn node_count(&self) -> Option<usize> {
        match self {
            ModelSpec::Bernoulli { probs, .. } => Some(probs.len()),
            ModelSpec::BetaModel { theta } => Some(theta.len()),
            ModelSpec::CurvedErgm(_) => None,
            ModelSpec::LocalDependence { blocks, .. } => Some(blocks.node_count()),
        }
    }

    /// Resolves the node count, checking an explicit request against the spec.
    pub fn resolve_nodes(&self, requested: Option<usize>) -> Result<usize> {
        match (self.node_count(), requested) {
            (Some(m), Some(r)) if m != r => Err(Error::InvalidArgument(format!(
                "model has {m} nodes but {r} were requested"
            ))),
            (Some(m), _) => Ok(m),
            (None, Some(r)) => Ok(r),
            (None, None) => Err(Error::InvalidArgument(
                "node count required for this model".into(),
            )),
        }
    }

    /// Marginal probability of edge `(i, j)` for independent-edge parts of the
    /// model; `None` where edges are dependent.
    fn pair_probability(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            ModelSpec::Bernoulli { probs, .. } => Some(probs[i][j]),
            ModelSpec::BetaModel { theta } => Some(logistic(theta[i] + theta[j])),
            ModelSpec::CurvedErgm(_) => None,
            ModelSpec::LocalDependence {
                blocks,
                within,
                between,
                ..
            } => {
                let (bi, bj) = (blocks.block_of(i), blocks.block_of(j));
                if bi != bj {
                    return Some(between.get(i, j));
                }
                let members = blocks.members(bi);
                let a = members.iter().position(|&v| v == i)?;
                let b = members.iter().position(|&v| v == j)?;
                within[bi].pair_probability(a, b)
            }
        }
    }

    /// For each canonical pair, `Some(present)` when the model fixes that
    /// edge with probability one.
    pub fn fixed_pairs(&self, n: usize) -> Vec<Option<bool>> {
        canonical_pairs(n, self.is_directed())
            .into_iter()
            .map(|(i, j)| match self.pair_probability(i, j) {
                Some(0.0) => Some(false),
                Some(1.0) => Some(true),
                _ => None,
            })
            .collect()
    }

    /// Unnormalized log-probability of `g`; `-inf` for impossible graphs.
    pub fn log_weight(&self, g: &Graph) -> f64 {
        match self {
            ModelSpec::Bernoulli { .. } | ModelSpec::BetaModel { .. } => {
                canonical_pairs(g.n(), self.is_directed())
                    .into_iter()
                    .map(|(i, j)| {
                        let p = self.pair_probability(i, j).expect("independent model");
                        log_bernoulli(p, g.has_edge(i, j))
                    })
                    .sum()
            }
            ModelSpec::CurvedErgm(e) => ergm_log_weight(g, e),
            ModelSpec::LocalDependence {
                blocks,
                within,
                between,
                directed,
            } => {
                let mut total = 0.0;
                for (b, spec) in within.iter().enumerate() {
                    let sub = g
                        .induced_subgraph(blocks.members(b))
                        .expect("block members are valid nodes");
                    total += spec.log_weight(&sub);
                }
                for (i, j) in canonical_pairs(g.n(), *directed) {
                    if blocks.block_of(i) != blocks.block_of(j) {
                        total += log_bernoulli(between.get(i, j), g.has_edge(i, j));
                    }
                }
                total
            }
        }
    }

    /// Draws one graph. `n` is needed only for the curved ERGM; MCMC settings
    /// apply to curved-ERGM parts.
    pub fn sample(&self, n: Option<usize>, mcmc: &McmcConfig, rng: &mut Rng) -> Result<Graph> {
        self.validate()?;
        match self {
            ModelSpec::Bernoulli { directed, probs } => sample_bernoulli(probs, *directed, rng),
            ModelSpec::BetaModel { theta } => {
                sample_bernoulli(&beta_model_probs(theta), false, rng)
            }
            ModelSpec::CurvedErgm(e) => {
                let n = self.resolve_nodes(n)?;
                let mut chain = ErgmChain::new(e, n)?;
                chain.run(mcmc.burn_in, rng);
                Ok(chain.graph())
            }
            ModelSpec::LocalDependence { .. } => sample_local_dependence(self, mcmc, rng),
        }
    }
}

/// Samples each within-block subgraph from its own spec, then the
/// cross-block pairs.
pub fn sample_local_dependence(
    spec: &ModelSpec,
    mcmc: &McmcConfig,
    rng: &mut Rng,
) -> Result<Graph> {
    let ModelSpec::LocalDependence {
        directed,
        blocks,
        within,
        between,
    } = spec
    else {
        return Err(Error::InvalidModel("not a local-dependence model".into()));
    };
    spec.validate()?;
    let mut g = Graph::new(blocks.node_count(), *directed)?;
    for (b, sub_spec) in within.iter().enumerate() {
        let members = blocks.members(b);
        let sub = sub_spec.sample(Some(members.len()), mcmc, rng)?;
        for (a, c) in sub.edges() {
            g.set_edge(members[a], members[c], true)?;
        }
    }
    if !matches!(between, EdgeProbs::Constant(p) if *p == 0.0) {
        for (i, j) in canonical_pairs(g.n(), *directed) {
            if blocks.block_of(i) != blocks.block_of(j) && rng.gen::<f64>() < between.get(i, j) {
                g.set_edge(i, j, true)?;
            }
        }
    }
    Ok(g)
}
