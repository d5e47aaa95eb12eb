//! Closed-form radii and confidence levels for the `l_inf` concentration
//! bounds. Natural logarithms throughout.
//!
//! Confidence levels are reported as computed, so they can be zero or
//! negative for small `M` or `N`; such reports are flagged `vacuous`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "Thm1-exp")]
    Thm1Exp,
    #[serde(rename = "Thm1-cheb")]
    Thm1Cheb,
    #[serde(rename = "Thm2")]
    Thm2,
    #[serde(rename = "Cor1")]
    Cor1,
    #[serde(rename = "Cor2")]
    Cor2,
    #[serde(rename = "CorBern")]
    CorBern,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "D_N", skip_serializing_if = "Option::is_none")]
    pub d_n: Option<f64>,
    #[serde(rename = "C_N", skip_serializing_if = "Option::is_none")]
    pub c_n: Option<f64>,
    #[serde(rename = "Delta_N", skip_serializing_if = "Option::is_none")]
    pub delta_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "M_max", skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_n: Option<f64>,
    /// `(2/N) sum_i E d_i`, for the Bernoulli corollary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub epsilon: f64,
    pub confidence: f64,
    pub vacuous: bool,
    pub inputs: BoundInputs,
}

impl BoundReport {
    fn new(bound_id: BoundId, epsilon: f64, confidence: f64, inputs: BoundInputs) -> Self {
        BoundReport {
            bound_id,
            epsilon,
            confidence,
            vacuous: confidence <= 0.0,
            inputs,
        }
    }
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let id = serde_json::to_value(self.bound_id).expect("unit variant");
        write!(
            f,
            "{}: epsilon = {:.6}, confidence = {:.6}",
            id.as_str().unwrap_or_default(),
            self.epsilon,
            self.confidence
        )?;
        if self.vacuous {
            f.write_str(" (vacuous)")?;
        }
        Ok(())
    }
}

fn log_scale(m: usize, p: usize) -> Result<f64> {
    let top = m.max(p + 1);
    if top < 2 {
        return Err(Error::InvalidArgument(format!(
            "max(M, 1 + p) must be at least 2, got {top}"
        )));
    }
    Ok(top as f64)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

fn check_non_negative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite and non-negative, got {x}"
        )))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n >= 3 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "N must be at least 3, got {n}"
        )))
    }
}

/// `sqrt(D_N log(max{M, 1+p}) / M)`, the scale shared by the exponential
/// bounds.
fn exp_scale(d_n: f64, m: usize, p: usize) -> Result<f64> {
    check_non_negative("D_N", d_n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let top = log_scale(m, p)?;
    Ok((d_n * top.ln() / m as f64).sqrt())
}

pub fn thm1_exp_radius(d_n: f64, m: usize, p: usize) -> Result<BoundReport> {
    let scale = exp_scale(d_n, m, p)?;
    let top = log_scale(m, p)?;
    Ok(BoundReport::new(
        BoundId::Thm1Exp,
        1.5f64.sqrt() * scale,
        1.0 - 2.0 / (top * top),
        BoundInputs {
            m: Some(m),
            p: Some(p),
            d_n: Some(d_n),
            ..Default::default()
        },
    ))
}

pub fn thm1_cheb_radius(c_n: f64, delta_n: f64, m: usize, alpha: f64) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let min = c_n.abs().min(delta_n.abs());
    Ok(BoundReport::new(
        BoundId::Thm1Cheb,
        ((1.0 + min) / (alpha * m as f64)).sqrt(),
        1.0 - alpha,
        BoundInputs {
            m: Some(m),
            c_n: Some(c_n),
            delta_n: Some(delta_n),
            alpha: Some(alpha),
            ..Default::default()
        },
    ))
}

/// Support-restricted exponential bound. `r_n` bounds the probability of
/// leaving the support and may not exceed the exponential scale.
pub fn thm2_radius(d_n: f64, m: usize, p: usize, r_n: f64) -> Result<BoundReport> {
    let scale = exp_scale(d_n, m, p)?;
    let top = log_scale(m, p)?;
    if !(r_n > 0.0 && r_n < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "r_N must lie in (0, 1), got {r_n}"
        )));
    }
    if r_n > scale {
        return Err(Error::Precondition(format!(
            "r_N = {r_n} exceeds sqrt(D_N log(max(M, 1+p)) / M) = {scale}"
        )));
    }
    Ok(BoundReport::new(
        BoundId::Thm2,
        13.5f64.sqrt() * scale,
        1.0 - r_n - 4.0 / (top * top),
        BoundInputs {
            m: Some(m),
            p: Some(p),
            d_n: Some(d_n),
            r_n: Some(r_n),
            ..Default::default()
        },
    ))
}

pub fn cor1_radius(m_max: usize, alpha_max: f64, n: usize) -> Result<BoundReport> {
    check_n(n)?;
    check_non_negative("alpha_max", alpha_max)?;
    let nf = n as f64;
    Ok(BoundReport::new(
        BoundId::Cor1,
        (1.0 + m_max as f64 + alpha_max) * (1.5 * nf.ln() / nf).sqrt(),
        1.0 - 6.0 / (nf * nf),
        BoundInputs {
            n: Some(n),
            m_max: Some(m_max),
            alpha_max: Some(alpha_max),
            ..Default::default()
        },
    ))
}

pub fn cor2_radius(m_max: usize, alpha_max: f64, n: usize, beta: f64) -> Result<BoundReport> {
    check_n(n)?;
    check_non_negative("alpha_max", alpha_max)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let nf = n as f64;
    Ok(BoundReport::new(
        BoundId::Cor2,
        (1.0 + m_max as f64 + alpha_max) * (1.5 * nf.ln() / nf.powf(beta)).sqrt(),
        1.0 - 11.0 / (nf * nf),
        BoundInputs {
            n: Some(n),
            m_max: Some(m_max),
            alpha_max: Some(alpha_max),
            beta: Some(beta),
            ..Default::default()
        },
    ))
}

/// Chebyshev-type bound for degree distributions of independent-edge models,
/// with the dependence coefficient bounded by twice the mean expected degree.
pub fn cor_bern_bound(expected_degrees: &[f64], n: usize, alpha: f64) -> Result<BoundReport> {
    check_alpha(alpha)?;
    if n == 0 || expected_degrees.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} expected degrees, got {}",
            expected_degrees.len()
        )));
    }
    for &d in expected_degrees {
        check_non_negative("expected degree", d)?;
    }
    let nf = n as f64;
    let delta_bound = 2.0 * expected_degrees.iter().sum::<f64>() / nf;
    Ok(BoundReport::new(
        BoundId::CorBern,
        ((1.0 + delta_bound) / (alpha * nf)).sqrt(),
        1.0 - alpha,
        BoundInputs {
            n: Some(n),
            alpha: Some(alpha),
            delta_bound: Some(delta_bound),
            ..Default::default()
        },
    ))
}

/// JSON request for one bound, tagged by `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound")]
pub enum BoundRequest {
    #[serde(rename = "Thm1-exp")]
    Thm1Exp {
        #[serde(rename = "D_N")]
        d_n: f64,
        #[serde(rename = "M")]
        m: usize,
        p: usize,
    },
    #[serde(rename = "Thm1-cheb")]
    Thm1Cheb {
        #[serde(rename = "C_N")]
        c_n: f64,
        #[serde(rename = "Delta_N")]
        delta_n: f64,
        #[serde(rename = "M")]
        m: usize,
        alpha: f64,
    },
    #[serde(rename = "Thm2")]
    Thm2 {
        #[serde(rename = "D_N")]
        d_n: f64,
        #[serde(rename = "M")]
        m: usize,
        p: usize,
        r_n: f64,
    },
    #[serde(rename = "Cor1")]
    Cor1 {
        #[serde(rename = "M_max")]
        m_max: usize,
        alpha_max: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    #[serde(rename = "Cor2")]
    Cor2 {
        #[serde(rename = "M_max")]
        m_max: usize,
        alpha_max: f64,
        #[serde(rename = "N")]
        n: usize,
        beta: f64,
    },
    #[serde(rename = "CorBern")]
    CorBern {
        expected_degrees: Vec<f64>,
        alpha: f64,
    },
}

impl BoundRequest {
    pub fn evaluate(&self) -> Result<BoundReport> {
        match self {
            BoundRequest::Thm1Exp { d_n, m, p } => thm1_exp_radius(*d_n, *m, *p),
            BoundRequest::Thm1Cheb {
                c_n,
                delta_n,
                m,
                alpha,
            } => thm1_cheb_radius(*c_n, *delta_n, *m, *alpha),
            BoundRequest::Thm2 { d_n, m, p, r_n } => thm2_radius(*d_n, *m, *p, *r_n),
            BoundRequest::Cor1 {
                m_max,
                alpha_max,
                n,
            } => cor1_radius(*m_max, *alpha_max, *n),
            BoundRequest::Cor2 {
                m_max,
                alpha_max,
                n,
                beta,
            } => cor2_radius(*m_max, *alpha_max, *n, *beta),
            BoundRequest::CorBern {
                expected_degrees,
                alpha,
            } => cor_bern_bound(expected_degrees, expected_degrees.len(), *alpha),
        }
    }
}
