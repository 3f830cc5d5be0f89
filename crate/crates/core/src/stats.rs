//! Distance measures, error-certification predicates, and the two
//! likelihood-ratio discriminators used to validate sampling data.
//!
//! Total variation distance is reported in both conventions — ½Σ|p−q| (the
//! metric) and Σ|p−q| (the budget β form) — so callers can never mix them up
//! silently. The discriminators are exact log-likelihood-ratio tests against
//! the uniform distribution and against the distinguishable-particle model;
//! at desk scale, where every event probability is computable, these are the
//! optimal tests. Ties are resolved toward the skeptic's hypothesis (uniform
//! / distinguishable).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boson::{
    distinguishable_distribution, exact_distribution, BosonError, BosonInstance, OccupationEvent,
};
use crate::dist::{DistError, Distribution, SampleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample {index} is outside the event space: {event}")]
    OutOfSpace { index: usize, event: String },
    #[error("sample {index} ({event}) has probability zero under every model")]
    ImpossibleEvent { index: usize, event: String },
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Boson(#[from] BosonError),
}

/// The three error budgets of a sampling claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Total-variation budget in the unhalved Σ|p−q| convention.
    pub beta: f64,
    /// Per-quantity additive bound ε.
    pub epsilon_additive: f64,
    /// Per-quantity multiplicative bound ε′.
    pub epsilon_multiplicative: f64,
}

impl ErrorBudget {
    pub fn new(beta: f64, epsilon_additive: f64, epsilon_multiplicative: f64) -> Result<Self, StatsError> {
        if beta < 0.0 || epsilon_additive < 0.0 || epsilon_multiplicative < 0.0 {
            return Err(StatsError::InvalidParameter("error budgets must be nonnegative".into()));
        }
        Ok(Self { beta, epsilon_additive, epsilon_multiplicative })
    }
}

/// Total variation distance in both conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvDistance {
    /// ½Σ|p−q| — the metric, in [0, 1].
    pub half_sum: f64,
    /// Σ|p−q| — the budget (β) convention, in [0, 2].
    pub abs_sum: f64,
}

/// Total variation distance between two distributions on the same space.
pub fn tv_distance<E: Ord + PartialEq>(
    p: &Distribution<E>,
    q: &Distribution<E>,
) -> Result<TvDistance, StatsError> {
    let (half_sum, abs_sum) = p.abs_diff_sums(q)?;
    Ok(TvDistance { half_sum, abs_sum })
}

/// Q·e^{-ε} ≤ Q̃ ≤ Q·e^{ε}, exactly as stated (closed interval).
pub fn within_multiplicative(q: f64, q_est: f64, eps: f64) -> bool {
    q * (-eps).exp() <= q_est && q_est <= q * eps.exp()
}

/// Q − ε ≤ Q̃ ≤ Q + ε (closed interval).
pub fn within_additive(q: f64, q_est: f64, eps: f64) -> bool {
    q - eps <= q_est && q_est <= q + eps
}

/// Relative frequencies of `samples` over `space`.
///
/// `space` may come in any order; it is sorted internally. A sample outside
/// the space is a data error naming the offending record.
pub fn empirical_distribution<E: Ord + Clone + std::fmt::Display>(
    samples: &SampleSet<E>,
    mut space: Vec<E>,
) -> Result<Distribution<E>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput("no samples to tabulate".into()));
    }
    space.sort();
    let mut counts = vec![0u64; space.len()];
    for (index, draw) in samples.draws.iter().enumerate() {
        match space.binary_search(draw) {
            Ok(position) => counts[position] += 1,
            Err(_) => {
                return Err(StatsError::OutOfSpace { index, event: draw.to_string() })
            }
        }
    }
    let total = samples.len() as f64;
    let probs = counts.into_iter().map(|c| c as f64 / total).collect();
    Ok(Distribution::new(space, probs)?)
}

/// Verdict of the uniformity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UniformVerdict {
    Boson,
    Uniform,
}

/// Verdict of the distinguishable-particle test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVerdict {
    Indistinguishable,
    Distinguishable,
}

/// Outcome of a likelihood-ratio test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrimination<V> {
    pub verdict: V,
    /// Σ over samples of log(p_alternative / p_null); +∞/−∞ when one model
    /// assigns probability zero to an observed event.
    pub log_likelihood_ratio: f64,
    pub samples: usize,
}

/// Rules out (or fails to rule out) the uniform distribution over Φ_{m,n}:
/// log-likelihood ratio Σ log(p_S / u) with u = 1/|Φ|. Positive means the
/// boson model explains the data better; ties go to uniform.
pub fn uniform_discriminator(
    samples: &SampleSet<OccupationEvent>,
    instance: &BosonInstance,
) -> Result<Discrimination<UniformVerdict>, StatsError> {
    let dist = exact_distribution(instance)?;
    let uniform_log = -(dist.len() as f64).ln();
    let mut llr = 0.0;
    for (index, draw) in samples.draws.iter().enumerate() {
        let p = dist
            .prob(draw)
            .ok_or_else(|| StatsError::OutOfSpace { index, event: draw.to_string() })?;
        llr += log_or_neg_inf(p) - uniform_log;
    }
    let verdict = if llr > 0.0 { UniformVerdict::Boson } else { UniformVerdict::Uniform };
    Ok(Discrimination { verdict, log_likelihood_ratio: llr, samples: samples.len() })
}

/// Tests indistinguishable bosons (the quantum model) against classically
/// routed distinguishable particles. Positive log-likelihood ratio favours
/// the quantum model; ties go to distinguishable.
///
/// Events impossible under exactly one model drive the ratio to ±∞; an
/// event impossible under both is a data error. If separate events exclude
/// both models, the verdict stays with the null (distinguishable).
pub fn distinguishable_discriminator(
    samples: &SampleSet<OccupationEvent>,
    instance: &BosonInstance,
) -> Result<Discrimination<ModelVerdict>, StatsError> {
    let quantum = exact_distribution(instance)?;
    let classical = distinguishable_distribution(instance)?;
    let mut finite = 0.0f64;
    let mut quantum_excluded = false;
    let mut classical_excluded = false;
    for (index, draw) in samples.draws.iter().enumerate() {
        let pq = quantum
            .prob(draw)
            .ok_or_else(|| StatsError::OutOfSpace { index, event: draw.to_string() })?;
        let pd = classical
            .prob(draw)
            .ok_or_else(|| StatsError::OutOfSpace { index, event: draw.to_string() })?;
        match (pq > 0.0, pd > 0.0) {
            (false, false) => {
                return Err(StatsError::ImpossibleEvent { index, event: draw.to_string() })
            }
            (false, true) => quantum_excluded = true,
            (true, false) => classical_excluded = true,
            (true, true) => finite += pq.ln() - pd.ln(),
        }
    }
    let llr = match (quantum_excluded, classical_excluded) {
        (true, _) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => finite,
    };
    let verdict =
        if llr > 0.0 { ModelVerdict::Indistinguishable } else { ModelVerdict::Distinguishable };
    Ok(Discrimination { verdict, log_likelihood_ratio: llr, samples: samples.len() })
}

fn log_or_neg_inf(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Kolmogorov-Smirnov statistic between the empirical CDF of 2ⁿ·p values and
/// the Exp(1) CDF 1 − e^{-z} — the Porter-Thomas prediction for output
/// probabilities of sufficiently random circuits.
pub fn porter_thomas_fit(probabilities: &[f64], n: usize) -> Result<f64, StatsError> {
    if probabilities.is_empty() {
        return Err(StatsError::EmptyInput("no probabilities to fit".into()));
    }
    let scale = (1u64 << n) as f64;
    let mut rescaled: Vec<f64> = probabilities.iter().map(|&p| p * scale).collect();
    rescaled.sort_by(f64::total_cmp);
    let count = rescaled.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &z) in rescaled.iter().enumerate() {
        let model = 1.0 - (-z).exp();
        let above = (i + 1) as f64 / count - model;
        let below = model - i as f64 / count;
        ks = ks.max(above).max(below);
    }
    Ok(ks)
}
