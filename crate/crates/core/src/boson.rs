//! BosonSampling: instances, the occupation-event space, exact output
//! distributions, samplers, and the physical variant models used in
//! experiments (loss with post-selection, scattershot inputs, and the
//! distinguishable-particle baseline).
//!
//! An instance is an m-mode network unitary plus an n-photon input occupation.
//! The probability of detecting output occupation S is
//!
//! ```text
//! p_S = |Per(A_S)|² / (∏_i s_i! · ∏_j t_j!)
//! ```
//!
//! where A_S selects network column j repeated t_j times (input) and row i
//! repeated s_i times (output). For the standard input (1,…,1,0,…,0) the
//! column choice is simply the first n columns and every t_j! is 1. The
//! distinguishable (classical) model replaces amplitudes by probabilities:
//! p_S = Per(B_S)/∏ s_i! with B_ij = |u_ij|², no input factorials.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dist::{sample_events, DistError, Distribution, SampleSet};
use crate::matrix::{haar_unitary, ComplexMatrix, MatrixError, UnitaryMatrix};
use crate::permanent::{permanent_magnitude_squared, PermanentError};
use crate::rng::{stream_rng, uniform_f64};

/// Default ceiling on |Φ_{m,n}| for exact enumeration.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// RNG stream id reserved for photon-survival draws in [`lossy_sample`];
/// event draws use chunk streams counted from 0.
const SURVIVAL_STREAM: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BosonError {
    #[error("invalid occupation: {0}")]
    InvalidOccupation(String),
    #[error("event space for m={m}, n={n} has {events} events, over the cap of {cap}; use sampling-free checks or raise the cap")]
    SpaceTooLarge { m: usize, n: usize, events: u128, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Permanent(#[from] PermanentError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Photon counts per mode; one element of the event set Φ_{m,n}.
///
/// Ordering is lexicographic on the counts, which is also the enumeration
/// and serialization order used throughout.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationEvent(Vec<u8>);

impl OccupationEvent {
    pub fn new(counts: Vec<u8>) -> Self {
        Self(counts)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    /// True when no mode holds two or more photons.
    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// The fiducial input (1,…,1,0,…,0) with n leading ones.
    pub fn fiducial(m: usize, n: usize) -> Self {
        Self((0..m).map(|i| u8::from(i < n)).collect())
    }
}

impl std::fmt::Display for OccupationEvent {
    /// Dash-separated counts, e.g. `1-0-2`; the CSV event column format.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                write!(f, "-")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Number of events in Φ_{m,n}: C(m+n-1, n). None on u128 overflow.
pub fn event_count(m: usize, n: usize) -> Option<u128> {
    binomial((m + n - 1) as u128, n as u128)
}

fn binomial(a: u128, b: u128) -> Option<u128> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut result: u128 = 1;
    for i in 0..b {
        result = result.checked_mul(a - i)?;
        result /= i + 1;
    }
    Some(result)
}

/// All occupation events of n photons in m modes, in lexicographic order.
pub fn event_space(m: usize, n: usize) -> Result<Vec<OccupationEvent>, BosonError> {
    event_space_with_cap(m, n, ENUMERATION_CAP)
}

/// [`event_space`] with an explicit enumeration cap.
pub fn event_space_with_cap(
    m: usize,
    n: usize,
    cap: usize,
) -> Result<Vec<OccupationEvent>, BosonError> {
    if m == 0 {
        return Err(BosonError::InvalidParameter("mode count must be at least 1".into()));
    }
    if n > u8::MAX as usize {
        return Err(BosonError::InvalidParameter(format!(
            "photon count {n} exceeds the per-mode representation limit"
        )));
    }
    let count = event_count(m, n).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(BosonError::SpaceTooLarge { m, n, events: count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix = Vec::with_capacity(m);
    enumerate_into(m, n as u8, &mut prefix, &mut out);
    Ok(out)
}

fn enumerate_into(modes_left: usize, photons_left: u8, prefix: &mut Vec<u8>, out: &mut Vec<OccupationEvent>) {
    if modes_left == 1 {
        prefix.push(photons_left);
        out.push(OccupationEvent::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for k in 0..=photons_left {
        prefix.push(k);
        enumerate_into(modes_left - 1, photons_left - k, prefix, out);
        prefix.pop();
    }
}

/// One BosonSampling problem: mode count, photon count, input occupation,
/// and the network unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonInstance {
    input: OccupationEvent,
    network: UnitaryMatrix,
}

impl BosonInstance {
    pub fn new(input: OccupationEvent, network: UnitaryMatrix) -> Result<Self, BosonError> {
        if input.modes() != network.dim() {
            return Err(BosonError::InvalidOccupation(format!(
                "input occupation has {} modes but the network has {}",
                input.modes(),
                network.dim()
            )));
        }
        Ok(Self { input, network })
    }

    /// Instance with the fiducial input (1,…,1,0,…,0): n photons in the
    /// first n of m modes.
    pub fn fiducial(m: usize, n: usize, network: UnitaryMatrix) -> Result<Self, BosonError> {
        if n > m {
            return Err(BosonError::InvalidOccupation(format!(
                "cannot place {n} single photons in {m} modes"
            )));
        }
        Self::new(OccupationEvent::fiducial(m, n), network)
    }

    /// Fiducial instance with a Haar-random network.
    pub fn fiducial_haar(m: usize, n: usize, seed: u64) -> Result<Self, BosonError> {
        Self::fiducial(m, n, haar_unitary(m, seed)?)
    }

    /// Fiducial Haar instance with the mode count set by a scaling regime.
    pub fn fiducial_haar_scaled(
        n: usize,
        scaling: &ModeScaling,
        seed: u64,
    ) -> Result<Self, BosonError> {
        Self::fiducial_haar(scaling.modes(n), n, seed)
    }

    pub fn m(&self) -> usize {
        self.network.dim()
    }

    pub fn n(&self) -> usize {
        self.input.total()
    }

    pub fn input(&self) -> &OccupationEvent {
        &self.input
    }

    pub fn network(&self) -> &UnitaryMatrix {
        &self.network
    }
}

/// Mode-count regimes for instance builders, m as a function of n.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeScaling {
    /// m = ⌈c·n²⌉ — the practical regime.
    Quadratic { c: f64 },
    /// m = ⌈c·n⁵·ln²n⌉ — the strict regime (the constant is configuration).
    QuinticLogSquared { c: f64 },
}

impl ModeScaling {
    pub fn modes(&self, n: usize) -> usize {
        let nf = n as f64;
        let m = match self {
            ModeScaling::Quadratic { c } => c * nf * nf,
            ModeScaling::QuinticLogSquared { c } => {
                let log = nf.max(2.0).ln();
                c * nf.powi(5) * log * log
            }
        };
        (m.ceil() as usize).max(n).max(1)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NetworkSpec {
    Haar { haar_seed: u64 },
    Matrix(UnitaryMatrix),
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    m: usize,
    n: usize,
    input: Vec<u8>,
    network: NetworkSpec,
}

impl Serialize for BosonInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        InstanceRecord {
            m: self.m(),
            n: self.n(),
            input: self.input.counts().to_vec(),
            network: NetworkSpec::Matrix(self.network.clone()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BosonInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let record = InstanceRecord::deserialize(deserializer)?;
        let network = match record.network {
            NetworkSpec::Matrix(u) => u,
            NetworkSpec::Haar { haar_seed } => {
                haar_unitary(record.m, haar_seed).map_err(D::Error::custom)?
            }
        };
        let input = OccupationEvent::new(record.input);
        if input.total() != record.n || input.modes() != record.m {
            return Err(D::Error::custom(format!(
                "input occupation is inconsistent with m={}, n={}",
                record.m, record.n
            )));
        }
        BosonInstance::new(input, network).map_err(D::Error::custom)
    }
}

/// The n×n scattering submatrix for output S and input T: network column j
/// repeated t_j times, row i repeated s_i times.
pub fn submatrix(
    network: &UnitaryMatrix,
    output: &OccupationEvent,
    input: &OccupationEvent,
) -> Result<ComplexMatrix, BosonError> {
    if output.modes() != network.dim() || input.modes() != network.dim() {
        return Err(BosonError::InvalidOccupation(format!(
            "occupations must cover all {} modes",
            network.dim()
        )));
    }
    if output.total() != input.total() {
        return Err(BosonError::InvalidOccupation(format!(
            "output holds {} photons but input holds {}",
            output.total(),
            input.total()
        )));
    }
    let rows = expand_modes(output);
    let cols = expand_modes(input);
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |r, c| network.get(rows[r], cols[c])))
}

/// Mode indices with multiplicity, e.g. (2,0,1) → [0, 0, 2].
fn expand_modes(occupation: &OccupationEvent) -> Vec<usize> {
    let mut out = Vec::with_capacity(occupation.total());
    for (mode, &count) in occupation.counts().iter().enumerate() {
        for _ in 0..count {
            out.push(mode);
        }
    }
    out
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).map(|x| x as f64).product()
}

fn occupation_factorial(occupation: &OccupationEvent) -> f64 {
    occupation.counts().iter().map(|&c| factorial(c)).product()
}

/// Probability of measuring output occupation S.
pub fn event_probability(instance: &BosonInstance, output: &OccupationEvent) -> Result<f64, BosonError> {
    let a = submatrix(&instance.network, output, &instance.input)?;
    let weight = permanent_magnitude_squared(&a)?;
    Ok(weight / (occupation_factorial(output) * occupation_factorial(&instance.input)))
}

/// Exact output distribution over all of Φ_{m,n}.
pub fn exact_distribution(
    instance: &BosonInstance,
) -> Result<Distribution<OccupationEvent>, BosonError> {
    distribution_from_weights(instance, permanent_magnitude_squared)
}

/// Output distribution of the distinguishable-particle (classical) model:
/// each photon routes independently with probabilities |u_ij|².
pub fn distinguishable_distribution(
    instance: &BosonInstance,
) -> Result<Distribution<OccupationEvent>, BosonError> {
    let m = instance.m();
    let transfer = ComplexMatrix::from_fn(m, m, |i, j| {
        Complex64::new(instance.network.get(i, j).norm_sqr(), 0.0)
    });
    let cols = expand_modes(&instance.input);
    let events = event_space(m, instance.n())?;
    let probs: Result<Vec<f64>, BosonError> = events
        .par_iter()
        .map(|event| {
            let rows = expand_modes(event);
            let sub =
                ComplexMatrix::from_fn(rows.len(), cols.len(), |r, c| transfer.get(rows[r], cols[c]));
            // Per(B_S)/∏ s_i!: columns are individual classical particles, so
            // no input-side factorials; the output factorials divide out the
            // interchangeable detector-slot orderings.
            let p = crate::permanent::permanent_fast(&sub)?.re / occupation_factorial(event);
            Ok(p)
        })
        .collect();
    Ok(Distribution::new(events, probs?)?)
}

fn distribution_from_weights(
    instance: &BosonInstance,
    weight: impl Fn(&ComplexMatrix) -> Result<f64, PermanentError> + Sync,
) -> Result<Distribution<OccupationEvent>, BosonError> {
    let m = instance.m();
    let cols = expand_modes(&instance.input);
    let input_factorial = occupation_factorial(&instance.input);
    let events = event_space(m, instance.n())?;
    let probs: Result<Vec<f64>, BosonError> = events
        .par_iter()
        .map(|event| {
            let rows = expand_modes(event);
            let sub = ComplexMatrix::from_fn(rows.len(), cols.len(), |r, c| {
                instance.network.get(rows[r], cols[c])
            });
            Ok(weight(&sub)? / (occupation_factorial(event) * input_factorial))
        })
        .collect();
    Ok(Distribution::new(events, probs?)?)
}

/// `count` i.i.d. events from the exact distribution, deterministic in `seed`.
pub fn sample(
    instance: &BosonInstance,
    count: usize,
    seed: u64,
) -> Result<SampleSet<OccupationEvent>, BosonError> {
    let dist = exact_distribution(instance)?;
    Ok(sample_events(&dist, count, seed)?)
}

/// Post-selected lossy sampling: the sample set plus the acceptance rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LossySamples {
    pub samples: SampleSet<OccupationEvent>,
    /// Fraction of trials in which all n photons survived.
    pub acceptance_rate: f64,
    pub trials: usize,
}

/// Runs `trials` shots where each photon independently survives with
/// probability `eta`; shots losing any photon are discarded. Surviving shots
/// follow the lossless distribution, so `eta = 1` reduces exactly to
/// [`sample`] (same seed, same draws).
pub fn lossy_sample(
    instance: &BosonInstance,
    eta: f64,
    trials: usize,
    seed: u64,
) -> Result<LossySamples, BosonError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(BosonError::InvalidParameter(format!(
            "transmission probability must lie in [0, 1], got {eta}"
        )));
    }
    if eta == 1.0 {
        return Ok(LossySamples { samples: sample(instance, trials, seed)?, acceptance_rate: 1.0, trials });
    }
    let n = instance.n();
    let mut survival_rng = stream_rng(seed, SURVIVAL_STREAM);
    let mut accepted = 0usize;
    for _ in 0..trials {
        let mut survived = 0usize;
        for _ in 0..n {
            if uniform_f64(&mut survival_rng) < eta {
                survived += 1;
            }
        }
        if survived == n {
            accepted += 1;
        }
    }
    let samples = if accepted > 0 {
        let dist = exact_distribution(instance)?;
        sample_events(&dist, accepted, seed)?
    } else {
        SampleSet { seed, draws: Vec::new() }
    };
    let acceptance_rate = if trials == 0 { 0.0 } else { accepted as f64 / trials as f64 };
    Ok(LossySamples { samples, acceptance_rate, trials })
}

/// Scattershot variant: the n input photons occupy a uniformly random
/// n-subset of the m modes, with a Haar-random network. The network consumes
/// stream 0 of `seed` and the subset draw stream 1.
pub fn scattershot_instance(m: usize, n: usize, seed: u64) -> Result<BosonInstance, BosonError> {
    if n > m {
        return Err(BosonError::InvalidParameter(format!(
            "scattershot needs n <= m, got n={n}, m={m}"
        )));
    }
    let network = haar_unitary(m, seed)?;
    let mut rng = stream_rng(seed, 1);
    let mut modes: Vec<usize> = (0..m).collect();
    crate::rng::shuffle(&mut rng, &mut modes);
    let mut counts = vec![0u8; m];
    for &mode in &modes[..n] {
        counts[mode] = 1;
    }
    BosonInstance::new(OccupationEvent::new(counts), network)
}

/// Fraction of sampled events with two or more photons in any mode.
pub fn collision_statistics(samples: &SampleSet<OccupationEvent>) -> Result<f64, BosonError> {
    if samples.is_empty() {
        return Err(BosonError::Dist(DistError::EmptySamples));
    }
    let collisions = samples.draws.iter().filter(|e| !e.is_collision_free()).count();
    Ok(collisions as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::uniform_index;

    fn beamsplitter_5050() -> UnitaryMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMatrix::try_new(
            ComplexMatrix::new(
                2,
                2,
                vec![
                    Complex64::new(r, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(r, 0.0),
                    Complex64::new(-r, 0.0),
                ],
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn hom_instance() -> BosonInstance {
        BosonInstance::fiducial(2, 2, beamsplitter_5050()).unwrap()
    }

    fn occ(counts: &[u8]) -> OccupationEvent {
        OccupationEvent::new(counts.to_vec())
    }

    #[test]
    fn two_modes_one_photon_events_in_lex_order() {
        let events = event_space(2, 1).unwrap();
        assert_eq!(events, vec![occ(&[0, 1]), occ(&[1, 0])]);
    }

    #[test]
    fn thirteen_modes_three_photons_has_286_collision_free_of_455() {
        let events = event_space(13, 3).unwrap();
        assert_eq!(events.len(), 455);
        let collision_free = events.iter().filter(|e| e.is_collision_free()).count();
        assert_eq!(collision_free, 286);
    }

    #[test]
    fn four_modes_two_photons_is_stars_and_bars() {
        assert_eq!(event_space(4, 2).unwrap().len(), 10);
        assert_eq!(event_count(4, 2), Some(10));
    }

    #[test]
    fn zero_photons_single_event() {
        let events = event_space(3, 0).unwrap();
        assert_eq!(events, vec![occ(&[0, 0, 0])]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            event_space_with_cap(13, 3, 100),
            Err(BosonError::SpaceTooLarge { events: 455, cap: 100, .. })
        ));
    }

    #[test]
    fn fiducial_submatrix_is_leading_block() {
        let u = haar_unitary(5, 1).unwrap();
        let instance = BosonInstance::fiducial(5, 3, u.clone()).unwrap();
        let s = occ(&[1, 1, 1, 0, 0]);
        let block = submatrix(&u, &s, instance.input()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(block.get(i, j), u.get(i, j));
            }
        }
    }

    #[test]
    fn single_photon_submatrix_is_one_entry() {
        let u = haar_unitary(4, 2).unwrap();
        let s = occ(&[0, 0, 1, 0]);
        let t = occ(&[1, 0, 0, 0]);
        let block = submatrix(&u, &s, &t).unwrap();
        assert_eq!((block.rows(), block.cols()), (1, 1));
        assert_eq!(block.get(0, 0), u.get(2, 0));
    }

    #[test]
    fn bunched_output_repeats_rows() {
        let u = beamsplitter_5050();
        let block = submatrix(&u, &occ(&[2, 0]), &occ(&[1, 1])).unwrap();
        let per = crate::permanent::permanent_fast(&block).unwrap();
        let expect = u.get(0, 0) * u.get(0, 1) * 2.0;
        assert!((per - expect).norm() < 1e-15);
    }

    #[test]
    fn mismatched_totals_are_rejected() {
        let u = beamsplitter_5050();
        assert!(submatrix(&u, &occ(&[1, 0]), &occ(&[1, 1])).is_err());
    }

    #[test]
    fn single_photon_probability_is_squared_entry() {
        let u = haar_unitary(4, 7).unwrap();
        let instance = BosonInstance::fiducial(4, 1, u.clone()).unwrap();
        for j in 0..4 {
            let mut counts = vec![0u8; 4];
            counts[j] = 1;
            let p = event_probability(&instance, &occ(&counts)).unwrap();
            assert!((p - u.get(j, 0).norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn hong_ou_mandel_exact_values() {
        let instance = hom_instance();
        let coincidence = event_probability(&instance, &occ(&[1, 1])).unwrap();
        assert!(coincidence <= 1e-12, "coincidence probability {coincidence}");
        for bunched in [occ(&[2, 0]), occ(&[0, 2])] {
            let p = event_probability(&instance, &bunched).unwrap();
            assert!((p - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn identity_network_single_photon_point_mass() {
        let u = UnitaryMatrix::try_new(ComplexMatrix::identity(2)).unwrap();
        let instance = BosonInstance::fiducial(2, 1, u).unwrap();
        let dist = exact_distribution(&instance).unwrap();
        assert_eq!(dist.prob(&occ(&[0, 1])), Some(0.0));
        assert_eq!(dist.prob(&occ(&[1, 0])), Some(1.0));
    }

    #[test]
    fn haar_instance_normalizes() {
        let instance = BosonInstance::fiducial_haar(7, 3, 42).unwrap();
        let dist = exact_distribution(&instance).unwrap();
        assert!((dist.total() - 1.0).abs() <= 1e-9, "sum = {}", dist.total());
    }

    #[test]
    fn hom_distribution_table() {
        let dist = exact_distribution(&hom_instance()).unwrap();
        assert!((dist.prob(&occ(&[2, 0])).unwrap() - 0.5).abs() <= 1e-12);
        assert!(dist.prob(&occ(&[1, 1])).unwrap() <= 1e-12);
        assert!((dist.prob(&occ(&[0, 2])).unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn distinguishable_single_photon_matches_quantum() {
        let instance = BosonInstance::fiducial_haar(5, 1, 13).unwrap();
        let quantum = exact_distribution(&instance).unwrap();
        let classical = distinguishable_distribution(&instance).unwrap();
        let (half, _) = quantum.abs_diff_sums(&classical).unwrap();
        assert!(half <= 1e-12);
    }

    #[test]
    fn distinguishable_hom_quarters() {
        let dist = distinguishable_distribution(&hom_instance()).unwrap();
        assert!((dist.prob(&occ(&[2, 0])).unwrap() - 0.25).abs() <= 1e-12);
        assert!((dist.prob(&occ(&[1, 1])).unwrap() - 0.5).abs() <= 1e-12);
        assert!((dist.prob(&occ(&[0, 2])).unwrap() - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn distinguishable_normalizes_even_with_bunched_input() {
        let u = haar_unitary(4, 3).unwrap();
        let instance = BosonInstance::new(occ(&[2, 1, 0, 0]), u).unwrap();
        let dist = distinguishable_distribution(&instance).unwrap();
        assert!((dist.total() - 1.0).abs() <= 1e-9);
        let quantum = exact_distribution(&instance).unwrap();
        assert!((quantum.total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn distinguishable_matches_monte_carlo_routing() {
        // Independent oracle: route each classical photon by |u_ij|² and
        // histogram the outcomes.
        let u = haar_unitary(3, 19).unwrap();
        let instance = BosonInstance::fiducial(3, 2, u.clone()).unwrap();
        let dist = distinguishable_distribution(&instance).unwrap();
        let mut rng = stream_rng(555, 0);
        let trials = 200_000;
        let mut counts = std::collections::BTreeMap::new();
        let row_probs: Vec<Vec<f64>> =
            (0..2).map(|j| (0..3).map(|i| u.get(i, j).norm_sqr()).collect()).collect();
        for _ in 0..trials {
            let mut event = vec![0u8; 3];
            for probs in &row_probs {
                let mut x = uniform_f64(&mut rng);
                let mut landed = 2;
                for (i, &p) in probs.iter().enumerate() {
                    if x < p {
                        landed = i;
                        break;
                    }
                    x -= p;
                }
                event[landed] += 1;
            }
            *counts.entry(OccupationEvent::new(event)).or_insert(0usize) += 1;
        }
        for (event, p) in dist.iter() {
            let freq = counts.get(event).copied().unwrap_or(0) as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-4);
            assert!((freq - p).abs() < 4.0 * sigma, "{event}: freq {freq} vs p {p}");
        }
    }

    #[test]
    fn sampler_is_deterministic_and_converges() {
        let instance = BosonInstance::fiducial_haar(5, 2, 31).unwrap();
        let a = sample(&instance, 2000, 7).unwrap();
        let b = sample(&instance, 2000, 7).unwrap();
        assert_eq!(a, b);
        let dist = exact_distribution(&instance).unwrap();
        let events = dist.events().to_vec();
        let empirical = crate::stats::empirical_distribution(&a, events).unwrap();
        let (half, _) = dist.abs_diff_sums(&empirical).unwrap();
        // K = 15 events, N = 2000: 3·√(K/N) ≈ 0.26; typical value is ~0.04.
        assert!(half <= 3.0 * (15.0f64 / 2000.0).sqrt(), "tvd {half}");
    }

    #[test]
    fn lossy_eta_one_reduces_to_plain_sampling() {
        let instance = BosonInstance::fiducial_haar(4, 2, 3).unwrap();
        let lossy = lossy_sample(&instance, 1.0, 500, 11).unwrap();
        let plain = sample(&instance, 500, 11).unwrap();
        assert_eq!(lossy.samples, plain);
        assert_eq!(lossy.acceptance_rate, 1.0);
    }

    #[test]
    fn lossy_eta_zero_accepts_nothing() {
        let instance = BosonInstance::fiducial_haar(4, 2, 3).unwrap();
        let lossy = lossy_sample(&instance, 0.0, 200, 1).unwrap();
        assert_eq!(lossy.acceptance_rate, 0.0);
        assert!(lossy.samples.is_empty());
    }

    #[test]
    fn lossy_acceptance_matches_eta_to_the_n() {
        let instance = BosonInstance::fiducial_haar(5, 3, 29).unwrap();
        let trials = 10_000;
        let lossy = lossy_sample(&instance, 0.5, trials, 77).unwrap();
        let expect = 0.5f64.powi(3);
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (lossy.acceptance_rate - expect).abs() <= 3.0 * sigma,
            "acceptance {} vs {expect}",
            lossy.acceptance_rate
        );
    }

    #[test]
    fn lossy_rejects_bad_eta() {
        let instance = BosonInstance::fiducial_haar(3, 1, 0).unwrap();
        assert!(lossy_sample(&instance, 1.5, 10, 0).is_err());
        assert!(lossy_sample(&instance, -0.1, 10, 0).is_err());
    }

    #[test]
    fn scattershot_full_occupancy_is_all_ones() {
        let instance = scattershot_instance(4, 4, 5).unwrap();
        assert_eq!(instance.input(), &occ(&[1, 1, 1, 1]));
    }

    #[test]
    fn scattershot_subsets_are_uniform() {
        let draws = 10_000;
        let mut counts = std::collections::BTreeMap::new();
        for seed in 0..draws {
            let instance = scattershot_instance(6, 2, seed).unwrap();
            *counts.entry(instance.input().clone()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        let expect = draws as f64 / 15.0;
        let sigma = (draws as f64 * (1.0 / 15.0) * (14.0 / 15.0)).sqrt();
        for (event, &count) in &counts {
            assert!(
                (count as f64 - expect).abs() <= 3.0 * sigma,
                "{event}: count {count}, expect {expect}"
            );
        }
    }

    #[test]
    fn scattershot_distribution_normalizes() {
        let instance = scattershot_instance(6, 2, 123).unwrap();
        let dist = exact_distribution(&instance).unwrap();
        assert!((dist.total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn scattershot_rejects_too_many_photons() {
        assert!(scattershot_instance(3, 4, 0).is_err());
    }

    #[test]
    fn collision_statistics_counts_bunched_events() {
        let samples = SampleSet { seed: 0, draws: vec![occ(&[2, 0]), occ(&[1, 1])] };
        assert_eq!(collision_statistics(&samples).unwrap(), 0.5);
        let clean = SampleSet { seed: 0, draws: vec![occ(&[1, 1]), occ(&[1, 1])] };
        assert_eq!(collision_statistics(&clean).unwrap(), 0.0);
        let empty: SampleSet<OccupationEvent> = SampleSet { seed: 0, draws: vec![] };
        assert!(collision_statistics(&empty).is_err());
    }

    #[test]
    fn output_permutation_covariance() {
        // Permuting network rows permutes the distribution accordingly.
        let u = haar_unitary(4, 77).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted = UnitaryMatrix::try_new(ComplexMatrix::from_fn(4, 4, |i, j| {
            u.get(perm[i], j)
        }))
        .unwrap();
        let base = BosonInstance::fiducial(4, 2, u).unwrap();
        let moved = BosonInstance::fiducial(4, 2, permuted).unwrap();
        let dist_base = exact_distribution(&base).unwrap();
        let dist_moved = exact_distribution(&moved).unwrap();
        for (event, p) in dist_moved.iter() {
            // Output mode i of the permuted network is mode perm[i] of the
            // original, so the event maps by gathering counts through perm.
            let counts = event.counts();
            let mut original = vec![0u8; 4];
            for i in 0..4 {
                original[perm[i]] = counts[i];
            }
            let q = dist_base.prob(&OccupationEvent::new(original)).unwrap();
            assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn mode_scaling_presets() {
        let quad = ModeScaling::Quadratic { c: 1.0 };
        assert_eq!(quad.modes(3), 9);
        assert_eq!(quad.modes(10), 100);
        let strict = ModeScaling::QuinticLogSquared { c: 1.0 };
        assert!(strict.modes(3) > quad.modes(3));
        let instance = BosonInstance::fiducial_haar_scaled(2, &quad, 0).unwrap();
        assert_eq!(instance.m(), 4);
    }

    #[test]
    fn instance_json_round_trip_and_haar_seed_form() {
        let instance = BosonInstance::fiducial_haar(3, 2, 9).unwrap();
        let json = serde_json::to_string(&instance).unwrap();
        let back: BosonInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, instance);

        let seeded = r#"{"m":3,"n":2,"input":[1,1,0],"network":{"haar_seed":9}}"#;
        let from_seed: BosonInstance = serde_json::from_str(seeded).unwrap();
        assert_eq!(from_seed, instance);
    }

    #[test]
    fn collision_fraction_decreases_with_mode_count() {
        let mut previous = f64::INFINITY;
        for (i, m) in [9usize, 25, 49].into_iter().enumerate() {
            let instance = BosonInstance::fiducial_haar(m, 3, 40 + i as u64).unwrap();
            let samples = sample(&instance, 4000, 7).unwrap();
            let fraction = collision_statistics(&samples).unwrap();
            assert!(fraction < previous, "m={m}: {fraction} !< {previous}");
            previous = fraction;
        }
    }

    // Smoke check that uniform_index is available to tests that build
    // ad-hoc discrete draws.
    #[test]
    fn uniform_index_bound_one_is_zero() {
        let mut rng = stream_rng(1, 0);
        assert_eq!(uniform_index(&mut rng, 1), 0);
    }
}
