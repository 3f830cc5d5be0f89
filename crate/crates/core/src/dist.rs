//! Probability tables over finite event spaces and seeded sample streams.
//!
//! Both samplers in this crate (occupation events, bitstrings) reduce to
//! drawing indices from a [`Distribution`]. Index draws use inverse-CDF
//! binary search for small spaces and a Walker/Vose alias table above
//! [`ALIAS_THRESHOLD`] events. Draws are produced in fixed chunks of
//! [`SAMPLE_CHUNK`] with one RNG stream per chunk, so sampling parallelizes
//! without the output depending on thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::rng::{stream_rng, uniform_f64, uniform_index};

/// Event-count threshold above which sampling builds an alias table.
pub const ALIAS_THRESHOLD: usize = 10_000;
/// Samples per RNG stream chunk.
const SAMPLE_CHUNK: usize = 8192;
/// Probabilities may round slightly negative; anything below -1e-15 is a bug.
pub const NEGATIVE_PROB_TOL: f64 = -1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("events and probabilities differ in length: {events} vs {probs}")]
    LengthMismatch { events: usize, probs: usize },
    #[error("probability {value:.3e} at index {index} is below the -1e-15 clamp floor")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probability at index {index} is not finite")]
    NonFiniteProbability { index: usize },
    #[error("distribution has no probability mass")]
    ZeroMass,
    #[error("event spaces do not match")]
    SpaceMismatch,
    #[error("empty sample set")]
    EmptySamples,
    #[error("sample {index} is outside the event space: {event}")]
    OutOfSpace { index: usize, event: String },
}

/// Exact probability table over an ordered event space.
///
/// Events are kept in the order supplied by the enumerator (lexicographic
/// everywhere in this crate) and probabilities are clamped at the -1e-15
/// rounding floor; anything more negative is rejected as a real bug.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<E> {
    events: Vec<E>,
    probs: Vec<f64>,
}

impl<E: Ord> Distribution<E> {
    pub fn new(events: Vec<E>, probs: Vec<f64>) -> Result<Self, DistError> {
        if events.len() != probs.len() {
            return Err(DistError::LengthMismatch { events: events.len(), probs: probs.len() });
        }
        let mut clamped = probs;
        for (index, p) in clamped.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(DistError::NonFiniteProbability { index });
            }
            if *p < 0.0 {
                if *p < NEGATIVE_PROB_TOL {
                    return Err(DistError::NegativeProbability { index, value: *p });
                }
                *p = 0.0;
            }
        }
        Ok(Self { events, probs: clamped })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[E] {
        &self.events
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability of `event`, or None when it lies outside the space.
    /// Events must be stored in ascending order for the lookup to work;
    /// every enumerator in this crate guarantees that.
    pub fn prob(&self, event: &E) -> Option<f64> {
        self.events.binary_search(event).ok().map(|i| self.probs[i])
    }

    pub fn index_of(&self, event: &E) -> Option<usize> {
        self.events.binary_search(event).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, f64)> {
        self.events.iter().zip(self.probs.iter().copied())
    }

    /// Checks p and q live on the same space, then returns
    /// (½Σ|p-q|, Σ|p-q|) — see `stats::tv_distance` for the public wrapper.
    pub(crate) fn abs_diff_sums(&self, other: &Self) -> Result<(f64, f64), DistError>
    where
        E: PartialEq,
    {
        if self.events != other.events {
            return Err(DistError::SpaceMismatch);
        }
        let sum: f64 =
            self.probs.iter().zip(&other.probs).map(|(p, q)| (p - q).abs()).sum();
        Ok((0.5 * sum, sum))
    }
}

/// A seeded stream of events drawn from a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<E> {
    pub seed: u64,
    pub draws: Vec<E>,
}

impl<E> SampleSet<E> {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Draws `count` event indices i.i.d. from the distribution, deterministically
/// in `seed` and independent of thread count. Stream ids `stream_base + c`
/// are consumed for chunks c = 0, 1, ….
pub fn sample_indices<E: Ord + Sync>(
    dist: &Distribution<E>,
    count: usize,
    seed: u64,
    stream_base: u64,
) -> Result<Vec<usize>, DistError> {
    let total = dist.total();
    if !total.is_finite() || total <= 0.0 {
        return Err(DistError::ZeroMass);
    }
    let drawer: Box<dyn IndexDrawer> = if dist.len() > ALIAS_THRESHOLD {
        Box::new(AliasTable::build(dist.probabilities(), total))
    } else {
        Box::new(CdfTable::build(dist.probabilities(), total))
    };

    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let mut out: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, stream_base + chunk as u64);
            let take = SAMPLE_CHUNK.min(count - chunk * SAMPLE_CHUNK);
            let mut draws = Vec::with_capacity(take);
            for _ in 0..take {
                draws.push(drawer.draw(&mut rng));
            }
            draws
        })
        .collect();
    let mut merged = Vec::with_capacity(count);
    for chunk in out.iter_mut() {
        merged.append(chunk);
    }
    Ok(merged)
}

/// Convenience wrapper cloning the drawn events into a [`SampleSet`].
pub fn sample_events<E: Ord + Clone + Sync>(
    dist: &Distribution<E>,
    count: usize,
    seed: u64,
) -> Result<SampleSet<E>, DistError> {
    let indices = sample_indices(dist, count, seed, 0)?;
    let draws = indices.into_iter().map(|i| dist.events()[i].clone()).collect();
    Ok(SampleSet { seed, draws })
}

trait IndexDrawer: Sync {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> usize;
}

/// Inverse-CDF sampling over the cumulative sums.
struct CdfTable {
    cumulative: Vec<f64>,
}

impl CdfTable {
    fn build(probs: &[f64], total: f64) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p / total;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self { cumulative }
    }
}

impl IndexDrawer for CdfTable {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> usize {
        let u = uniform_f64(rng);
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

/// Walker/Vose alias table: O(1) per draw after O(K) setup.
struct AliasTable {
    accept: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    fn build(probs: &[f64], total: f64) -> Self {
        let k = probs.len();
        let mut accept = vec![0.0; k];
        let mut alias = vec![0usize; k];
        let mut scaled: Vec<f64> = probs.iter().map(|&p| p / total * k as f64).collect();
        let mut small: Vec<usize> = Vec::with_capacity(k);
        let mut large: Vec<usize> = Vec::with_capacity(k);
        for (i, &w) in scaled.iter().enumerate() {
            if w < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&lo), Some(&hi)) = (small.last(), large.last()) {
            small.pop();
            accept[lo] = scaled[lo];
            alias[lo] = hi;
            scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
            if scaled[hi] < 1.0 {
                large.pop();
                small.push(hi);
            }
        }
        for &i in small.iter().chain(large.iter()) {
            accept[i] = 1.0;
            alias[i] = i;
        }
        Self { accept, alias }
    }
}

impl IndexDrawer for AliasTable {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> usize {
        let column = uniform_index(rng, self.accept.len());
        if uniform_f64(rng) < self.accept[column] {
            column
        } else {
            self.alias[column]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(probs: &[f64]) -> Distribution<usize> {
        Distribution::new((0..probs.len()).collect(), probs.to_vec()).unwrap()
    }

    #[test]
    fn clamps_tiny_negatives_and_rejects_real_ones() {
        let d = dist(&[0.5, -1e-16, 0.5]);
        assert_eq!(d.probabilities()[1], 0.0);
        let err = Distribution::new(vec![0usize, 1], vec![0.5, -1e-12]).unwrap_err();
        assert!(matches!(err, DistError::NegativeProbability { index: 1, .. }));
    }

    #[test]
    fn point_mass_always_draws_the_same_event() {
        let d = dist(&[0.0, 1.0, 0.0]);
        let s = sample_events(&d, 100, 9).unwrap();
        assert!(s.draws.iter().all(|&e| e == 1));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let d = dist(&[0.2, 0.3, 0.5]);
        let a = sample_events(&d, 1000, 5).unwrap();
        let b = sample_events(&d, 1000, 5).unwrap();
        assert_eq!(a, b);
        let c = sample_events(&d, 1000, 6).unwrap();
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn chunked_streams_are_prefix_stable() {
        // The first chunk of a longer run equals a shorter run entirely
        // inside one chunk.
        let d = dist(&[0.25, 0.25, 0.5]);
        let long = sample_events(&d, 9000, 3).unwrap();
        let short = sample_events(&d, 100, 3).unwrap();
        assert_eq!(&long.draws[..100], &short.draws[..]);
    }

    #[test]
    fn empirical_frequencies_converge() {
        let probs = [0.1, 0.2, 0.3, 0.4];
        let d = dist(&probs);
        let n = 100_000;
        let s = sample_events(&d, n, 17).unwrap();
        let mut counts = [0usize; 4];
        for &e in &s.draws {
            counts[e] += 1;
        }
        for (i, &p) in probs.iter().enumerate() {
            let freq = counts[i] as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * sigma, "event {i}: freq {freq}, p {p}");
        }
    }

    #[test]
    fn alias_table_matches_cdf_statistics() {
        // Force the alias path with a large sparse space.
        let len = ALIAS_THRESHOLD + 5;
        let mut probs = vec![0.0; len];
        probs[0] = 0.5;
        probs[len - 1] = 0.25;
        probs[17] = 0.25;
        let d = Distribution::new((0..len).collect::<Vec<_>>(), probs).unwrap();
        let s = sample_events(&d, 40_000, 23).unwrap();
        let hits = |e: usize| s.draws.iter().filter(|&&x| x == e).count() as f64 / 40_000.0;
        assert!((hits(0) - 0.5).abs() < 0.01);
        assert!((hits(17) - 0.25).abs() < 0.01);
        assert!((hits(len - 1) - 0.25).abs() < 0.01);
        assert_eq!(hits(1), 0.0);
    }

    #[test]
    fn zero_mass_is_an_error() {
        let d = dist(&[0.0, 0.0]);
        assert!(matches!(sample_events(&d, 1, 0), Err(DistError::ZeroMass)));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let p = dist(&[0.5, 0.5]);
        let q = Distribution::new(vec![0usize, 2], vec![0.5, 0.5]).unwrap();
        assert!(matches!(p.abs_diff_sums(&q), Err(DistError::SpaceMismatch)));
    }
}
