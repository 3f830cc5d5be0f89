//! IQP circuits: commuting circuits of the form C = H⊗ⁿ · D · H⊗ⁿ with D
//! diagonal in the computational basis.
//!
//! D is stored as a phase polynomial θ(y) = Σ_terms w·Π_{i∈subset} y_i with
//! weights kept as exact rational multiples of π, so circuits serialize and
//! reload bit-exactly. Output probabilities are
//!
//! ```text
//! p_x = |2⁻ⁿ Σ_y (-1)^{x·y} e^{iθ(y)}|²
//! ```
//!
//! evaluated two independent ways: a literal 2ⁿ-term sum per output
//! ([`output_probability`]) and a fast Walsh-Hadamard transform of the phase
//! vector producing all 2ⁿ probabilities in O(n·2ⁿ) ([`full_distribution`]).
//! Two more identities cross-check p₀: the Ising partition function
//! |Z|²/4ⁿ for 2-local circuits and the normalized-gap square for
//! degree-3 F₂ polynomials.
//!
//! Random circuit families:
//!
//! - **family 1** — √CZ and T gates on the complete graph: singleton weights
//!   uniform in {0, π/4, …, 7π/4}, pair weights uniform in {0, π/2, π, 3π/2};
//! - **family 2** — Z, CZ, CCZ gates: every monomial of degree ≤ 3 present
//!   with probability ½ at weight π;
//! - **sparse** — family-1-style weights on a gate budget of uniformly random
//!   distinct pairs (default ⌈n·log₂n⌉), plus all singletons.

mod statevector;

pub use statevector::{verify_hadamard_gadget, GadgetReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{sample_events, DistError, Distribution, SampleSet};
use crate::rng::{derive_seed, stream_rng, uniform_f64, uniform_index};

/// Largest qubit count for 2ⁿ-sized evaluations.
pub const PROBABILITY_LIMIT: usize = 24;
/// Largest qubit count for full-distribution anti-concentration sweeps.
pub const ANTICONCENTRATION_LIMIT: usize = 16;
/// RNG stream id reserved for noise bit-flips in [`depolarize_samples`].
const FLIP_STREAM: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IqpError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("qubit count {n} exceeds the {limit} limit for this operation")]
    TooLarge { n: usize, limit: usize },
    #[error("not applicable to this circuit: {0}")]
    Domain(String),
    #[error("degenerate gadget instance: postselection probability is zero; re-seed")]
    DegenerateGadget,
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Weight as an exact rational multiple of π, reduced mod 2π into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiRational {
    num: i64,
    den: i64,
}

impl PiRational {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const PI: Self = Self { num: 1, den: 1 };

    /// num/den · π, reduced to lowest terms in [0, 2π). `den` must be nonzero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "weight denominator must be nonzero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        num = num.rem_euclid(2 * den);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        num /= g;
        den /= g;
        Self { num, den }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 / self.den as f64 * std::f64::consts::PI
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// True for weights ≡ π (mod 2π).
    pub fn is_pi(&self) -> bool {
        self.num == 1 && self.den == 1
    }

    /// True when the weight is a multiple of π/`granularity` (e.g. 4 for T,
    /// 2 for √CZ).
    pub fn is_multiple_of_pi_over(&self, granularity: i64) -> bool {
        granularity % self.den == 0
    }
}

impl std::ops::Add for PiRational {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Serialize for PiRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.num, self.den).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (num, den) = <(i64, i64)>::deserialize(deserializer)?;
        if den == 0 {
            return Err(serde::de::Error::custom("weight denominator must be nonzero"));
        }
        Ok(Self::new(num, den))
    }
}

/// One monomial of the phase polynomial: a qubit subset and its weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub qubits: Vec<usize>,
    #[serde(rename = "weight_over_pi")]
    pub weight: PiRational,
}

/// Diagonal phase polynomial θ(y) over n qubits; subsets have 1 ≤ |S| ≤ 3,
/// are sorted, and duplicates are merged by weight addition. Zero weights are
/// legal and preserved (they mark gates present at trivial strength).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    n: usize,
    terms: Vec<PhaseTerm>,
}

impl PhasePolynomial {
    pub fn new(n: usize, terms: Vec<PhaseTerm>) -> Result<Self, IqpError> {
        let mut canonical: Vec<PhaseTerm> = Vec::with_capacity(terms.len());
        for mut term in terms {
            term.qubits.sort_unstable();
            term.qubits.dedup();
            if term.qubits.is_empty() || term.qubits.len() > 3 {
                return Err(IqpError::InvalidParameter(format!(
                    "phase terms must touch 1..=3 qubits, got {:?}",
                    term.qubits
                )));
            }
            if term.qubits.iter().any(|&q| q >= n) {
                return Err(IqpError::InvalidParameter(format!(
                    "term {:?} is out of range for {n} qubits",
                    term.qubits
                )));
            }
            canonical.push(term);
        }
        canonical.sort_by(|a, b| a.qubits.cmp(&b.qubits));
        let mut merged: Vec<PhaseTerm> = Vec::with_capacity(canonical.len());
        for term in canonical {
            match merged.last_mut() {
                Some(last) if last.qubits == term.qubits => {
                    last.weight = last.weight + term.weight;
                }
                _ => merged.push(term),
            }
        }
        Ok(Self { n, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PhaseTerm] {
        &self.terms
    }

    /// θ(y) in radians for the bit pattern `y`.
    pub fn theta(&self, y: u64) -> f64 {
        self.terms
            .iter()
            .filter(|t| {
                let mask = bitmask(&t.qubits);
                y & mask == mask
            })
            .map(|t| t.weight.radians())
            .sum()
    }

    /// Masks and weights in term order, for hot loops.
    fn compiled(&self) -> Vec<(u64, f64)> {
        self.terms.iter().map(|t| (bitmask(&t.qubits), t.weight.radians())).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.qubits.len()).max().unwrap_or(0)
    }
}

fn bitmask(qubits: &[usize]) -> u64 {
    qubits.iter().fold(0u64, |m, &q| m | 1 << q)
}

/// Which random ensemble a circuit was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Family1,
    Family2,
    Sparse,
    Custom,
}

/// An IQP circuit: C = H⊗ⁿ · D · H⊗ⁿ with D|y⟩ = e^{iθ(y)}|y⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IqpCircuit {
    phase: PhasePolynomial,
    family: FamilyTag,
}

impl IqpCircuit {
    pub fn new(phase: PhasePolynomial, family: FamilyTag) -> Self {
        Self { phase, family }
    }

    pub fn n(&self) -> usize {
        self.phase.n()
    }

    pub fn phase(&self) -> &PhasePolynomial {
        &self.phase
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    n: usize,
    family: FamilyTag,
    terms: Vec<PhaseTerm>,
}

impl Serialize for IqpCircuit {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CircuitRecord {
            n: self.n(),
            family: self.family,
            terms: self.phase.terms().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IqpCircuit {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = CircuitRecord::deserialize(deserializer)?;
        let phase = PhasePolynomial::new(record.n, record.terms).map_err(serde::de::Error::custom)?;
        Ok(IqpCircuit::new(phase, record.family))
    }
}

/// Length-n measurement outcome. Ordered and displayed as the binary number
/// b_{n-1}…b₁b₀, so string order, integer order, and event order agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    n: usize,
    bits: u64,
}

impl BitString {
    pub fn new(n: usize, bits: u64) -> Result<Self, IqpError> {
        if n > 64 {
            return Err(IqpError::InvalidParameter(format!("{n} qubits exceed u64 storage")));
        }
        if n < 64 && bits >> n != 0 {
            return Err(IqpError::InvalidParameter(format!(
                "bit pattern {bits:#b} does not fit in {n} bits"
            )));
        }
        Ok(Self { n, bits })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, bits: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, qubit: usize) -> bool {
        self.bits >> qubit & 1 == 1
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self { n: self.n, bits: self.bits ^ other.bits }
    }

    /// All 2ⁿ bitstrings in ascending order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..1u64 << n).map(|bits| Self { n, bits }).collect()
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.bits).cmp(&(other.n, other.bits))
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for qubit in (0..self.n).rev() {
            write!(f, "{}", u8::from(self.bit(qubit)))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = IqpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.len();
        if n > 64 {
            return Err(IqpError::InvalidParameter(format!("{n} qubits exceed u64 storage")));
        }
        let mut bits = 0u64;
        for (offset, ch) in s.chars().enumerate() {
            let qubit = n - 1 - offset;
            match ch {
                '0' => {}
                '1' => bits |= 1 << qubit,
                other => {
                    return Err(IqpError::InvalidParameter(format!(
                        "bitstring may contain only 0 and 1, got {other:?}"
                    )))
                }
            }
        }
        Ok(Self { n, bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Random circuit generators, one per ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitFamily {
    Family1,
    Family2,
    /// Pair budget; None uses the default ⌈n·log₂n⌉ (capped at C(n,2)).
    Sparse { budget: Option<usize> },
}

impl CircuitFamily {
    pub fn generate(&self, n: usize, seed: u64) -> Result<IqpCircuit, IqpError> {
        match self {
            CircuitFamily::Family1 => random_family1(n, seed),
            CircuitFamily::Family2 => random_family2(n, seed),
            CircuitFamily::Sparse { budget } => {
                let budget = budget.unwrap_or_else(|| default_sparse_budget(n));
                random_sparse(n, budget, seed)
            }
        }
    }
}

fn check_qubits(n: usize) -> Result<(), IqpError> {
    if n == 0 {
        return Err(IqpError::InvalidParameter("qubit count must be at least 1".into()));
    }
    Ok(())
}

/// Random √CZ + T circuit on the complete graph: every singleton carries a
/// uniform multiple of π/4, every pair a uniform multiple of π/2 (zero
/// multiples included, so the support is always the full complete graph).
pub fn random_family1(n: usize, seed: u64) -> Result<IqpCircuit, IqpError> {
    check_qubits(n)?;
    let mut rng = stream_rng(seed, 0);
    let mut terms = Vec::with_capacity(n + n * (n - 1) / 2);
    for i in 0..n {
        let k = uniform_index(&mut rng, 8) as i64;
        terms.push(PhaseTerm { qubits: vec![i], weight: PiRational::new(k, 4) });
    }
    for i in 0..n {
        for j in i + 1..n {
            let k = uniform_index(&mut rng, 4) as i64;
            terms.push(PhaseTerm { qubits: vec![i, j], weight: PiRational::new(k, 2) });
        }
    }
    Ok(IqpCircuit::new(PhasePolynomial::new(n, terms)?, FamilyTag::Family1))
}

/// Random Z + CZ + CCZ circuit: each monomial of degree ≤ 3 is present with
/// probability ½ at weight exactly π.
pub fn random_family2(n: usize, seed: u64) -> Result<IqpCircuit, IqpError> {
    check_qubits(n)?;
    let mut rng = stream_rng(seed, 0);
    let mut terms = Vec::new();
    let mut consider = |qubits: Vec<usize>, rng: &mut rand_chacha::ChaCha8Rng| {
        if uniform_f64(rng) < 0.5 {
            terms.push(PhaseTerm { qubits, weight: PiRational::PI });
        }
    };
    for i in 0..n {
        consider(vec![i], &mut rng);
    }
    for i in 0..n {
        for j in i + 1..n {
            consider(vec![i, j], &mut rng);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                consider(vec![i, j, k], &mut rng);
            }
        }
    }
    Ok(IqpCircuit::new(PhasePolynomial::new(n, terms)?, FamilyTag::Family2))
}

/// Default pair budget for sparse circuits: ⌈n·log₂n⌉, capped at C(n,2).
pub fn default_sparse_budget(n: usize) -> usize {
    let pairs = n * (n - 1) / 2;
    let nf = n as f64;
    ((nf * nf.log2()).ceil().max(0.0) as usize).min(pairs)
}

/// Sparse variant of family 1: all singletons plus family-1-style weights on
/// `budget` uniformly random distinct pairs.
pub fn random_sparse(n: usize, budget: usize, seed: u64) -> Result<IqpCircuit, IqpError> {
    check_qubits(n)?;
    let max_pairs = n * (n - 1) / 2;
    if budget > max_pairs {
        return Err(IqpError::InvalidParameter(format!(
            "gate budget {budget} exceeds the {max_pairs} available pairs"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut terms = Vec::with_capacity(n + budget);
    for i in 0..n {
        let k = uniform_index(&mut rng, 8) as i64;
        terms.push(PhaseTerm { qubits: vec![i], weight: PiRational::new(k, 4) });
    }
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    crate::rng::shuffle(&mut rng, &mut pairs);
    for &(i, j) in &pairs[..budget] {
        let k = uniform_index(&mut rng, 4) as i64;
        terms.push(PhaseTerm { qubits: vec![i, j], weight: PiRational::new(k, 2) });
    }
    Ok(IqpCircuit::new(PhasePolynomial::new(n, terms)?, FamilyTag::Sparse))
}

fn check_size(n: usize, limit: usize) -> Result<(), IqpError> {
    if n > limit {
        return Err(IqpError::TooLarge { n, limit });
    }
    Ok(())
}

/// p_x by the literal 2ⁿ-term sum — the slow reference path.
pub fn output_probability(circuit: &IqpCircuit, x: &BitString) -> Result<f64, IqpError> {
    let n = circuit.n();
    check_size(n, PROBABILITY_LIMIT)?;
    if x.n() != n {
        return Err(IqpError::InvalidParameter(format!(
            "bitstring has {} bits but the circuit has {n} qubits",
            x.n()
        )));
    }
    let compiled = circuit.phase().compiled();
    let mut amplitude = Complex64::ZERO;
    for y in 0..1u64 << n {
        let mut theta = 0.0;
        for &(mask, weight) in &compiled {
            if y & mask == mask {
                theta += weight;
            }
        }
        let phase = Complex64::from_polar(1.0, theta);
        if (x.bits() & y).count_ones().is_multiple_of(2) {
            amplitude += phase;
        } else {
            amplitude -= phase;
        }
    }
    let scale = (1u64 << n) as f64;
    Ok((amplitude / scale).norm_sqr())
}

/// Unnormalized in-place Walsh-Hadamard transform.
pub(crate) fn walsh_hadamard_inplace(values: &mut [Complex64]) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        let mut block = 0;
        while block < len {
            for i in block..block + half {
                let a = values[i];
                let b = values[i + half];
                values[i] = a + b;
                values[i + half] = a - b;
            }
            block += 2 * half;
        }
        half *= 2;
    }
}

/// The phase vector e^{iθ(y)} for all y.
fn phase_vector(circuit: &IqpCircuit) -> Vec<Complex64> {
    let n = circuit.n();
    let compiled = circuit.phase().compiled();
    (0..1u64 << n)
        .map(|y| {
            let mut theta = 0.0;
            for &(mask, weight) in &compiled {
                if y & mask == mask {
                    theta += weight;
                }
            }
            Complex64::from_polar(1.0, theta)
        })
        .collect()
}

/// All 2ⁿ output probabilities via the Walsh-Hadamard transform.
pub fn full_distribution(circuit: &IqpCircuit) -> Result<Distribution<BitString>, IqpError> {
    let n = circuit.n();
    check_size(n, PROBABILITY_LIMIT)?;
    let mut amplitudes = phase_vector(circuit);
    walsh_hadamard_inplace(&mut amplitudes);
    let scale = (1u64 << n) as f64;
    let probs: Vec<f64> = amplitudes.iter().map(|a| (a / scale).norm_sqr()).collect();
    Ok(Distribution::new(BitString::all(n), probs)?)
}

/// `count` computational-basis measurements of C|0…0⟩, deterministic in `seed`.
pub fn sample_iqp(
    circuit: &IqpCircuit,
    count: usize,
    seed: u64,
) -> Result<SampleSet<BitString>, IqpError> {
    let dist = full_distribution(circuit)?;
    Ok(sample_events(&dist, count, seed)?)
}

/// Gap of a degree-≤3 polynomial over F₂: #{y : f(y)=0} − #{y : f(y)=1},
/// where f collects the π-weight monomials. Satisfies p₀ = (gap/2ⁿ)².
///
/// Accepts any polynomial whose weights are all ≡ 0 or π (mod 2π) — the
/// family-2 form, possibly after XOR shifts; anything else is a domain error.
pub fn gap_degree3(poly: &PhasePolynomial) -> Result<i64, IqpError> {
    let n = poly.n();
    check_size(n, PROBABILITY_LIMIT)?;
    let mut masks = Vec::new();
    for term in poly.terms() {
        if term.weight.is_pi() {
            masks.push(bitmask(&term.qubits));
        } else if !term.weight.is_zero() {
            return Err(IqpError::Domain(format!(
                "gap is defined for weights 0 or π only; term {:?} has weight {}π/{}",
                term.qubits,
                term.weight.numerator(),
                term.weight.denominator()
            )));
        }
    }
    let mut gap = 0i64;
    for y in 0..1u64 << n {
        let ones = masks.iter().filter(|&&mask| y & mask == mask).count();
        if ones % 2 == 0 {
            gap += 1;
        } else {
            gap -= 1;
        }
    }
    Ok(gap)
}

/// Complex-temperature Ising partition function Z = Σ_y e^{iθ(y)} for a
/// 2-local circuit. Satisfies p₀ = |Z|²/4ⁿ.
pub fn partition_function_check(circuit: &IqpCircuit) -> Result<Complex64, IqpError> {
    let n = circuit.n();
    check_size(n, PROBABILITY_LIMIT)?;
    if circuit.phase().max_degree() > 2 {
        return Err(IqpError::Domain(
            "partition-function identity applies to 2-local (Ising) circuits".into(),
        ));
    }
    Ok(phase_vector(circuit).into_iter().sum())
}

/// Adds a π-weight singleton on every qubit where x is 1 — a Z layer inside
/// D — which translates the output distribution by XOR with x:
/// p_y(shifted) = p_{y⊕x}(original).
pub fn shift_circuit(circuit: &IqpCircuit, x: &BitString) -> Result<IqpCircuit, IqpError> {
    if x.n() != circuit.n() {
        return Err(IqpError::InvalidParameter(format!(
            "shift bitstring has {} bits but the circuit has {} qubits",
            x.n(),
            circuit.n()
        )));
    }
    let mut terms = circuit.phase().terms().to_vec();
    for qubit in 0..circuit.n() {
        if x.bit(qubit) {
            terms.push(PhaseTerm { qubits: vec![qubit], weight: PiRational::PI });
        }
    }
    // The added weights stay inside every family's weight set mod 2π, so the
    // tag remains accurate.
    Ok(IqpCircuit::new(PhasePolynomial::new(circuit.n(), terms)?, circuit.family()))
}

/// Samples the ideal distribution, then flips each output bit independently
/// with probability rate/2 — the measurement-basis reduction of per-qubit
/// depolarizing noise at strength `rate`. `rate = 0` consumes no flip
/// randomness and is bit-identical to [`sample_iqp`].
pub fn depolarize_samples(
    circuit: &IqpCircuit,
    rate: f64,
    count: usize,
    seed: u64,
) -> Result<SampleSet<BitString>, IqpError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(IqpError::InvalidParameter(format!(
            "depolarizing rate must lie in [0, 1], got {rate}"
        )));
    }
    let mut samples = sample_iqp(circuit, count, seed)?;
    if rate == 0.0 {
        return Ok(samples);
    }
    let flip_probability = rate / 2.0;
    let n = circuit.n();
    let mut rng = stream_rng(seed, FLIP_STREAM);
    for draw in &mut samples.draws {
        let mut bits = draw.bits();
        for qubit in 0..n {
            if uniform_f64(&mut rng) < flip_probability {
                bits ^= 1 << qubit;
            }
        }
        *draw = BitString::new(n, bits).expect("flip keeps the bit width");
    }
    Ok(samples)
}

/// Analytic effect of the same noise on the full distribution: convolution
/// with the product bit-flip kernel, computed in the Walsh basis where each
/// parity mask s is damped by (1-rate)^{|s|}.
pub fn depolarized_distribution(
    dist: &Distribution<BitString>,
    rate: f64,
) -> Result<Distribution<BitString>, IqpError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(IqpError::InvalidParameter(format!(
            "depolarizing rate must lie in [0, 1], got {rate}"
        )));
    }
    let len = dist.len();
    if !len.is_power_of_two() || dist.events().first().map(|e| 1usize << e.n()) != Some(len) {
        return Err(IqpError::Domain("noise convolution needs the full 2ⁿ event space".into()));
    }
    let mut spectrum: Vec<Complex64> =
        dist.probabilities().iter().map(|&p| Complex64::new(p, 0.0)).collect();
    walsh_hadamard_inplace(&mut spectrum);
    let damping = 1.0 - rate;
    for (mask, value) in spectrum.iter_mut().enumerate() {
        *value *= damping.powi(mask.count_ones() as i32);
    }
    walsh_hadamard_inplace(&mut spectrum);
    let probs: Vec<f64> = spectrum.iter().map(|z| z.re / len as f64).collect();
    Ok(Distribution::new(dist.events().to_vec(), probs)?)
}

/// Anti-concentration sweep over random circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct AnticoncentrationReport {
    /// Fraction of (circuit, x) pairs with 2ⁿ·p_x > α.
    pub fraction: f64,
    /// The x = 0ⁿ-only estimator of the same quantity.
    pub zero_fraction: f64,
    /// Number of circuits contributing.
    pub circuits: usize,
    /// All rescaled probabilities 2ⁿ·p_x, pooled; Porter-Thomas-shaped
    /// families make these asymptotically Exp(1).
    pub scaled_probabilities: Vec<f64>,
}

/// Draws `trials` random circuits and measures how often 2ⁿ·p_x exceeds
/// `alpha`, over all outputs and over x = 0ⁿ alone. For Porter-Thomas-shaped
/// ensembles both fractions approach e^{-α}.
pub fn anticoncentration_stats(
    family: &CircuitFamily,
    n: usize,
    trials: usize,
    alpha: f64,
    seed: u64,
) -> Result<AnticoncentrationReport, IqpError> {
    check_size(n, ANTICONCENTRATION_LIMIT)?;
    if trials == 0 {
        return Err(IqpError::InvalidParameter("need at least one circuit trial".into()));
    }
    let size = 1usize << n;
    let scale = size as f64;
    let mut scaled = Vec::with_capacity(trials * size);
    let mut zero_hits = 0usize;
    for trial in 0..trials {
        let circuit = family.generate(n, derive_seed(seed, trial as u64))?;
        let dist = full_distribution(&circuit)?;
        let zero_scaled = dist.probabilities()[0] * scale;
        if zero_scaled > alpha {
            zero_hits += 1;
        }
        scaled.extend(dist.probabilities().iter().map(|&p| p * scale));
    }
    let exceed = scaled.iter().filter(|&&z| z > alpha).count();
    Ok(AnticoncentrationReport {
        fraction: exceed as f64 / scaled.len() as f64,
        zero_fraction: zero_hits as f64 / trials as f64,
        circuits: trials,
        scaled_probabilities: scaled,
    })
}
