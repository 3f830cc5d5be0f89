//! Cross-module property tests for the invariants that hold on whole input
//! families rather than single examples.

use num_complex::Complex64;
use proptest::prelude::*;

use qsamp_core::boson::{
    distinguishable_distribution, event_count, event_space, exact_distribution, BosonInstance,
};
use qsamp_core::dist::Distribution;
use qsamp_core::iqp::{random_family1, random_family2, BitString, IqpCircuit, PiRational};
use qsamp_core::matrix::ComplexMatrix;
use qsamp_core::permanent::permanent_fast;
use qsamp_core::stats::{tv_distance, within_additive, within_multiplicative};

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn square_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_entry(), n * n)
        .prop_map(move |entries| ComplexMatrix::new(n, n, entries).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Per(PAQ) = Per(A) for permutation matrices P, Q.
    #[test]
    fn permanent_is_permutation_invariant(
        (a, rows, cols) in (2usize..=5).prop_flat_map(|n| {
            (square_matrix(n), permutation(n), permutation(n))
        }),
    ) {
        let n = a.rows();
        let shuffled = ComplexMatrix::from_fn(n, n, |i, j| a.get(rows[i], cols[j]));
        let original = permanent_fast(&a).unwrap();
        let permuted = permanent_fast(&shuffled).unwrap();
        prop_assert!((original - permuted).norm() <= 1e-10 * original.norm().max(1.0));
    }

    /// Permanents of 0/1 matrices are nonnegative integers (they count
    /// permutations with all-one support).
    #[test]
    fn zero_one_permanent_counts(bits in proptest::collection::vec(any::<bool>(), 16)) {
        let a = ComplexMatrix::new(
            4,
            4,
            bits.iter().map(|&b| if b { Complex64::ONE } else { Complex64::ZERO }).collect(),
        )
        .unwrap();
        let p = permanent_fast(&a).unwrap();
        prop_assert!(p.im.abs() <= 1e-6);
        prop_assert!(p.re >= -1e-6);
        prop_assert!((p.re - p.re.round()).abs() <= 1e-6);
    }

    /// Both output models normalize for arbitrary seeded Haar instances.
    #[test]
    fn boson_models_normalize(seed in any::<u64>(), m in 2usize..=6, n in 1usize..=2) {
        let instance = BosonInstance::fiducial_haar(m, n.min(m), seed).unwrap();
        let quantum = exact_distribution(&instance).unwrap();
        let classical = distinguishable_distribution(&instance).unwrap();
        prop_assert!((quantum.total() - 1.0).abs() <= 1e-9);
        prop_assert!((classical.total() - 1.0).abs() <= 1e-9);
    }

    /// A single particle carries no interference: the quantum and
    /// distinguishable distributions coincide entrywise.
    #[test]
    fn single_particle_models_agree(seed in any::<u64>(), m in 2usize..=7) {
        let instance = BosonInstance::fiducial_haar(m, 1, seed).unwrap();
        let quantum = exact_distribution(&instance).unwrap();
        let classical = distinguishable_distribution(&instance).unwrap();
        for (p, q) in quantum.probabilities().iter().zip(classical.probabilities()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    /// Φ_{m,n} is lexicographically sorted, duplicate-free, and has the
    /// stars-and-bars cardinality.
    #[test]
    fn event_space_is_sorted_and_complete(m in 1usize..=8, n in 0usize..=4) {
        let events = event_space(m, n).unwrap();
        prop_assert_eq!(events.len() as u128, event_count(m, n).unwrap());
        prop_assert!(events.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(events.iter().all(|e| e.modes() == m && e.total() == n));
    }

    /// Half-sum TVD is a metric: symmetric, in [0,1], triangle inequality.
    #[test]
    fn tv_distance_is_a_metric(
        raw in proptest::collection::vec((1e-6f64..1.0, 1e-6f64..1.0, 1e-6f64..1.0), 5)
    ) {
        let normalize = |values: Vec<f64>| {
            let total: f64 = values.iter().sum();
            Distribution::new(
                (0..values.len()).collect::<Vec<usize>>(),
                values.iter().map(|v| v / total).collect(),
            )
            .unwrap()
        };
        let p = normalize(raw.iter().map(|t| t.0).collect());
        let q = normalize(raw.iter().map(|t| t.1).collect());
        let r = normalize(raw.iter().map(|t| t.2).collect());
        let pq = tv_distance(&p, &q).unwrap();
        let qp = tv_distance(&q, &p).unwrap();
        let qr = tv_distance(&q, &r).unwrap().half_sum;
        let pr = tv_distance(&p, &r).unwrap().half_sum;
        prop_assert_eq!(pq.half_sum, qp.half_sum);
        prop_assert!((0.0..=1.0).contains(&pq.half_sum));
        prop_assert!((pq.abs_sum - 2.0 * pq.half_sum).abs() <= 1e-15);
        prop_assert!(pr <= pq.half_sum + qr + 1e-12);
    }

    /// A multiplicative certificate implies the corresponding additive one
    /// with ε_add = Q·(e^ε − 1).
    #[test]
    fn multiplicative_implies_additive(
        q in 0.0f64..10.0,
        ratio in -1.0f64..1.0,
        eps in 0.0f64..2.0,
    ) {
        let q_est = q * (ratio * eps).exp();
        if within_multiplicative(q, q_est, eps) {
            prop_assert!(within_additive(q, q_est, q * (eps.exp() - 1.0)));
        }
    }

    /// Bitstrings survive display/parse round-trips.
    #[test]
    fn bitstring_round_trips(n in 1usize..=16, raw in any::<u64>()) {
        let bits = raw & ((1u64 << n) - 1);
        let b = BitString::new(n, bits).unwrap();
        let text = b.to_string();
        prop_assert_eq!(text.len(), n);
        prop_assert_eq!(text.parse::<BitString>().unwrap(), b);
    }

    /// Rational π-weights reduce consistently: radians stay in [0, 2π) and
    /// addition matches float addition mod 2π.
    #[test]
    fn pi_rational_addition_matches_radians(
        a in (-16i64..16, 1i64..8),
        b in (-16i64..16, 1i64..8),
    ) {
        let x = PiRational::new(a.0, a.1);
        let y = PiRational::new(b.0, b.1);
        let sum = x + y;
        let tau = std::f64::consts::TAU;
        prop_assert!((0.0..tau).contains(&sum.radians()));
        let expect = (x.radians() + y.radians()).rem_euclid(tau);
        let delta = (sum.radians() - expect).rem_euclid(tau);
        let delta = delta.min(tau - delta);
        prop_assert!(delta <= 1e-9, "sum {} vs {}", sum.radians(), expect);
    }

    /// Circuit JSON reload is bit-exact for both random families.
    #[test]
    fn circuit_serialization_is_exact(n in 1usize..=6, seed in any::<u64>()) {
        for circuit in [random_family1(n, seed).unwrap(), random_family2(n, seed).unwrap()] {
            let json = serde_json::to_string(&circuit).unwrap();
            let back: IqpCircuit = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&back, &circuit);
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
    }
}
