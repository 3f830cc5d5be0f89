//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criteria are property-based plus the small-scale published numbers; the
//! headline experimental regimes (50 photons / 2500 modes, 50 qubits) are out
//! of desk-scale reach by construction and are not attempted.

use num_complex::Complex64;

use qsamp_core::boson::{
    self, collision_statistics, distinguishable_distribution, event_probability, event_space,
    exact_distribution, lossy_sample, BosonInstance, OccupationEvent,
};
use qsamp_core::dist::{sample_events, Distribution};
use qsamp_core::iqp::{
    anticoncentration_stats, depolarized_distribution, full_distribution, gap_degree3,
    output_probability, partition_function_check, random_family1, random_family2, shift_circuit,
    verify_hadamard_gadget, BitString, CircuitFamily,
};
use qsamp_core::matrix::{
    haar_unitary, perturb_unitary, reck_decompose, reck_reconstruct, ComplexMatrix, UnitaryMatrix,
};
use qsamp_core::permanent::{permanent_fast, permanent_naive};
use qsamp_core::rng::{derive_seed, gaussian_pair, stream_rng};
use qsamp_core::stats::{
    distinguishable_discriminator, empirical_distribution, porter_thomas_fit, tv_distance,
    uniform_discriminator, ModelVerdict, UniformVerdict,
};

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn random_complex_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 0);
    ComplexMatrix::from_fn(n, n, |_, _| {
        let (x, y) = gaussian_pair(&mut rng);
        Complex64::new(x, y)
    })
}

fn balanced_beamsplitter() -> UnitaryMatrix {
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

fn occ(counts: &[u8]) -> OccupationEvent {
    OccupationEvent::new(counts.to_vec())
}

/// 1. The 2×2 and 3×3 symbolic permanent expansions hold numerically, and
///    the fast kernel tracks the definitional oracle through n = 8.
#[test]
fn criterion_01_permanent_identities() {
    let mut worst_expansion = 0.0f64;
    for seed in 0..100 {
        let a = random_complex_matrix(2, seed);
        // ad + cb
        let expansion = a.get(0, 0) * a.get(1, 1) + a.get(1, 0) * a.get(0, 1);
        for kernel in [permanent_naive(&a).unwrap(), permanent_fast(&a).unwrap()] {
            let rel = (kernel - expansion).norm() / expansion.norm().max(1.0);
            worst_expansion = worst_expansion.max(rel);
        }

        let b = random_complex_matrix(3, seed + 1000);
        let (e, f, g) = (b.get(0, 0), b.get(0, 1), b.get(0, 2));
        let (h, i, j) = (b.get(1, 0), b.get(1, 1), b.get(1, 2));
        let (k, l, m) = (b.get(2, 0), b.get(2, 1), b.get(2, 2));
        // aei + afh + bdi + bfg + cdh + ceg in the row-major naming above.
        let expansion =
            e * i * m + e * j * l + f * h * m + f * j * k + g * h * l + g * i * k;
        for kernel in [permanent_naive(&b).unwrap(), permanent_fast(&b).unwrap()] {
            let rel = (kernel - expansion).norm() / expansion.norm().max(1.0);
            worst_expansion = worst_expansion.max(rel);
        }
    }

    let mut worst_oracle = 0.0f64;
    for n in 1..=8 {
        for seed in 0..10 {
            let a = random_complex_matrix(n, 7000 + 100 * n as u64 + seed);
            let slow = permanent_naive(&a).unwrap();
            let fast = permanent_fast(&a).unwrap();
            worst_oracle = worst_oracle.max((fast - slow).norm() / slow.norm().max(1.0));
        }
    }
    report(
        "01 permanent identities",
        worst_expansion <= 1e-12 && worst_oracle <= 1e-9,
        &format!("expansion err {worst_expansion:.2e} (tol 1e-12), oracle err {worst_oracle:.2e} (tol 1e-9)"),
    );
}

/// 2. Φ_{13,3} holds exactly 286 collision-free events among 455 total.
#[test]
fn criterion_02_event_space_counts() {
    let events = event_space(13, 3).unwrap();
    let collision_free = events.iter().filter(|e| e.is_collision_free()).count();
    report(
        "02 event-space count",
        events.len() == 455 && collision_free == 286,
        &format!("total {} (want 455), collision-free {collision_free} (want 286)", events.len()),
    );
}

/// 3. Quantum and distinguishable distributions normalize for 20 seeded Haar
///    instances with m ≤ 10, n ≤ 3.
#[test]
fn criterion_03_normalization() {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let m = 4 + (seed as usize % 7); // 4..=10
        let n = 1 + (seed as usize % 3); // 1..=3
        let instance = BosonInstance::fiducial_haar(m, n, seed).unwrap();
        let quantum = exact_distribution(&instance).unwrap();
        let classical = distinguishable_distribution(&instance).unwrap();
        worst = worst.max((quantum.total() - 1.0).abs()).max((classical.total() - 1.0).abs());
    }
    report(
        "03 normalization",
        worst <= 1e-9,
        &format!("worst |Σp − 1| = {worst:.2e} over 20 instances (tol 1e-9)"),
    );
}

/// 4. Hong-Ou-Mandel: exact coincidence suppression for bosons, the
///    1/4–1/2–1/4 table for distinguishable particles.
#[test]
fn criterion_04_hong_ou_mandel() {
    let instance = BosonInstance::fiducial(2, 2, balanced_beamsplitter()).unwrap();
    let coincidence = event_probability(&instance, &occ(&[1, 1])).unwrap();
    let bunch_left = event_probability(&instance, &occ(&[2, 0])).unwrap();
    let bunch_right = event_probability(&instance, &occ(&[0, 2])).unwrap();
    let classical = distinguishable_distribution(&instance).unwrap();
    let c20 = classical.prob(&occ(&[2, 0])).unwrap();
    let c11 = classical.prob(&occ(&[1, 1])).unwrap();
    let c02 = classical.prob(&occ(&[0, 2])).unwrap();
    let ok = coincidence <= 1e-12
        && (bunch_left - 0.5).abs() <= 1e-12
        && (bunch_right - 0.5).abs() <= 1e-12
        && (c20 - 0.25).abs() <= 1e-12
        && (c11 - 0.5).abs() <= 1e-12
        && (c02 - 0.25).abs() <= 1e-12;
    report(
        "04 hong-ou-mandel",
        ok,
        &format!("quantum ({bunch_left:.3}, {coincidence:.2e}, {bunch_right:.3}), classical ({c20:.3}, {c11:.3}, {c02:.3})"),
    );
}

/// 5. 10⁵ samples from the (m=7, n=3) instance sit within TVD 0.02 of exact.
#[test]
fn criterion_05_sampler_fidelity() {
    let instance = BosonInstance::fiducial_haar(7, 3, 42).unwrap();
    let exact = exact_distribution(&instance).unwrap();
    let samples = boson::sample(&instance, 100_000, 7).unwrap();
    let empirical = empirical_distribution(&samples, exact.events().to_vec()).unwrap();
    let tv = tv_distance(&exact, &empirical).unwrap();
    report(
        "05 sampler fidelity",
        tv.half_sum <= 0.02,
        &format!("TVD(empirical, exact) = {:.4} over 10⁵ samples (tol 0.02)", tv.half_sum),
    );
}

/// 6. Both discriminators reach ≥95% accuracy with 200 samples at (9, 3),
///    over 100 seeded trials per data source.
#[test]
fn criterion_06_validation_power() {
    let instance = BosonInstance::fiducial_haar(9, 3, 17).unwrap();
    let quantum = exact_distribution(&instance).unwrap();
    let classical = distinguishable_distribution(&instance).unwrap();
    let space = quantum.events().to_vec();
    let uniform =
        Distribution::new(space.clone(), vec![1.0 / space.len() as f64; space.len()]).unwrap();
    let trials = 100;
    let per_trial = 200;

    let mut uniform_test_hits = 0;
    let mut model_test_hits = 0;
    for trial in 0..trials {
        let boson_data = sample_events(&quantum, per_trial, derive_seed(1, trial)).unwrap();
        let uniform_data = sample_events(&uniform, per_trial, derive_seed(2, trial)).unwrap();
        let classical_data = sample_events(&classical, per_trial, derive_seed(3, trial)).unwrap();

        if uniform_discriminator(&boson_data, &instance).unwrap().verdict
            == UniformVerdict::Boson
        {
            uniform_test_hits += 1;
        }
        if uniform_discriminator(&uniform_data, &instance).unwrap().verdict
            == UniformVerdict::Uniform
        {
            uniform_test_hits += 1;
        }
        if distinguishable_discriminator(&boson_data, &instance).unwrap().verdict
            == ModelVerdict::Indistinguishable
        {
            model_test_hits += 1;
        }
        if distinguishable_discriminator(&classical_data, &instance).unwrap().verdict
            == ModelVerdict::Distinguishable
        {
            model_test_hits += 1;
        }
    }
    let uniform_accuracy = uniform_test_hits as f64 / (2 * trials) as f64;
    let model_accuracy = model_test_hits as f64 / (2 * trials) as f64;
    report(
        "06 validation power",
        uniform_accuracy >= 0.95 && model_accuracy >= 0.95,
        &format!("uniform test {uniform_accuracy:.3}, distinguishable test {model_accuracy:.3} (need ≥ 0.95)"),
    );
}

/// 7. Bosonic birthday paradox: at n = 3 the collision fraction falls
///    strictly as m grows through 9, 25, 49, 100.
#[test]
fn criterion_07_birthday_trend() {
    let mut fractions = Vec::new();
    for (index, m) in [9usize, 25, 49, 100].into_iter().enumerate() {
        let instance =
            BosonInstance::fiducial_haar(m, 3, derive_seed(23, index as u64)).unwrap();
        let samples = boson::sample(&instance, 10_000, derive_seed(29, index as u64)).unwrap();
        fractions.push(collision_statistics(&samples).unwrap());
    }
    let decreasing = fractions.windows(2).all(|w| w[1] < w[0]);
    report(
        "07 birthday-paradox trend",
        decreasing,
        &format!("collision fractions over m ∈ {{9,25,49,100}}: {fractions:?}"),
    );
}

/// 8. Loss model: acceptance 0.5³ within 3 binomial σ at 10⁴ trials, and
///    η = 1 reproduces the lossless sampler bound of criterion 5.
#[test]
fn criterion_08_loss_model() {
    let instance = BosonInstance::fiducial_haar(7, 3, 42).unwrap();
    let trials = 10_000;
    let lossy = lossy_sample(&instance, 0.5, trials, 3).unwrap();
    let expect = 0.125;
    let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
    let acceptance_ok = (lossy.acceptance_rate - expect).abs() <= 3.0 * sigma;

    let lossless = lossy_sample(&instance, 1.0, 100_000, 7).unwrap();
    let exact = exact_distribution(&instance).unwrap();
    let empirical =
        empirical_distribution(&lossless.samples, exact.events().to_vec()).unwrap();
    let tv = tv_distance(&exact, &empirical).unwrap();
    let lossless_ok = lossless.acceptance_rate == 1.0 && tv.half_sum <= 0.02;
    report(
        "08 loss model",
        acceptance_ok && lossless_ok,
        &format!(
            "acceptance {} (want 0.125 ± {:.4}); η=1 TVD {:.4} (tol 0.02)",
            lossy.acceptance_rate,
            3.0 * sigma,
            tv.half_sum
        ),
    );
}

/// 9. The four IQP evaluation routes agree pairwise within 1e-10 for 50
///    seeded circuits per family, and every distribution normalizes.
#[test]
fn criterion_09_iqp_cross_evaluation() {
    let mut worst_pairwise = 0.0f64;
    let mut worst_norm = 0.0f64;
    for trial in 0..50u64 {
        let n = [6, 8, 10, 12][trial as usize % 4];

        let c1 = random_family1(n, derive_seed(101, trial)).unwrap();
        let dist = full_distribution(&c1).unwrap();
        worst_norm = worst_norm.max((dist.total() - 1.0).abs());
        for bits in [0u64, 1, (1 << n) - 1] {
            let x = BitString::new(n, bits).unwrap();
            let slow = output_probability(&c1, &x).unwrap();
            let fast = dist.prob(&x).unwrap();
            worst_pairwise = worst_pairwise.max((slow - fast).abs());
        }
        let z = partition_function_check(&c1).unwrap();
        let p0 = dist.probabilities()[0];
        let predicted = z.norm_sqr() / 4f64.powi(n as i32);
        worst_pairwise = worst_pairwise.max((predicted - p0).abs());

        let c2 = random_family2(n, derive_seed(202, trial)).unwrap();
        let dist2 = full_distribution(&c2).unwrap();
        worst_norm = worst_norm.max((dist2.total() - 1.0).abs());
        let gap = gap_degree3(c2.phase()).unwrap();
        let from_gap = (gap as f64 / (1u64 << n) as f64).powi(2);
        let p0_naive = output_probability(&c2, &BitString::zero(n)).unwrap();
        worst_pairwise = worst_pairwise.max((from_gap - p0_naive).abs());
        worst_pairwise = worst_pairwise.max((from_gap - dist2.probabilities()[0]).abs());
    }
    report(
        "09 iqp cross-evaluation",
        worst_pairwise <= 1e-10 && worst_norm <= 1e-9,
        &format!("worst pairwise gap {worst_pairwise:.2e} (tol 1e-10), worst |Σp−1| {worst_norm:.2e}"),
    );
}

/// 10. XOR shifts translate distributions entrywise, and gadgetized circuits
///     reproduce direct evolution with fidelity ≥ 1 − 1e-10.
#[test]
fn criterion_10_shift_and_gadget() {
    let mut worst_shift = 0.0f64;
    for trial in 0..20u64 {
        let n = 5 + (trial as usize % 4);
        let circuit = random_family1(n, derive_seed(31, trial)).unwrap();
        let mut rng = stream_rng(derive_seed(37, trial), 0);
        let bits = qsamp_core::rng::uniform_index(&mut rng, 1 << n) as u64;
        let x = BitString::new(n, bits).unwrap();
        let base = full_distribution(&circuit).unwrap();
        let moved = full_distribution(&shift_circuit(&circuit, &x).unwrap()).unwrap();
        for (event, p) in moved.iter() {
            let q = base.prob(&event.xor(&x)).unwrap();
            worst_shift = worst_shift.max((p - q).abs());
        }
    }

    let mut worst_fidelity = 1.0f64;
    for trial in 0..20u64 {
        let n = 2 + (trial as usize % 4);
        let gadgets = 1 + (trial as usize % 3);
        let outcome = verify_hadamard_gadget(n, gadgets, derive_seed(41, trial)).unwrap();
        worst_fidelity = worst_fidelity.min(outcome.fidelity);
    }
    report(
        "10 xor-shift and gadget",
        worst_shift <= 1e-10 && worst_fidelity >= 1.0 - 1e-10,
        &format!("worst shift error {worst_shift:.2e} (tol 1e-10), worst gadget fidelity 1 − {:.2e}", 1.0 - worst_fidelity),
    );
}

/// 11. Anti-concentration at n = 12 over 200 family-1 circuits: exceedance
///     fraction at α = 1 within e⁻¹ ± 0.05 and Porter-Thomas KS ≤ 0.05.
#[test]
fn criterion_11_anticoncentration() {
    let alpha = 1.0;
    let stats = anticoncentration_stats(&CircuitFamily::Family1, 12, 200, alpha, 5).unwrap();
    let ks = porter_thomas_fit(&stats.scaled_probabilities, 0).unwrap();
    let target = (-alpha).exp();
    report(
        "11 anti-concentration",
        (stats.fraction - target).abs() <= 0.05 && ks <= 0.05,
        &format!(
            "fraction {:.4} (want {target:.4} ± 0.05), Porter-Thomas KS {ks:.4} (tol 0.05)",
            stats.fraction
        ),
    );
}

/// 12. Analytic depolarization: TVD(ideal, noisy) is non-decreasing over the
///     rate grid for 10 seeded circuits at n = 10.
#[test]
fn criterion_12_noise_monotonicity() {
    let rates = [0.0, 0.01, 0.05, 0.1, 0.5];
    let mut ok = true;
    let mut detail = String::new();
    for trial in 0..10u64 {
        let circuit = random_family1(10, derive_seed(59, trial)).unwrap();
        let ideal = full_distribution(&circuit).unwrap();
        let mut last = -1.0;
        for &rate in &rates {
            let noisy = depolarized_distribution(&ideal, rate).unwrap();
            let tv = tv_distance(&ideal, &noisy).unwrap().half_sum;
            if tv < last - 1e-12 {
                ok = false;
                detail = format!("trial {trial}: TVD fell from {last:.4} to {tv:.4} at rate {rate}");
            }
            last = tv;
        }
    }
    if ok {
        detail = format!("TVD non-decreasing over rates {rates:?} for 10 circuits");
    }
    report("12 noise monotonicity", ok, &detail);
}

/// 13. Element-error perturbation: TVD grows with σ over four decades for
///     (m=8, n=2,3), and σ = 0.1/n² keeps TVD below 0.1.
#[test]
fn criterion_13_perturbation_experiment() {
    let sigmas = [1e-4, 1e-3, 1e-2, 1e-1];
    let mut ok = true;
    let mut detail = String::new();
    for n in [2usize, 3] {
        let network = haar_unitary(8, 42 + n as u64).unwrap();
        let instance = BosonInstance::fiducial(8, n, network.clone()).unwrap();
        let reference = exact_distribution(&instance).unwrap();
        let mut last = -1.0;
        for &sigma in &sigmas {
            let perturbed = perturb_unitary(&network, sigma, 11).unwrap();
            let noisy =
                exact_distribution(&BosonInstance::fiducial(8, n, perturbed).unwrap()).unwrap();
            let tv = tv_distance(&reference, &noisy).unwrap().half_sum;
            if tv < last {
                ok = false;
                detail = format!("n={n}: TVD fell from {last:.4} to {tv:.4} at σ={sigma}");
            }
            last = tv;
        }

        // Small-constant n⁻² scaling keeps the output distribution close.
        let sigma = 0.1 / (n * n) as f64;
        let perturbed = perturb_unitary(&network, sigma, 13).unwrap();
        let noisy =
            exact_distribution(&BosonInstance::fiducial(8, n, perturbed).unwrap()).unwrap();
        let tv = tv_distance(&reference, &noisy).unwrap().half_sum;
        if tv >= 0.1 {
            ok = false;
            detail = format!("n={n}: TVD {tv:.4} at σ = 0.1/n² exceeds 0.1");
        }
    }
    if ok {
        detail = "TVD non-decreasing in σ for n ∈ {2,3}; σ = 0.1/n² keeps TVD < 0.1".to_string();
    }
    report("13 perturbation experiment", ok, &detail);
}

/// 14. Mesh decomposition round-trips 20 seeded Haar unitaries up to m = 16
///     within 1e-10 max-entry error.
#[test]
fn criterion_14_reck_round_trip() {
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let m = 2 + (trial as usize * 14 / 19).min(14); // spans 2..=16
        let u = haar_unitary(m, derive_seed(71, trial)).unwrap();
        let rebuilt = reck_reconstruct(&reck_decompose(&u)).unwrap();
        worst = worst.max(rebuilt.matrix().max_abs_diff(u.matrix()));
    }
    report(
        "14 reck round-trip",
        worst <= 1e-10,
        &format!("worst max-entry reconstruction error {worst:.2e} (tol 1e-10)"),
    );
}
