//! Python bindings for the qsamp toolkit.
//!
//! Exposes the main types and operations: Haar unitaries and the planar
//! decomposition, matrix permanents, boson instances with their exact /
//! distinguishable distributions and samplers, IQP circuits with both
//! evaluation routes, and the validation statistics. Build as a cdylib and
//! import as `qsamp`; see python/smoke_test.py in the repository root.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qsamp_core::boson;
use qsamp_core::iqp;
use qsamp_core::matrix;
use qsamp_core::permanent as permanent_kernels;
use qsamp_core::stats;
use qsamp_core::{Distribution, SampleSet};

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<matrix::ComplexMatrix> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(value_error("all rows must have the same length"));
    }
    let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
    matrix::ComplexMatrix::new(height, width, entries).map_err(value_error)
}

fn matrix_to_rows(m: &matrix::ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

/// m×m unitary network matrix.
#[pyclass(frozen)]
struct Unitary {
    inner: matrix::UnitaryMatrix,
}

#[pymethods]
impl Unitary {
    /// Validates unitarity (‖U†U − I‖_max ≤ 1e-10).
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = matrix_from_rows(rows)?;
        Ok(Self { inner: matrix::UnitaryMatrix::try_new(m).map_err(value_error)? })
    }

    /// Haar-random m×m unitary, deterministic in the seed.
    #[staticmethod]
    fn haar(m: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: matrix::haar_unitary(m, seed).map_err(value_error)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn entries(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    /// Gaussian entrywise noise of standard deviation sigma followed by
    /// polar re-unitarization.
    fn perturbed(&self, sigma: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: matrix::perturb_unitary(&self.inner, sigma, seed).map_err(value_error)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(json).map_err(value_error)? })
    }

    fn __repr__(&self) -> String {
        format!("Unitary(dim={})", self.inner.dim())
    }
}

/// Permanent of a square complex matrix (Ryser/Gray-code kernel, n ≤ 30).
#[pyfunction]
fn permanent(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    permanent_kernels::permanent_fast(&matrix_from_rows(rows)?).map_err(value_error)
}

/// Permanent by direct permutation enumeration (the oracle, n ≤ 10).
#[pyfunction]
fn permanent_naive(rows: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    permanent_kernels::permanent_naive(&matrix_from_rows(rows)?).map_err(value_error)
}

/// Embeds scale·A into an m×m unitary at secret random coordinates.
/// Returns (unitary, scale, row_indices, col_indices).
#[pyfunction]
fn embed_scaled(
    rows: Vec<Vec<Complex64>>,
    m: usize,
    seed: u64,
) -> PyResult<(Unitary, f64, Vec<usize>, Vec<usize>)> {
    let embedding = matrix::embed_scaled(&matrix_from_rows(rows)?, m, seed).map_err(value_error)?;
    Ok((
        Unitary { inner: embedding.unitary },
        embedding.scale,
        embedding.row_indices,
        embedding.col_indices,
    ))
}

/// Planar rotation/phase mesh of a unitary, as its JSON array form.
#[pyfunction]
fn reck_decompose(u: &Unitary) -> PyResult<String> {
    serde_json::to_string(&matrix::reck_decompose(&u.inner)).map_err(value_error)
}

/// Rebuilds the unitary from a JSON decomposition (inverse of reck_decompose).
#[pyfunction]
fn reck_reconstruct(json: &str) -> PyResult<Unitary> {
    let d: matrix::PlanarDecomposition = serde_json::from_str(json).map_err(value_error)?;
    Ok(Unitary { inner: matrix::reck_reconstruct(&d).map_err(value_error)? })
}

/// All occupation events of n photons in m modes, lexicographic.
#[pyfunction]
fn event_space(m: usize, n: usize) -> PyResult<Vec<Vec<u8>>> {
    Ok(boson::event_space(m, n)
        .map_err(value_error)?
        .into_iter()
        .map(|e| e.counts().to_vec())
        .collect())
}

fn occupation(counts: Vec<u8>) -> boson::OccupationEvent {
    boson::OccupationEvent::new(counts)
}

fn occupation_dist_to_py(dist: &Distribution<boson::OccupationEvent>) -> (Vec<Vec<u8>>, Vec<f64>) {
    (
        dist.events().iter().map(|e| e.counts().to_vec()).collect(),
        dist.probabilities().to_vec(),
    )
}

/// One BosonSampling problem: input occupation plus network unitary.
#[pyclass(frozen, name = "BosonInstance")]
struct PyBosonInstance {
    inner: boson::BosonInstance,
}

#[pymethods]
impl PyBosonInstance {
    #[new]
    fn new(input: Vec<u8>, network: &Unitary) -> PyResult<Self> {
        Ok(Self {
            inner: boson::BosonInstance::new(occupation(input), network.inner.clone())
                .map_err(value_error)?,
        })
    }

    /// Fiducial input (1,…,1,0,…,0) with a Haar-random network.
    #[staticmethod]
    fn fiducial_haar(m: usize, n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: boson::BosonInstance::fiducial_haar(m, n, seed).map_err(value_error)? })
    }

    /// Scattershot variant: photons enter a uniformly random n-subset of modes.
    #[staticmethod]
    fn scattershot(m: usize, n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: boson::scattershot_instance(m, n, seed).map_err(value_error)? })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn input(&self) -> Vec<u8> {
        self.inner.input().counts().to_vec()
    }

    fn network(&self) -> Unitary {
        Unitary { inner: self.inner.network().clone() }
    }

    fn event_probability(&self, event: Vec<u8>) -> PyResult<f64> {
        boson::event_probability(&self.inner, &occupation(event)).map_err(value_error)
    }

    /// (events, probabilities) over all of Φ_{m,n}.
    fn exact_distribution(&self) -> PyResult<(Vec<Vec<u8>>, Vec<f64>)> {
        Ok(occupation_dist_to_py(&boson::exact_distribution(&self.inner).map_err(value_error)?))
    }

    /// The classical baseline: each photon routed independently by |u_ij|².
    fn distinguishable_distribution(&self) -> PyResult<(Vec<Vec<u8>>, Vec<f64>)> {
        Ok(occupation_dist_to_py(
            &boson::distinguishable_distribution(&self.inner).map_err(value_error)?,
        ))
    }

    fn sample(&self, count: usize, seed: u64) -> PyResult<Vec<Vec<u8>>> {
        let samples = boson::sample(&self.inner, count, seed).map_err(value_error)?;
        Ok(samples.draws.into_iter().map(|e| e.counts().to_vec()).collect())
    }

    /// Post-selected lossy sampling; returns (samples, acceptance_rate).
    fn lossy_sample(
        &self,
        eta: f64,
        trials: usize,
        seed: u64,
    ) -> PyResult<(Vec<Vec<u8>>, f64)> {
        let lossy = boson::lossy_sample(&self.inner, eta, trials, seed).map_err(value_error)?;
        Ok((
            lossy.samples.draws.into_iter().map(|e| e.counts().to_vec()).collect(),
            lossy.acceptance_rate,
        ))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(json).map_err(value_error)? })
    }

    fn __repr__(&self) -> String {
        format!("BosonInstance(m={}, n={})", self.inner.m(), self.inner.n())
    }
}

/// Fraction of sampled occupation events with any mode count ≥ 2.
#[pyfunction]
fn collision_fraction(samples: Vec<Vec<u8>>) -> PyResult<f64> {
    let set = SampleSet { seed: 0, draws: samples.into_iter().map(occupation).collect() };
    boson::collision_statistics(&set).map_err(value_error)
}

fn parse_bitstring(s: &str) -> PyResult<iqp::BitString> {
    s.parse().map_err(value_error)
}

/// An IQP circuit H⊗ⁿ·D·H⊗ⁿ with D a diagonal phase polynomial.
#[pyclass(frozen, name = "IqpCircuit")]
struct PyIqpCircuit {
    inner: iqp::IqpCircuit,
}

#[pymethods]
impl PyIqpCircuit {
    /// √CZ + T weights on the complete graph.
    #[staticmethod]
    fn random_family1(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: iqp::random_family1(n, seed).map_err(value_error)? })
    }

    /// Z/CZ/CCZ monomials, each present with probability ½ at weight π.
    #[staticmethod]
    fn random_family2(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: iqp::random_family2(n, seed).map_err(value_error)? })
    }

    /// Family-1 weights on `budget` random pairs (None → ⌈n·log₂n⌉).
    #[staticmethod]
    #[pyo3(signature = (n, seed, budget = None))]
    fn random_sparse(n: usize, seed: u64, budget: Option<usize>) -> PyResult<Self> {
        let budget = budget.unwrap_or_else(|| iqp::default_sparse_budget(n));
        Ok(Self { inner: iqp::random_sparse(n, budget, seed).map_err(value_error)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn family(&self) -> String {
        match self.inner.family() {
            iqp::FamilyTag::Family1 => "family1",
            iqp::FamilyTag::Family2 => "family2",
            iqp::FamilyTag::Sparse => "sparse",
            iqp::FamilyTag::Custom => "custom",
        }
        .to_string()
    }

    /// Terms as (qubits, weight_numerator, weight_denominator) with the
    /// weight in units of π.
    fn terms(&self) -> Vec<(Vec<usize>, i64, i64)> {
        self.inner
            .phase()
            .terms()
            .iter()
            .map(|t| (t.qubits.clone(), t.weight.numerator(), t.weight.denominator()))
            .collect()
    }

    /// p_x by the naive 2ⁿ-term sum.
    fn output_probability(&self, x: &str) -> PyResult<f64> {
        iqp::output_probability(&self.inner, &parse_bitstring(x)?).map_err(value_error)
    }

    /// (bitstrings, probabilities) over all 2ⁿ outputs, via the fast
    /// Walsh-Hadamard transform.
    fn full_distribution(&self) -> PyResult<(Vec<String>, Vec<f64>)> {
        let dist = iqp::full_distribution(&self.inner).map_err(value_error)?;
        Ok((
            dist.events().iter().map(|b| b.to_string()).collect(),
            dist.probabilities().to_vec(),
        ))
    }

    fn sample(&self, count: usize, seed: u64) -> PyResult<Vec<String>> {
        let samples = iqp::sample_iqp(&self.inner, count, seed).map_err(value_error)?;
        Ok(samples.draws.into_iter().map(|b| b.to_string()).collect())
    }

    /// Ideal samples with each output bit flipped at rate/2.
    fn sample_depolarized(&self, rate: f64, count: usize, seed: u64) -> PyResult<Vec<String>> {
        let samples =
            iqp::depolarize_samples(&self.inner, rate, count, seed).map_err(value_error)?;
        Ok(samples.draws.into_iter().map(|b| b.to_string()).collect())
    }

    /// XOR-shift: returns the circuit whose distribution is this one
    /// translated by x.
    fn shift(&self, x: &str) -> PyResult<Self> {
        Ok(Self { inner: iqp::shift_circuit(&self.inner, &parse_bitstring(x)?).map_err(value_error)? })
    }

    /// Degree-3 F₂ gap; p₀ = (gap/2ⁿ)². Family-2 form only.
    fn gap(&self) -> PyResult<i64> {
        iqp::gap_degree3(self.inner.phase()).map_err(value_error)
    }

    /// Ising partition function Z = Σ_y e^{iθ(y)}; p₀ = |Z|²/4ⁿ. 2-local only.
    fn partition_function(&self) -> PyResult<Complex64> {
        iqp::partition_function_check(&self.inner).map_err(value_error)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(json).map_err(value_error)? })
    }

    fn __repr__(&self) -> String {
        format!("IqpCircuit(n={}, family={:?})", self.inner.n(), self.family())
    }
}

/// Verifies the postselected hadamard gadget on a random circuit; returns
/// {"fidelity", "postselection_probability", "gadgets"}.
#[pyfunction]
fn gadget_check<'py>(
    py: Python<'py>,
    n: usize,
    gadgets: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = iqp::verify_hadamard_gadget(n, gadgets, seed).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("fidelity", report.fidelity)?;
    dict.set_item("postselection_probability", report.postselection_probability)?;
    dict.set_item("gadgets", report.gadget_count)?;
    Ok(dict)
}

/// Anti-concentration sweep; family is "1", "2", or "sparse". Returns
/// {"fraction", "zero_string_fraction", "porter_thomas_ks"}.
#[pyfunction]
fn anticoncentration<'py>(
    py: Python<'py>,
    family: &str,
    n: usize,
    trials: usize,
    alpha: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let family = match family {
        "1" | "family1" => iqp::CircuitFamily::Family1,
        "2" | "family2" => iqp::CircuitFamily::Family2,
        "sparse" => iqp::CircuitFamily::Sparse { budget: None },
        other => return Err(value_error(format!("unknown family {other:?}"))),
    };
    let report =
        iqp::anticoncentration_stats(&family, n, trials, alpha, seed).map_err(value_error)?;
    let ks = stats::porter_thomas_fit(&report.scaled_probabilities, 0).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("fraction", report.fraction)?;
    dict.set_item("zero_string_fraction", report.zero_fraction)?;
    dict.set_item("porter_thomas_ks", ks)?;
    dict.set_item("circuits", report.circuits)?;
    Ok(dict)
}

/// (½Σ|p−q|, Σ|p−q|) for two probability tables over the same indexed space.
#[pyfunction]
fn tv_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<(f64, f64)> {
    let index: Vec<usize> = (0..p.len()).collect();
    let dp = Distribution::new(index.clone(), p).map_err(value_error)?;
    let dq = Distribution::new(index, q).map_err(value_error)?;
    let tv = stats::tv_distance(&dp, &dq).map_err(value_error)?;
    Ok((tv.half_sum, tv.abs_sum))
}

/// Q·e^{-eps} ≤ Q_est ≤ Q·e^{eps}.
#[pyfunction]
fn within_multiplicative(q: f64, q_est: f64, eps: f64) -> bool {
    stats::within_multiplicative(q, q_est, eps)
}

/// Q − eps ≤ Q_est ≤ Q + eps.
#[pyfunction]
fn within_additive(q: f64, q_est: f64, eps: f64) -> bool {
    stats::within_additive(q, q_est, eps)
}

/// KS statistic of 2ⁿ·p values against the Exp(1) Porter-Thomas law.
#[pyfunction]
fn porter_thomas_ks(probabilities: Vec<f64>, n: usize) -> PyResult<f64> {
    stats::porter_thomas_fit(&probabilities, n).map_err(value_error)
}

/// Likelihood-ratio test against the uniform distribution.
/// Returns {"verdict": "boson"|"uniform", "llr", "samples"}.
#[pyfunction]
fn validate_uniform<'py>(
    py: Python<'py>,
    instance: &PyBosonInstance,
    samples: Vec<Vec<u8>>,
) -> PyResult<Bound<'py, PyDict>> {
    let set = SampleSet { seed: 0, draws: samples.into_iter().map(occupation).collect() };
    let result = stats::uniform_discriminator(&set, &instance.inner).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item(
        "verdict",
        match result.verdict {
            stats::UniformVerdict::Boson => "boson",
            stats::UniformVerdict::Uniform => "uniform",
        },
    )?;
    dict.set_item("llr", result.log_likelihood_ratio)?;
    dict.set_item("samples", result.samples)?;
    Ok(dict)
}

/// Likelihood-ratio test of the quantum model against classically routed
/// distinguishable particles.
/// Returns {"verdict": "indistinguishable"|"distinguishable", "llr", "samples"}.
#[pyfunction]
fn validate_distinguishable<'py>(
    py: Python<'py>,
    instance: &PyBosonInstance,
    samples: Vec<Vec<u8>>,
) -> PyResult<Bound<'py, PyDict>> {
    let set = SampleSet { seed: 0, draws: samples.into_iter().map(occupation).collect() };
    let result =
        stats::distinguishable_discriminator(&set, &instance.inner).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item(
        "verdict",
        match result.verdict {
            stats::ModelVerdict::Indistinguishable => "indistinguishable",
            stats::ModelVerdict::Distinguishable => "distinguishable",
        },
    )?;
    dict.set_item("llr", result.log_likelihood_ratio)?;
    dict.set_item("samples", result.samples)?;
    Ok(dict)
}

#[pymodule]
fn qsamp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Unitary>()?;
    m.add_class::<PyBosonInstance>()?;
    m.add_class::<PyIqpCircuit>()?;
    m.add_function(wrap_pyfunction!(permanent, m)?)?;
    m.add_function(wrap_pyfunction!(permanent_naive, m)?)?;
    m.add_function(wrap_pyfunction!(embed_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(reck_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(reck_reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(event_space, m)?)?;
    m.add_function(wrap_pyfunction!(collision_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_check, m)?)?;
    m.add_function(wrap_pyfunction!(anticoncentration, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance, m)?)?;
    m.add_function(wrap_pyfunction!(within_multiplicative, m)?)?;
    m.add_function(wrap_pyfunction!(within_additive, m)?)?;
    m.add_function(wrap_pyfunction!(porter_thomas_ks, m)?)?;
    m.add_function(wrap_pyfunction!(validate_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(validate_distinguishable, m)?)?;
    Ok(())
}
