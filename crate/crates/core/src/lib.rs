//! Classical simulation and validation statistics for quantum sampling
//! problems.
//!
//! Two families of sampling problems are covered end to end:
//!
//! - **Boson sampling** — photons scattered through an m-mode linear network
//!   and counted in the Fock basis. Event probabilities are squared matrix
//!   permanents of network submatrices; this crate computes them exactly,
//!   samples from them, and models loss, scattershot inputs, and the
//!   distinguishable-particle baseline.
//! - **IQP sampling** — commuting circuits H⊗ⁿ·D·H⊗ⁿ with a diagonal phase
//!   polynomial D, evaluated by fast Walsh-Hadamard transform, with the
//!   partition-function and polynomial-gap identities, the postselected
//!   hadamard gadget, depolarizing noise, and anti-concentration statistics.
//!
//! The [`stats`] module carries the distance measures, error predicates, and
//! likelihood-ratio discriminators used to validate sampling data against
//! these models.
//!
//! Everything is deterministic given a `u64` seed. Parallel code derives one
//! RNG stream per fixed-size work chunk, so results never depend on thread
//! count.
//!
//! # Example
//!
//! ```
//! use qsamp_core::boson::{BosonInstance, exact_distribution};
//! use qsamp_core::matrix::haar_unitary;
//!
//! let network = haar_unitary(5, 42).unwrap();
//! let instance = BosonInstance::fiducial(5, 2, network).unwrap();
//! let dist = exact_distribution(&instance).unwrap();
//! assert!((dist.total() - 1.0).abs() < 1e-9);
//! ```

pub mod boson;
pub mod dist;
pub mod iqp;
pub mod matrix;
pub mod permanent;
pub mod rng;
pub mod stats;

pub use dist::{Distribution, SampleSet};
