//! Dense statevector evolution for gadget verification.
//!
//! Mid-circuit Hadamards break the H·D·H form. The hadamard gadget restores
//! it: a fresh ancilla (in |+⟩ after the leading H layer), one controlled-Z
//! onto the target wire, retargeting of all later gates to the ancilla, and
//! postselection of the consumed wire on 0 after the trailing H layer — a
//! one-bit teleportation of H. [`verify_hadamard_gadget`] builds a random
//! diagonal/mid-H circuit, runs it both directly and gadgetized on a dense
//! statevector, and reports the fidelity between the two output states along
//! with the postselection probability (exactly 2^-gadgets).

use num_complex::Complex64;

use super::IqpError;
use crate::rng::{stream_rng, uniform_f64, uniform_index};

/// Hard cap on simulated amplitudes: 2^20.
const MAX_QUBITS: usize = 20;

struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn zero_state(n: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Self { n, amps }
    }

    fn hadamard(&mut self, qubit: usize) {
        let bit = 1usize << qubit;
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for base in 0..self.amps.len() {
            if base & bit == 0 {
                let low = self.amps[base];
                let high = self.amps[base | bit];
                self.amps[base] = (low + high) * scale;
                self.amps[base | bit] = (low - high) * scale;
            }
        }
    }

    fn hadamard_all(&mut self) {
        for qubit in 0..self.n {
            self.hadamard(qubit);
        }
    }

    /// Multiplies by e^{iθ} every basis state with all `mask` bits set.
    fn phase_term(&mut self, mask: usize, theta: f64) {
        let phase = Complex64::from_polar(1.0, theta);
        for (index, amp) in self.amps.iter_mut().enumerate() {
            if index & mask == mask {
                *amp *= phase;
            }
        }
    }
}

/// A diagonal segment: phase terms over logical qubit subsets.
type Segment = Vec<(Vec<usize>, f64)>;

fn random_segment(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Segment {
    let mut terms = Segment::new();
    for i in 0..n {
        terms.push((vec![i], uniform_f64(rng) * std::f64::consts::TAU));
    }
    for i in 0..n {
        for j in i + 1..n {
            if uniform_f64(rng) < 0.5 {
                terms.push((vec![i, j], uniform_f64(rng) * std::f64::consts::TAU));
            }
        }
    }
    terms
}

fn apply_segment(state: &mut StateVector, segment: &Segment, wire: &[usize]) {
    for (qubits, theta) in segment {
        let mask = qubits.iter().fold(0usize, |m, &q| m | 1 << wire[q]);
        state.phase_term(mask, *theta);
    }
}

/// Outcome of one gadget verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetReport {
    /// |⟨ψ_direct|ψ_gadget⟩|²; the gadget contract is ≥ 1 − 1e-10.
    pub fidelity: f64,
    /// Probability of the all-zeros postselection pattern; 2^-gadgets.
    pub postselection_probability: f64,
    pub gadget_count: usize,
}

/// Builds a random circuit of `gadgets + 1` diagonal segments with a
/// mid-circuit Hadamard between consecutive segments, then verifies that
/// replacing each mid-circuit H with the postselected gadget reproduces the
/// direct output state.
pub fn verify_hadamard_gadget(
    n: usize,
    gadgets: usize,
    seed: u64,
) -> Result<GadgetReport, IqpError> {
    if n == 0 {
        return Err(IqpError::InvalidParameter("qubit count must be at least 1".into()));
    }
    let total_qubits = n + gadgets;
    if total_qubits > MAX_QUBITS {
        return Err(IqpError::TooLarge { n: total_qubits, limit: MAX_QUBITS });
    }

    let mut rng = stream_rng(seed, 0);
    let segments: Vec<Segment> = (0..=gadgets).map(|_| random_segment(n, &mut rng)).collect();
    let targets: Vec<usize> = (0..gadgets).map(|_| uniform_index(&mut rng, n)).collect();

    // Direct evolution with real mid-circuit Hadamards.
    let identity_wires: Vec<usize> = (0..n).collect();
    let mut direct = StateVector::zero_state(n);
    direct.hadamard_all();
    apply_segment(&mut direct, &segments[0], &identity_wires);
    for (gadget, &target) in targets.iter().enumerate() {
        direct.hadamard(target);
        apply_segment(&mut direct, &segments[gadget + 1], &identity_wires);
    }
    direct.hadamard_all();

    // Gadgetized evolution: ancillas replace each H, everything stays
    // diagonal between the outer H layers.
    let mut gadgetized = StateVector::zero_state(total_qubits);
    gadgetized.hadamard_all();
    let mut wire: Vec<usize> = (0..n).collect();
    let mut consumed: Vec<usize> = Vec::with_capacity(gadgets);
    apply_segment(&mut gadgetized, &segments[0], &wire);
    for (gadget, &target) in targets.iter().enumerate() {
        let ancilla = n + gadget;
        let cz_mask = (1usize << wire[target]) | (1usize << ancilla);
        gadgetized.phase_term(cz_mask, std::f64::consts::PI);
        consumed.push(wire[target]);
        wire[target] = ancilla;
        apply_segment(&mut gadgetized, &segments[gadget + 1], &wire);
    }
    gadgetized.hadamard_all();

    // Postselect every consumed wire on 0 and read the logical state off the
    // final wire map.
    let consumed_mask: usize = consumed.iter().fold(0, |m, &w| m | 1 << w);
    let postselection_probability: f64 = gadgetized
        .amps
        .iter()
        .enumerate()
        .filter(|(index, _)| index & consumed_mask == 0)
        .map(|(_, amp)| amp.norm_sqr())
        .sum();
    if postselection_probability <= 1e-12 {
        return Err(IqpError::DegenerateGadget);
    }

    let norm = postselection_probability.sqrt();
    let mut overlap = Complex64::ZERO;
    for logical in 0..1usize << n {
        let mut physical = 0usize;
        for (qubit, &w) in wire.iter().enumerate() {
            if logical >> qubit & 1 == 1 {
                physical |= 1 << w;
            }
        }
        overlap += direct.amps[logical].conj() * (gadgetized.amps[physical] / norm);
    }

    Ok(GadgetReport {
        fidelity: overlap.norm_sqr(),
        postselection_probability,
        gadget_count: gadgets,
    })
}
