//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! derived primitives the embedding and perturbation routines need: principal
//! square roots of positive-semidefinite matrices, polar projection onto the
//! unitary group, and largest singular values.
//!
//! Jacobi is quadratic-convergent and, at the small dimensions this crate
//! works with, both simpler and more accurate than bringing in a LAPACK
//! binding.

use num_complex::Complex64;

use super::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition H = V diag(λ) V† of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order with matching columns of V. The
/// input is read as Hermitian: only its Hermitian part influences the result.
pub(crate) fn hermitian_eig(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(h.is_square(), "eigendecomposition needs a square matrix");
    let n = h.rows();
    // Work on the explicit Hermitian part to shed rounding asymmetry.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h.get(i, j) + h.get(j, i).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    let frobenius: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stop = (frobenius * 1e-15).max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a.get(p, q).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigenvalues: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    let sorted_values: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    (sorted_values, sorted_vectors)
}

/// One complex Jacobi rotation zeroing A[p][q] (and A[q][p]); accumulates the
/// rotation into the eigenvector matrix `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let phase = apq / magnitude; // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * magnitude);
    // Smaller-magnitude root of t² + 2τt − 1 = 0 for a stable rotation angle.
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_phase = phase * s; // s·e^{iφ}

    let n = a.rows();
    // Row update (U† from the left): row_p' = c·row_p − s·e^{iφ}·row_q.
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c - aqk * s_phase);
        a.set(q, k, apk * s_phase.conj() + aqk * c);
    }
    // Column update (U from the right): col_p' = c·col_p − s·e^{-iφ}·col_q.
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * s_phase.conj());
        a.set(k, q, akp * s_phase + akq * c);
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * s_phase.conj());
        v.set(k, q, vkp * s_phase + vkq * c);
    }
    // Pin the rotated pair exactly.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Tiny negative eigenvalues from rounding are clamped to zero.
pub(crate) fn hermitian_sqrt_psd(h: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = hermitian_eig(h);
    let roots: Vec<f64> = values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    apply_spectral(&vectors, &roots)
}

/// V diag(f) V† for precomputed eigenvectors and spectral values.
fn apply_spectral(vectors: &ComplexMatrix, spectrum: &[f64]) -> ComplexMatrix {
    let n = vectors.rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vectors.get(i, k) * spectrum[k] * vectors.get(j, k).conj())
            .sum()
    })
}

/// Largest singular value via the top eigenvalue of A†A.
pub(crate) fn largest_singular_value(a: &ComplexMatrix) -> f64 {
    let gram = a.dagger().mul(a);
    let (values, _) = hermitian_eig(&gram);
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Unitary factor of the polar decomposition M = P·H (P unitary, H ⪰ 0):
/// the closest unitary to M in Frobenius norm.
///
/// Computed as M·(M†M)^{-1/2}; one extra projection pass is applied when the
/// first result drifts, which restores full accuracy even for badly
/// conditioned inputs.
pub(crate) fn polar_unitary_factor(m: &ComplexMatrix) -> ComplexMatrix {
    let mut p = polar_once(m);
    if p.unitarity_deviation() > 1e-12 {
        p = polar_once(&p);
    }
    p
}

fn polar_once(m: &ComplexMatrix) -> ComplexMatrix {
    let gram = m.dagger().mul(m);
    let (values, vectors) = hermitian_eig(&gram);
    let inverse_roots: Vec<f64> = values
        .iter()
        .map(|&x| {
            let clamped = x.max(f64::MIN_POSITIVE);
            1.0 / clamped.sqrt()
        })
        .collect();
    m.mul(&apply_spectral(&vectors, &inverse_roots))
}
