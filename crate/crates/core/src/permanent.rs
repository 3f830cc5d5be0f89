//! Matrix permanent kernels.
//!
//! The permanent Per(A) = Σ_σ Π_i a_{i,σ(i)} is the signless cousin of the
//! determinant and the computational core of boson event probabilities. Two
//! kernels live here and are cross-validated against each other:
//!
//! - [`permanent_naive`] walks all n! permutations — the definitional oracle,
//!   usable up to n = 10;
//! - [`permanent_fast`] evaluates Ryser's inclusion-exclusion formula
//!   Per(A) = (-1)ⁿ Σ_{∅≠S⊆[n]} (-1)^{|S|} Π_i Σ_{j∈S} a_ij with a Gray-code
//!   walk over subsets, O(2ⁿ·n) time and O(n) work per subset.
//!
//! Above [`PARALLEL_THRESHOLD`] the subset range is split into fixed
//! contiguous Gray-code segments evaluated independently and summed in
//! segment order, so the result does not depend on thread count.
//!
//! Entries of unitary submatrices have modulus ≤ 1, so double-precision
//! accumulation holds every magnitude below n! ≤ 30! ≈ 2.7e32 — comfortably
//! inside f64 range for the supported n ≤ 30.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::ComplexMatrix;

/// Largest n accepted by the definitional O(n!·n) oracle.
pub const NAIVE_LIMIT: usize = 10;
/// Largest n accepted by the O(2ⁿ·n) kernel (cost guard).
pub const FAST_LIMIT: usize = 30;
/// Matrix size at which [`permanent_fast`] switches to segmented evaluation.
const PARALLEL_THRESHOLD: usize = 20;
/// Fixed segment count for parallel evaluation; independent of thread count.
const PARALLEL_SEGMENTS: u64 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermanentError {
    #[error("permanent needs a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix size {n} exceeds the {limit} limit for this kernel")]
    TooLarge { n: usize, limit: usize },
}

fn check_square(a: &ComplexMatrix, limit: usize) -> Result<usize, PermanentError> {
    if !a.is_square() {
        return Err(PermanentError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n > limit {
        return Err(PermanentError::TooLarge { n, limit });
    }
    Ok(n)
}

/// Permanent by direct enumeration of the symmetric group.
///
/// The empty 0×0 matrix has permanent 1 (empty product), which is the
/// zero-photon edge case downstream.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64, PermanentError> {
    let n = check_square(a, NAIVE_LIMIT)?;
    let mut total = Complex64::ZERO;
    let mut used = vec![false; n];
    expand_row(a, n, 0, Complex64::ONE, &mut used, &mut total);
    Ok(total)
}

fn expand_row(
    a: &ComplexMatrix,
    n: usize,
    row: usize,
    partial: Complex64,
    used: &mut [bool],
    total: &mut Complex64,
) {
    if row == n {
        *total += partial;
        return;
    }
    for col in 0..n {
        if !used[col] {
            used[col] = true;
            expand_row(a, n, row + 1, partial * a.get(row, col), used, total);
            used[col] = false;
        }
    }
}

/// Permanent via Ryser's formula with Gray-code subset updates.
pub fn permanent_fast(a: &ComplexMatrix) -> Result<Complex64, PermanentError> {
    let n = check_square(a, FAST_LIMIT)?;
    if n == 0 {
        return Ok(Complex64::ONE);
    }
    if n >= PARALLEL_THRESHOLD {
        Ok(ryser_segmented(a, PARALLEL_SEGMENTS))
    } else {
        Ok(ryser_range(a, 1, 1u64 << n))
    }
}

/// |Per(A)|² — the unnormalized event weight.
pub fn permanent_magnitude_squared(a: &ComplexMatrix) -> Result<f64, PermanentError> {
    Ok(permanent_fast(a)?.norm_sqr())
}

/// Ryser sum over subset indices `start..end` (Gray-coded), assuming
/// 1 ≤ start < end ≤ 2ⁿ. Row sums are seeded from the Gray code of
/// `start - 1` so disjoint ranges compose exactly.
fn ryser_range(a: &ComplexMatrix, start: u64, end: u64) -> Complex64 {
    let n = a.rows();
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut subset = gray(start - 1);
    let mut size = subset.count_ones() as i64;
    for (i, sum) in row_sums.iter_mut().enumerate() {
        for j in 0..n {
            if subset >> j & 1 == 1 {
                *sum += a.get(i, j);
            }
        }
    }

    let mut total = Complex64::ZERO;
    for k in start..end {
        let flipped = k.trailing_zeros() as usize;
        let bit = 1u64 << flipped;
        if subset & bit == 0 {
            subset |= bit;
            size += 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += a.get(i, flipped);
            }
        } else {
            subset &= !bit;
            size -= 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= a.get(i, flipped);
            }
        }
        let mut product = Complex64::ONE;
        for sum in &row_sums {
            product *= sum;
        }
        // Sign (-1)^{n-|S|} folds the global (-1)^n into each term.
        if (n as i64 - size) % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    total
}

#[inline]
fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Segmented Ryser evaluation: fixed contiguous Gray-code segments evaluated
/// in parallel, reduced in segment order. Matches the sequential kernel to
/// ~1e-12 relative (the addition order inside each segment is identical; only
/// the final few hundred partial sums are reassociated).
fn ryser_segmented(a: &ComplexMatrix, segments: u64) -> Complex64 {
    let n = a.rows();
    let end = 1u64 << n;
    let segments = segments.min(end - 1).max(1);
    let span = (end - 1) / segments;
    let bounds: Vec<(u64, u64)> = (0..segments)
        .map(|s| {
            let lo = 1 + s * span;
            let hi = if s + 1 == segments { end } else { 1 + (s + 1) * span };
            (lo, hi)
        })
        .collect();
    bounds
        .into_par_iter()
        .map(|(lo, hi)| ryser_range(a, lo, hi))
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

#[cfg(test)]
pub(crate) fn permanent_segmented_for_tests(a: &ComplexMatrix, segments: u64) -> Complex64 {
    ryser_segmented(a, segments)
}
