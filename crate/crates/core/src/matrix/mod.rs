//! Dense complex linear algebra for linear-optical networks.
//!
//! The scattering behaviour of an `m`-mode interferometer is a single m×m
//! unitary acting on mode operators. This module owns that representation:
//! general [`ComplexMatrix`] storage, the validated [`UnitaryMatrix`] newtype,
//! Haar-random generation (complex Ginibre + QR with the R-diagonal phase
//! fixed positive), decomposition into a planar beamsplitter/phase mesh,
//! scaled embedding of an arbitrary matrix into a larger unitary, and
//! entrywise Gaussian perturbation with polar re-unitarization.

mod eig;
mod reck;

pub use reck::{reck_decompose, reck_reconstruct, PlanarDecomposition, PlanarOp};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rng::{gaussian_pair, shuffle, stream_rng};

/// Max-entry deviation of U†U from the identity accepted as "unitary".
pub const UNITARITY_TOL: f64 = 1e-10;

/// Fraction of 1/σ_max used when scaling a matrix for embedding.
const EMBED_SAFETY: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not unitary: max |U\u{2020}U - I| = {deviation:.3e} exceeds {tolerance:.0e}")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Largest |a_ij - b_ij| over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |(U†U - I)_ij|; zero for a perfect unitary.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let product = self.dagger().mul(self);
        product.max_abs_diff(&Self::identity(self.rows))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRecord {
            rows: self.rows,
            cols: self.cols,
            re: self.entries.iter().map(|z| z.re).collect(),
            im: self.entries.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = MatrixRecord::deserialize(deserializer)?;
        if record.re.len() != record.im.len() {
            return Err(D::Error::custom("re and im arrays differ in length"));
        }
        let entries = record
            .re
            .iter()
            .zip(&record.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(record.rows, record.cols, entries).map_err(D::Error::custom)
    }
}

/// Square matrix validated to satisfy `‖U†U - I‖_max ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn try_new(matrix: ComplexMatrix) -> Result<Self, MatrixError> {
        if !matrix.is_square() {
            return Err(MatrixError::InvalidDimension(format!(
                "unitary must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(MatrixError::NotUnitary { deviation, tolerance: UNITARITY_TOL });
        }
        Ok(Self(matrix))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let matrix = ComplexMatrix::deserialize(deserializer)?;
        UnitaryMatrix::try_new(matrix).map_err(D::Error::custom)
    }
}

/// Standard complex Gaussian (Ginibre) entry: real and imaginary parts each
/// N(0, 1/2), so E|z|² = 1.
fn ginibre_entry(rng: &mut ChaCha8Rng) -> Complex64 {
    let (x, y) = gaussian_pair(rng);
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// Orthonormalizes `column` against `basis` (two Gram-Schmidt passes) and
/// normalizes it. Returns false when the column was in the span of the basis.
fn orthonormalize_against(basis: &[Vec<Complex64>], column: &mut [Complex64]) -> bool {
    for _ in 0..2 {
        for existing in basis {
            let inner: Complex64 =
                existing.iter().zip(column.iter()).map(|(e, v)| e.conj() * v).sum();
            for (v, e) in column.iter_mut().zip(existing) {
                *v -= inner * e;
            }
        }
    }
    let norm = column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return false;
    }
    for v in column.iter_mut() {
        *v /= norm;
    }
    true
}

/// Extends `basis` with random orthonormal columns of length `dim` until it
/// holds `target` vectors.
fn complete_basis(basis: &mut Vec<Vec<Complex64>>, dim: usize, target: usize, rng: &mut ChaCha8Rng) {
    while basis.len() < target {
        let mut column: Vec<Complex64> = (0..dim).map(|_| ginibre_entry(rng)).collect();
        if orthonormalize_against(basis, &mut column) {
            basis.push(column);
        }
        // A Ginibre draw lies in a proper subspace with probability zero;
        // on the pathological rounding case we simply redraw.
    }
}

fn haar_from_rng(m: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    complete_basis(&mut columns, m, m, rng);
    let matrix = ComplexMatrix::from_fn(m, m, |i, j| columns[j][i]);
    UnitaryMatrix::try_new(matrix).expect("orthonormalized columns form a unitary")
}

/// Haar-distributed m×m random unitary, deterministic in `seed`.
///
/// Draws a complex Ginibre matrix and orthonormalizes its columns in order,
/// which is the QR factorization with the diagonal of R taken real positive —
/// the phase convention that makes Q exactly Haar.
pub fn haar_unitary(m: usize, seed: u64) -> Result<UnitaryMatrix, MatrixError> {
    if m == 0 {
        return Err(MatrixError::InvalidDimension("mode count must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, 0);
    Ok(haar_from_rng(m, &mut rng))
}

/// Result of [`embed_scaled`]: the host unitary, the scale ε applied to the
/// embedded matrix, and the (row, column) indices of the embedded block.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub unitary: UnitaryMatrix,
    pub scale: f64,
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
}

/// Embeds ε·A as a submatrix of an m×m unitary at uniformly random row and
/// column positions.
///
/// Uses the exact unitary dilation `[εA, √(I-ε²AA†); √(I-ε²A†A), -εA†]` with
/// ε = 0.9/σ_max(A), completed to m×m with an independent Haar block on the
/// remaining modes and scattered by uniformly random row/column permutations.
/// The caller learns the placement from the returned indices; nothing about
/// it is encoded elsewhere in the matrix.
pub fn embed_scaled(a: &ComplexMatrix, m: usize, seed: u64) -> Result<Embedding, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::InvalidDimension(format!(
            "embedded matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Err(MatrixError::InvalidDimension("embedded matrix must be nonempty".into()));
    }
    if m < 2 * n {
        return Err(MatrixError::InvalidDimension(format!(
            "host dimension {m} too small for dilation of a {n}x{n} matrix (need m >= {})",
            2 * n
        )));
    }

    let sigma_max = eig::largest_singular_value(a);
    let scale = if sigma_max > 0.0 { EMBED_SAFETY / sigma_max } else { 1.0 };

    // Dilation blocks. X and Y are principal square roots, so the intertwining
    // identity A·f(A†A) = f(AA†)·A makes the 2n×2n block matrix unitary.
    let a_dag = a.dagger();
    let gram_right = scaled_gram_complement(a, &a_dag, scale); // I - ε²AA†
    let gram_left = scaled_gram_complement(&a_dag, a, scale); // I - ε²A†A
    let x = eig::hermitian_sqrt_psd(&gram_right);
    let y = eig::hermitian_sqrt_psd(&gram_left);

    let mut block = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            block.set(i, j, a.get(i, j) * scale);
            block.set(i, n + j, x.get(i, j));
            block.set(n + i, j, y.get(i, j));
            block.set(n + i, n + j, -a_dag.get(i, j) * scale);
        }
    }

    let mut rng = stream_rng(seed, 0);
    let mut row_perm: Vec<usize> = (0..m).collect();
    let mut col_perm: Vec<usize> = (0..m).collect();
    shuffle(&mut rng, &mut row_perm);
    shuffle(&mut rng, &mut col_perm);

    let mut host = ComplexMatrix::zeros(m, m);
    for (i, &row) in row_perm[..2 * n].iter().enumerate() {
        for (j, &col) in col_perm[..2 * n].iter().enumerate() {
            host.set(row, col, block.get(i, j));
        }
    }
    if m > 2 * n {
        let mut haar_rng = stream_rng(seed, 1);
        let filler = haar_from_rng(m - 2 * n, &mut haar_rng);
        for (i, &row) in row_perm[2 * n..].iter().enumerate() {
            for (j, &col) in col_perm[2 * n..].iter().enumerate() {
                host.set(row, col, filler.get(i, j));
            }
        }
    }

    Ok(Embedding {
        unitary: UnitaryMatrix::try_new(host)?,
        scale,
        row_indices: row_perm[..n].to_vec(),
        col_indices: col_perm[..n].to_vec(),
    })
}

/// I - ε²·L·R for square L, R of equal size.
fn scaled_gram_complement(left: &ComplexMatrix, right: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let n = left.rows();
    let product = left.mul(right);
    ComplexMatrix::from_fn(n, n, |i, j| {
        let base = if i == j { Complex64::ONE } else { Complex64::ZERO };
        base - product.get(i, j) * (scale * scale)
    })
}

/// Adds i.i.d. complex Gaussian noise of standard deviation `sigma` to every
/// entry (E|δ|² = σ²) and projects back to the nearest unitary in Frobenius
/// norm (polar projection). `sigma = 0` returns the input unchanged; the
/// noise direction is drawn before scaling, so for a fixed seed the
/// perturbation grows continuously with `sigma`.
pub fn perturb_unitary(
    u: &UnitaryMatrix,
    sigma: f64,
    seed: u64,
) -> Result<UnitaryMatrix, MatrixError> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(MatrixError::InvalidParameter(format!(
            "noise standard deviation must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(u.clone());
    }
    let m = u.dim();
    let mut rng = stream_rng(seed, 0);
    let mut noisy = u.matrix().clone();
    for i in 0..m {
        for j in 0..m {
            noisy.set(i, j, noisy.get(i, j) + ginibre_entry(&mut rng) * sigma);
        }
    }
    let projected = eig::polar_unitary_factor(&noisy);
    UnitaryMatrix::try_new(projected)
}
