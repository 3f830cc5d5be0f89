//! Planar decomposition of a unitary into two-mode rotations and phases — the
//! beamsplitter/phase-shifter mesh realizable as a triangular interferometer.
//!
//! # Convention
//!
//! This is the one place that fixes the elementary-operation convention; every
//! round-trip test depends on it.
//!
//! A rotation on mode pair (i, j) with angle θ and phase φ acts on the
//! (i, j) subspace as
//!
//! ```text
//! R(θ, φ) = | cos θ            -sin θ · e^{-iφ} |
//!           | sin θ · e^{iφ}    cos θ           |
//! ```
//!
//! and a phase op multiplies mode i by e^{iφ}. [`reck_reconstruct`] multiplies
//! the elementary matrices in list order, first op leftmost:
//! `U = E₁ · E₂ · ⋯ · E_K`.
//!
//! [`reck_decompose`] triangularizes U by nulling each below-diagonal entry
//! with the adjoint rotation R(θ, φ)† acting on adjacent rows, column by
//! column from the bottom up, then reads the leftover diagonal off as phase
//! ops. The mesh therefore always contains exactly m(m−1)/2 rotations on
//! neighbouring pairs (i, i+1), some possibly with θ = 0, followed by m
//! phases — O(m²) elementary operations.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ComplexMatrix, MatrixError, UnitaryMatrix};

/// Magnitudes below this are treated as already-nulled when choosing angles.
const NULL_EPS: f64 = 1e-14;

/// One elementary operation of a planar mesh. See the module docs for the
/// matrix convention.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarOp {
    Rotation { modes: (usize, usize), theta: f64, phi: f64 },
    Phase { mode: usize, phi: f64 },
}

/// Ordered list of elementary operations whose product reconstructs a
/// unitary on `size` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDecomposition {
    size: usize,
    ops: Vec<PlanarOp>,
}

impl PlanarDecomposition {
    pub fn new(size: usize, ops: Vec<PlanarOp>) -> Result<Self, MatrixError> {
        for op in &ops {
            let in_range = match op {
                PlanarOp::Rotation { modes: (i, j), .. } => i != j && *i < size && *j < size,
                PlanarOp::Phase { mode, .. } => *mode < size,
            };
            if !in_range {
                return Err(MatrixError::InvalidDimension(format!(
                    "operation {op:?} is out of range for {size} modes"
                )));
            }
        }
        Ok(Self { size, ops })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[PlanarOp] {
        &self.ops
    }

    pub fn rotation_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, PlanarOp::Rotation { .. }))
            .count()
    }
}

/// Decomposes a unitary into the planar rotation/phase mesh described in the
/// module docs. Non-unitary inputs are unrepresentable (`UnitaryMatrix`
/// enforces the precondition).
pub fn reck_decompose(u: &UnitaryMatrix) -> PlanarDecomposition {
    let m = u.dim();
    let mut work = u.matrix().clone();
    let mut ops = Vec::with_capacity(m * (m - 1) / 2 + m);

    for col in 0..m {
        for row in (col + 1..m).rev() {
            let upper = row - 1;
            let (theta, phi) = nulling_angles(work.get(upper, col), work.get(row, col));
            apply_nulling_rotation(&mut work, upper, row, theta, phi);
            ops.push(PlanarOp::Rotation { modes: (upper, row), theta, phi });
        }
    }
    for mode in 0..m {
        ops.push(PlanarOp::Phase { mode, phi: work.get(mode, mode).arg() });
    }

    PlanarDecomposition { size: m, ops }
}

/// Angles (θ, φ) such that R(θ, φ)† applied to rows (upper, lower) zeroes the
/// lower entry.
fn nulling_angles(upper: Complex64, lower: Complex64) -> (f64, f64) {
    if lower.norm() <= NULL_EPS {
        (0.0, 0.0)
    } else if upper.norm() <= NULL_EPS {
        (std::f64::consts::FRAC_PI_2, 0.0)
    } else {
        let theta = lower.norm().atan2(upper.norm());
        let phi = normalize_angle(lower.arg() - upper.arg());
        (theta, phi)
    }
}

fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(std::f64::consts::TAU);
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Left-multiplies rows (i, j) by R(θ, φ)†:
/// row_i' = c·row_i + s·e^{-iφ}·row_j, row_j' = -s·e^{iφ}·row_i + c·row_j.
fn apply_nulling_rotation(m: &mut ComplexMatrix, i: usize, j: usize, theta: f64, phi: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let phase = Complex64::from_polar(1.0, phi);
    for k in 0..m.cols() {
        let top = m.get(i, k);
        let bottom = m.get(j, k);
        m.set(i, k, top * c + bottom * s * phase.conj());
        m.set(j, k, -top * s * phase + bottom * c);
    }
}

/// Product of the elementary operations in list order (first op leftmost).
pub fn reck_reconstruct(d: &PlanarDecomposition) -> Result<UnitaryMatrix, MatrixError> {
    let m = d.size;
    let mut acc = ComplexMatrix::identity(m);
    for op in &d.ops {
        match *op {
            PlanarOp::Rotation { modes: (i, j), theta, phi } => {
                // acc ← acc · R(θ, φ) as column operations.
                let (c, s) = (theta.cos(), theta.sin());
                let phase = Complex64::from_polar(1.0, phi);
                for r in 0..m {
                    let left = acc.get(r, i);
                    let right = acc.get(r, j);
                    acc.set(r, i, left * c + right * s * phase);
                    acc.set(r, j, -left * s * phase.conj() + right * c);
                }
            }
            PlanarOp::Phase { mode, phi } => {
                let phase = Complex64::from_polar(1.0, phi);
                for r in 0..m {
                    let v = acc.get(r, mode);
                    acc.set(r, mode, v * phase);
                }
            }
        }
    }
    UnitaryMatrix::try_new(acc)
}

#[derive(Serialize, Deserialize)]
struct OpRecord {
    kind: String,
    modes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    phi: f64,
}

impl Serialize for PlanarDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let records: Vec<OpRecord> = self
            .ops
            .iter()
            .map(|op| match *op {
                PlanarOp::Rotation { modes: (i, j), theta, phi } => OpRecord {
                    kind: "rotation".into(),
                    modes: vec![i, j],
                    theta: Some(theta),
                    phi,
                },
                PlanarOp::Phase { mode, phi } => {
                    OpRecord { kind: "phase".into(), modes: vec![mode], theta: None, phi }
                }
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PlanarDecomposition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let records = Vec::<OpRecord>::deserialize(deserializer)?;
        let mut ops = Vec::with_capacity(records.len());
        let mut size = 0;
        for record in records {
            let op = match (record.kind.as_str(), record.modes.as_slice()) {
                ("rotation", &[i, j]) => PlanarOp::Rotation {
                    modes: (i, j),
                    theta: record.theta.ok_or_else(|| D::Error::custom("rotation needs theta"))?,
                    phi: record.phi,
                },
                ("phase", &[mode]) => PlanarOp::Phase { mode, phi: record.phi },
                (kind, modes) => {
                    return Err(D::Error::custom(format!(
                        "malformed op: kind {kind:?} with modes {modes:?}"
                    )))
                }
            };
            size = size.max(match op {
                PlanarOp::Rotation { modes: (i, j), .. } => i.max(j) + 1,
                PlanarOp::Phase { mode, .. } => mode + 1,
            });
            ops.push(op);
        }
        PlanarDecomposition::new(size, ops).map_err(D::Error::custom)
    }
}
