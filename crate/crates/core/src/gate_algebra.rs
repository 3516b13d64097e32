//! Affine structure of trace-preserving gates.
//!
//! A trace-preserving transfer matrix has the block form `[[1, 0], [T, R]]`
//! with translation `T` and linear block `R`. These compose as
//! `(T, R)(T', R') = (T + R T', R R')`, and every such gate factors as a
//! translation times orthogonal, diagonal and orthogonal unital gates.

use std::f64::consts::TAU;

use crate::channel::{GateClass, TransferGate};
use crate::error::{Error, Result};
use crate::linalg::{RMatrix, RVector};
use crate::pauli::QubitCount;
use crate::tolerance;

#[derive(Clone, Debug, PartialEq)]
pub struct AffineGate {
    n: QubitCount,
    translation: RVector,
    linear: RMatrix,
}

impl AffineGate {
    pub fn new(translation: RVector, linear: RMatrix) -> Result<Self> {
        let dim = translation.len();
        if linear.nrows() != dim || linear.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if linear.nrows() != dim {
                    linear.nrows()
                } else {
                    linear.ncols()
                },
            });
        }
        if translation
            .iter()
            .chain(linear.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let n = QubitCount::from_operator_dim(dim + 1)?;
        Ok(AffineGate {
            n,
            translation,
            linear,
        })
    }

    pub fn identity(n: QubitCount) -> Self {
        let dim = n.operator_dim() - 1;
        AffineGate {
            n,
            translation: RVector::zeros(dim),
            linear: RMatrix::identity(dim, dim),
        }
    }

    /// Extracts `(T, R)` from a trace-preserving gate.
    pub fn from_gate(g: &TransferGate) -> Result<Self> {
        if !g.is_trace_preserving() {
            let m = g.matrix();
            let deviation = (m[(0, 0)] - 1.0)
                .abs()
                .max(m.row(0).columns(1, m.ncols() - 1).amax());
            return Err(Error::NotTracePreserving { deviation });
        }
        let m = g.matrix();
        let dim = m.nrows() - 1;
        Ok(AffineGate {
            n: g.qubits(),
            translation: m.view((1, 0), (dim, 1)).column(0).into_owned(),
            linear: m.view((1, 1), (dim, dim)).into_owned(),
        })
    }

    pub fn to_gate(&self) -> TransferGate {
        let dim = self.translation.len();
        let mut m = RMatrix::zeros(dim + 1, dim + 1);
        m[(0, 0)] = 1.0;
        m.view_mut((1, 0), (dim, 1)).copy_from(&self.translation);
        m.view_mut((1, 1), (dim, dim)).copy_from(&self.linear);
        TransferGate::new(m, GateClass::TracePreserving).expect("block form is trace-preserving")
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn translation(&self) -> &RVector {
        &self.translation
    }

    pub fn linear(&self) -> &RMatrix {
        &self.linear
    }

    /// `(T, I)`.
    pub fn pure_translation(translation: RVector) -> Result<Self> {
        let dim = translation.len();
        Self::new(translation, RMatrix::identity(dim, dim))
    }

    /// `(0, R)`.
    pub fn pure_linear(linear: RMatrix) -> Result<Self> {
        let dim = linear.nrows();
        Self::new(RVector::zeros(dim), linear)
    }

    /// `(-R^-1 T, R^-1)`, if `R` is invertible.
    pub fn inverse(&self) -> Option<Self> {
        let inv = self.linear.clone().try_inverse()?;
        let translation = -(&inv * &self.translation);
        Some(AffineGate {
            n: self.n,
            translation,
            linear: inv,
        })
    }
}

/// `(T, R)(T', R') = (T + R T', R R')`; `b` acts first.
pub fn compose(a: &AffineGate, b: &AffineGate) -> Result<AffineGate> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.translation.len(),
            found: b.translation.len(),
        });
    }
    Ok(AffineGate {
        n: a.n,
        translation: &a.translation + &a.linear * &b.translation,
        linear: &a.linear * &b.linear,
    })
}

/// `R = U1 diag(lambda) U2^T` with `lambda` descending and non-negative.
///
/// `U2` is kept in `SO`; when `det R < 0` the reflection sits in `U1`.
#[derive(Clone, Debug)]
pub struct GateSvd {
    pub translation: RVector,
    pub u1: RMatrix,
    pub singular_values: RVector,
    pub u2: RMatrix,
}

impl GateSvd {
    fn unital(&self, block: RMatrix) -> TransferGate {
        AffineGate::pure_linear(block)
            .expect("square block")
            .to_gate()
    }

    /// `E^(T) = |0)(0| + sum |mu)(mu| + sum T_mu |mu)(0|`.
    pub fn translation_gate(&self) -> TransferGate {
        AffineGate::pure_translation(self.translation.clone())
            .expect("valid length")
            .to_gate()
    }

    pub fn left_gate(&self) -> TransferGate {
        self.unital(self.u1.clone())
    }

    pub fn diagonal_gate(&self) -> TransferGate {
        self.unital(RMatrix::from_diagonal(&self.singular_values))
    }

    /// Unital gate whose block is `U2^T`.
    pub fn right_gate(&self) -> TransferGate {
        self.unital(self.u2.transpose())
    }

    /// `E^(T) U1 D U2^T` as a product of embedded gates.
    pub fn reconstruct(&self) -> TransferGate {
        [self.left_gate(), self.diagonal_gate(), self.right_gate()]
            .iter()
            .try_fold(self.translation_gate(), |acc, g| acc.compose(g))
            .expect("gates share a dimension")
    }
}

pub fn decompose_svd(g: &AffineGate) -> GateSvd {
    let dim = g.linear.nrows();
    let svd = g.linear.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut u1 = RMatrix::zeros(dim, dim);
    let mut u2 = RMatrix::zeros(dim, dim);
    let mut lambda = RVector::zeros(dim);
    for (slot, &src) in order.iter().enumerate() {
        u1.set_column(slot, &u.column(src));
        u2.set_column(slot, &v.column(src));
        lambda[slot] = svd.singular_values[src].max(0.0);
    }
    if u2.determinant() < 0.0 {
        // Flipping the same column of both factors leaves U1 D U2^T unchanged.
        let last = dim - 1;
        u1.column_mut(last).neg_mut();
        u2.column_mut(last).neg_mut();
    }
    GateSvd {
        translation: g.translation.clone(),
        u1,
        singular_values: lambda,
        u2,
    }
}

/// True when the maximally mixed state is a fixed point, i.e. `T = 0`.
pub fn is_unital(g: &TransferGate) -> bool {
    let m = g.matrix();
    let deviation = (m[(0, 0)] - 1.0)
        .abs()
        .max(m.column(0).rows(1, m.nrows() - 1).amax());
    deviation < tolerance::ALGEBRAIC
}

fn plane_rotation(a: usize, b: usize, angle: f64) -> TransferGate {
    let mut m = RMatrix::identity(4, 4);
    let (s, c) = angle.sin_cos();
    m[(a, a)] = c;
    m[(b, b)] = c;
    m[(b, a)] = s;
    m[(a, b)] = -s;
    TransferGate::new(m, GateClass::TracePreserving).expect("rotation is trace-preserving")
}

/// Rotation by `alpha` in the `(1, 2)` plane, fixing axis 3; the gate of
/// `exp(-i alpha sigma_3 / 2)`.
pub fn rotation_gate_1(alpha: f64) -> TransferGate {
    plane_rotation(1, 2, alpha)
}

/// Rotation by `theta` in the `(3, 1)` plane, fixing axis 2; the gate of
/// `exp(-i theta sigma_2 / 2)`.
pub fn rotation_gate_2(theta: f64) -> TransferGate {
    plane_rotation(3, 1, theta)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
}

impl EulerAngles {
    /// `U1(alpha) U2(theta) U1(beta)`.
    pub fn to_gate(self) -> TransferGate {
        rotation_gate_1(self.alpha)
            .compose(&rotation_gate_2(self.theta))
            .and_then(|g| g.compose(&rotation_gate_1(self.beta)))
            .expect("single-qubit gates")
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w.abs() < 1e-15 || (TAU - w).abs() < 1e-15 {
        0.0
    } else {
        w
    }
}

/// Factors a single-qubit unital rotation gate into `(alpha, theta, beta)`
/// with `theta` in `[0, pi]` and `alpha`, `beta` in `[0, 2 pi)`. In the
/// degenerate cases `theta = 0` and `theta = pi`, `beta` is 0.
pub fn euler_factor(g: &TransferGate) -> Result<EulerAngles> {
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: g.dim(),
        });
    }
    let m = g.matrix();
    let border = (1..4)
        .map(|k| m[(0, k)].abs().max(m[(k, 0)].abs()))
        .fold((m[(0, 0)] - 1.0).abs(), f64::max);
    let r = m.view((1, 1), (3, 3)).into_owned();
    let orth = crate::linalg::max_diff_real(&(r.transpose() * &r), &RMatrix::identity(3, 3));
    let determinant = r.determinant();
    let deviation = border.max(orth);
    if deviation > tolerance::ALGEBRAIC || determinant <= 0.0 {
        return Err(Error::NotRotation {
            deviation,
            determinant,
        });
    }
    // r indices 0, 1, 2 are the x, y, z axes.
    let sin_theta = r[(0, 2)].hypot(r[(1, 2)]);
    let theta = sin_theta.atan2(r[(2, 2)]);
    let (alpha, beta) = if sin_theta < 1e-10 {
        ((-r[(0, 1)]).atan2(r[(1, 1)]), 0.0)
    } else {
        (r[(1, 2)].atan2(r[(0, 2)]), r[(2, 1)].atan2(-r[(2, 0)]))
    };
    Ok(EulerAngles {
        alpha: wrap_angle(alpha),
        theta,
        beta: wrap_angle(beta),
    })
}
