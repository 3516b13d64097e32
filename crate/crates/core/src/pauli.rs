//! Tensor-product Pauli basis of the operator space and the conversions
//! between density matrices and their real Pauli coefficients.
//!
//! Indices are big-endian in base 4: `mu = mu_1 4^(n-1) + ... + mu_n`, with
//! qubit 1 the leftmost Kronecker factor. The stored coefficient of a state is
//! `rho_mu = Tr(sigma_mu rho) / sqrt(2^n)`, so `rho_0 = 1 / sqrt(2^n)` for every
//! state. The unnormalized `P_mu = Tr(sigma_mu rho)` form is available through
//! [`PauliState::p_coefficients`].

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RVector, C64, I, ONE, ZERO};
use crate::tolerance;

/// Default cap on the number of qubits; operator dimension 4^4 = 256.
pub const MAX_QUBITS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitCount(usize);

impl QubitCount {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_max(n, MAX_QUBITS)
    }

    pub fn with_max(n: usize, max: usize) -> Result<Self> {
        if n == 0 || n > max {
            return Err(Error::QubitCountOutOfRange { n, max });
        }
        Ok(QubitCount(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `2^n`.
    pub fn hilbert_dim(self) -> usize {
        1 << self.0
    }

    /// `N = 4^n`.
    pub fn operator_dim(self) -> usize {
        1 << (2 * self.0)
    }

    /// Infers the qubit count from a Hilbert-space dimension `2^n`.
    pub fn from_hilbert_dim(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: dim,
            });
        }
        Self::new(dim.trailing_zeros() as usize)
    }

    /// Infers the qubit count from an operator dimension `4^n`.
    pub fn from_operator_dim(dim: usize) -> Result<Self> {
        let n = dim.trailing_zeros() as usize;
        if !dim.is_power_of_two() || n % 2 != 0 || dim < 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: dim,
            });
        }
        Self::new(n / 2)
    }
}

impl fmt::Display for QubitCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A basis label `mu` together with its base-4 digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    mu: usize,
    n: QubitCount,
}

impl MultiIndex {
    pub fn new(mu: usize, n: QubitCount) -> Result<Self> {
        let bound = n.operator_dim();
        if mu >= bound {
            return Err(Error::IndexOutOfRange { index: mu, bound });
        }
        Ok(MultiIndex { mu, n })
    }

    pub fn from_digits(digits: &[u8], n: QubitCount) -> Result<Self> {
        if digits.len() != n.get() {
            return Err(Error::DimensionMismatch {
                expected: n.get(),
                found: digits.len(),
            });
        }
        let mut mu = 0;
        for &d in digits {
            if d > 3 {
                return Err(Error::IndexOutOfRange {
                    index: d as usize,
                    bound: 4,
                });
            }
            mu = mu * 4 + d as usize;
        }
        Ok(MultiIndex { mu, n })
    }

    pub fn value(self) -> usize {
        self.mu
    }

    pub fn qubits(self) -> QubitCount {
        self.n
    }

    /// Digits `(mu_1, ..., mu_n)`, most significant first.
    pub fn digits(self) -> Vec<u8> {
        digits_of(self.mu, self.n.get())
    }
}

pub(crate) fn digits_of(mut mu: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (mu % 4) as u8;
        mu /= 4;
    }
    out
}

/// `sigma_mu` stored as a signed permutation: row `r` has its only non-zero
/// entry `phase[r]` in column `r ^ flip`.
#[derive(Clone, Debug)]
pub(crate) struct PauliString {
    flip: usize,
    phase: Vec<C64>,
}

impl PauliString {
    pub(crate) fn new(mu: usize, n: usize) -> Self {
        let dim = 1usize << n;
        let digits = digits_of(mu, n);
        let mut flip = 0;
        for (k, &d) in digits.iter().enumerate() {
            if d == 1 || d == 2 {
                flip |= 1 << (n - 1 - k);
            }
        }
        let phase = (0..dim)
            .map(|row| {
                digits.iter().enumerate().fold(ONE, |acc, (k, &d)| {
                    let bit = (row >> (n - 1 - k)) & 1;
                    acc * match (d, bit) {
                        (2, 0) => -I,
                        (2, _) => I,
                        (3, 1) => -ONE,
                        _ => ONE,
                    }
                })
            })
            .collect();
        PauliString { flip, phase }
    }

    pub(crate) fn dim(&self) -> usize {
        self.phase.len()
    }

    pub(crate) fn matrix(&self) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (r, &p) in self.phase.iter().enumerate() {
            m[(r, r ^ self.flip)] = p;
        }
        m
    }

    /// `Tr(sigma A)` in O(dim).
    pub(crate) fn trace_with(&self, a: &CMatrix) -> C64 {
        self.phase
            .iter()
            .enumerate()
            .map(|(r, &p)| p * a[(r ^ self.flip, r)])
            .sum()
    }
}

/// All `4^n` Pauli strings in index order.
pub(crate) fn pauli_strings(n: QubitCount) -> Vec<PauliString> {
    (0..n.operator_dim())
        .map(|mu| PauliString::new(mu, n.get()))
        .collect()
}

/// `sigma_mu = sigma_{mu_1} (x) ... (x) sigma_{mu_n}`.
pub fn pauli_operator(index: MultiIndex) -> CMatrix {
    PauliString::new(index.value(), index.qubits().get()).matrix()
}

/// The full basis `sigma_0, ..., sigma_{4^n - 1}` as dense matrices.
pub fn pauli_basis(n: QubitCount) -> Vec<CMatrix> {
    pauli_strings(n).iter().map(PauliString::matrix).collect()
}

/// Hilbert-Schmidt inner product `(A|B) = Tr(A^dag B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if !linalg::is_square(a) {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Complex coefficients `(1/sqrt(2^n)) Tr(sigma_mu A)` of an arbitrary operator.
pub fn operator_coefficients(a: &CMatrix) -> Result<CVector> {
    if !linalg::is_square(a) {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = QubitCount::from_hilbert_dim(a.nrows())?;
    let scale = (1.0 / n.hilbert_dim() as f64).sqrt();
    Ok(CVector::from_iterator(
        n.operator_dim(),
        pauli_strings(n).iter().map(|s| s.trace_with(a) * scale),
    ))
}

/// Inverse of [`operator_coefficients`]: `(1/sqrt(2^n)) sum_mu c_mu sigma_mu`.
pub fn operator_from_coefficients(coeffs: &CVector) -> Result<CMatrix> {
    let n = QubitCount::from_operator_dim(coeffs.len())?;
    let dim = n.hilbert_dim();
    let scale = (1.0 / dim as f64).sqrt();
    let mut out = CMatrix::zeros(dim, dim);
    for (mu, s) in pauli_strings(n).iter().enumerate() {
        let c = coeffs[mu] * scale;
        if c == ZERO {
            continue;
        }
        for (r, &p) in s.phase.iter().enumerate() {
            out[(r, r ^ s.flip)] += p * c;
        }
    }
    Ok(out)
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: QubitCount,
    data: CMatrix,
}

impl DensityMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if !linalg::is_square(&data) {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = QubitCount::from_hilbert_dim(data.nrows())?;
        let deviation = linalg::hermiticity_deviation(&data);
        if deviation > tolerance::ALGEBRAIC {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = data.trace();
        if (trace.re - 1.0).abs() > tolerance::ALGEBRAIC || trace.im.abs() > tolerance::ALGEBRAIC {
            return Err(Error::WrongTrace { trace: trace.re });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues(&data)[0];
        if min_eigenvalue < -tolerance::SPECTRAL {
            return Err(Error::NotAState { min_eigenvalue });
        }
        Ok(DensityMatrix { n, data })
    }

    /// The pure state `|psi><psi|` of a normalized vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotAState {
                min_eigenvalue: 0.0,
            });
        }
        let psi = psi.unscale(norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(n: QubitCount) -> Self {
        let dim = n.hilbert_dim();
        DensityMatrix {
            n,
            data: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_inner(self) -> CMatrix {
        self.data
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }
}

/// Real Pauli coefficients of an arbitrary Hermitian operator; no state
/// invariants beyond the length `4^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoeffVector {
    n: QubitCount,
    coeffs: RVector,
}

impl PauliCoeffVector {
    pub fn new(coeffs: RVector) -> Result<Self> {
        let n = QubitCount::from_operator_dim(coeffs.len())?;
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PauliCoeffVector { n, coeffs })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn coeffs(&self) -> &RVector {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> RVector {
        self.coeffs
    }

    /// The operator `(1/sqrt(2^n)) sum_mu c_mu sigma_mu`.
    pub fn to_operator(&self) -> CMatrix {
        let c = self.coeffs.map(|x| C64::new(x, 0.0));
        operator_from_coefficients(&c).expect("length checked at construction")
    }

    /// `Tr` of the represented operator, `sqrt(2^n) c_0`.
    pub fn trace(&self) -> f64 {
        (self.n.hilbert_dim() as f64).sqrt() * self.coeffs[0]
    }

    /// Validates the state invariants.
    pub fn into_state(self) -> Result<PauliState> {
        PauliState::new(self.coeffs)
    }
}

/// Pauli coefficients of a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliState {
    n: QubitCount,
    coeffs: RVector,
}

impl PauliState {
    /// Checks `coeffs[0] = 1/sqrt(2^n)` (snapped to the exact value) and that
    /// the reconstructed density matrix is positive semidefinite.
    pub fn new(coeffs: RVector) -> Result<Self> {
        let raw = PauliCoeffVector::new(coeffs)?;
        pauli_to_density(&raw)?;
        Ok(PauliState::new_unchecked(raw.n, raw.coeffs))
    }

    pub(crate) fn new_unchecked(n: QubitCount, mut coeffs: RVector) -> Self {
        coeffs[0] = normalization(n);
        PauliState { n, coeffs }
    }

    pub fn maximally_mixed(n: QubitCount) -> Self {
        let mut coeffs = RVector::zeros(n.operator_dim());
        coeffs[0] = normalization(n);
        PauliState { n, coeffs }
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn coeffs(&self) -> &RVector {
        &self.coeffs
    }

    /// `P_mu = sqrt(2^n) rho_mu`, so `P_0 = 1`.
    pub fn p_coefficients(&self) -> RVector {
        self.coeffs.scale((self.n.hilbert_dim() as f64).sqrt())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            data: self.as_coeff_vector().to_operator(),
        }
    }

    pub fn as_coeff_vector(&self) -> PauliCoeffVector {
        PauliCoeffVector {
            n: self.n,
            coeffs: self.coeffs.clone(),
        }
    }

    /// State of the combined system, `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliState) -> Result<PauliState> {
        let n = QubitCount::new(self.n.get() + other.n.get())?;
        Ok(PauliState::new_unchecked(
            n,
            self.coeffs.kronecker(&other.coeffs),
        ))
    }

    /// `Tr(rho^2) = sum_mu rho_mu^2`.
    pub fn purity(&self) -> f64 {
        self.coeffs.norm_squared()
    }
}

impl From<PauliState> for PauliCoeffVector {
    fn from(s: PauliState) -> Self {
        PauliCoeffVector {
            n: s.n,
            coeffs: s.coeffs,
        }
    }
}

pub(crate) fn normalization(n: QubitCount) -> f64 {
    (1.0 / n.hilbert_dim() as f64).sqrt()
}

pub fn density_to_pauli(rho: &DensityMatrix) -> PauliState {
    let c = operator_coefficients(&rho.data).expect("density matrices are square");
    PauliState::new_unchecked(rho.n, c.map(|z| z.re))
}

pub fn pauli_to_density(state: &PauliCoeffVector) -> Result<DensityMatrix> {
    let expected = normalization(state.n);
    let found = state.coeffs[0];
    if (found - expected).abs() > tolerance::ALGEBRAIC {
        return Err(Error::WrongNormalization { found, expected });
    }
    let data = state.to_operator();
    let min_eigenvalue = linalg::hermitian_eigenvalues(&data)[0];
    if min_eigenvalue < -tolerance::SPECTRAL {
        return Err(Error::NotAState { min_eigenvalue });
    }
    Ok(DensityMatrix { n: state.n, data })
}

/// Generalized computational state `|mu] = (|0) + |mu)(1 - delta_mu0)) / sqrt(2^n)`.
pub fn computational_state(mu: MultiIndex) -> PauliState {
    let n = mu.qubits();
    let mut coeffs = RVector::zeros(n.operator_dim());
    coeffs[0] = normalization(n);
    if mu.value() != 0 {
        coeffs[mu.value()] = normalization(n);
    }
    PauliState { n, coeffs }
}
