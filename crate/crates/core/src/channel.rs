//! Quantum operations as Kraus sets and as real transfer matrices.
//!
//! A Kraus set `{A_j}` acts as `rho -> sum_j A_j rho A_j^dag`. Its transfer
//! matrix is `E_{mu nu} = 2^-n sum_j Tr(sigma_mu A_j sigma_nu A_j^dag)`, which
//! maps Pauli coefficient vectors linearly.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix, C64, ZERO};
use crate::pauli::{self, DensityMatrix, PauliCoeffVector, PauliState, QubitCount};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateClass {
    TracePreserving,
    TraceDecreasing,
}

impl GateClass {
    /// Short tag used in gate files.
    pub fn tag(self) -> &'static str {
        match self {
            GateClass::TracePreserving => "tp",
            GateClass::TraceDecreasing => "td",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "tp" => Ok(GateClass::TracePreserving),
            "td" => Ok(GateClass::TraceDecreasing),
            other => Err(Error::Parse(format!("unknown gate class {other:?}"))),
        }
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateClass::TracePreserving => "trace-preserving",
            GateClass::TraceDecreasing => "trace-decreasing",
        })
    }
}

/// A completely positive, trace-non-increasing map in Kraus form.
#[derive(Clone, Debug)]
pub struct KrausSet {
    n: QubitCount,
    ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKrausSet)?;
        let dim = first.nrows();
        let n = QubitCount::from_hilbert_dim(dim)?;
        for a in &ops {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: if a.nrows() != dim {
                        a.nrows()
                    } else {
                        a.ncols()
                    },
                });
            }
            if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let set = KrausSet { n, ops };
        let max_eigenvalue = *linalg::hermitian_eigenvalues(&set.completeness_operator())
            .last()
            .expect("non-empty spectrum");
        if max_eigenvalue > 1.0 + tolerance::WEIGHT {
            return Err(Error::NotTraceDecreasing { max_eigenvalue });
        }
        Ok(set)
    }

    /// The single-operator set `{U}`; `U` is not checked for unitarity here.
    pub fn from_unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `sum_j A_j^dag A_j`.
    pub fn completeness_operator(&self) -> CMatrix {
        let dim = self.n.hilbert_dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, a| acc + a.adjoint() * a)
    }

    /// The channel applying `self` first and then `next`.
    pub fn then(&self, next: &KrausSet) -> Result<KrausSet> {
        if self.n != next.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.hilbert_dim(),
                found: next.n.hilbert_dim(),
            });
        }
        let ops = next
            .ops
            .iter()
            .flat_map(|b| self.ops.iter().map(move |a| b * a))
            .collect();
        KrausSet::new(ops)
    }

    /// The product channel with `self` on the leading qubits.
    pub fn tensor(&self, other: &KrausSet) -> Result<KrausSet> {
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| linalg::kron(a, b)))
            .collect();
        KrausSet::new(ops)
    }
}

/// Real `4^n x 4^n` transfer matrix of a linear gate.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferGate {
    n: QubitCount,
    matrix: RMatrix,
    class: GateClass,
}

impl TransferGate {
    /// Validates shape and, for trace-preserving gates, the first row.
    pub fn new(matrix: RMatrix, class: GateClass) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = QubitCount::from_operator_dim(matrix.nrows())?;
        if class == GateClass::TracePreserving {
            let deviation = first_row_deviation(&matrix);
            if deviation > tolerance::ALGEBRAIC {
                return Err(Error::NotTracePreserving { deviation });
            }
        }
        Ok(TransferGate { n, matrix, class })
    }

    /// Classifies by the first row: `(1, 0, ..., 0)` means trace-preserving.
    pub fn infer(matrix: RMatrix) -> Result<Self> {
        let class = if matrix.nrows() > 0
            && matrix.nrows() == matrix.ncols()
            && first_row_deviation(&matrix) <= tolerance::ALGEBRAIC
        {
            GateClass::TracePreserving
        } else {
            GateClass::TraceDecreasing
        };
        Self::new(matrix, class)
    }

    pub fn identity(n: QubitCount) -> Self {
        let dim = n.operator_dim();
        TransferGate {
            n,
            matrix: RMatrix::identity(dim, dim),
            class: GateClass::TracePreserving,
        }
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMatrix {
        self.matrix
    }

    pub fn class(&self) -> GateClass {
        self.class
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.class == GateClass::TracePreserving
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &TransferGate) -> Result<TransferGate> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let class = if self.is_trace_preserving() && other.is_trace_preserving() {
            GateClass::TracePreserving
        } else {
            GateClass::TraceDecreasing
        };
        Ok(TransferGate {
            n: self.n,
            matrix: &self.matrix * &other.matrix,
            class,
        })
    }

    /// Gate on the combined system with `self` on the leading qubits.
    pub fn tensor(&self, other: &TransferGate) -> Result<TransferGate> {
        let n = QubitCount::new(self.n.get() + other.n.get())?;
        let class = if self.is_trace_preserving() && other.is_trace_preserving() {
            GateClass::TracePreserving
        } else {
            GateClass::TraceDecreasing
        };
        Ok(TransferGate {
            n,
            matrix: linalg::kron_real(&self.matrix, &other.matrix),
            class,
        })
    }

    pub fn apply(&self, v: &PauliCoeffVector) -> Result<PauliCoeffVector> {
        if v.qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.coeffs().len(),
            });
        }
        PauliCoeffVector::new(&self.matrix * v.coeffs())
    }

    /// The map on arbitrary (complex) operators obtained by linear extension.
    pub fn apply_to_operator(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.n.hilbert_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.n.hilbert_dim(),
                found: a.nrows(),
            });
        }
        let c = pauli::operator_coefficients(a)?;
        let out = linalg::to_complex(&self.matrix) * c;
        pauli::operator_from_coefficients(&out)
    }
}

fn first_row_deviation(m: &RMatrix) -> f64 {
    m.row(0)
        .iter()
        .enumerate()
        .map(|(nu, &x)| (x - if nu == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// `(sum_j A_j rho A_j^dag, Tr(...))`; the trace is the probability that the
/// process occurs.
pub fn apply_kraus(ch: &KrausSet, rho: &DensityMatrix) -> Result<(CMatrix, f64)> {
    let dim = ch.n.hilbert_dim();
    if rho.data().nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.data().nrows(),
        });
    }
    let out = ch.ops.iter().fold(CMatrix::zeros(dim, dim), |acc, a| {
        acc + a * rho.data() * a.adjoint()
    });
    let weight = out.trace().re;
    Ok((out, weight))
}

pub fn classify_kraus(ch: &KrausSet) -> Result<GateClass> {
    let s = ch.completeness_operator();
    let max_eigenvalue = *linalg::hermitian_eigenvalues(&s).last().expect("non-empty");
    if max_eigenvalue > 1.0 + tolerance::WEIGHT {
        return Err(Error::NotTraceDecreasing { max_eigenvalue });
    }
    let deviation = linalg::max_diff(&s, &linalg::identity(s.nrows()));
    Ok(if deviation < tolerance::ALGEBRAIC {
        GateClass::TracePreserving
    } else {
        GateClass::TraceDecreasing
    })
}

/// Complex transfer matrix `2^-n sum_j Tr(sigma_mu A_j sigma_nu A_j^dag)`
/// before the imaginary part is discarded.
pub(crate) fn kraus_transfer_complex(ch: &KrausSet) -> CMatrix {
    let strings = pauli::pauli_strings(ch.n);
    let big = ch.n.operator_dim();
    let dim = ch.n.hilbert_dim();
    let scale = 1.0 / dim as f64;
    let mut out = CMatrix::from_element(big, big, ZERO);
    for (nu, s_nu) in strings.iter().enumerate() {
        let sigma_nu = s_nu.matrix();
        let image = ch.ops.iter().fold(CMatrix::zeros(dim, dim), |acc, a| {
            acc + a * &sigma_nu * a.adjoint()
        });
        for (mu, s_mu) in strings.iter().enumerate() {
            out[(mu, nu)] = s_mu.trace_with(&image) * scale;
        }
    }
    out
}

fn max_imaginary(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Largest imaginary part of the complex transfer matrix of `ch`.
pub fn imaginary_residue(ch: &KrausSet) -> f64 {
    max_imaginary(&kraus_transfer_complex(ch))
}

pub(crate) fn realify(m: &CMatrix) -> Result<RMatrix> {
    let residue = max_imaginary(m);
    if residue > tolerance::IMAGINARY {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(m.map(|z| z.re))
}

pub fn kraus_to_gate(ch: &KrausSet) -> Result<TransferGate> {
    let class = classify_kraus(ch)?;
    let matrix = realify(&kraus_transfer_complex(ch))?;
    TransferGate::new(matrix, class)
}

fn unitarity_deviation(u: &CMatrix) -> f64 {
    linalg::max_diff(&(u.adjoint() * u), &linalg::identity(u.nrows()))
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if !linalg::is_square(u) {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: u.ncols(),
        });
    }
    let deviation = unitarity_deviation(u);
    if !(deviation <= tolerance::ALGEBRAIC) {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(())
}

/// Transfer matrix of `rho -> U rho U^dag`, in the same index order as
/// [`kraus_to_gate`]: `E_{mu nu} = 2^-n Tr(sigma_mu U sigma_nu U^dag)`.
pub fn unitary_to_gate(u: &CMatrix) -> Result<TransferGate> {
    check_unitary(u)?;
    let ch = KrausSet::from_unitary(u.clone())?;
    let matrix = realify(&kraus_transfer_complex(&ch))?;
    TransferGate::new(matrix, GateClass::TracePreserving)
}

/// `2^-n Tr(sigma_nu U sigma_mu U^dag)` with the basis labels in the other
/// order. This is the transpose of [`unitary_to_gate`], i.e. the gate of `U^dag`.
pub fn unitary_to_gate_swapped_indices(u: &CMatrix) -> Result<TransferGate> {
    check_unitary(u)?;
    let n = QubitCount::from_hilbert_dim(u.nrows())?;
    let strings = pauli::pauli_strings(n);
    let big = n.operator_dim();
    let scale = 1.0 / n.hilbert_dim() as f64;
    let mut out = CMatrix::from_element(big, big, ZERO);
    for (mu, s_mu) in strings.iter().enumerate() {
        let image = u * s_mu.matrix() * u.adjoint();
        for (nu, s_nu) in strings.iter().enumerate() {
            out[(mu, nu)] = s_nu.trace_with(&image) * scale;
        }
    }
    TransferGate::new(realify(&out)?, GateClass::TracePreserving)
}

/// Choi matrix `J = sum_{k,l} E(|k><l|) (x) |k><l|`, indexed by
/// `(i * d + k, i' * d + l)`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    n: QubitCount,
    data: CMatrix,
}

impl ChoiMatrix {
    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.data)
    }

    pub fn is_completely_positive(&self) -> bool {
        self.check().is_ok()
    }

    pub fn check(&self) -> Result<()> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -tolerance::SPECTRAL {
            return Err(Error::NotCompletelyPositive { min_eigenvalue });
        }
        Ok(())
    }
}

/// `sum_j vec(A_j) vec(A_j)^dag` with row-major vectorization.
pub fn choi_of(ch: &KrausSet) -> ChoiMatrix {
    let d = ch.n.hilbert_dim();
    let mut data = CMatrix::zeros(d * d, d * d);
    for a in &ch.ops {
        let v = linalg::CVector::from_iterator(d * d, (0..d * d).map(|idx| a[(idx / d, idx % d)]));
        data += &v * v.adjoint();
    }
    ChoiMatrix { n: ch.n, data }
}

/// Choi matrix of an arbitrary transfer matrix via its action on `|k><l|`.
pub fn choi_of_gate(g: &TransferGate) -> ChoiMatrix {
    let d = g.n.hilbert_dim();
    let mut data = CMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(k, l)] = C64::new(1.0, 0.0);
            let image = g
                .apply_to_operator(&unit)
                .expect("dimension matches the gate");
            for i in 0..d {
                for j in 0..d {
                    data[(i * d + k, j * d + l)] = image[(i, j)];
                }
            }
        }
    }
    ChoiMatrix { n: g.n, data }
}

pub fn is_completely_positive(ch: &KrausSet) -> bool {
    choi_of(ch).is_completely_positive()
}

/// `Ok(())` if the gate is completely positive, otherwise
/// [`Error::NotCompletelyPositive`] with the most negative Choi eigenvalue.
pub fn check_gate_cp(g: &TransferGate) -> Result<()> {
    choi_of_gate(g).check()
}

/// `rho_mu -> sum_nu E_{mu nu} rho_nu`.
pub fn apply_gate(g: &TransferGate, s: &PauliState) -> Result<PauliCoeffVector> {
    g.apply(&s.as_coeff_vector())
}
