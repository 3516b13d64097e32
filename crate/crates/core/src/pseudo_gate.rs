//! Left and right multiplication superoperators and the Lie machinery built on
//! them.
//!
//! `L^(A)` sends the Pauli coefficients of `B` to those of `AB`, and `R^(A)`
//! sends them to those of `BA`. A Kraus channel factors as
//! `E = sum_j L^(A_j) R^(A_j^dag)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{classify_kraus, realify, KrausSet, TransferGate};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix, C64, I, ONE};
use crate::pauli::{self, density_to_pauli, PauliState, QubitCount};
use crate::random;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct PseudoGateMatrix {
    n: QubitCount,
    side: Side,
    matrix: CMatrix,
    source: CMatrix,
}

impl PseudoGateMatrix {
    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// The operator `A` this superoperator multiplies by.
    pub fn source(&self) -> &CMatrix {
        &self.source
    }
}

fn pseudo(a: &CMatrix, side: Side) -> Result<PseudoGateMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = QubitCount::from_hilbert_dim(a.nrows())?;
    let strings = pauli::pauli_strings(n);
    let big = n.operator_dim();
    let scale = 1.0 / n.hilbert_dim() as f64;
    let mut matrix = CMatrix::zeros(big, big);
    for (col, s) in strings.iter().enumerate() {
        let sigma = s.matrix();
        let image = match side {
            Side::Left => a * sigma,
            Side::Right => sigma * a,
        };
        for (row, t) in strings.iter().enumerate() {
            matrix[(row, col)] = t.trace_with(&image) * scale;
        }
    }
    Ok(PseudoGateMatrix {
        n,
        side,
        matrix,
        source: a.clone(),
    })
}

/// `L_{mu alpha} = 2^-n Tr(sigma_alpha sigma_mu A)`.
pub fn left_matrix(a: &CMatrix) -> Result<PseudoGateMatrix> {
    pseudo(a, Side::Left)
}

/// `R_{alpha nu} = 2^-n Tr(sigma_alpha sigma_nu A)`.
pub fn right_matrix(a: &CMatrix) -> Result<PseudoGateMatrix> {
    pseudo(a, Side::Right)
}

/// `sum_j L^(A_j) R^(A_j^dag)`, realified.
pub fn gate_from_lr(ch: &KrausSet) -> Result<TransferGate> {
    let big = ch.qubits().operator_dim();
    let mut sum = CMatrix::zeros(big, big);
    for a in ch.ops() {
        let l = left_matrix(a)?;
        let r = right_matrix(&a.adjoint())?;
        sum += l.matrix() * r.matrix();
    }
    TransferGate::new(realify(&sum)?, classify_kraus(ch)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Weyl { mu: usize, nu: usize },
    Diag { alpha: usize },
    SymReal { alpha: usize, beta: usize },
    SymImag { alpha: usize, beta: usize },
}

#[derive(Clone, Debug)]
pub struct LieGenerator {
    pub kind: GeneratorKind,
    pub matrix: CMatrix,
}

impl LieGenerator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        !matches!(self.kind, GeneratorKind::Weyl { .. })
    }
}

fn check_index(index: usize, bound: usize) -> Result<()> {
    if index >= bound {
        return Err(Error::IndexOutOfRange { index, bound });
    }
    Ok(())
}

/// `H_{mu nu}` with a single unit entry at `(mu, nu)`.
pub fn weyl_generator(mu: usize, nu: usize, dim: usize) -> Result<LieGenerator> {
    check_index(mu, dim)?;
    check_index(nu, dim)?;
    let mut matrix = CMatrix::zeros(dim, dim);
    matrix[(mu, nu)] = ONE;
    Ok(LieGenerator {
        kind: GeneratorKind::Weyl { mu, nu },
        matrix,
    })
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// The `dim^2` Hermitian generators: all `Diag`, then `SymReal` and `SymImag`
/// for `alpha < beta` in lexicographic order.
pub fn hermitian_basis(dim: usize) -> Vec<LieGenerator> {
    let mut out = Vec::with_capacity(dim * dim);
    for alpha in 0..dim {
        let mut m = CMatrix::zeros(dim, dim);
        m[(alpha, alpha)] = ONE;
        out.push(LieGenerator {
            kind: GeneratorKind::Diag { alpha },
            matrix: m,
        });
    }
    for alpha in 0..dim {
        for beta in alpha + 1..dim {
            let mut m = CMatrix::zeros(dim, dim);
            m[(alpha, beta)] = ONE;
            m[(beta, alpha)] = ONE;
            out.push(LieGenerator {
                kind: GeneratorKind::SymReal { alpha, beta },
                matrix: m,
            });
        }
    }
    for alpha in 0..dim {
        for beta in alpha + 1..dim {
            let mut m = CMatrix::zeros(dim, dim);
            m[(alpha, beta)] = -I;
            m[(beta, alpha)] = I;
            out.push(LieGenerator {
                kind: GeneratorKind::SymImag { alpha, beta },
                matrix: m,
            });
        }
    }
    out
}

/// `exp(i t H)`.
pub fn one_parameter(h: &CMatrix, t: f64) -> CMatrix {
    h.scale(t).map(|z| z * I).exp()
}

fn power(m: &CMatrix, mut k: usize) -> CMatrix {
    let mut base = m.clone();
    let mut acc = CMatrix::identity(m.nrows(), m.ncols());
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Group-commutator approximation of `exp(t [a, b])`:
/// `(L_a(-s) L_b(s) L_a(s) L_b(-s))^steps` with `L_x(s) = exp(i s x)` and
/// `s = sqrt(|t| / steps)`. Negative `t` swaps the roles of `a` and `b`.
pub fn commutator_limit(a: &CMatrix, b: &CMatrix, t: f64, steps: usize) -> Result<CMatrix> {
    commutator(a, b)?;
    let steps = steps.max(1);
    let (a, b) = if t < 0.0 { (b, a) } else { (a, b) };
    let s = (t.abs() / steps as f64).sqrt();
    let step =
        one_parameter(a, -s) * one_parameter(b, s) * one_parameter(a, s) * one_parameter(b, -s);
    Ok(power(&step, steps))
}

/// Trotter approximation `(exp(i ca a / s) exp(i cb b / s))^s` of
/// `exp(i (ca a + cb b))`.
pub fn combination_limit(
    a: &CMatrix,
    b: &CMatrix,
    ca: C64,
    cb: C64,
    steps: usize,
) -> Result<CMatrix> {
    commutator(a, b)?;
    let steps = steps.max(1);
    let k = I / steps as f64;
    let step = a.map(|z| z * ca * k).exp() * b.map(|z| z * cb * k).exp();
    Ok(power(&step, steps))
}

fn two_ququat_index(mu1: usize, mu2: usize) -> usize {
    4 * mu1 + mu2
}

/// Permutation exchanging the two ququats: `|mu1 mu2) -> |mu2 mu1)`.
pub fn swap_pseudo_gate() -> CMatrix {
    let mut m = CMatrix::zeros(16, 16);
    for mu1 in 0..4 {
        for mu2 in 0..4 {
            m[(two_ququat_index(mu2, mu1), two_ququat_index(mu1, mu2))] = ONE;
        }
    }
    m
}

/// The swap as a real trace-preserving gate.
pub fn swap_gate() -> TransferGate {
    TransferGate::infer(swap_pseudo_gate().map(|z| z.re)).expect("permutation fixing index 0")
}

/// `T L T` for a two-ququat superoperator `L`.
pub fn conjugate_by_swap(l: &CMatrix) -> Result<CMatrix> {
    if l.shape() != (16, 16) {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: l.nrows(),
        });
    }
    let t = swap_pseudo_gate();
    Ok(&t * l * &t)
}

#[derive(Clone, Debug)]
pub enum Primitivity {
    /// No witness among the probes and random trials.
    Primitive { trials: usize },
    /// `witness.0 (x) witness.1` is mapped to a correlated state whose
    /// coefficient matrix has second singular value `schmidt`.
    Imprimitive {
        witness: (PauliState, PauliState),
        schmidt: f64,
    },
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        matches!(self, Primitivity::Primitive { .. })
    }
}

/// Second largest singular value of the two-ququat coefficients reshaped as
/// a 4x4 matrix. Zero exactly for product operators.
pub fn schmidt_residual(coeffs: &crate::linalg::RVector) -> f64 {
    let m = RMatrix::from_fn(4, 4, |i, j| coeffs[two_ququat_index(i, j)]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv[1]
}

fn axis_states() -> Vec<PauliState> {
    let q1 = QubitCount::new(1).expect("1 qubit");
    [3usize, 1, 2]
        .iter()
        .map(|&mu| pauli::computational_state(pauli::MultiIndex::new(mu, q1).expect("index < 4")))
        .collect()
}

/// Checks whether a two-ququat gate sends product states to product states.
///
/// The nine products of the `z`, `x`, `y` axis states are probed first, then
/// `trials` random pure product states drawn from `seed`.
pub fn is_primitive(g: &TransferGate, trials: usize, seed: u64) -> Result<Primitivity> {
    if g.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: g.dim(),
        });
    }
    let q1 = QubitCount::new(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axes = axis_states();
    let probes = axes
        .iter()
        .flat_map(|a| axes.iter().map(move |b| (a.clone(), b.clone())))
        .chain((0..trials).map(|_| {
            (
                density_to_pauli(&random::pure_state(q1, &mut rng)),
                density_to_pauli(&random::pure_state(q1, &mut rng)),
            )
        }));
    for (a, b) in probes {
        let input = a.tensor(&b)?;
        let out = g.apply(&input.as_coeff_vector())?;
        let schmidt = schmidt_residual(out.coeffs());
        if schmidt >= tolerance::SPECTRAL {
            return Ok(Primitivity::Imprimitive {
                witness: (a, b),
                schmidt,
            });
        }
    }
    Ok(Primitivity::Primitive { trials })
}

/// Scalar field of the span being closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// Real span; `i X` is a separate direction from `X`.
    Real,
    /// Complex span; each complex direction counts as two real ones.
    Complex,
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    pub field: Field,
    /// Upper bound on bracket layers.
    pub max_steps: usize,
    /// Stop once the real dimension reaches this value. Defaults to `2 d^2`.
    pub max_dim: Option<usize>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            field: Field::Complex,
            max_steps: 64,
            max_dim: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Closure {
    /// Real dimension of the closed span.
    pub dimension: usize,
    /// Orthonormal spanning matrices.
    pub basis: Vec<CMatrix>,
    /// Real dimension after the generators and after each bracket layer.
    pub trajectory: Vec<usize>,
    /// True if the span stopped growing before `max_steps` or the cap.
    pub saturated: bool,
}

struct Span {
    field: Field,
    basis: Vec<CMatrix>,
}

impl Span {
    fn inner(&self, a: &CMatrix, b: &CMatrix) -> C64 {
        let z: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        match self.field {
            Field::Complex => z,
            Field::Real => C64::new(z.re, 0.0),
        }
    }

    fn real_dim(&self) -> usize {
        match self.field {
            Field::Complex => 2 * self.basis.len(),
            Field::Real => self.basis.len(),
        }
    }

    /// Modified Gram-Schmidt with one reorthogonalization pass.
    fn insert(&mut self, candidate: CMatrix) -> bool {
        let norm0 = candidate.norm();
        if !(norm0 > 0.0) || !norm0.is_finite() {
            return false;
        }
        let mut r = candidate.unscale(norm0);
        for _ in 0..2 {
            for b in &self.basis {
                let c = self.inner(b, &r);
                r -= b * c;
            }
        }
        let residual = r.norm();
        if residual > tolerance::CLOSURE_RANK {
            self.basis.push(r.unscale(residual));
            true
        } else {
            false
        }
    }
}

/// Closes the span of `gens` under commutators.
///
/// Each layer brackets the directions added by the previous layer with every
/// generator; right-nested brackets of generators span the generated algebra.
pub fn lie_closure(gens: &[CMatrix], opts: &ClosureOptions) -> Result<Closure> {
    let Some(first) = gens.first() else {
        return Ok(Closure {
            dimension: 0,
            basis: Vec::new(),
            trajectory: vec![0],
            saturated: true,
        });
    };
    let d = first.nrows();
    for g in gens {
        if g.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if g.nrows() != d { g.nrows() } else { g.ncols() },
            });
        }
        if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    let full = 2 * d * d;
    let cap = opts.max_dim.unwrap_or(full).min(full);
    let mut span = Span {
        field: opts.field,
        basis: Vec::new(),
    };
    let mut frontier = Vec::new();
    for g in gens {
        if span.real_dim() >= cap {
            break;
        }
        if span.insert(g.clone()) {
            frontier.push(span.basis.len() - 1);
        }
    }
    let mut trajectory = vec![span.real_dim()];
    let mut saturated = false;
    for _ in 0..opts.max_steps {
        let mut next = Vec::new();
        'layer: for &idx in &frontier {
            for g in gens {
                if span.real_dim() >= cap {
                    break 'layer;
                }
                let c = g * &span.basis[idx] - &span.basis[idx] * g;
                if span.insert(c) {
                    next.push(span.basis.len() - 1);
                }
            }
        }
        trajectory.push(span.real_dim());
        log::debug!(
            "closure layer {}: dimension {}",
            trajectory.len() - 1,
            span.real_dim()
        );
        if next.is_empty() {
            saturated = true;
            break;
        }
        if span.real_dim() >= cap {
            break;
        }
        frontier = next;
    }
    Ok(Closure {
        dimension: span.real_dim(),
        basis: span.basis,
        trajectory,
        saturated,
    })
}

/// Generators `h (x) I` and `I (x) h` for every single-ququat Hermitian
/// generator `h`.
pub fn local_generators() -> Vec<CMatrix> {
    let id = CMatrix::identity(4, 4);
    let single = hermitian_basis(4);
    single
        .iter()
        .map(|h| h.matrix.kronecker(&id))
        .chain(single.iter().map(|h| id.kronecker(&h.matrix)))
        .collect()
}
