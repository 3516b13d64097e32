//! Projective measurement in the transfer-matrix picture.
//!
//! Each projector `P_k` gives a trace-decreasing branch gate `E^(k)`; the
//! probability of branch `k` is `sqrt(2^n) (E^(k) rho)_0` and the conditional
//! state is the branch output divided by that weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{kraus_to_gate, KrausSet, TransferGate};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::pauli::{PauliCoeffVector, PauliState, QubitCount};
use crate::tolerance;

/// Hermitian, idempotent, pairwise orthogonal projectors.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    n: QubitCount,
    projectors: Vec<CMatrix>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidProjectorSet("no projectors".into()))?;
        let dim = first.nrows();
        let n = QubitCount::from_hilbert_dim(dim)?;
        for (k, p) in projectors.iter().enumerate() {
            if p.shape() != (dim, dim) {
                return Err(Error::InvalidProjectorSet(format!(
                    "projector {k} has shape {}x{}, expected {dim}x{dim}",
                    p.nrows(),
                    p.ncols()
                )));
            }
            if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            let herm = linalg::hermiticity_deviation(p);
            if herm > tolerance::PROJECTOR {
                return Err(Error::InvalidProjectorSet(format!(
                    "projector {k} is not Hermitian (deviation {herm:e})"
                )));
            }
            let idem = linalg::max_diff(&(p * p), p);
            if idem > tolerance::PROJECTOR {
                return Err(Error::InvalidProjectorSet(format!(
                    "projector {k} is not idempotent (deviation {idem:e})"
                )));
            }
        }
        for k in 0..projectors.len() {
            for l in k + 1..projectors.len() {
                let overlap = linalg::max_abs(&(&projectors[k] * &projectors[l]));
                if overlap > tolerance::PROJECTOR {
                    return Err(Error::InvalidProjectorSet(format!(
                        "projectors {k} and {l} are not orthogonal (overlap {overlap:e})"
                    )));
                }
            }
        }
        Ok(ProjectorSet { n, projectors })
    }

    pub fn qubits(&self) -> QubitCount {
        self.n
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// `max |sum_k P_k - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.n.hilbert_dim();
        let sum = self
            .projectors
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
        linalg::max_diff(&sum, &linalg::identity(dim))
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_deviation() < tolerance::PROJECTOR
    }

    /// `E^(k)` for every projector, in order.
    pub fn branch_gates(&self) -> Result<Vec<TransferGate>> {
        self.projectors
            .iter()
            .map(|p| kraus_to_gate(&KrausSet::new(vec![p.clone()])?))
            .collect()
    }

    /// The `{P_+, P_-}` pair `(sigma_0 +- sigma_3) / 2` on one qubit.
    pub fn computational_z() -> Self {
        let mut plus = CMatrix::zeros(2, 2);
        plus[(0, 0)] = linalg::ONE;
        let mut minus = CMatrix::zeros(2, 2);
        minus[(1, 1)] = linalg::ONE;
        ProjectorSet::new(vec![plus, minus]).expect("computational projectors")
    }
}

/// `rho -> sum_k P_k rho P_k`.
pub fn vn_superop(ps: &ProjectorSet) -> Result<TransferGate> {
    kraus_to_gate(&KrausSet::new(ps.projectors.clone())?)
}

/// `sqrt(2^n) (E v)_0`, the trace of the gate's output.
fn output_weight(g: &TransferGate, v: &PauliCoeffVector) -> Result<(PauliCoeffVector, f64)> {
    let out = g.apply(v)?;
    let w = out.trace();
    Ok((out, w))
}

/// Probability of branch `k`, clamped into `[0, 1]`.
pub fn branch_probability(ps: &ProjectorSet, k: usize, s: &PauliState) -> Result<f64> {
    let p = ps.projectors.get(k).ok_or(Error::IndexOutOfRange {
        index: k,
        bound: ps.len(),
    })?;
    let g = kraus_to_gate(&KrausSet::new(vec![p.clone()])?)?;
    Ok(gate_probability(&g, s)?)
}

fn gate_probability(g: &TransferGate, s: &PauliState) -> Result<f64> {
    let (_, w) = output_weight(g, &s.as_coeff_vector())?;
    Ok(w.clamp(0.0, 1.0))
}

/// `rho -> E(rho) / Tr E(rho)`.
#[derive(Clone, Debug)]
pub struct NonlinearGate {
    linear: TransferGate,
}

impl NonlinearGate {
    pub fn new(linear: TransferGate) -> Self {
        NonlinearGate { linear }
    }

    pub fn linear(&self) -> &TransferGate {
        &self.linear
    }

    /// `Tr E(rho)`.
    pub fn weight(&self, s: &PauliState) -> Result<f64> {
        Ok(output_weight(&self.linear, &s.as_coeff_vector())?.1)
    }

    pub fn apply(&self, s: &PauliState) -> Result<PauliState> {
        apply_nonlinear(self, s)
    }
}

/// Renormalized output of the linear gate; fails with
/// [`Error::ZeroProbabilityBranch`] when the weight is at most `1e-12`.
pub fn apply_nonlinear(g: &NonlinearGate, s: &PauliState) -> Result<PauliState> {
    let (out, w) = output_weight(&g.linear, &s.as_coeff_vector())?;
    if g.linear.is_trace_preserving() {
        return PauliState::new(out.into_coeffs());
    }
    if !(w > tolerance::ZERO_BRANCH) {
        return Err(Error::ZeroProbabilityBranch { weight: w });
    }
    PauliState::new(out.into_coeffs().unscale(w))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub branch: usize,
    pub probabilities: Vec<f64>,
    pub post_state: PauliState,
}

/// Samples a branch of a complete measurement given by its branch gates.
pub fn measure_with_branch_gates<R: Rng + ?Sized>(
    gates: &[TransferGate],
    s: &PauliState,
    rng: &mut R,
) -> Result<Measurement> {
    let probabilities = gates
        .iter()
        .map(|g| gate_probability(g, s))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > tolerance::WEIGHT {
        return Err(Error::IncompleteProjectorSet {
            deviation: (total - 1.0).abs(),
        });
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut branch = None;
    for (k, &p) in probabilities.iter().enumerate() {
        if p <= tolerance::ZERO_BRANCH {
            continue;
        }
        acc += p;
        branch = Some(k);
        if u < acc {
            break;
        }
    }
    let branch = branch.ok_or(Error::ZeroProbabilityBranch { weight: total })?;
    let post_state = apply_nonlinear(&NonlinearGate::new(gates[branch].clone()), s)?;
    Ok(Measurement {
        branch,
        probabilities,
        post_state,
    })
}

/// Samples `k` with probability `p(k)` and returns the conditional state.
pub fn measure<R: Rng + ?Sized>(
    ps: &ProjectorSet,
    s: &PauliState,
    rng: &mut R,
) -> Result<Measurement> {
    if !ps.is_complete() {
        return Err(Error::IncompleteProjectorSet {
            deviation: ps.completeness_deviation(),
        });
    }
    if ps.n != s.qubits() {
        return Err(Error::DimensionMismatch {
            expected: ps.n.operator_dim(),
            found: s.qubits().operator_dim(),
        });
    }
    measure_with_branch_gates(&ps.branch_gates()?, s, rng)
}

/// [`measure`] with a fresh ChaCha8 stream seeded by `seed`.
pub fn measure_seeded(ps: &ProjectorSet, s: &PauliState, seed: u64) -> Result<Measurement> {
    measure(ps, s, &mut ChaCha8Rng::seed_from_u64(seed))
}
