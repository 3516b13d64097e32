//! Seeded samplers for states, unitaries and channels.
//!
//! Trace-preserving Kraus sets come from Ginibre matrices `G_j` normalized as
//! `A_j = G_j S^(-1/2)` with `S = sum_j G_j^dag G_j`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausSet;
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::pauli::{DensityMatrix, PauliState, QubitCount};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR with the phases of `R` divided out.
pub fn unitary<R: Rng + ?Sized>(n: QubitCount, rng: &mut R) -> CMatrix {
    let dim = n.hilbert_dim();
    let qr = ginibre(dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            linalg::ONE
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Trace-preserving Kraus set with `m` operators.
pub fn kraus_set<R: Rng + ?Sized>(n: QubitCount, m: usize, rng: &mut R) -> KrausSet {
    let dim = n.hilbert_dim();
    let raw: Vec<CMatrix> = (0..m.max(1)).map(|_| ginibre(dim, rng)).collect();
    let s = raw
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, g| acc + g.adjoint() * g);
    let norm = linalg::inverse_sqrt_hermitian(&s);
    KrausSet::new(raw.iter().map(|g| g * &norm).collect())
        .expect("normalized Ginibre set is trace-preserving")
}

/// Trace-decreasing Kraus set: a trace-preserving set scaled by `sqrt(keep)`.
pub fn trace_decreasing_kraus_set<R: Rng + ?Sized>(
    n: QubitCount,
    m: usize,
    keep: f64,
    rng: &mut R,
) -> KrausSet {
    let tp = kraus_set(n, m, rng);
    let s = keep.clamp(0.0, 1.0).sqrt();
    KrausSet::new(tp.ops().iter().map(|a| a.scale(s)).collect())
        .expect("scaled set stays trace-decreasing")
}

/// Mixed state `G G^dag / Tr(G G^dag)` from a Ginibre matrix.
pub fn density<R: Rng + ?Sized>(n: QubitCount, rng: &mut R) -> DensityMatrix {
    let g = ginibre(n.hilbert_dim(), rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m.unscale(t)).expect("Ginibre ensemble yields valid states")
}

pub fn pure_state<R: Rng + ?Sized>(n: QubitCount, rng: &mut R) -> DensityMatrix {
    let dim = n.hilbert_dim();
    let psi = CVector::from_fn(dim, |_, _| gaussian(rng));
    DensityMatrix::from_pure(&psi).expect("non-zero vector")
}

/// Single-qubit state with a Bloch vector drawn uniformly from the unit ball.
pub fn bloch_state<R: Rng + ?Sized>(rng: &mut R) -> PauliState {
    let q1 = QubitCount::new(1).expect("1 qubit");
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            let h = 0.5f64.sqrt();
            let coeffs = linalg::RVector::from_vec(vec![h, h * v[0], h * v[1], h * v[2]]);
            return PauliState::new_unchecked(q1, coeffs);
        }
    }
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rng);
    (&g + g.adjoint()).scale(0.5)
}
