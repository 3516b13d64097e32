//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's own basis, transfer-matrix or embedding code.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;
pub type CM = DMatrix<C>;
pub type RM = DMatrix<f64>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn sigma(k: usize) -> CM {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let e = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -i, i, z],
        _ => [o, z, z, -o],
    };
    CM::from_row_slice(2, 2, &e)
}

pub fn kron(a: &CM, b: &CM) -> CM {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    CM::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// `sigma_{mu_1} (x) ... (x) sigma_{mu_n}`, `mu_1` the most significant digit.
pub fn pauli(mu: usize, n: usize) -> CM {
    (0..n).fold(CM::identity(1, 1), |acc, q| {
        kron(&acc, &sigma((mu >> (2 * (n - 1 - q))) & 3))
    })
}

pub fn trace(m: &CM) -> C {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `E_{mu nu} = 2^-n sum_j Tr(sigma_mu A_j sigma_nu A_j^dag)`, kept complex.
pub fn transfer_complex(ops: &[CM], n: usize) -> CM {
    let big = 4usize.pow(n as u32);
    let scale = 1.0 / 2f64.powi(n as i32);
    let basis: Vec<CM> = (0..big).map(|mu| pauli(mu, n)).collect();
    CM::from_fn(big, big, |mu, nu| {
        ops.iter()
            .map(|a| trace(&(&basis[mu] * a * &basis[nu] * a.adjoint())))
            .sum::<C>()
            * scale
    })
}

pub fn transfer(ops: &[CM], n: usize) -> RM {
    transfer_complex(ops, n).map(|z| z.re)
}

/// `rho_mu = Tr(sigma_mu rho) / sqrt(2^n)`.
pub fn coefficients(rho: &CM, n: usize) -> DVector<f64> {
    let big = 4usize.pow(n as u32);
    let norm = 2f64.powi(n as i32).sqrt();
    DVector::from_fn(big, |mu, _| trace(&(pauli(mu, n) * rho)).re / norm)
}

pub fn evolve(ops: &[CM], rho: &CM) -> CM {
    ops.iter()
        .fold(CM::zeros(rho.nrows(), rho.ncols()), |acc, a| {
            acc + a * rho * a.adjoint()
        })
}

pub fn max_abs(m: &CM) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RM) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; keeps the oracle's sampling independent of the library.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn ginibre<R: Rng>(d: usize, rng: &mut R) -> CM {
    CM::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Random Kraus set with `sum A^dag A = I`: blocks of an isometry from QR.
pub fn random_kraus<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<CM> {
    let d = 1 << n;
    let tall = CM::from_fn(d * m, d, |_, _| c(gaussian(rng), gaussian(rng)));
    let q = tall.qr().q();
    (0..m).map(|j| q.rows(j * d, d).into_owned()).collect()
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CM {
    random_kraus(n, 1, rng).remove(0)
}

pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> CM {
    let g = ginibre(1 << n, rng);
    let p = &g * g.adjoint();
    let t = trace(&p);
    p / t
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CM {
    let g = ginibre(d, rng);
    (&g + g.adjoint()).scale(0.5)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-qubit Hilbert-space swap.
pub fn swap_unitary() -> CM {
    let mut u = CM::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        u[(i, j)] = c(1.0, 0.0);
    }
    u
}

/// Lifts operators on `targets` to `width` qubits (width at most 2).
pub fn lift(op: &CM, targets: &[usize], width: usize) -> CM {
    let id = CM::identity(2, 2);
    match (width, targets) {
        (1, [0]) => op.clone(),
        (2, [0]) => kron(op, &id),
        (2, [1]) => kron(&id, op),
        (2, [0, 1]) => op.clone(),
        (2, [1, 0]) => swap_unitary() * op * swap_unitary(),
        _ => panic!("unsupported lift {targets:?} on width {width}"),
    }
}

/// `T`, linear block and dimension of a real transfer matrix.
pub fn affine_parts(e: &RM) -> (DVector<f64>, RM) {
    let d = e.nrows();
    (
        e.view((1, 0), (d - 1, 1)).column(0).into_owned(),
        e.view((1, 1), (d - 1, d - 1)).into_owned(),
    )
}

pub fn embed_affine(t: &DVector<f64>, r: &RM) -> RM {
    let d = t.len() + 1;
    let mut e = RM::zeros(d, d);
    e[(0, 0)] = 1.0;
    e.view_mut((1, 0), (d - 1, 1)).copy_from(t);
    e.view_mut((1, 1), (d - 1, d - 1)).copy_from(r);
    e
}

/// `sum_{mu nu} m[mu][nu] |mu)(nu|` from a list of `(mu, nu, value)` terms.
pub fn terms(dim: usize, entries: &[(usize, usize, f64)]) -> RM {
    let mut m = RM::zeros(dim, dim);
    for &(mu, nu, v) in entries {
        m[(mu, nu)] += v;
    }
    m
}
