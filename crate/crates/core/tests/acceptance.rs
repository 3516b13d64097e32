//! Acceptance suite: one PASS/FAIL line per criterion, with detail lines for
//! sub-checks. Exits non-zero on a FAIL only when ACCEPTANCE_STRICT is set.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use common::*;
use nalgebra::DVector;
use ptm_core::channel::{imaginary_residue, kraus_to_gate, unitary_to_gate, KrausSet};
use ptm_core::circuit::{run, Circuit, CircuitStep, StepKind};
use ptm_core::gate_algebra::{compose, decompose_svd, is_unital, AffineGate};
use ptm_core::linalg::{CMatrix, RMatrix, RVector};
use ptm_core::measurement::{branch_probability, measure, ProjectorSet};
use ptm_core::mv_logic::{
    check_laws, classical_to_quantum, minmax_gate, minmax_map, satisfies_classical_contract,
    sheffer_webb_gate, sheffer_webb_map, ClassicalGate,
};
use ptm_core::pauli::{computational_state, MultiIndex};
use ptm_core::pseudo_gate::{
    combination_limit, commutator, commutator_limit, gate_from_lr, hermitian_basis, lie_closure,
    local_generators, weyl_generator, ClosureOptions,
};
use ptm_core::{PauliState, QubitCount, TransferGate};
use rand::Rng;

type Details = Vec<String>;

fn q(n: usize) -> QubitCount {
    QubitCount::new(n).unwrap()
}

fn diff(a: &RMatrix, b: &RMatrix) -> f64 {
    max_abs_real(&(a - b))
}

fn state_from_density(rho: &CM, n: usize) -> PauliState {
    PauliState::new(coefficients(rho, n)).unwrap()
}

/// 1. NOT gate.
fn not_gate(d: &mut Details) -> bool {
    let expected = RMatrix::from_diagonal(&RVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
    let g = unitary_to_gate(&sigma(1)).unwrap();
    let err = diff(g.matrix(), &expected);
    let integral = g.matrix().iter().all(|x| (x - x.round()).abs() <= 1e-12);
    let oracle = diff(&transfer(&[sigma(1)], 1), &expected);
    d.push(format!(
        "max deviation {err:.1e}, integer entries {integral}, oracle deviation {oracle:.1e}"
    ));
    err <= 1e-12 && integral && oracle <= 1e-12
}

/// 2. Hadamard gate.
fn hadamard(d: &mut Details) -> bool {
    let h = (sigma(1) + sigma(3)).scale(0.5f64.sqrt());
    let g = unitary_to_gate(&h).unwrap();
    let reference = terms(4, &[(0, 0, 1.0), (2, 2, -1.0), (3, 1, 1.0), (1, 3, 1.0)]);
    let err = diff(g.matrix(), &reference);
    let nonzero = g.matrix().iter().filter(|x| x.abs() > 1e-12).count();
    let orth = diff(
        &(g.matrix().transpose() * g.matrix()),
        &RMatrix::identity(4, 4),
    );
    d.push(format!(
        "deviation {err:.1e}, nonzero entries {nonzero}, orthogonality {orth:.1e}"
    ));
    err <= 1e-12 && nonzero == 4 && orth <= 1e-10
}

/// 3. Random trace-preserving Kraus sets.
fn random_kraus_sets(d: &mut Details) -> bool {
    let mut r = rng(3);
    let (mut imag, mut row0, mut lr, mut lib) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..50 {
        let n = 1 + i % 2;
        let m = 1 + i % 4;
        let ops = random_kraus(n, m, &mut r);
        let oracle = transfer_complex(&ops, n);
        let ch = KrausSet::new(ops).unwrap();
        let g = kraus_to_gate(&ch).unwrap();
        imag = imag
            .max(imaginary_residue(&ch))
            .max(oracle.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
        let dim = g.dim();
        row0 = row0.max(
            (0..dim)
                .map(|j| (g.matrix()[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max),
        );
        let oracle_re = oracle.map(|z| z.re);
        lr = lr.max(diff(gate_from_lr(&ch).unwrap().matrix(), &oracle_re));
        lib = lib.max(diff(g.matrix(), &oracle_re));
    }
    d.push(format!(
        "imaginary residue {imag:.1e}, row-0 deviation {row0:.1e}"
    ));
    d.push(format!(
        "L/R factorization vs trace formula {lr:.1e}, direct vs trace formula {lib:.1e}"
    ));
    imag <= 1e-10 && row0 <= 1e-10 && lr <= 1e-10 && lib <= 1e-10
}

fn random_affine(n: usize, r: &mut impl rand::Rng) -> AffineGate {
    let d = 4usize.pow(n as u32) - 1;
    let t = RVector::from_fn(d, |_, _| gaussian(r));
    let m = RMatrix::from_fn(d, d, |_, _| gaussian(r));
    AffineGate::new(t, m).unwrap()
}

/// 4. Affine SVD factorization.
fn svd_factorization(d: &mut Details) -> bool {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 2;
        let a = if i < 50 {
            let ops = random_kraus(n, 1 + i % 3, &mut r);
            AffineGate::from_gate(&kraus_to_gate(&KrausSet::new(ops).unwrap()).unwrap()).unwrap()
        } else {
            random_affine(n, &mut r)
        };
        let residual = diff(
            decompose_svd(&a).reconstruct().matrix(),
            a.to_gate().matrix(),
        );
        worst = worst.max(residual);
    }
    d.push(format!(
        "worst reconstruction residual over 100 gates {worst:.1e}"
    ));

    let gamma: f64 = 0.5;
    let mut a0 = CMatrix::identity(2, 2);
    a0[(1, 1)] = c((1.0 - gamma).sqrt(), 0.0);
    let mut a1 = CMatrix::zeros(2, 2);
    a1[(0, 1)] = c(gamma.sqrt(), 0.0);
    let ops = vec![a0, a1];
    let (t_oracle, r_oracle) = affine_parts(&transfer(&ops, 1));
    let mut sv_oracle: Vec<f64> = r_oracle.singular_values().iter().copied().collect();
    sv_oracle.sort_by(|x, y| y.total_cmp(x));
    // Frozen from the brute-force oracle above.
    let t_frozen = [0.0, 0.0, 0.5];
    let sv_frozen = [0.5f64.sqrt(), 0.5f64.sqrt(), 0.5];
    let oracle_ok = (0..3).all(|i| {
        (t_oracle[i] - t_frozen[i]).abs() <= 1e-12 && (sv_oracle[i] - sv_frozen[i]).abs() <= 1e-12
    });
    let svd = decompose_svd(
        &AffineGate::from_gate(&kraus_to_gate(&KrausSet::new(ops).unwrap()).unwrap()).unwrap(),
    );
    let t_err = (0..3)
        .map(|i| (svd.translation[i] - t_frozen[i]).abs())
        .fold(0.0, f64::max);
    let sv_err = (0..3)
        .map(|i| (svd.singular_values[i] - sv_frozen[i]).abs())
        .fold(0.0, f64::max);
    d.push(format!("amplitude damping: T error {t_err:.1e}, lambda error {sv_err:.1e}, oracle agrees with frozen values {oracle_ok}"));
    worst < 1e-9 && oracle_ok && t_err <= 1e-10 && sv_err <= 1e-10
}

/// 5. Composition law of the affine group.
fn composition_law(d: &mut Details) -> bool {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 2;
        let a = random_affine(n, &mut r);
        let b = random_affine(n, &mut r);
        let law = compose(&a, &b).unwrap().to_gate();
        let product =
            embed_affine(a.translation(), a.linear()) * embed_affine(b.translation(), b.linear());
        worst = worst.max(diff(law.matrix(), &product) / (1.0 + max_abs_real(&product)));
    }
    d.push(format!(
        "worst relative deviation over 100 pairs {worst:.1e}"
    ));
    worst <= 1e-10
}

/// 6. Measurement branches.
fn measurement(d: &mut Details) -> bool {
    let ps = ProjectorSet::computational_z();
    let gates = ps.branch_gates().unwrap();
    let reference = |s: f64| {
        terms(
            4,
            &[(0, 0, 0.5), (3, 3, 0.5), (0, 3, 0.5 * s), (3, 0, 0.5 * s)],
        )
    };
    let exact =
        diff(gates[0].matrix(), &reference(1.0)).max(diff(gates[1].matrix(), &reference(-1.0)));
    let mut r = rng(6);
    let (mut born, mut total) = (0.0f64, 0.0f64);
    let p_plus = {
        let mut p = CM::zeros(2, 2);
        p[(0, 0)] = c(1.0, 0.0);
        p
    };
    let p_minus = CM::identity(2, 2) - &p_plus;
    for _ in 0..200 {
        let rho = random_density(1, &mut r);
        let s = state_from_density(&rho, 1);
        let p0 = branch_probability(&ps, 0, &s).unwrap();
        let p1 = branch_probability(&ps, 1, &s).unwrap();
        born = born
            .max((p0 - trace(&(&p_plus * &rho)).re).abs())
            .max((p1 - trace(&(&p_minus * &rho)).re).abs());
        total = total.max((p0 + p1 - 1.0).abs());
    }
    let zero = computational_state(MultiIndex::new(0, q(1)).unwrap());
    let samples = 10_000;
    let mut rr = rng(66);
    let hits = (0..samples)
        .filter(|_| measure(&ps, &zero, &mut rr).unwrap().branch == 0)
        .count();
    let sigma = (samples as f64 * 0.25).sqrt();
    let z = (hits as f64 - samples as f64 / 2.0) / sigma;
    d.push(format!(
        "branch gates vs reference {exact:.1e}, Born rule {born:.1e}, completeness {total:.1e}"
    ));
    d.push(format!(
        "{hits} of {samples} samples in branch +, {z:+.2} sigma"
    ));
    exact <= 1e-15 && born <= 1e-10 && total <= 1e-10 && z.abs() <= 3.0
}

fn all_unary() -> impl Iterator<Item = ClassicalGate> {
    (0..256usize).map(|code| {
        ClassicalGate::new(1, (0..4).map(|i| ((code >> (2 * i)) & 3) as u8).collect()).unwrap()
    })
}

/// 7. Single-argument classical gates.
fn classical_unary(d: &mut Details) -> bool {
    let mut contract_ok = 0;
    let mut exact_ok = true;
    for g in all_unary() {
        let e = classical_to_quantum(&g).unwrap();
        let f: Vec<usize> = g.table().iter().map(|&v| v as usize).collect();
        if satisfies_classical_contract(e.matrix(), &f) {
            contract_ok += 1;
        }
        // Independent check on the coefficient vectors, exact comparison.
        for alpha in 0..4 {
            let input = computational_state(MultiIndex::new(alpha, q(1)).unwrap());
            let out = e.apply(&input.as_coeff_vector()).unwrap();
            let want = computational_state(MultiIndex::new(f[alpha], q(1)).unwrap());
            exact_ok &= out.coeffs() == want.coeffs();
        }
    }
    let contract = contract_ok == 256 && exact_ok;
    d.push(format!(
        "{} E|a] = |g(a)] for {contract_ok}/256 gates (exact coefficient equality {exact_ok})",
        if contract { "PASS" } else { "FAIL" }
    ));

    let sum_k = |row: usize, sign: f64| (1..4).map(move |k| (row, k, sign));
    let examples: Vec<(&str, ClassicalGate, RMatrix)> = vec![
        (
            "~x",
            ClassicalGate::negation(),
            terms(
                4,
                &[
                    (0, 0, 1.0),
                    (1, 2, 1.0),
                    (2, 1, 1.0),
                    (3, 0, 1.0),
                    (3, 3, -1.0),
                ],
            ),
        ),
        ("I0", ClassicalGate::indicator(0).unwrap(), {
            let mut t = vec![(0, 0, 1.0), (3, 0, 1.0)];
            t.extend(sum_k(3, -1.0));
            terms(4, &t)
        }),
        (
            "I1",
            ClassicalGate::indicator(1).unwrap(),
            terms(4, &[(0, 0, 1.0), (3, 1, 1.0)]),
        ),
        (
            "I2",
            ClassicalGate::indicator(2).unwrap(),
            terms(4, &[(0, 0, 1.0), (3, 2, 1.0)]),
        ),
        (
            "I3",
            ClassicalGate::indicator(3).unwrap(),
            terms(4, &[(0, 0, 1.0), (3, 3, 1.0)]),
        ),
        ("overline", ClassicalGate::shift(), {
            let mut t = vec![(0, 0, 1.0), (1, 0, 1.0), (2, 1, 1.0), (3, 2, 1.0)];
            t.extend(sum_k(1, -1.0));
            terms(4, &t)
        }),
        (
            "0",
            ClassicalGate::constant(0).unwrap(),
            terms(4, &[(0, 0, 1.0)]),
        ),
        (
            "1",
            ClassicalGate::constant(1).unwrap(),
            terms(4, &[(0, 0, 1.0), (1, 0, 1.0)]),
        ),
        (
            "2",
            ClassicalGate::constant(2).unwrap(),
            terms(4, &[(0, 0, 1.0), (2, 0, 1.0)]),
        ),
        (
            "3",
            ClassicalGate::constant(3).unwrap(),
            terms(4, &[(0, 0, 1.0), (3, 0, 1.0)]),
        ),
        ("diamond", ClassicalGate::diamond(), {
            let mut t = vec![(0, 0, 1.0)];
            t.extend(sum_k(3, 1.0));
            terms(4, &t)
        }),
        (
            "box",
            ClassicalGate::box_gate(),
            terms(4, &[(0, 0, 1.0), (3, 3, 1.0)]),
        ),
    ];
    let mut reference_ok = true;
    for (name, g, reference) in examples {
        let e = classical_to_quantum(&g).unwrap();
        let mismatches: Vec<String> = (0..4)
            .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
            .filter(|&(mu, nu)| e.matrix()[(mu, nu)] != reference[(mu, nu)])
            .map(|(mu, nu)| {
                format!(
                    "({mu},{nu}) reference {} realized {}",
                    reference[(mu, nu)],
                    e.matrix()[(mu, nu)]
                )
            })
            .collect();
        let f: Vec<usize> = g.table().iter().map(|&v| v as usize).collect();
        let reference_contract = satisfies_classical_contract(&reference, &f);
        if mismatches.is_empty() {
            d.push(format!("PASS reference {name} matches entry for entry"));
        } else {
            reference_ok = false;
            d.push(format!(
                "FAIL reference {name} differs at {}; reference matrix satisfies E|a] = |g(a)]: {reference_contract}",
                mismatches.join(", ")
            ));
        }
    }
    contract && reference_ok
}

/// 8. Two-ququat classical gates.
fn classical_binary(d: &mut Details) -> bool {
    let mut ok = true;
    for (name, gate, map) in [
        ("min/max", minmax_gate(), minmax_map()),
        ("Sheffer-Webb", sheffer_webb_gate(), sheffer_webb_map()),
    ] {
        let exact = (0..16).all(|mu| {
            let input = computational_state(MultiIndex::new(mu, q(2)).unwrap());
            let out = gate.apply(&input.as_coeff_vector()).unwrap();
            out.coeffs() == computational_state(MultiIndex::new(map[mu], q(2)).unwrap()).coeffs()
        });
        d.push(format!(
            "{name}: defining action exact on 16 inputs {exact}, unital {}",
            is_unital(&gate)
        ));
        ok &= exact;
    }
    ok && is_unital(&minmax_gate()) && !is_unital(&sheffer_webb_gate())
}

/// 9. Logic laws.
fn laws(d: &mut Details) -> bool {
    let report = check_laws();
    let mut ok = report.checks.iter().filter(|c| c.expected).count() >= 1;
    for c in &report.checks {
        let good = c.tuples <= 64
            && if c.expected {
                c.holds
            } else {
                !c.holds && c.counterexample.is_some()
            };
        ok &= good;
        if !c.expected {
            d.push(format!(
                "{}: fails as stated, counterexample {:?}",
                c.name, c.counterexample
            ));
        }
    }
    let positives = report
        .checks
        .iter()
        .filter(|c| c.expected && c.holds)
        .count();
    d.push(format!("{positives} positive laws hold exhaustively"));
    ok
}

fn matrix_unit(mu: usize, nu: usize, dim: usize) -> CM {
    let mut m = CM::zeros(dim, dim);
    m[(mu, nu)] = c(1.0, 0.0);
    m
}

/// 10. Lie machinery.
fn lie_machinery(d: &mut Details) -> bool {
    let mut weyl = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let lhs = commutator(
                        &weyl_generator(mu, nu, 4).unwrap().matrix,
                        &weyl_generator(a, b, 4).unwrap().matrix,
                    )
                    .unwrap();
                    let mut rhs = CM::zeros(4, 4);
                    if nu == a {
                        rhs += matrix_unit(mu, b, 4);
                    }
                    if b == mu {
                        rhs -= matrix_unit(a, nu, 4);
                    }
                    weyl = weyl.max(max_abs(&(lhs - rhs)));
                }
            }
        }
    }
    let basis = hermitian_basis(16);
    let flat: Vec<CM> = basis.iter().map(|g| g.matrix.clone()).collect();
    let gram = CM::from_fn(flat.len(), flat.len(), |i, j| {
        flat[i]
            .iter()
            .zip(flat[j].iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    });
    let eig = gram.symmetric_eigenvalues();
    let top = eig.iter().copied().fold(0.0, f64::max);
    let rank = eig.iter().filter(|&&l| l > 1e-9 * top).count();

    let mut r = rng(10);
    let ladder = [8usize, 64, 512];
    let mut decreasing = true;
    for _ in 0..10 {
        let a = random_hermitian(4, &mut r).scale(0.5);
        let b = random_hermitian(4, &mut r).scale(0.5);
        let t = 0.3;
        let target = commutator(&a, &b).unwrap().scale(t).exp();
        let errs: Vec<f64> = ladder
            .iter()
            .map(|&s| max_abs(&(commutator_limit(&a, &b, t, s).unwrap() - &target)))
            .collect();
        let (ca, cb) = (c(gaussian(&mut r), 0.0), c(gaussian(&mut r), 0.0));
        let sum = (a.map(|z| z * ca) + b.map(|z| z * cb))
            .map(|z| z * c(0.0, 1.0))
            .exp();
        let errs2: Vec<f64> = ladder
            .iter()
            .map(|&s| max_abs(&(combination_limit(&a, &b, ca, cb, s).unwrap() - &sum)))
            .collect();
        decreasing &= errs.windows(2).all(|w| w[1] < w[0]) && errs2.windows(2).all(|w| w[1] < w[0]);
    }
    d.push(format!(
        "Weyl commutator identity over 256 tuples {weyl:.1e}, Hermitian basis Gram rank {rank}"
    ));
    d.push(format!(
        "limit errors strictly decrease on steps {ladder:?} for 10 pairs: {decreasing}"
    ));
    weyl <= 1e-12 && basis.len() == 256 && rank == 256 && decreasing
}

/// 11. Universality at desk scale.
fn closure_dimension(d: &mut Details) -> bool {
    let local = local_generators();
    let opts = ClosureOptions::default();
    let alone = lie_closure(&local, &opts).unwrap();
    let mut gens = local.clone();
    gens.push(random_hermitian(16, &mut rng(11)));
    let full = lie_closure(&gens, &opts).unwrap();
    d.push(format!(
        "local generators: real dimension {} (trajectory {:?}); with one random generator: {} (trajectory {:?})",
        alone.dimension, alone.trajectory, full.dimension, full.trajectory
    ));
    full.dimension == 512 && alone.dimension < 512
}

/// 12. Random circuits against density-matrix evolution.
fn circuits(d: &mut Details) -> bool {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let width = 1 + i % 2;
        let mut rho = random_density(width, &mut r);
        let initial = state_from_density(&rho, width);
        let nsteps = 1 + (r.random::<u32>() % 6) as usize;
        let mut steps = Vec::new();
        for _ in 0..nsteps {
            let k = if width == 2 && r.random::<bool>() {
                2
            } else {
                1
            };
            let targets: Vec<usize> = match (width, k) {
                (1, _) => vec![0],
                (2, 1) => vec![r.random::<u32>() as usize % 2],
                _ => {
                    if r.random::<bool>() {
                        vec![0, 1]
                    } else {
                        vec![1, 0]
                    }
                }
            };
            let ops = if r.random::<bool>() {
                vec![random_unitary(k, &mut r)]
            } else {
                random_kraus(k, 2 + r.random::<u32>() as usize % 2, &mut r)
            };
            let lifted: Vec<CM> = ops.iter().map(|a| lift(a, &targets, width)).collect();
            rho = evolve(&lifted, &rho);
            let gate: TransferGate = kraus_to_gate(&KrausSet::new(ops).unwrap()).unwrap();
            steps.push(CircuitStep {
                kind: StepKind::Linear(gate),
                targets,
            });
        }
        let c = Circuit::new(width, initial, steps).unwrap();
        let out = run(&c, i as u64).unwrap();
        let want: DVector<f64> = coefficients(&rho, width);
        worst = worst.max((out.final_state.coeffs() - want).amax());
    }
    d.push(format!(
        "worst coefficient deviation over 20 circuits {worst:.1e}"
    ));
    worst <= 1e-9
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(&mut Details) -> bool); 12] = [
        ("NOT gate transfer matrix", not_gate),
        ("Hadamard transfer matrix", hadamard),
        (
            "random Kraus sets: reality, row 0, L/R factorization",
            random_kraus_sets,
        ),
        (
            "affine SVD factorization and amplitude damping",
            svd_factorization,
        ),
        ("affine composition law", composition_law),
        ("measurement branch gates and sampling", measurement),
        ("single-argument classical gates", classical_unary),
        ("min/max and Sheffer-Webb gates", classical_binary),
        ("logic laws", laws),
        ("Weyl identity, Hermitian basis, Lie limits", lie_machinery),
        (
            "Lie closure reaches the full superoperator algebra",
            closure_dimension,
        ),
        ("random circuits vs density-matrix evolution", circuits),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let mut details = Details::new();
        let pass = match catch_unwind(AssertUnwindSafe(|| check(&mut details))) {
            Ok(p) => p,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                details.push(format!("panicked: {msg}"));
                false
            }
        };
        if !pass {
            failed.push(i + 1);
        }
        println!(
            "criterion {:>2}: {}  {title}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
        for line in details {
            println!("      {line}");
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if failed.is_empty() {
        return ExitCode::SUCCESS;
    }
    println!("failing: {failed:?}");
    // Report-only by default so `cargo test --workspace` still reaches the
    // remaining targets; ACCEPTANCE_STRICT=1 turns any FAIL into an error exit.
    if std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v != "0") {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
