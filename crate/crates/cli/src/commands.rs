use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ptm_core::channel::{check_gate_cp, choi_of_gate, imaginary_residue, kraus_to_gate};
use ptm_core::circuit::{builtin_gate, embed, run, Circuit};
use ptm_core::gate_algebra::{decompose_svd, euler_factor, is_unital, AffineGate};
use ptm_core::io::{self, format_f64};
use ptm_core::linalg::{max_diff_real, CMatrix, RMatrix};
use ptm_core::measurement::measure_with_branch_gates;
use ptm_core::mv_logic::{
    check_laws, classical_to_quantum, dnf_synthesize, satisfies_classical_contract,
    verify_universal_sets, ClassicalGate, LogicExpr, SearchBudget, TargetOutcome,
};
use ptm_core::pauli::{density_to_pauli, pauli_to_density};
use ptm_core::pseudo_gate::{
    is_primitive, lie_closure, local_generators, ClosureOptions, Field, Primitivity,
};
use ptm_core::{random, tolerance, GateClass, Result, TransferGate};

use crate::{
    CheckArgs, ClassicalArgs, ClosureArgs, Command, ComposeArgs, ConvertArgs, DecomposeArgs,
    FieldArg, MeasureArgs, PrimitiveArgs, RunArgs,
};

pub struct Output {
    pub text: String,
    pub json: Value,
    /// False when a validation verdict failed.
    pub ok: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            ok: true,
        }
    }

    /// A data file, printed the same way in both modes.
    fn data(contents: String) -> Result<Self> {
        let json = serde_json::from_str(&contents)?;
        Ok(Output::new(contents, json))
    }
}

pub fn dispatch(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Convert(a) => convert(a),
        Command::Check(a) => check(a),
        Command::Run(a) => run_circuit(a),
        Command::Decompose(a) => decompose(a),
        Command::Closure(a) => closure(a),
        Command::Primitive(a) => primitive(a),
        Command::Measure(a) => measure(a),
        Command::Classical(a) => classical(a),
        Command::Compose(a) => compose(a),
    }
}

fn read(path: &Path) -> Result<String> {
    io::read_file(path)
}

/// `builtin:NAME` or a gate file.
fn load_gate(spec: &str) -> Result<TransferGate> {
    match spec.strip_prefix("builtin:") {
        Some(name) => builtin_gate(name),
        None => io::parse_gate(&read(Path::new(spec))?),
    }
}

fn numbers(v: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = v.into_iter().map(format_f64).collect();
    format!("[{}]", parts.join(", "))
}

fn matrix_text(m: &RMatrix) -> String {
    (0..m.nrows())
        .map(|i| format!("  {}\n", numbers(m.row(i).iter().copied())))
        .collect()
}

fn matrix_json(m: &RMatrix) -> Value {
    json!((0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect::<Vec<f64>>())
        .collect::<Vec<_>>())
}

fn emit_data(contents: String, out: Option<&Path>, kind: &str) -> Result<Output> {
    match out {
        None => Output::data(contents),
        Some(path) => {
            io::write_file(path, &contents)?;
            Ok(Output::new(
                format!("wrote {kind} to {}\n", path.display()),
                json!({ "written": path.display().to_string(), "kind": kind }),
            ))
        }
    }
}

fn convert(a: ConvertArgs) -> Result<Output> {
    let out = a.out.as_deref();
    if let Some(p) = &a.input.kraus {
        let g = kraus_to_gate(&io::parse_kraus(&read(p)?)?)?;
        emit_data(io::write_gate(&g), out, "gate")
    } else if let Some(p) = &a.input.density {
        let s = density_to_pauli(&io::parse_density(&read(p)?)?);
        emit_data(io::write_state(&s), out, "state")
    } else {
        let p = a.input.state.as_ref().expect("clap enforces one input");
        let rho = pauli_to_density(&io::parse_state(&read(p)?)?.as_coeff_vector())?;
        emit_data(io::write_density(&rho), out, "density")
    }
}

struct Verdict {
    name: &'static str,
    pass: bool,
    required: bool,
    value: f64,
}

fn verdicts_output(subject: &str, vs: Vec<Verdict>) -> Output {
    let mut text = format!("{subject}\n");
    for v in &vs {
        let tag = match (v.pass, v.required) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "no",
        };
        let info = if v.required { "" } else { " (informational)" };
        let _ = writeln!(
            text,
            "  {:<14} {tag:<4} {}{info}",
            v.name,
            format_f64(v.value)
        );
    }
    let ok = vs.iter().all(|v| v.pass || !v.required);
    let json = json!({
        "subject": subject,
        "ok": ok,
        "verdicts": vs.iter().map(|v| json!({
            "name": v.name, "pass": v.pass, "required": v.required, "value": v.value,
        })).collect::<Vec<_>>(),
    });
    Output { text, json, ok }
}

fn gate_verdicts(g: &TransferGate) -> Vec<Verdict> {
    let m = g.matrix();
    let dim = g.dim();
    let row0 = (0..dim)
        .map(|j| (m[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let orth = max_diff_real(&(m.transpose() * m), &RMatrix::identity(dim, dim));
    let min_choi = choi_of_gate(g).min_eigenvalue();
    let tp = g.class() == GateClass::TracePreserving;
    vec![
        Verdict {
            name: "row-0",
            pass: row0 <= tolerance::ALGEBRAIC,
            required: tp,
            value: row0,
        },
        Verdict {
            name: "cp",
            pass: check_gate_cp(g).is_ok(),
            required: true,
            value: min_choi,
        },
        Verdict {
            name: "orthogonality",
            pass: orth <= tolerance::ALGEBRAIC,
            required: false,
            value: orth,
        },
        Verdict {
            name: "unital",
            pass: is_unital(g),
            required: false,
            value: (1..dim).map(|i| m[(i, 0)].abs()).fold(0.0, f64::max),
        },
    ]
}

fn check(a: CheckArgs) -> Result<Output> {
    if let Some(spec) = &a.gate {
        let g = load_gate(spec)?;
        let mut vs = vec![Verdict {
            name: "reality",
            pass: true,
            required: true,
            value: 0.0,
        }];
        vs.extend(gate_verdicts(&g));
        return Ok(verdicts_output(
            &format!("gate ({} qubit, {})", g.qubits(), g.class()),
            vs,
        ));
    }
    if let Some(p) = &a.kraus {
        let ch = io::parse_kraus(&read(p)?)?;
        let residue = imaginary_residue(&ch);
        let g = kraus_to_gate(&ch)?;
        let mut vs = vec![Verdict {
            name: "reality",
            pass: residue <= tolerance::IMAGINARY,
            required: true,
            value: residue,
        }];
        vs.extend(gate_verdicts(&g));
        return Ok(verdicts_output(
            &format!(
                "Kraus set ({} operators, {} qubit, {})",
                ch.ops().len(),
                ch.qubits(),
                g.class()
            ),
            vs,
        ));
    }
    if let Some(p) = &a.state {
        let s = io::parse_state(&read(p)?)?;
        return Ok(state_verdicts(&s));
    }
    if let Some(p) = &a.density {
        let s = density_to_pauli(&io::parse_density(&read(p)?)?);
        return Ok(state_verdicts(&s));
    }
    let p = a.projectors.as_ref().expect("clap enforces one input");
    let ps = io::parse_projectors(&read(p)?)?;
    let dev = ps.completeness_deviation();
    Ok(verdicts_output(
        &format!(
            "projector set ({} projectors, {} qubit)",
            ps.len(),
            ps.qubits()
        ),
        vec![
            Verdict {
                name: "projectors",
                pass: true,
                required: true,
                value: 0.0,
            },
            Verdict {
                name: "complete",
                pass: ps.is_complete(),
                required: true,
                value: dev,
            },
        ],
    ))
}

fn state_verdicts(s: &ptm_core::PauliState) -> Output {
    verdicts_output(
        &format!("state ({} qubit)", s.qubits()),
        vec![
            Verdict {
                name: "positive",
                pass: true,
                required: true,
                value: 0.0,
            },
            Verdict {
                name: "pure",
                pass: (s.purity() - 1.0).abs() <= tolerance::ALGEBRAIC,
                required: false,
                value: s.purity(),
            },
        ],
    )
}

fn run_circuit(a: RunArgs) -> Result<Output> {
    let c = Circuit::load(&a.circuit)?;
    let out = run(&c, a.seed)?;
    let mut text = String::new();
    for e in &out.transcript {
        let _ = writeln!(
            text,
            "step {}: branch {} p = {}",
            e.step,
            e.branch,
            numbers(e.probabilities.iter().copied())
        );
    }
    let _ = writeln!(
        text,
        "final: {}",
        numbers(out.final_state.coeffs().iter().copied())
    );
    let json = json!({
        "seed": a.seed,
        "transcript": out.transcript,
        "final_state": serde_json::from_str::<Value>(&io::write_state(&out.final_state))?,
    });
    Ok(Output::new(text, json))
}

fn decompose(a: DecomposeArgs) -> Result<Output> {
    let g = load_gate(&a.gate)?;
    let affine = AffineGate::from_gate(&g)?;
    let svd = decompose_svd(&affine);
    let residual = max_diff_real(svd.reconstruct().matrix(), g.matrix());
    let t: Vec<f64> = svd.translation.iter().copied().collect();
    let l: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut text = format!(
        "T = {}\nlambda = {}\nU1 =\n{}U2 =\n{}",
        numbers(t.clone()),
        numbers(l.clone()),
        matrix_text(&svd.u1),
        matrix_text(&svd.u2)
    );
    let _ = writeln!(text, "reconstruction residual = {}", format_f64(residual));
    let mut json = json!({
        "translation": t,
        "singular_values": l,
        "u1": matrix_json(&svd.u1),
        "u2": matrix_json(&svd.u2),
        "residual": residual,
    });
    if g.qubits().get() == 1 {
        for (key, gate) in [
            ("euler", g.clone()),
            ("euler_u1", svd.left_gate()),
            ("euler_u2t", svd.right_gate()),
        ] {
            match euler_factor(&gate) {
                Ok(e) => {
                    let _ = writeln!(
                        text,
                        "{key}: alpha = {} theta = {} beta = {}",
                        format_f64(e.alpha),
                        format_f64(e.theta),
                        format_f64(e.beta)
                    );
                    json[key] = json!({ "alpha": e.alpha, "theta": e.theta, "beta": e.beta });
                }
                Err(err) => {
                    let _ = writeln!(text, "{key}: {err}");
                    json[key] = Value::Null;
                }
            }
        }
    }
    Ok(Output::new(text, json))
}

fn closure(a: ClosureArgs) -> Result<Output> {
    let mut gens: Vec<CMatrix> = Vec::new();
    if let Some(p) = &a.input.generators {
        gens.extend(io::parse_generators(&read(p)?)?);
    }
    if a.input.local {
        gens.extend(local_generators());
    }
    let dim = gens.first().map_or(0, |g| g.nrows());
    if let Some(seed) = a.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..a.random {
            gens.push(random::hermitian(dim, &mut rng));
        }
    }
    let opts = ClosureOptions {
        field: match a.field {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        },
        max_steps: a.max_steps,
        ..ClosureOptions::default()
    };
    let c = lie_closure(&gens, &opts)?;
    let cap = 2 * dim * dim;
    let text = format!(
        "generators: {}\nmatrix size: {dim}\nreal dimension: {} of {cap}\ntrajectory: {:?}\nsaturated: {}\n",
        gens.len(),
        c.dimension,
        c.trajectory,
        c.saturated
    );
    let json = json!({
        "generators": gens.len(),
        "matrix_size": dim,
        "dimension": c.dimension,
        "cap": cap,
        "trajectory": c.trajectory,
        "saturated": c.saturated,
    });
    Ok(Output::new(text, json))
}

fn primitive(a: PrimitiveArgs) -> Result<Output> {
    let g = load_gate(&a.gate)?;
    Ok(match is_primitive(&g, a.trials, a.seed)? {
        Primitivity::Primitive { trials } => Output::new(
            format!("primitive (9 axis probes, {trials} random products)\n"),
            json!({ "primitive": true, "trials": trials }),
        ),
        Primitivity::Imprimitive { witness, schmidt } => {
            let (x, y) = (
                witness.0.coeffs().iter().copied(),
                witness.1.coeffs().iter().copied(),
            );
            let text = format!(
                "imprimitive\n  witness a = {}\n  witness b = {}\n  schmidt residual = {}\n",
                numbers(x.clone()),
                numbers(y.clone()),
                format_f64(schmidt)
            );
            Output::new(
                text,
                json!({
                    "primitive": false,
                    "witness": [x.collect::<Vec<f64>>(), y.collect::<Vec<f64>>()],
                    "schmidt": schmidt,
                }),
            )
        }
    })
}

fn measure(a: MeasureArgs) -> Result<Output> {
    let s = io::parse_state(&read(&a.state)?)?;
    let ps = io::parse_projectors(&read(&a.projectors)?)?;
    let width = s.qubits().get();
    let targets = a
        .targets
        .unwrap_or_else(|| (0..ps.qubits().get()).collect());
    if !ps.is_complete() {
        return Err(ptm_core::Error::IncompleteProjectorSet {
            deviation: ps.completeness_deviation(),
        });
    }
    let gates = ps
        .branch_gates()?
        .iter()
        .map(|g| embed(g, &targets, width))
        .collect::<Result<Vec<_>>>()?;
    let m = measure_with_branch_gates(&gates, &s, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
    let text = format!(
        "branch {}\np = {}\npost = {}\n",
        m.branch,
        numbers(m.probabilities.iter().copied()),
        numbers(m.post_state.coeffs().iter().copied())
    );
    let json = json!({
        "seed": a.seed,
        "branch": m.branch,
        "probabilities": m.probabilities,
        "post_state": serde_json::from_str::<Value>(&io::write_state(&m.post_state))?,
    });
    Ok(Output::new(text, json))
}

fn outcome_json(o: TargetOutcome) -> Value {
    match o {
        TargetOutcome::Reached { depth } => json!({ "reached": true, "depth": depth }),
        TargetOutcome::BudgetExhausted { saturated } => {
            json!({ "reached": false, "saturated": saturated })
        }
    }
}

fn classical(a: ClassicalArgs) -> Result<Output> {
    if a.input.laws {
        let report = check_laws();
        let mut text = String::new();
        for c in &report.checks {
            let _ = writeln!(
                text,
                "{:<26} expected {:<5} holds {:<5} tuples {:>3}{}",
                c.name,
                c.expected,
                c.holds,
                c.tuples,
                c.counterexample
                    .as_ref()
                    .map(|x| format!(" counterexample {x:?}"))
                    .unwrap_or_default()
            );
        }
        let json = json!({
            "all_agree": report.all_agree(),
            "laws": report.checks.iter().map(|c| json!({
                "name": c.name, "expected": c.expected, "holds": c.holds,
                "tuples": c.tuples, "counterexample": c.counterexample,
            })).collect::<Vec<_>>(),
        });
        return Ok(Output {
            text,
            json,
            ok: report.all_agree(),
        });
    }
    if a.input.universal {
        let budget = SearchBudget {
            max_depth: a.max_depth,
            max_functions: a.max_functions,
            ..SearchBudget::default()
        };
        let report = verify_universal_sets(budget);
        let mut text = String::new();
        let mut sets = Vec::new();
        let mut ok = true;
        for s in &report.sets {
            ok &= s.all_reached() == s.expected_universal;
            let _ = writeln!(
                text,
                "{:<24} expected {:<5} unary {:>3}/256 binary {}/{} depth {}",
                s.name,
                s.expected_universal,
                s.unary_reached(),
                s.binary.iter().filter(|(_, o)| o.is_reached()).count(),
                s.binary.len(),
                s.depth_used
            );
            sets.push(json!({
                "name": s.name,
                "expected_universal": s.expected_universal,
                "unary_reached": s.unary_reached(),
                "binary": s.binary.iter().map(|(n, o)| json!({ "target": n, "outcome": outcome_json(*o) })).collect::<Vec<_>>(),
                "unary_functions_generated": s.unary_functions_generated,
                "binary_functions_generated": s.binary_functions_generated,
                "depth_used": s.depth_used,
            }));
        }
        return Ok(Output {
            text,
            json: json!({ "consistent": ok, "sets": sets }),
            ok,
        });
    }
    let g = if let Some(e) = &a.input.expr {
        LogicExpr::parse(e)?.to_gate(None)?
    } else if let Some(n) = &a.input.name {
        ClassicalGate::by_name(n)
            .ok_or_else(|| ptm_core::Error::Parse(format!("unknown classical gate {n:?}")))?
    } else {
        let p = a.input.table.as_ref().expect("clap enforces one input");
        io::parse_truth_table(&read(p)?)?
    };
    let mut text = String::new();
    for (row, v) in g.table().iter().enumerate() {
        let args: Vec<String> = (0..g.arity())
            .map(|i| ((row >> (2 * (g.arity() - 1 - i))) & 3).to_string())
            .collect();
        let _ = writeln!(text, "{} -> {v}", args.join(" "));
    }
    let mut json = json!({ "arity": g.arity(), "table": g.table() });
    let mut ok = true;
    if a.dnf {
        let e = dnf_synthesize(&g);
        let _ = writeln!(text, "dnf: {e}");
        json["dnf"] = json!(e.to_string());
    }
    if a.quantum {
        let q = classical_to_quantum(&g)?;
        let map: Vec<usize> = g.table().iter().map(|&v| v as usize).collect();
        let contract = satisfies_classical_contract(q.matrix(), &map);
        ok &= contract;
        let _ = write!(
            text,
            "transfer gate (contract {}):\n{}",
            if contract { "holds" } else { "FAILS" },
            matrix_text(q.matrix())
        );
        json["gate"] = matrix_json(q.matrix());
        json["contract"] = json!(contract);
    }
    Ok(Output { text, json, ok })
}

fn compose(a: ComposeArgs) -> Result<Output> {
    let mut gates = a.gates.iter().map(|s| load_gate(s));
    let first = gates.next().expect("clap requires one gate")?;
    let total = gates.try_fold(first, |acc, g| g?.compose(&acc))?;
    emit_data(io::write_gate(&total), a.out.as_deref(), "gate")
}
