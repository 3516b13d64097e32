//! Circuits over ququats: gate embedding, builtin gate names, loading from
//! JSON and seeded sequential execution.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{apply_gate, unitary_to_gate, TransferGate};
use crate::error::{Error, Result};
use crate::gate_algebra::{rotation_gate_1, rotation_gate_2};
use crate::io::{self, CircuitJson, GateRef, InitialJson, StepJson};
use crate::linalg::{CMatrix, RMatrix, C64, I, ONE, ZERO};
use crate::measurement::{apply_nonlinear, measure_with_branch_gates, NonlinearGate, ProjectorSet};
use crate::mv_logic::{
    classical_to_quantum, minmax_gate, sheffer_webb_gate, ClassicalGate, LogicExpr,
};
use crate::pauli::{computational_state, MultiIndex, PauliState, QubitCount};
use crate::pseudo_gate::swap_gate;

pub const MAX_WIDTH: usize = 3;

#[derive(Clone, Debug)]
pub enum StepKind {
    Linear(TransferGate),
    Nonlinear(TransferGate),
    Classical { name: String, gate: TransferGate },
    Measurement(ProjectorSet),
}

impl StepKind {
    fn arity(&self) -> usize {
        match self {
            StepKind::Linear(g) | StepKind::Nonlinear(g) | StepKind::Classical { gate: g, .. } => {
                g.qubits().get()
            }
            StepKind::Measurement(ps) => ps.qubits().get(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CircuitStep {
    pub kind: StepKind,
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    width: QubitCount,
    initial: PauliState,
    steps: Vec<CircuitStep>,
}

fn check_targets(targets: &[usize], width: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= width {
            return Err(Error::InvalidTargets(format!(
                "target {t} outside width {width}"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidTargets(format!("target {t} repeated")));
        }
    }
    Ok(())
}

/// Extends `g` on `targets.len()` ququats to `width` ququats, acting as the
/// identity elsewhere. `targets[i]` receives the i-th factor of `g`.
pub fn embed(g: &TransferGate, targets: &[usize], width: usize) -> Result<TransferGate> {
    let w = QubitCount::with_max(width, MAX_WIDTH)?;
    let k = g.qubits().get();
    if targets.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            found: targets.len(),
        });
    }
    check_targets(targets, width)?;
    let shift = |q: usize| 2 * (width - 1 - q);
    let target_mask = targets.iter().fold(0usize, |m, &t| m | (3 << shift(t)));
    let local = |mu: usize| {
        targets
            .iter()
            .fold(0, |acc, &t| acc * 4 + ((mu >> shift(t)) & 3))
    };
    let dim = w.operator_dim();
    let src = g.matrix();
    let m = RMatrix::from_fn(dim, dim, |mu, nu| {
        if mu & !target_mask == nu & !target_mask {
            src[(local(mu), local(nu))]
        } else {
            0.0
        }
    });
    TransferGate::new(m, g.class())
}

fn parse_angle(name: &str, prefix: &str) -> Option<Result<f64>> {
    let arg = name
        .strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    Some(match arg.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse(format!("bad angle in {name:?}"))),
    })
}

fn hadamard() -> CMatrix {
    let h = C64::new((0.5f64).sqrt(), 0.0);
    CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

fn cnot() -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        u[(i, j)] = ONE;
    }
    u
}

fn quantum_builtin(name: &str) -> Option<Result<TransferGate>> {
    let u = match name {
        "I" => CMatrix::identity(2, 2),
        "X" => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        "Y" => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        "Z" => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        "H" => hadamard(),
        "CNOT" => cnot(),
        "SWAP" | "swap" => return Some(Ok(swap_gate())),
        "minmax" => return Some(Ok(minmax_gate())),
        "sheffer_webb" => return Some(Ok(sheffer_webb_gate())),
        _ => {
            if let Some(a) = parse_angle(name, "rot1") {
                return Some(a.map(rotation_gate_1));
            }
            return parse_angle(name, "rot2").map(|a| a.map(rotation_gate_2));
        }
    };
    Some(unitary_to_gate(&u))
}

/// Single-argument classical gate for a name or a one-variable expression.
fn classical_builtin(name: &str) -> Result<ClassicalGate> {
    let g = match ClassicalGate::by_name(name) {
        Some(g) => g,
        None => LogicExpr::parse(name)?.to_gate(Some(1))?,
    };
    if g.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: g.arity(),
        });
    }
    Ok(g)
}

/// Resolves a builtin gate name: `I`, `X`, `Y`, `Z`, `H`, `CNOT`, `SWAP`,
/// `rot1(a)`, `rot2(t)`, `minmax`, `sheffer_webb`, or a single-argument
/// classical gate (`neg`, `~x`, `box`, `I2`, `shift(x) | 1`, ...).
pub fn builtin_step(name: &str) -> Result<StepKind> {
    if let Some(g) = quantum_builtin(name) {
        return g.map(StepKind::Linear);
    }
    let g = classical_builtin(name).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("unknown gate {name:?} ({msg})")),
        other => other,
    })?;
    Ok(StepKind::Classical {
        name: name.to_string(),
        gate: classical_to_quantum(&g)?,
    })
}

pub fn builtin_gate(name: &str) -> Result<TransferGate> {
    Ok(match builtin_step(name)? {
        StepKind::Linear(g) | StepKind::Nonlinear(g) | StepKind::Classical { gate: g, .. } => g,
        StepKind::Measurement(_) => unreachable!("builtins are gates"),
    })
}

impl Circuit {
    pub fn new(width: usize, initial: PauliState, steps: Vec<CircuitStep>) -> Result<Self> {
        let width = QubitCount::with_max(width, MAX_WIDTH)?;
        if initial.qubits() != width {
            return Err(Error::DimensionMismatch {
                expected: width.operator_dim(),
                found: initial.qubits().operator_dim(),
            });
        }
        for (i, step) in steps.iter().enumerate() {
            check_targets(&step.targets, width.get()).map_err(|e| e.at_step(i))?;
            if step.kind.arity() != step.targets.len() {
                let e = Error::ArityMismatch {
                    expected: step.kind.arity(),
                    found: step.targets.len(),
                };
                return Err(e.at_step(i));
            }
            if let StepKind::Linear(g) = &step.kind {
                if !g.is_trace_preserving() {
                    let deviation =
                        (g.matrix().row(0) - RMatrix::identity(g.dim(), g.dim()).row(0)).amax();
                    return Err(Error::NotTracePreserving { deviation }.at_step(i));
                }
            }
        }
        Ok(Circuit {
            width,
            initial,
            steps,
        })
    }

    /// Resolves a parsed circuit file; relative paths are taken from `base`.
    pub fn from_json(c: &CircuitJson, base: &Path) -> Result<Self> {
        let width = QubitCount::with_max(c.width, MAX_WIDTH)?;
        let initial = match &c.initial {
            InitialJson::Computational { computational } => {
                computational_state(MultiIndex::from_digits(computational, width)?)
            }
            InitialJson::File(f) => io::parse_state(&io::read_file(&base.join(&f.file))?)?,
        };
        let gate = |r: &GateRef| -> Result<StepKind> {
            match r {
                GateRef::Name(n) => builtin_step(n),
                GateRef::File(f) => Ok(StepKind::Linear(io::parse_gate(&io::read_file(
                    &base.join(&f.file),
                )?)?)),
            }
        };
        let steps = c
            .steps
            .iter()
            .map(|s| {
                let step = match s {
                    StepJson::Gate { gate: r, targets } => CircuitStep {
                        kind: gate(r)?,
                        targets: targets.clone(),
                    },
                    StepJson::Nonlinear { nonlinear, targets } => {
                        let g = match gate(nonlinear)? {
                            StepKind::Linear(g)
                            | StepKind::Nonlinear(g)
                            | StepKind::Classical { gate: g, .. } => g,
                            StepKind::Measurement(_) => {
                                unreachable!("gate references resolve to gates")
                            }
                        };
                        CircuitStep {
                            kind: StepKind::Nonlinear(g),
                            targets: targets.clone(),
                        }
                    }
                    StepJson::Measure { measure, targets } => CircuitStep {
                        kind: StepKind::Measurement(io::parse_projectors(&io::read_file(
                            &base.join(&measure.file),
                        )?)?),
                        targets: targets.clone(),
                    },
                };
                Ok(step)
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(width.get(), initial, steps)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = io::parse_circuit_json(&io::read_file(path)?)?;
        Circuit::from_json(&json, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn width(&self) -> QubitCount {
        self.width
    }

    pub fn initial(&self) -> &PauliState {
        &self.initial
    }

    pub fn steps(&self) -> &[CircuitStep] {
        &self.steps
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub step: usize,
    pub branch: usize,
    pub probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub final_state: PauliState,
    pub transcript: Vec<TranscriptEntry>,
}

fn run_step(
    step: &CircuitStep,
    width: usize,
    s: &PauliState,
    rng: &mut ChaCha8Rng,
) -> Result<(PauliState, Option<(usize, Vec<f64>)>)> {
    match &step.kind {
        StepKind::Linear(g) | StepKind::Classical { gate: g, .. } => {
            let out = apply_gate(&embed(g, &step.targets, width)?, s)?;
            Ok((out.into_state()?, None))
        }
        StepKind::Nonlinear(g) => {
            let full = NonlinearGate::new(embed(g, &step.targets, width)?);
            Ok((apply_nonlinear(&full, s)?, None))
        }
        StepKind::Measurement(ps) => {
            if !ps.is_complete() {
                return Err(Error::IncompleteProjectorSet {
                    deviation: ps.completeness_deviation(),
                });
            }
            let gates = ps
                .branch_gates()?
                .iter()
                .map(|g| embed(g, &step.targets, width))
                .collect::<Result<Vec<_>>>()?;
            let m = measure_with_branch_gates(&gates, s, rng)?;
            Ok((m.post_state, Some((m.branch, m.probabilities))))
        }
    }
}

/// Applies the steps in order. Measurements draw from one ChaCha8 stream
/// seeded by `seed`; errors carry the failing step index.
pub fn run(c: &Circuit, seed: u64) -> Result<RunOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = c.initial.clone();
    let mut transcript = Vec::new();
    for (i, step) in c.steps.iter().enumerate() {
        let (next, outcome) =
            run_step(step, c.width.get(), &state, &mut rng).map_err(|e| e.at_step(i))?;
        state = next;
        if let Some((branch, probabilities)) = outcome {
            transcript.push(TranscriptEntry {
                step: i,
                branch,
                probabilities,
            });
        }
    }
    Ok(RunOutput {
        final_state: state,
        transcript,
    })
}
