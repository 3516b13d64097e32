//! JSON file formats.
//!
//! Readers validate shape and domain invariants and never panic on malformed
//! input. Writers print every float with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{GateClass, KrausSet, TransferGate};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix, RVector, C64};
use crate::measurement::ProjectorSet;
use crate::mv_logic::ClassicalGate;
use crate::pauli::{DensityMatrix, PauliState, QubitCount};

/// Largest matrix side accepted from a file.
const MAX_SIDE: usize = 256;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub n: usize,
    pub ops: Vec<ComplexMatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    pub n: usize,
    pub matrix: Vec<Vec<f64>>,
    pub class: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorsJson {
    pub n: usize,
    pub projectors: Vec<ComplexMatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthTableJson {
    pub arity: usize,
    pub table: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsJson {
    pub dim: usize,
    pub generators: Vec<ComplexMatrixJson>,
}

/// A file reference, `{"file": path}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRef {
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateRef {
    Name(String),
    File(FileRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialJson {
    Computational { computational: Vec<u8> },
    File(FileRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepJson {
    Gate {
        gate: GateRef,
        targets: Vec<usize>,
    },
    Nonlinear {
        nonlinear: GateRef,
        targets: Vec<usize>,
    },
    Measure {
        measure: FileRef,
        targets: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub width: usize,
    pub initial: InitialJson,
    #[serde(default)]
    pub steps: Vec<StepJson>,
}

fn qubits(n: usize) -> Result<QubitCount> {
    QubitCount::new(n)
}

fn real_matrix(rows: &[Vec<f64>], side: usize) -> Result<RMatrix> {
    if rows.len() != side {
        return Err(Error::DimensionMismatch {
            expected: side,
            found: rows.len(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != side) {
        return Err(Error::DimensionMismatch {
            expected: side,
            found: bad.len(),
        });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(RMatrix::from_fn(side, side, |i, j| rows[i][j]))
}

fn complex_matrix(m: &ComplexMatrixJson, side: usize) -> Result<CMatrix> {
    let re = real_matrix(&m.re, side)?;
    let im = real_matrix(&m.im, side)?;
    Ok(CMatrix::from_fn(side, side, |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    }))
}

fn complex_to_json(m: &CMatrix) -> ComplexMatrixJson {
    let rows = |f: fn(&C64) -> f64| {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
            .collect()
    };
    ComplexMatrixJson {
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    }
}

fn real_to_json(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_state(text: &str) -> Result<PauliState> {
    let s: StateJson = from_str(text)?;
    let n = qubits(s.n)?;
    if s.coeffs.len() != n.operator_dim() {
        return Err(Error::DimensionMismatch {
            expected: n.operator_dim(),
            found: s.coeffs.len(),
        });
    }
    if s.coeffs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    PauliState::new(RVector::from_vec(s.coeffs))
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let d: DensityJson = from_str(text)?;
    let n = qubits(d.n)?;
    let side = n.hilbert_dim();
    DensityMatrix::new(complex_matrix(
        &ComplexMatrixJson { re: d.re, im: d.im },
        side,
    )?)
}

pub fn parse_kraus(text: &str) -> Result<KrausSet> {
    let k: KrausJson = from_str(text)?;
    let n = qubits(k.n)?;
    if k.ops.len() > MAX_SIDE * MAX_SIDE {
        return Err(Error::Parse(format!(
            "too many Kraus operators ({})",
            k.ops.len()
        )));
    }
    let ops = k
        .ops
        .iter()
        .map(|m| complex_matrix(m, n.hilbert_dim()))
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}

pub fn parse_gate(text: &str) -> Result<TransferGate> {
    let g: GateJson = from_str(text)?;
    let n = qubits(g.n)?;
    let class = GateClass::from_tag(&g.class)?;
    TransferGate::new(real_matrix(&g.matrix, n.operator_dim())?, class)
}

pub fn parse_projectors(text: &str) -> Result<ProjectorSet> {
    let p: ProjectorsJson = from_str(text)?;
    let n = qubits(p.n)?;
    if p.projectors.len() > n.hilbert_dim() {
        return Err(Error::InvalidProjectorSet(format!(
            "{} projectors cannot be pairwise orthogonal in dimension {}",
            p.projectors.len(),
            n.hilbert_dim()
        )));
    }
    let ops = p
        .projectors
        .iter()
        .map(|m| complex_matrix(m, n.hilbert_dim()))
        .collect::<Result<Vec<_>>>()?;
    ProjectorSet::new(ops)
}

pub fn parse_truth_table(text: &str) -> Result<ClassicalGate> {
    let t: TruthTableJson = from_str(text)?;
    if t.arity == 0 || t.arity > crate::mv_logic::MAX_ARITY {
        return Err(Error::ArityMismatch {
            expected: crate::mv_logic::MAX_ARITY,
            found: t.arity,
        });
    }
    let table = t
        .table
        .iter()
        .map(|&v| {
            if (0..4).contains(&v) {
                Ok(v as u8)
            } else {
                Err(Error::ValueOutOfRange(v))
            }
        })
        .collect::<Result<Vec<u8>>>()?;
    ClassicalGate::new(t.arity, table)
}

pub fn parse_generators(text: &str) -> Result<Vec<CMatrix>> {
    let g: GeneratorsJson = from_str(text)?;
    if g.dim == 0 || g.dim > MAX_SIDE {
        return Err(Error::DimensionMismatch {
            expected: MAX_SIDE,
            found: g.dim,
        });
    }
    g.generators
        .iter()
        .map(|m| complex_matrix(m, g.dim))
        .collect()
}

pub fn parse_circuit_json(text: &str) -> Result<CircuitJson> {
    from_str(text)
}

/// Formats `x` with 17 significant digits in a JSON-compatible form.
/// Negative zero prints as zero.
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", if x == 0.0 { 0.0 } else { x })
}

/// Prints a JSON value, with floats via [`format_f64`]. Arrays of scalars
/// stay on one line; other containers get one element per line.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn render<T: Serialize>(value: &T) -> String {
    to_json_string(&serde_json::to_value(value).expect("plain data serializes"))
}

pub fn write_state(s: &PauliState) -> String {
    render(&StateJson {
        n: s.qubits().get(),
        coeffs: s.coeffs().iter().copied().collect(),
    })
}

pub fn write_density(rho: &DensityMatrix) -> String {
    let m = complex_to_json(rho.data());
    render(&DensityJson {
        n: rho.qubits().get(),
        re: m.re,
        im: m.im,
    })
}

pub fn write_kraus(ch: &KrausSet) -> String {
    render(&KrausJson {
        n: ch.qubits().get(),
        ops: ch.ops().iter().map(complex_to_json).collect(),
    })
}

pub fn write_gate(g: &TransferGate) -> String {
    render(&GateJson {
        n: g.qubits().get(),
        matrix: real_to_json(g.matrix()),
        class: g.class().tag().to_string(),
    })
}

pub fn write_projectors(ps: &ProjectorSet) -> String {
    render(&ProjectorsJson {
        n: ps.qubits().get(),
        projectors: ps.projectors().iter().map(complex_to_json).collect(),
    })
}

pub fn write_truth_table(g: &ClassicalGate) -> String {
    render(&TruthTableJson {
        arity: g.arity(),
        table: g.table().iter().map(|&v| v as i64).collect(),
    })
}

pub fn write_generators(gens: &[CMatrix]) -> String {
    render(&GeneratorsJson {
        dim: gens.first().map_or(0, |g| g.nrows()),
        generators: gens.iter().map(complex_to_json).collect(),
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
