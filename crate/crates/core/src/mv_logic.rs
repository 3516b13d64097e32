//! Four-valued logic over `{0, 1, 2, 3}` and its realization as transfer
//! gates on generalized computational states.
//!
//! A classical map `f` on basis indices is realized by the unique linear map
//! with `E |mu] = |f(mu)]`. Since `|mu] = (|0) + |mu)) / sqrt(2^n)` for
//! `mu != 0` and `|0] = |0) / sqrt(2^n)`, its columns are
//! `E|0) = |0) + [f(0) != 0] |f(0))` and
//! `E|mu) = [f(mu) != 0] |f(mu)) - [f(0) != 0] |f(0))`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::channel::{GateClass, TransferGate};
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::pauli::QubitCount;

/// Largest arity accepted for truth tables (`4^6 = 4096` rows).
pub const MAX_ARITY: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalGate {
    arity: usize,
    table: Vec<u8>,
}

fn check_value(v: i64) -> Result<u8> {
    if (0..4).contains(&v) {
        Ok(v as u8)
    } else {
        Err(Error::ValueOutOfRange(v))
    }
}

/// Big-endian base-4 row index of an argument tuple.
fn row_of(args: &[u8]) -> usize {
    args.iter().fold(0, |acc, &a| 4 * acc + a as usize)
}

fn args_of(mut row: usize, arity: usize) -> Vec<u8> {
    let mut out = vec![0u8; arity];
    for slot in out.iter_mut().rev() {
        *slot = (row % 4) as u8;
        row /= 4;
    }
    out
}

impl ClassicalGate {
    pub fn new(arity: usize, table: Vec<u8>) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityMismatch {
                expected: MAX_ARITY,
                found: arity,
            });
        }
        let rows = 4usize.pow(arity as u32);
        if table.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: table.len(),
            });
        }
        for &v in &table {
            check_value(v as i64)?;
        }
        Ok(ClassicalGate { arity, table })
    }

    /// Tabulates `f` over all argument tuples.
    pub fn from_fn(arity: usize, f: impl Fn(&[u8]) -> u8) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityMismatch {
                expected: MAX_ARITY,
                found: arity,
            });
        }
        let rows = 4usize.pow(arity as u32);
        let table = (0..rows).map(|r| f(&args_of(r, arity))).collect();
        Self::new(arity, table)
    }

    fn unary(f: impl Fn(u8) -> u8) -> Self {
        Self::from_fn(1, |a| f(a[0])).expect("unary table")
    }

    fn binary(f: impl Fn(u8, u8) -> u8) -> Self {
        Self::from_fn(2, |a| f(a[0], a[1])).expect("binary table")
    }

    pub fn identity() -> Self {
        Self::unary(|x| x)
    }

    /// `~x = 3 - x`.
    pub fn negation() -> Self {
        Self::unary(|x| 3 - x)
    }

    /// `x + 1 mod 4`.
    pub fn shift() -> Self {
        Self::unary(|x| (x + 1) % 4)
    }

    /// 3 at `x = 3`, else 0.
    pub fn box_gate() -> Self {
        Self::unary(|x| if x == 3 { 3 } else { 0 })
    }

    /// 0 at `x = 0`, else 3.
    pub fn diamond() -> Self {
        Self::unary(|x| if x == 0 { 0 } else { 3 })
    }

    /// `I_k(x)`: 3 at `x = k`, else 0.
    pub fn indicator(k: u8) -> Result<Self> {
        let k = check_value(k as i64)?;
        Ok(Self::unary(move |x| if x == k { 3 } else { 0 }))
    }

    pub fn constant(k: u8) -> Result<Self> {
        let k = check_value(k as i64)?;
        Ok(Self::unary(move |_| k))
    }

    /// `min(x1, x2)`.
    pub fn and() -> Self {
        Self::binary(|a, b| a.min(b))
    }

    /// `max(x1, x2)`.
    pub fn or() -> Self {
        Self::binary(|a, b| a.max(b))
    }

    /// `V4(x1, x2) = max(x1, x2) + 1 mod 4`.
    pub fn v4() -> Self {
        Self::binary(|a, b| (a.max(b) + 1) % 4)
    }

    /// Gate for a builtin name: `neg`, `shift`, `box`, `dia`, `I0`..`I3`,
    /// `c0`..`c3`, `id`, `and`, `or`, `V4`, and their symbol spellings.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "id" | "x" => Self::identity(),
            "neg" | "~" | "∼" | "~x" | "∼x" => Self::negation(),
            "shift" | "overline" => Self::shift(),
            "box" | "□" => Self::box_gate(),
            "dia" | "diamond" | "◇" | "♢" => Self::diamond(),
            "I0" => Self::indicator(0).ok()?,
            "I1" => Self::indicator(1).ok()?,
            "I2" => Self::indicator(2).ok()?,
            "I3" => Self::indicator(3).ok()?,
            "c0" | "0" => Self::constant(0).ok()?,
            "c1" | "1" => Self::constant(1).ok()?,
            "c2" | "2" => Self::constant(2).ok()?,
            "c3" | "3" => Self::constant(3).ok()?,
            "and" | "min" | "∧" => Self::and(),
            "or" | "max" | "∨" => Self::or(),
            "V4" | "v4" => Self::v4(),
            _ => return None,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn eval(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        for &a in args {
            check_value(a as i64)?;
        }
        Ok(self.table[row_of(args)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// `~x`
    Neg,
    /// `x + 1 mod 4`
    Shift,
    Box,
    Diamond,
    Indicator(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    And,
    Or,
    V4,
}

impl UnaryOp {
    pub fn apply(self, x: u8) -> u8 {
        match self {
            UnaryOp::Neg => 3 - x,
            UnaryOp::Shift => (x + 1) % 4,
            UnaryOp::Box => {
                if x == 3 {
                    3
                } else {
                    0
                }
            }
            UnaryOp::Diamond => {
                if x == 0 {
                    0
                } else {
                    3
                }
            }
            UnaryOp::Indicator(k) => {
                if x == k {
                    3
                } else {
                    0
                }
            }
        }
    }
}

impl BinaryOp {
    pub fn apply(self, a: u8, b: u8) -> u8 {
        match self {
            BinaryOp::And => a.min(b),
            BinaryOp::Or => a.max(b),
            BinaryOp::V4 => (a.max(b) + 1) % 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogicExpr {
    Const(u8),
    /// Zero-based variable index; displayed as `x1`, `x2`, ...
    Var(usize),
    Unary(UnaryOp, Box<LogicExpr>),
    Binary(BinaryOp, Box<LogicExpr>, Box<LogicExpr>),
}

impl LogicExpr {
    pub fn var(i: usize) -> Self {
        LogicExpr::Var(i)
    }

    pub fn unary(op: UnaryOp, e: LogicExpr) -> Self {
        LogicExpr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, a: LogicExpr, b: LogicExpr) -> Self {
        LogicExpr::Binary(op, Box::new(a), Box::new(b))
    }

    /// One more than the largest variable index, or 0 for closed expressions.
    pub fn arity(&self) -> usize {
        match self {
            LogicExpr::Const(_) => 0,
            LogicExpr::Var(i) => i + 1,
            LogicExpr::Unary(_, e) => e.arity(),
            LogicExpr::Binary(_, a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn eval(&self, args: &[u8]) -> Result<u8> {
        for &a in args {
            check_value(a as i64)?;
        }
        if self.arity() > args.len() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        Ok(self.eval_unchecked(args))
    }

    fn eval_unchecked(&self, args: &[u8]) -> u8 {
        match self {
            LogicExpr::Const(c) => *c,
            LogicExpr::Var(i) => args[*i],
            LogicExpr::Unary(op, e) => op.apply(e.eval_unchecked(args)),
            LogicExpr::Binary(op, a, b) => op.apply(a.eval_unchecked(args), b.eval_unchecked(args)),
        }
    }

    /// Truth table over `arity` variables; `arity` defaults to the
    /// expression's own arity, at least 1.
    pub fn to_gate(&self, arity: Option<usize>) -> Result<ClassicalGate> {
        let arity = arity.unwrap_or(self.arity()).max(1);
        if arity < self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: arity,
            });
        }
        ClassicalGate::from_fn(arity, |a| self.eval_unchecked(a))
    }

    pub fn parse(src: &str) -> Result<Self> {
        Parser::new(src).parse_all()
    }
}

impl fmt::Display for LogicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicExpr::Const(c) => write!(f, "{c}"),
            LogicExpr::Var(i) => write!(f, "x{}", i + 1),
            LogicExpr::Unary(UnaryOp::Neg, e) => write!(f, "~{e}"),
            LogicExpr::Unary(UnaryOp::Shift, e) => write!(f, "shift({e})"),
            LogicExpr::Unary(UnaryOp::Box, e) => write!(f, "box({e})"),
            LogicExpr::Unary(UnaryOp::Diamond, e) => write!(f, "dia({e})"),
            LogicExpr::Unary(UnaryOp::Indicator(k), e) => write!(f, "I{k}({e})"),
            LogicExpr::Binary(BinaryOp::And, a, b) => write!(f, "({a} & {b})"),
            LogicExpr::Binary(BinaryOp::Or, a, b) => write!(f, "({a} | {b})"),
            LogicExpr::Binary(BinaryOp::V4, a, b) => write!(f, "V4({a}, {b})"),
        }
    }
}

impl std::str::FromStr for LogicExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LogicExpr::parse(s)
    }
}

const MAX_NESTING: usize = 200;

/// Recursive-descent parser. Grammar, loosest first:
///
/// ```text
/// or    := and (('|' | '∨') and)*
/// and   := unary (('&' | '∧') unary)*
/// unary := ('~' | '∼' | '¬' | '□' | '◇') unary | atom
/// atom  := digit | var | name '(' args ')' | '(' or ')'
/// ```
struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.char_indices().collect(),
            pos: 0,
            src,
            depth: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        let at = self.chars.get(self.pos).map_or(self.src.len(), |c| c.0);
        Error::Parse(format!("{msg} at byte {at} in {:?}", self.src))
    }

    fn skip_ws(&mut self) {
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.1.is_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn parse_all(mut self) -> Result<LogicExpr> {
        let e = self.or()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(e)
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.err("expression nested too deeply"));
        }
        Ok(())
    }

    fn or(&mut self) -> Result<LogicExpr> {
        self.enter()?;
        let mut lhs = self.and()?;
        while matches!(self.peek(), Some('|') | Some('∨')) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = LogicExpr::binary(BinaryOp::Or, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LogicExpr> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some('&') | Some('∧')) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = LogicExpr::binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LogicExpr> {
        let op = match self.peek() {
            Some('~') | Some('∼') | Some('¬') => UnaryOp::Neg,
            Some('□') => UnaryOp::Box,
            Some('◇') | Some('♢') => UnaryOp::Diamond,
            _ => return self.atom(),
        };
        self.pos += 1;
        self.enter()?;
        let inner = self.unary()?;
        self.depth -= 1;
        Ok(LogicExpr::unary(op, inner))
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn args(&mut self, n: usize) -> Result<Vec<LogicExpr>> {
        self.expect('(')?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 {
                self.expect(',')?;
            }
            out.push(self.or()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<LogicExpr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.or()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let id = self.ident();
                match id.as_str() {
                    "0" | "1" | "2" | "3" => Ok(LogicExpr::Const(id.as_bytes()[0] - b'0')),
                    _ => Err(self.err(&format!("constant {id:?} is not in 0..=3"))),
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let id = self.ident();
                if let Some(v) = variable(&id) {
                    return Ok(LogicExpr::Var(v));
                }
                let unary = |op| -> Option<UnaryOp> { Some(op) };
                let op = match id.as_str() {
                    "shift" | "overline" => unary(UnaryOp::Shift),
                    "box" => unary(UnaryOp::Box),
                    "dia" | "diamond" => unary(UnaryOp::Diamond),
                    "neg" => unary(UnaryOp::Neg),
                    "I0" => unary(UnaryOp::Indicator(0)),
                    "I1" => unary(UnaryOp::Indicator(1)),
                    "I2" => unary(UnaryOp::Indicator(2)),
                    "I3" => unary(UnaryOp::Indicator(3)),
                    _ => None,
                };
                if let Some(op) = op {
                    let mut a = self.args(1)?;
                    return Ok(LogicExpr::unary(op, a.remove(0)));
                }
                let bin = match id.as_str() {
                    "min" | "and" => Some(BinaryOp::And),
                    "max" | "or" => Some(BinaryOp::Or),
                    "V4" | "v4" => Some(BinaryOp::V4),
                    _ => None,
                };
                if let Some(op) = bin {
                    let mut a = self.args(2)?;
                    let rhs = a.pop().expect("two arguments");
                    let lhs = a.pop().expect("two arguments");
                    return Ok(LogicExpr::binary(op, lhs, rhs));
                }
                self.pos = start;
                Err(self.err(&format!("unknown name {id:?}")))
            }
            Some(c) => Err(self.err(&format!("unexpected character {c:?}"))),
        }
    }
}

/// `x`, `y`, `z` and `x1` .. `x6`.
fn variable(id: &str) -> Option<usize> {
    match id {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => {
            let digits = id.strip_prefix('x')?;
            let k: usize = digits.parse().ok()?;
            (1..=MAX_ARITY).contains(&k).then(|| k - 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub name: &'static str,
    /// Whether the law is expected to hold identically.
    pub expected: bool,
    pub holds: bool,
    pub tuples: usize,
    /// First argument tuple where the two sides differ.
    pub counterexample: Option<Vec<u8>>,
}

impl LawCheck {
    pub fn agrees_with_claim(&self) -> bool {
        self.expected == self.holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(LawCheck::agrees_with_claim)
    }
}

fn law(name: &'static str, expected: bool, arity: usize, lhs: &str, rhs: &str) -> LawCheck {
    let l = LogicExpr::parse(lhs).expect("builtin law");
    let r = LogicExpr::parse(rhs).expect("builtin law");
    let rows = 4usize.pow(arity as u32);
    let counterexample = (0..rows)
        .map(|row| args_of(row, arity))
        .find(|a| l.eval_unchecked(a) != r.eval_unchecked(a));
    LawCheck {
        name,
        expected,
        holds: counterexample.is_none(),
        tuples: rows,
        counterexample,
    }
}

/// Exhaustive check of the lattice laws for `&` and `|`, the involution and
/// De Morgan law for `~`, and the two failing negation rules for `shift`.
pub fn check_laws() -> LawReport {
    LawReport {
        checks: vec![
            law("commutative and", true, 2, "x1 & x2", "x2 & x1"),
            law("commutative or", true, 2, "x1 | x2", "x2 | x1"),
            law(
                "associative or",
                true,
                3,
                "(x1 | x2) | x3",
                "x1 | (x2 | x3)",
            ),
            law(
                "associative and",
                true,
                3,
                "(x1 & x2) & x3",
                "x1 & (x2 & x3)",
            ),
            law(
                "distributive or over and",
                true,
                3,
                "x1 | (x2 & x3)",
                "(x1 | x2) & (x1 | x3)",
            ),
            law(
                "distributive and over or",
                true,
                3,
                "x1 & (x2 | x3)",
                "(x1 & x2) | (x1 & x3)",
            ),
            law("double negation", true, 1, "~~x1", "x1"),
            law("de morgan", true, 2, "~(x1 & x2)", "~x1 | ~x2"),
            law("double shift", false, 1, "shift(shift(x1))", "x1"),
            law(
                "shift de morgan",
                false,
                2,
                "shift(x1 & x2)",
                "shift(x1) | shift(x2)",
            ),
        ],
    }
}

/// `OR over tuples k of (I_k1(x1) & ... & I_kn(xn) & g(k))`, one term per row.
pub fn dnf_synthesize(g: &ClassicalGate) -> LogicExpr {
    let rows = g.table.len();
    let mut terms = (0..rows).map(|row| {
        let args = args_of(row, g.arity);
        args.iter()
            .enumerate()
            .map(|(i, &k)| LogicExpr::unary(UnaryOp::Indicator(k), LogicExpr::Var(i)))
            .chain(std::iter::once(LogicExpr::Const(g.table[row])))
            .reduce(|a, b| LogicExpr::binary(BinaryOp::And, a, b))
            .expect("at least one factor")
    });
    let first = terms.next().expect("tables are non-empty");
    terms.fold(first, |acc, t| LogicExpr::binary(BinaryOp::Or, acc, t))
}

/// Limits for the bounded closure search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_functions: usize,
    /// Cap on generator applications per closure run.
    pub max_evaluations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 6,
            max_functions: 100_000,
            max_evaluations: 20_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetOutcome {
    /// First generated at this composition depth.
    Reached { depth: usize },
    /// Not generated within budget. `saturated` is set when the closure
    /// stopped growing, which rules the target out entirely.
    BudgetExhausted { saturated: bool },
}

impl TargetOutcome {
    pub fn is_reached(self) -> bool {
        matches!(self, TargetOutcome::Reached { .. })
    }
}

#[derive(Clone, Debug)]
pub struct SetReport {
    pub name: String,
    pub expected_universal: bool,
    /// Outcome for each of the 256 single-argument gates, by table index.
    pub unary: Vec<TargetOutcome>,
    pub binary: Vec<(String, TargetOutcome)>,
    pub unary_functions_generated: usize,
    pub binary_functions_generated: usize,
    pub depth_used: usize,
}

impl SetReport {
    pub fn unary_reached(&self) -> usize {
        self.unary.iter().filter(|o| o.is_reached()).count()
    }

    pub fn all_reached(&self) -> bool {
        self.unary_reached() == 256 && self.binary.iter().all(|(_, o)| o.is_reached())
    }
}

#[derive(Clone, Debug)]
pub struct UniversalityReport {
    pub budget: SearchBudget,
    pub sets: Vec<SetReport>,
}

/// Truth table over `m` variables packed two bits per row, row 0 lowest.
type Packed = u32;

fn pack(values: impl Iterator<Item = u8>) -> Packed {
    values
        .enumerate()
        .fold(0, |acc, (i, v)| acc | ((v as u32) << (2 * i)))
}

struct Closure {
    depth_of: HashMap<Packed, usize>,
    depth: usize,
    saturated: bool,
}

/// Applies `g` row by row to packed argument tables.
fn compose_packed(g: &ClassicalGate, args: &[Packed], rows: usize) -> Packed {
    let mut out = 0;
    for r in 0..rows {
        let row = args
            .iter()
            .fold(0, |acc, &p| 4 * acc + ((p >> (2 * r)) & 3) as usize);
        out |= (g.table[row] as u32) << (2 * r);
    }
    out
}

/// Advances `idx` through `[0, bound)^k` like an odometer; false when done.
fn next_tuple(idx: &mut [usize], bound: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < bound {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Breadth-first closure of the projections under `gens`, in `m` variables.
/// Each layer composes generators over tuples containing at least one
/// function from the previous layer.
fn closure(
    gens: &[ClassicalGate],
    m: usize,
    budget: SearchBudget,
    targets: &HashSet<Packed>,
) -> Closure {
    let rows = 4usize.pow(m as u32);
    let mut depth_of: HashMap<Packed, usize> = HashMap::new();
    let mut all: Vec<Packed> = Vec::new();
    for v in 0..m {
        let p = pack((0..rows).map(|r| args_of(r, m)[v]));
        if depth_of.insert(p, 0).is_none() {
            all.push(p);
        }
    }
    let mut frontier_start = 0;
    let mut depth = 0;
    let mut saturated = false;
    let mut evaluations = 0usize;
    let mut args = Vec::new();
    'search: while depth < budget.max_depth && targets.iter().any(|t| !depth_of.contains_key(t)) {
        depth += 1;
        let old_len = all.len();
        let mut fresh = Vec::new();
        for g in gens {
            let mut idx = vec![0usize; g.arity];
            loop {
                if idx.iter().any(|&i| i >= frontier_start) {
                    evaluations += 1;
                    if evaluations > budget.max_evaluations {
                        all.extend(fresh);
                        break 'search;
                    }
                    args.clear();
                    args.extend(idx.iter().map(|&i| all[i]));
                    let out = compose_packed(g, &args, rows);
                    if let std::collections::hash_map::Entry::Vacant(e) = depth_of.entry(out) {
                        e.insert(depth);
                        fresh.push(out);
                        if old_len + fresh.len() >= budget.max_functions {
                            all.extend(fresh);
                            break 'search;
                        }
                    }
                }
                if !next_tuple(&mut idx, old_len) {
                    break;
                }
            }
        }
        if fresh.is_empty() {
            saturated = true;
            break;
        }
        frontier_start = old_len;
        all.extend(fresh);
    }
    Closure {
        depth_of,
        depth,
        saturated,
    }
}

fn outcome(c: &Closure, target: Packed) -> TargetOutcome {
    match c.depth_of.get(&target) {
        Some(&depth) => TargetOutcome::Reached { depth },
        None => TargetOutcome::BudgetExhausted {
            saturated: c.saturated,
        },
    }
}

/// Runs the bounded closure for one generating set.
pub fn check_generating_set(
    name: &str,
    expected_universal: bool,
    gens: &[ClassicalGate],
    budget: SearchBudget,
) -> SetReport {
    let unary_targets: Vec<Packed> = (0..256u32).collect();
    let u = closure(gens, 1, budget, &unary_targets.iter().copied().collect());
    let unary = unary_targets.iter().map(|&t| outcome(&u, t)).collect();

    let two = |f: &dyn Fn(u8, u8) -> u8| pack((0..16).map(|r| f((r / 4) as u8, (r % 4) as u8)));
    let mut binary_targets: Vec<(String, Packed)> = vec![
        ("x1 & x2".into(), two(&|a, b| a.min(b))),
        ("x1 | x2".into(), two(&|a, b| a.max(b))),
        ("V4(x1, x2)".into(), two(&|a, b| (a.max(b) + 1) % 4)),
    ];
    for k in 0..4u8 {
        binary_targets.push((format!("I{k}(x1)"), two(&|a, _| if a == k { 3 } else { 0 })));
        binary_targets.push((format!("I{k}(x2)"), two(&|_, b| if b == k { 3 } else { 0 })));
    }
    let b = closure(
        gens,
        2,
        budget,
        &binary_targets.iter().map(|t| t.1).collect(),
    );
    let binary = binary_targets
        .into_iter()
        .map(|(n, t)| (n, outcome(&b, t)))
        .collect();
    SetReport {
        name: name.to_string(),
        expected_universal,
        unary,
        binary,
        unary_functions_generated: u.depth_of.len(),
        binary_functions_generated: b.depth_of.len(),
        depth_used: u.depth.max(b.depth),
    }
}

/// The three universal sets plus `{&, |}` as a negative control.
/// Constants enter as constant single-argument gates.
pub fn verify_universal_sets(budget: SearchBudget) -> UniversalityReport {
    let mut first: Vec<ClassicalGate> = (0..4)
        .map(|k| ClassicalGate::constant(k).expect("k < 4"))
        .collect();
    first.extend((0..4).map(|k| ClassicalGate::indicator(k).expect("k < 4")));
    first.push(ClassicalGate::and());
    first.push(ClassicalGate::or());
    let sets = vec![
        check_generating_set(
            "{0, 1, 2, 3, I0, I1, I2, I3, and, or}",
            true,
            &first,
            budget,
        ),
        check_generating_set(
            "{shift, or}",
            true,
            &[ClassicalGate::shift(), ClassicalGate::or()],
            budget,
        ),
        check_generating_set("{V4}", true, &[ClassicalGate::v4()], budget),
        check_generating_set(
            "{and, or}",
            false,
            &[ClassicalGate::and(), ClassicalGate::or()],
            budget,
        ),
    ];
    UniversalityReport { budget, sets }
}

fn check_map(f: &[usize], n: QubitCount) -> Result<()> {
    let dim = n.operator_dim();
    if f.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: f.len(),
        });
    }
    if let Some(&bad) = f.iter().find(|&&v| v >= dim) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: dim,
        });
    }
    Ok(())
}

/// The unique transfer gate with `E |mu] = |f(mu)]` for every basis index.
pub fn realize_classical_map(f: &[usize], n: QubitCount) -> Result<TransferGate> {
    check_map(f, n)?;
    let dim = n.operator_dim();
    let mut m = RMatrix::zeros(dim, dim);
    m[(0, 0)] = 1.0;
    let f0 = f[0];
    if f0 != 0 {
        m[(f0, 0)] += 1.0;
    }
    for (mu, &target) in f.iter().enumerate().skip(1) {
        if target != 0 {
            m[(target, mu)] += 1.0;
        }
        if f0 != 0 {
            m[(f0, mu)] -= 1.0;
        }
    }
    TransferGate::new(m, GateClass::TracePreserving)
}

/// `E |0) = |0) + [f(0) != 0] |f(0))`-style check: does `m` send every
/// `|mu]` to `|f(mu)]` (in unnormalized form)?
pub fn satisfies_classical_contract(m: &RMatrix, f: &[usize]) -> bool {
    let dim = f.len();
    if m.shape() != (dim, dim) {
        return false;
    }
    let state = |mu: usize| {
        let mut v = crate::linalg::RVector::zeros(dim);
        v[0] = 1.0;
        if mu != 0 {
            v[mu] += 1.0;
        }
        v
    };
    (0..dim).all(|mu| m * state(mu) == state(f[mu]))
}

fn unary_map(g: &ClassicalGate) -> Result<Vec<usize>> {
    if g.arity != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: g.arity,
        });
    }
    Ok(g.table.iter().map(|&v| v as usize).collect())
}

/// The single-argument projector-sum formula taken term by term:
/// `|0)(0| + sum_{k>=1} |g(k))(k| + [g(0) != 0] (|g(0))(0| -
/// sum_{mu,nu} [mu != g(nu)] |mu)(nu|)`.
pub fn projector_sum_formula(g: &ClassicalGate) -> Result<RMatrix> {
    let f = unary_map(g)?;
    let mut m = RMatrix::zeros(4, 4);
    m[(0, 0)] += 1.0;
    for k in 1..4 {
        m[(f[k], k)] += 1.0;
    }
    if f[0] != 0 {
        m[(f[0], 0)] += 1.0;
        for mu in 0..4 {
            for (nu, &fnu) in f.iter().enumerate() {
                if mu != fnu {
                    m[(mu, nu)] -= 1.0;
                }
            }
        }
    }
    Ok(m)
}

/// Transfer gate of a single-argument classical gate, fixed by
/// `E |alpha] = |g(alpha)]` on the four computational states. The
/// projector-sum formula is evaluated first and used only when it satisfies
/// that contract; disagreements are logged.
pub fn classical_to_quantum(g: &ClassicalGate) -> Result<TransferGate> {
    let f = unary_map(g)?;
    let literal = projector_sum_formula(g)?;
    if satisfies_classical_contract(&literal, &f) {
        return TransferGate::new(literal, GateClass::TracePreserving);
    }
    log::debug!(
        "projector-sum formula misses the contract for table {:?}; using the solved matrix",
        g.table
    );
    realize_classical_map(&f, QubitCount::new(1)?)
}

fn pair_map(h: impl Fn(u8, u8) -> (u8, u8)) -> Vec<usize> {
    (0..16)
        .map(|mu| {
            let (a, b) = h((mu / 4) as u8, (mu % 4) as u8);
            4 * a as usize + b as usize
        })
        .collect()
}

/// `|x1, x2] -> |x1 | x2, x1 & x2]`.
pub fn minmax_map() -> Vec<usize> {
    pair_map(|a, b| (a.max(b), a.min(b)))
}

/// `|x1, x2] -> |V4(x1, x2), ~V4(x1, x2)]`.
pub fn sheffer_webb_map() -> Vec<usize> {
    pair_map(|a, b| {
        let v = (a.max(b) + 1) % 4;
        (v, 3 - v)
    })
}

pub fn minmax_gate() -> TransferGate {
    realize_classical_map(&minmax_map(), QubitCount::new(2).expect("2 qubits")).expect("valid map")
}

pub fn sheffer_webb_gate() -> TransferGate {
    realize_classical_map(&sheffer_webb_map(), QubitCount::new(2).expect("2 qubits"))
        .expect("valid map")
}

fn pair(a: usize, b: usize) -> usize {
    4 * a + b
}

/// The two-ququat min/max projector sum taken term by term:
/// identity, `sum_{k=1..3} (|0k) - |k0))(k0|`,
/// `sum_{k=2,3} (|1k) - |k1))(k1|` and `(|23) - |32))(32|`.
pub fn minmax_projector_sum() -> RMatrix {
    let mut m = RMatrix::identity(16, 16);
    let mut swap_term = |a: usize, b: usize| {
        m[(pair(a, b), pair(b, a))] += 1.0;
        m[(pair(b, a), pair(b, a))] -= 1.0;
    };
    for k in 1..4 {
        swap_term(0, k);
    }
    for k in 2..4 {
        swap_term(1, k);
    }
    swap_term(2, 3);
    m
}

/// The two-ququat V4 projector sum taken term by term.
pub fn sheffer_webb_projector_sum() -> RMatrix {
    let mut m = RMatrix::zeros(16, 16);
    let mut add = |to: (usize, usize), from: (usize, usize), v: f64| {
        m[(pair(to.0, to.1), pair(from.0, from.1))] += v;
    };
    add((0, 0), (0, 0), 1.0);
    add((1, 2), (0, 0), 1.0);
    for mu in 0..4 {
        for nu in 1..4 {
            add((1, 2), (mu, nu), -1.0);
        }
    }
    for from in [(1, 0), (1, 1)] {
        add((2, 1), from, 1.0);
    }
    for from in [(0, 2), (2, 0), (1, 2), (2, 1), (2, 2)] {
        add((3, 0), from, 1.0);
    }
    for from in [(0, 3), (1, 3), (2, 3)] {
        add((0, 3), from, 1.0);
    }
    for mu in 0..4 {
        add((0, 3), (3, mu), 1.0);
    }
    m
}

/// Inputs `mu` on which `m` fails to send `|mu]` to `|f(mu)]`.
pub fn contract_violations(m: &RMatrix, f: &[usize]) -> Vec<usize> {
    let dim = f.len();
    (0..dim)
        .filter(|&mu| {
            let mut v = crate::linalg::RVector::zeros(dim);
            v[0] = 1.0;
            if mu != 0 {
                v[mu] += 1.0;
            }
            let mut w = crate::linalg::RVector::zeros(dim);
            w[0] = 1.0;
            if f[mu] != 0 {
                w[f[mu]] += 1.0;
            }
            m * v != w
        })
        .collect()
}
