//! Mixed-state quantum computation in the Pauli transfer-matrix picture.
//!
//! An `n`-qubit density matrix is stored as its `4^n` real coefficients in the
//! normalized Pauli basis, and every quantum operation (unitary, dissipative,
//! measurement branch, or classical 4-valued logic gate) becomes a real
//! `4^n x 4^n` transfer matrix acting on that vector.

pub mod channel;
pub mod circuit;
pub mod error;
pub mod gate_algebra;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod mv_logic;
pub mod pauli;
pub mod pseudo_gate;
pub mod random;
pub mod tolerance;

pub use channel::{GateClass, KrausSet, TransferGate};
pub use error::{Error, Result};
pub use pauli::{DensityMatrix, MultiIndex, PauliCoeffVector, PauliState, QubitCount};
