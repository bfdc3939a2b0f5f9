//! Synthesis, simulation and cost modelling of dirty-ancilla table-lookup
//! (QROM) circuits.
//!
//! A lookup maps `|x>|0>` to `|x>|f(x)>` for classical data `f` with `N`
//! entries of `b` bits. [`qrom::build_qrom`] emits the multiplexed-copy
//! construction with `mu`-bit packets; [`baselines`] holds prior circuits for
//! comparison, [`sim`] checks any of them bit by bit, and [`cost`] evaluates
//! the closed-form counts and searches parameters under a dirty-qubit budget.

pub mod baselines;
pub mod circuit;
pub mod cli;
pub mod cost;
pub mod error;
pub mod qrom;
pub mod sim;
pub mod table;
pub mod unary;

pub use circuit::{Circuit, Gate, GateKind, QubitRef, RegId, RegisterSpec, ResourceEstimate, Role};
pub use error::{Error, Result};
pub use qrom::{
    build_qrom, build_sequential_qroms, plan_qrom, LookupTable, QromPlan, SequentialSpec,
};
