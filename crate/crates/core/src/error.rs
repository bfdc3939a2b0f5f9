use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),
    #[error("register `{0}` has size 0")]
    EmptyRegister(String),
    #[error("register id {0} is not declared in this circuit")]
    UnknownRegisterId(usize),
    #[error("qubit {register}[{offset}] out of bounds (size {size})")]
    OutOfBounds {
        register: String,
        offset: usize,
        size: usize,
    },
    #[error("{kind} takes {expected} operands, got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{kind} has duplicate operand {qubit}")]
    DuplicateOperand { kind: &'static str, qubit: String },
    #[error("gate {gate}: TEMP_AND on {qubit}, which already holds an open temporary AND")]
    TempAndReopened { gate: usize, qubit: String },
    #[error("gate {gate}: TEMP_AND_UNCOMPUTE on {qubit} without a matching TEMP_AND")]
    TempAndNotOpen { gate: usize, qubit: String },
    #[error("temporary AND on {0} is never uncomputed")]
    TempAndLeftOpen(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Problems with user-supplied synthesis or cost parameters.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid parameter: {0}")]
pub struct ParamError(pub String);

impl ParamError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParamError(msg.into())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnaryError {
    #[error("empty iteration range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("range end {hi} does not fit a {bits}-qubit index register")]
    RangeTooWide { hi: u64, bits: usize },
    #[error("unary iteration needs {needed} work qubits, {available} supplied")]
    InsufficientWork { needed: usize, available: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("gate {gate}: TEMP_AND target {qubit} is not 0")]
    TempAndDirtyTarget { gate: usize, qubit: String },
    #[error("gate {gate}: TEMP_AND_UNCOMPUTE leaves {qubit} at 1")]
    UncomputeLeftOne { gate: usize, qubit: String },
    #[error("state has {got} qubits, circuit has {expected}")]
    StateSize { expected: usize, got: usize },
}

/// Crate-wide error.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Unary(#[from] UnaryError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
