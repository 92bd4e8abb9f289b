use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("evaluation point does not assign every variable")]
    UnassignedVariable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Expected something else at `offset`.
    Expected(String),
    UnknownVariable(String),
}

/// A positioned parse failure. `offset` is a character index into the input;
/// an offset equal to the input length means "at end of input".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(offset: usize, expected: impl Into<String>) -> ParseError {
        ParseError { offset, kind: ParseErrorKind::Expected(expected.into()) }
    }

    pub fn unknown_variable(offset: usize, name: &str) -> ParseError {
        ParseError { offset, kind: ParseErrorKind::UnknownVariable(name.to_string()) }
    }

    pub fn is_unknown_variable(&self) -> bool {
        matches!(self.kind, ParseErrorKind::UnknownVariable(_))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Expected(what) => write!(f, "parse error at offset {}: expected {what}", self.offset),
            ParseErrorKind::UnknownVariable(name) => {
                write!(f, "parse error at offset {}: unknown variable {name:?}", self.offset)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("zero base raised to a negative power (at k = {k})")]
    ZeroToNegativePower { k: i64 },
    #[error("factor undefined at n = {n}, k = {k}: {what}")]
    Undefined { n: i64, k: i64, what: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no recurrence found with orders up to {0}")]
    NoRecurrenceFound(u32),
    #[error("kernel is not differentiable in closed form: {0}")]
    KernelNotDifferentiable(String),
    #[error("shift recurrences need the Abel kernel")]
    KernelMode,
    #[error("cannot isolate the highest term: {0}")]
    CannotIsolate(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("reduction is nonzero; residue {0}")]
    ReductionNonzero(String),
    #[error("closed form has no rational shift rule for {0}")]
    UncoveredShift(String),
    #[error("validation failed at {point}: residue {residue}")]
    ValidationFailed { point: String, residue: String },
    #[error("could not find a regular evaluation point after {0} attempts")]
    NoRegularPoint(usize),
}
