// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants are grouped by the exit-code class they map to in the CLI:
/// everything is a validation/input problem except [`Error::Degenerate`]
/// and [`Error::ImpossibleOutcome`], which are runtime-degenerate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("post-selection outcome {outcome} on qubit {qubit} has zero probability")]
    ImpossibleOutcome { qubit: usize, outcome: u8 },

    #[error("circuit has {qubits} qubits, above the unitary oracle limit of {limit}")]
    OracleLimit { qubits: usize, limit: usize },

    #[error("f({x}) = {value} at grid point p = {p} lies outside [-1, 1]")]
    Domain { p: usize, x: f64, value: f64 },

    #[error("matrix is singular: smallest singular value sigma_min = {sigma_min:.3e}")]
    Singular { sigma_min: f64 },

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("coupling between qubits {0} and {1} is not cancelled by the two-block cZ scheme")]
    ResidualCoupling(usize, usize),

    #[error("qubits {0} and {1} are not connected in the architecture")]
    Disconnected(usize, usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures caused by the instance itself rather than by bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::ImpossibleOutcome { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
