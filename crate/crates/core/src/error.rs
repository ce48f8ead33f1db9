use thiserror::Error;

use crate::model::{CompatibilityReport, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown outcome `{outcome}` for variable `{variable}`")]
    UnknownOutcome { variable: String, outcome: String },

    #[error("{sub} is not contained in context {context}")]
    NotASubcontext { sub: String, context: String },

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("relabeling is not total: no image for {0}")]
    NotTotal(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("model failed validation:\n{}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("model is not compatible (signalling): {}", .0.summary())]
    Incompatible(Box<CompatibilityReport>),

    #[error("operation requires a {expected} model, got {actual}")]
    WrongSemiring { expected: &'static str, actual: &'static str },

    #[error("incidence system needs {required} global assignments, cap is {cap}")]
    ColumnCap { required: u128, cap: u128 },

    #[error("linear system has no signed solution")]
    NoSignedSolution,

    #[error("unknown context {0}")]
    UnknownContext(String),

    #[error("formula parse error at byte {position}: {message}")]
    FormulaParse { position: usize, message: String },

    #[error("invalid proposition: {0}")]
    Proposition(String),

    #[error("quantum: {0}")]
    Quantum(String),

    #[error("cell {context} [{assignment}] = {value:e} does not snap to a rational with denominator <= {max_denominator}")]
    Snap {
        context: String,
        assignment: String,
        value: f64,
        max_denominator: u64,
    },

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid equation system: {0}")]
    Equations(String),

    #[error("bundle: {0}")]
    Bundle(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
