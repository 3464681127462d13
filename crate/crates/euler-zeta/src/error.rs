use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed spec document; position is reported when known.
    #[error("syntax error{}: {message}", position_suffix(*.line, *.column))]
    Syntax {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },

    /// Structurally valid spec violating a model constraint (|alpha| > 1,
    /// zero direction vector, inconsistent dependence mode, ...).
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("unknown builtin spec `{0}`")]
    UnknownBuiltin(String),

    /// Evaluation requested outside the region of absolute convergence.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation applied to a spec in the wrong dependence mode.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// A pmf entry came out negative; carries the offending coefficient.
    #[error("negative mass from coefficient witness at rank {rank}, n={n}: a(n) = {value}")]
    NegativeMass { rank: usize, n: u64, value: String },

    /// Refusing to sample a badly truncated pmf.
    #[error("normalization deficit {deficit:.3e} exceeds sampling threshold {limit:.1e}")]
    DeficitTooLarge { deficit: f64, limit: f64 },
}

fn position_suffix(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn syntax(message: impl Into<String>) -> Self {
        Error::Syntax {
            line: None,
            column: None,
            message: message.into(),
        }
    }
}
