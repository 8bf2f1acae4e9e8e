use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown operation symbol `{0}`")]
    UnknownOperation(String),
    #[error("operation `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("term is not closed: free variables {0}")]
    OpenTerm(String),
    #[error("operation `{op}` has no interpretation in the {monad} monad")]
    Uninterpretable { op: String, monad: String },
    #[error("monad kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("subdistribution mass {0} exceeds 1")]
    MassOverflow(String),
    #[error("the {0} monad has no least element")]
    NoBottom(String),
    #[error("invalid monad specification: {0}")]
    Monad(String),
    #[error("invalid relator: {0}")]
    Relator(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
