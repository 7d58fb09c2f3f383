use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("role '{0}' is already registered")]
    DuplicateRole(String),
    #[error("name '{0}' is used both as a role and as an interface")]
    NameCollision(String),
    #[error("'{0}' is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("cannot parse event '{input}': {reason}")]
    EventSyntax { input: String, reason: String },

    #[error("scenario definition '{0}' is defined more than once")]
    DuplicateDefinition(String),
    #[error("scenario '{scenario}' reached a sync point that requests, waits for and blocks nothing")]
    EmptySync { scenario: String },
    #[error("scenario '{scenario}' refers to unbound variable '{variable}'")]
    UnboundVariable { scenario: String, variable: String },
    #[error("only concrete events may be injected, got flexible event {0}")]
    FlexibleInjection(String),
    #[error("step bound of {bound} exceeded")]
    StepBoundExceeded { bound: usize },
    #[error("step budget must be at least 1")]
    ZeroStepBudget,

    #[error("binding refers to unknown role '{0}'")]
    UnknownRole(String),
    #[error("role '{role}' does not implement interface '{interface}'")]
    UnknownInterface { role: String, interface: String },
    #[error("role '{0}' is declared by more than one program and is not a bound pair")]
    NamespaceClash(String),

    #[error("line {line}: {message}")]
    FeatureSyntax { line: usize, message: String },
    #[error("step '{text}' matches {count} bindings")]
    AmbiguousStep { text: String, count: usize },
    #[error("invalid step pattern '{pattern}': {source}")]
    StepPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("step pattern '{pattern}' has {captures} capture groups but its action takes {params}")]
    CaptureArity {
        pattern: String,
        captures: usize,
        params: usize,
    },
    #[error("{action} actions cannot be bound to {kind} steps")]
    MisplacedAction {
        action: &'static str,
        kind: &'static str,
    },
    #[error("malformed tag expression '{0}'")]
    TagExpression(String),

    #[error("no engine factory named '{0}'")]
    UnknownEngine(String),
    #[error("malformed report: {0}")]
    ReportFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
