use std::fmt;

/// Errors produced while evaluating families or running an analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} {value} lies outside the domain {domain}")]
    Domain {
        what: DomainKind,
        value: f64,
        domain: String,
    },
    #[error("moment {moment} is singular: {reason}")]
    Singular { moment: f64, reason: String },
    #[error("evaluation diverged at {at}: {detail}")]
    Divergence { at: String, detail: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("evaluation failed at moment {moment}: {source}")]
    AtMoment {
        moment: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Parameter,
    Moment,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Parameter => f.write_str("parameter"),
            DomainKind::Moment => f.write_str("moment"),
        }
    }
}

impl Error {
    /// Wraps an evaluation error with the moment at which it happened.
    pub(crate) fn at_moment(self, moment: f64) -> Error {
        match self {
            e @ Error::AtMoment { .. } => e,
            e => Error::AtMoment {
                moment,
                source: Box::new(e),
            },
        }
    }

    /// True for errors caused by bad input rather than by evaluation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidConfig { .. }
                | Error::Precondition(_)
                | Error::Parse(_)
                | Error::UnknownFamily(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
