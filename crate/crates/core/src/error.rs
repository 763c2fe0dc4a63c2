use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{FlagId, VertexId};

/// A violated structural condition, identified by a stable short code.
///
/// Codes name the definition they come from: `doc-*` for contractions,
/// `commor-*` for combinatorial morphisms, `j-involution` and friends for
/// the graph axioms themselves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub condition: &'static str,
    pub detail: String,
}

impl Violation {
    pub fn new(condition: &'static str, detail: impl Into<String>) -> Self {
        Violation {
            condition,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.condition, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("monoid rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("unknown flag {0}")]
    UnknownFlag(FlagId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("flag {0} is not a tail")]
    NotATail(FlagId),
    #[error("flag {0} is not half of an edge")]
    NotAnEdge(FlagId),
    #[error("{0}")]
    Precondition(String),
    #[error("morphism endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("graph has {flags} flags, above the configured cap of {cap}")]
    SizeCap { flags: usize, cap: usize },
    #[error("validation failed: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn invalid(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid(vec![Violation::new(condition, detail)])
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Invalid(v) => v,
            _ => &[],
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Turns a list of violations into `Ok(())` when empty.
pub(crate) fn check(violations: Vec<Violation>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(violations))
    }
}
