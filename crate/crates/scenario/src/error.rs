use std::fmt;

use thiserror::Error;

/// A byte range in the source with the line and column of its start.
///
/// Spans always compare equal so that syntax trees compare by structure.
#[derive(Debug, Clone, Copy)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

/// The start of the input.
impl Default for Span {
    fn default() -> Span {
        Span {
            start: 0,
            end: 0,
            line: 1,
            column: 1,
        }
    }
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end.max(self.start),
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: {message}")]
    Semantic { span: Span, message: String },
    #[error("unknown built-in scenario {name:?}; available: {}", available.join(", "))]
    UnknownBuiltin {
        name: String,
        available: Vec<&'static str>,
    },
}

impl ScenarioError {
    pub fn syntax(span: Span, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Syntax {
            span,
            message: message.into(),
        }
    }

    pub fn semantic(span: Span, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Semantic {
            span,
            message: message.into(),
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            ScenarioError::Syntax { span, .. } | ScenarioError::Semantic { span, .. } => {
                Some(*span)
            }
            ScenarioError::UnknownBuiltin { .. } => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;
