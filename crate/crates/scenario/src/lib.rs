//! A small language for describing reduction scenarios and checking their
//! claims with the `msr-core` engine.

pub mod ast;
pub mod builtins;
pub mod error;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod printer;
pub mod run;

pub use error::{Result, ScenarioError, Span};
pub use run::{run_source, Report, Status, Verdict};
