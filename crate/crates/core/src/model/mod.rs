//! Timed automata: the data model, its text format, UPPAAL import,
//! well-formedness checks, products and mutation operators.

mod compile;
mod mutate;
mod parse;
mod product;
mod types;
mod uppaal;
mod validate;

use std::path::Path;

use thiserror::Error;

pub use compile::{atom_constraint, common_scale, compile, scale, ClockMap, CompiledLocation, CompiledSwitch, CompiledTa};
pub use mutate::{mutate_change_guard, mutate_invert_resets, mutation_sites, Mutation};
pub use parse::{parse_model, serialize};
pub use product::{pair_id, parallel_product, rename_apart, Product, ProductRule};
pub use types::{
    Action, Atom, ClockConstraint, Constant, Location, Relation, Switch, TimedAutomaton, HISTORY_CLOCK,
    REFERENCE_CLOCK,
};
pub use uppaal::import_uppaal;
pub use validate::{validate, Diagnostic, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("invalid UPPAAL document: {0}")]
    Xml(String),
    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("clock {0} is shared by both automata")]
    SharedClock(String),
    #[error("unknown location {0}")]
    UnknownLocation(String),
    #[error("undeclared clock {0}")]
    UndeclaredClock(String),
    #[error("constant in {0} is not an integer after scaling")]
    NonIntegerConstant(String),
    #[error("{what} index {index} out of range")]
    IndexOutOfRange { what: &'static str, index: usize },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl ModelError {
    pub fn syntax(line: usize, column: usize, message: &str) -> ModelError {
        ModelError::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }
}

/// Loads a model, choosing UPPAAL import for `.xml` files.
pub fn load_model(path: &Path) -> Result<TimedAutomaton, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
        import_uppaal(&text)
    } else {
        parse_model(&text)
    }
}

/// Rejects an automaton with any diagnostic.
pub fn ensure_valid(ta: &TimedAutomaton) -> Result<(), ModelError> {
    let diags = validate(ta);
    if diags.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        Err(ModelError::Invalid(format!("{}: {}", ta.name, msgs.join("; "))))
    }
}
