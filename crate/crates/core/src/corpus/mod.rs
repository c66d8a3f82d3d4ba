//! Random automata, golden cases and cross-module property runs.

mod generate;
mod golden;
mod properties;

pub use generate::{random_automaton, random_pairs, renamed_copy, GeneratorConfig, PairOrigin, RandomPair};
pub use golden::{parse_flags, parse_manifest, run_goldens, GoldenCase, GoldenError, GoldenOutcome, GoldenReport, MANIFEST, REQUIRED_CASES};
pub use properties::{
    run_random_properties, shrink, Finding, Property, PropertyConfig, PropertyReport, Violation,
};
