use super::{ceilings, GraphConfig};
use crate::model::{
    common_scale, compile, ensure_valid, rename_apart, scale, ClockMap, CompiledTa, ModelError, TimedAutomaton,
};

/// A validated automaton with integer constants and resolved clocks.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub ta: CompiledTa,
    pub clocks: ClockMap,
    pub ceilings: Vec<i32>,
    pub names: Vec<String>,
}

/// A validated, renamed-apart pair over one shared clock map (left clocks
/// first), scaled by a common factor.
#[derive(Clone, Debug)]
pub struct PreparedPair {
    pub left: CompiledTa,
    pub right: CompiledTa,
    pub clocks: ClockMap,
    pub ceilings: Vec<i32>,
    pub names: [Vec<String>; 2],
    pub scale: i64,
    /// The pair after renaming and scaling.
    pub automata: (TimedAutomaton, TimedAutomaton),
}

fn location_names(ta: &TimedAutomaton) -> Vec<String> {
    ta.locations.iter().map(|l| l.id.clone()).collect()
}

pub fn prepare_single(ta: &TimedAutomaton, config: &GraphConfig) -> Result<Prepared, ModelError> {
    ensure_valid(ta)?;
    let ta = scale(ta, common_scale([ta]));
    let clocks = ClockMap::new(ta.clocks.clone());
    let compiled = compile(&ta, &clocks)?;
    let ceilings = ceilings(&[&compiled], &clocks, config.history_ceiling);
    Ok(Prepared {
        ta: compiled,
        clocks,
        ceilings,
        names: location_names(&ta),
    })
}

pub fn prepare_pair(a: &TimedAutomaton, b: &TimedAutomaton, config: &GraphConfig) -> Result<PreparedPair, ModelError> {
    ensure_valid(a)?;
    ensure_valid(b)?;
    if a.alphabet != b.alphabet {
        return Err(ModelError::AlphabetMismatch {
            left: a.alphabet.iter().cloned().collect(),
            right: b.alphabet.iter().cloned().collect(),
        });
    }
    let (a, b) = rename_apart(a, b);
    let factor = common_scale([&a, &b]);
    let (a, b) = (scale(&a, factor), scale(&b, factor));
    let clocks = ClockMap::new(a.clocks.iter().chain(b.clocks.iter()).cloned().collect());
    let left = compile(&a, &clocks)?;
    let right = compile(&b, &clocks)?;
    let ceilings = ceilings(&[&left, &right], &clocks, config.history_ceiling);
    Ok(PreparedPair {
        left,
        right,
        clocks,
        ceilings,
        names: [location_names(&a), location_names(&b)],
        scale: factor,
        automata: (a, b),
    })
}
