use num_integer::Integer;

use super::product::outgoing;
use super::types::{Action, Atom, ClockConstraint, Constant, Relation, TimedAutomaton};
use super::ModelError;
use crate::dbm::Constraint;

/// Least common multiple of every constant's denominator.
pub fn common_scale<'a>(tas: impl IntoIterator<Item = &'a TimedAutomaton>) -> i64 {
    tas.into_iter()
        .flat_map(|t| t.atoms().map(|a| *a.bound.denom()).collect::<Vec<_>>())
        .fold(1, |acc, d| acc.lcm(&d))
}

/// Multiplies every constant by `factor`.
pub fn scale(ta: &TimedAutomaton, factor: i64) -> TimedAutomaton {
    let f = Constant::from_integer(factor);
    let mut out = ta.clone();
    let fix = |cc: &mut ClockConstraint| cc.atoms.iter_mut().for_each(|a| a.bound *= f);
    out.locations.iter_mut().for_each(|l| fix(&mut l.invariant));
    out.switches.iter_mut().for_each(|s| fix(&mut s.guard));
    out
}

/// Clock names in matrix order: index `k + 1` holds `names[k]`, the history
/// clock follows the last name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockMap {
    pub names: Vec<String>,
}

impl ClockMap {
    pub fn new(names: Vec<String>) -> ClockMap {
        ClockMap { names }
    }

    pub fn index(&self, clock: &str) -> Option<usize> {
        self.names.iter().position(|n| n == clock).map(|i| i + 1)
    }

    pub fn dim(&self) -> usize {
        self.names.len() + 2
    }

    pub fn history(&self) -> usize {
        self.names.len() + 1
    }

    /// Names for every non-reference index, the history clock included.
    pub fn display_names(&self) -> Vec<&str> {
        self.names
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(super::types::HISTORY_CLOCK))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CompiledLocation {
    pub id: String,
    pub invariant: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct CompiledSwitch {
    pub source: usize,
    pub target: usize,
    pub guard: Vec<Constraint>,
    pub action: Action,
    pub resets: Vec<usize>,
}

/// An automaton with clocks resolved to matrix indices and integer bounds.
#[derive(Clone, Debug)]
pub struct CompiledTa {
    pub locations: Vec<CompiledLocation>,
    pub initial: usize,
    pub switches: Vec<CompiledSwitch>,
    /// Switch indices by source location.
    pub out: Vec<Vec<usize>>,
    /// Matrix indices of this automaton's own clocks.
    pub clocks: Vec<usize>,
}

pub fn atom_constraint(a: &Atom, map: &ClockMap) -> Result<Constraint, ModelError> {
    let i = map.index(&a.clock).ok_or_else(|| ModelError::UndeclaredClock(a.clock.clone()))?;
    if !a.bound.is_integer() {
        return Err(ModelError::NonIntegerConstant(a.to_string()));
    }
    let n = i32::try_from(a.bound.to_integer()).map_err(|_| ModelError::NonIntegerConstant(a.to_string()))?;
    Ok(match a.op {
        Relation::Le => Constraint::upper(i, n, false),
        Relation::Lt => Constraint::upper(i, n, true),
        Relation::Ge => Constraint::lower(i, n, false),
        Relation::Gt => Constraint::lower(i, n, true),
    })
}

fn constraints(cc: &ClockConstraint, map: &ClockMap) -> Result<Vec<Constraint>, ModelError> {
    cc.atoms.iter().map(|a| atom_constraint(a, map)).collect()
}

/// Resolves clocks against `map`; constants must already be integers.
pub fn compile(ta: &TimedAutomaton, map: &ClockMap) -> Result<CompiledTa, ModelError> {
    let locations = ta
        .locations
        .iter()
        .map(|l| {
            Ok(CompiledLocation {
                id: l.id.clone(),
                invariant: constraints(&l.invariant, map)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let out = outgoing(ta)?;
    let switches = ta
        .switches
        .iter()
        .map(|s| {
            Ok(CompiledSwitch {
                source: ta.location_index(&s.source).expect("checked by outgoing"),
                target: ta.location_index(&s.target).expect("checked by outgoing"),
                guard: constraints(&s.guard, map)?,
                action: s.action.clone(),
                resets: s
                    .resets
                    .iter()
                    .map(|r| map.index(r).ok_or_else(|| ModelError::UndeclaredClock(r.clone())))
                    .collect::<Result<Vec<_>, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let initial = ta
        .location_index(&ta.initial)
        .ok_or_else(|| ModelError::UnknownLocation(ta.initial.clone()))?;
    let clocks = ta
        .clocks
        .iter()
        .map(|c| map.index(c).ok_or_else(|| ModelError::UndeclaredClock(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompiledTa {
        locations,
        initial,
        switches,
        out,
        clocks,
    })
}
