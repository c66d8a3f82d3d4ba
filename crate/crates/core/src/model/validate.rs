use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::types::{Action, Atom, ClockConstraint, Constant, Relation, TimedAutomaton, HISTORY_CLOCK, REFERENCE_CLOCK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    DuplicateClock,
    ReservedName,
    DuplicateLocation,
    UnknownInitial,
    UnknownLocation,
    UndeclaredClock,
    UndeclaredAction,
    NegativeConstant,
    InvariantNotDownwardClosed,
    UnsatisfiableInvariant,
    ZenoTauCycle,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::DuplicateClock => "duplicate clock",
            Rule::ReservedName => "reserved name",
            Rule::DuplicateLocation => "duplicate location",
            Rule::UnknownInitial => "unknown initial location",
            Rule::UnknownLocation => "unknown location",
            Rule::UndeclaredClock => "undeclared clock",
            Rule::UndeclaredAction => "undeclared action",
            Rule::NegativeConstant => "negative constant",
            Rule::InvariantNotDownwardClosed => "invariant not downward-closed",
            Rule::UnsatisfiableInvariant => "unsatisfiable invariant",
            Rule::ZenoTauCycle => "tau-cycle without time progress",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub rule: Rule,
    pub element: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule.describe(), self.element)
    }
}

/// Checks the well-formedness rules; an empty result means the automaton is
/// valid.
pub fn validate(ta: &TimedAutomaton) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |rule, element: String| out.push(Diagnostic { rule, element });

    let mut clocks = BTreeSet::new();
    for c in &ta.clocks {
        if !clocks.insert(c.as_str()) {
            push(Rule::DuplicateClock, format!("clock {c}"));
        }
        if c == HISTORY_CLOCK || c == REFERENCE_CLOCK {
            push(Rule::ReservedName, format!("clock {c}"));
        }
    }
    if ta.alphabet.contains("tau") {
        push(Rule::ReservedName, "action tau".to_string());
    }
    let mut locs = BTreeSet::new();
    for l in &ta.locations {
        if !locs.insert(l.id.as_str()) {
            push(Rule::DuplicateLocation, format!("location {}", l.id));
        }
    }
    if !locs.contains(ta.initial.as_str()) {
        push(Rule::UnknownInitial, format!("location {}", ta.initial));
    }

    let check_atoms = |push: &mut dyn FnMut(Rule, String), cc: &ClockConstraint, owner: &str| {
        for a in &cc.atoms {
            if !clocks.contains(a.clock.as_str()) {
                push(Rule::UndeclaredClock, format!("{a} in {owner}"));
            }
            if a.bound < Constant::from_integer(0) {
                push(Rule::NegativeConstant, format!("{a} in {owner}"));
            }
        }
    };

    for l in &ta.locations {
        let owner = format!("invariant of {}", l.id);
        check_atoms(&mut push, &l.invariant, &owner);
        for a in &l.invariant.atoms {
            if !a.op.is_upper() && !is_trivial_lower(a) {
                push(Rule::InvariantNotDownwardClosed, format!("{a} in {owner}"));
            }
            if a.op == Relation::Lt && a.bound <= Constant::from_integer(0) {
                push(Rule::UnsatisfiableInvariant, format!("{a} in {owner}"));
            }
        }
    }
    for (i, s) in ta.switches.iter().enumerate() {
        let owner = format!("switch #{i} {} -> {}", s.source, s.target);
        for l in [&s.source, &s.target] {
            if !locs.contains(l.as_str()) {
                push(Rule::UnknownLocation, format!("{l} in {owner}"));
            }
        }
        check_atoms(&mut push, &s.guard, &owner);
        for r in &s.resets {
            if !clocks.contains(r.as_str()) {
                push(Rule::UndeclaredClock, format!("reset {r} in {owner}"));
            }
        }
        if let Action::Visible(a) = &s.action {
            if !ta.alphabet.contains(a) {
                push(Rule::UndeclaredAction, format!("{a} in {owner}"));
            }
        }
    }
    for l in zeno_tau_cycle_locations(ta) {
        push(Rule::ZenoTauCycle, format!("location {l}"));
    }
    out
}

/// `c >= 0` constrains nothing and may appear in invariants, e.g. from a
/// desugared `c == 0`.
fn is_trivial_lower(a: &Atom) -> bool {
    a.op == Relation::Ge && a.bound == Constant::from_integer(0)
}

/// A guard atom that every valuation of the source invariant satisfies.
fn implied_by(a: &Atom, inv: &ClockConstraint) -> bool {
    if is_trivial_lower(a) {
        return true;
    }
    if !a.op.is_upper() {
        return false;
    }
    inv.atoms.iter().any(|i| {
        i.clock == a.clock
            && i.op.is_upper()
            && (i.bound < a.bound || (i.bound == a.bound && (a.op == Relation::Le || i.op == Relation::Lt)))
    })
}

/// Locations on a cycle of τ-switches that reset nothing and whose guards
/// hold throughout the source invariant.
fn zeno_tau_cycle_locations(ta: &TimedAutomaton) -> Vec<String> {
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for s in &ta.switches {
        let Some(src) = ta.location(&s.source) else { continue };
        if s.action.is_tau() && s.resets.is_empty() && s.guard.atoms.iter().all(|a| implied_by(a, &src.invariant)) {
            succ.entry(s.source.as_str()).or_default().insert(s.target.as_str());
        }
    }
    let mut on_cycle = Vec::new();
    for &start in succ.keys() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = succ[start].iter().copied().collect();
        while let Some(l) = stack.pop() {
            if l == start {
                on_cycle.push(start.to_string());
                break;
            }
            if seen.insert(l) {
                if let Some(n) = succ.get(l) {
                    stack.extend(n.iter().copied());
                }
            }
        }
    }
    on_cycle
}
