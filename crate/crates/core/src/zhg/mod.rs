//! Zone-history graphs: symbolic exploration with history-based loop
//! cutting, for single automata and for pairs (composite graphs).

mod composite;
mod dot;
mod explore;
mod prepare;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dbm::{Dbm, Span, TimeDomain};
use crate::history::{HistoryBound, ZoneHistory};
use crate::model::{Action, ClockMap, CompiledTa, ModelError, TimedAutomaton};

pub use composite::{build_composite, build_composite_pair, CompositeGraph, View};
pub use explore::successor;
pub use prepare::{prepare_pair, prepare_single, Prepared, PreparedPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Weak,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct GraphConfig {
    pub bound: HistoryBound,
    /// Strong mode restarts χ and records a history element at every step;
    /// weak mode does so only at visible steps.
    pub mode: Mode,
    pub max_states: usize,
    pub timeout: Option<Duration>,
    pub domain: TimeDomain,
    /// Ceiling of χ for k-normalization; defaults to the largest constant
    /// of the input automata.
    pub history_ceiling: Option<i32>,
    /// Conjoin the frozen side's invariant on exclusive moves.
    pub conjoin_frozen_invariant: bool,
    pub cut: CutPolicy,
}

/// When exploration redirects successors to states with cut-equal
/// histories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutPolicy {
    /// Only without a history bound. Truncation alone keeps bounded graphs
    /// finite, and redirects there merge states whose histories differ.
    #[default]
    UnboundedOnly,
    Always,
    /// Never redirect; exploration of unbounded histories may then only
    /// stop at the state budget.
    Never,
}

impl CutPolicy {
    pub fn applies(self, bound: HistoryBound) -> bool {
        match self {
            CutPolicy::UnboundedOnly => bound == HistoryBound::Unbounded,
            CutPolicy::Always => true,
            CutPolicy::Never => false,
        }
    }
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            bound: HistoryBound::Finite(3),
            mode: Mode::Strong,
            max_states: DEFAULT_MAX_STATES,
            timeout: None,
            domain: TimeDomain::Discrete,
            history_ceiling: None,
            conjoin_frozen_invariant: false,
            cut: CutPolicy::default(),
        }
    }
}

impl GraphConfig {
    pub fn with_bound(bound: HistoryBound, mode: Mode) -> GraphConfig {
        GraphConfig {
            bound,
            mode,
            ..GraphConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("state budget of {limit} states exceeded")]
    StateBudget { limit: usize },
    #[error("time budget of {seconds}s exceeded")]
    Timeout { seconds: u64 },
    #[error("pair budget of {limit} state pairs exceeded")]
    PairBudget { limit: usize },
}

impl GraphError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            GraphError::StateBudget { .. } | GraphError::Timeout { .. } | GraphError::PairBudget { .. }
        )
    }
}

/// Location part of a symbolic state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLocation {
    Single(usize),
    Product(usize, usize),
    /// Only `side` moves from here on; the other location stays frozen.
    Detached(Side, usize, usize),
}

impl StateLocation {
    /// Location index of `side`; single-automaton states answer for both.
    pub fn of(self, side: Side) -> usize {
        match (self, side) {
            (StateLocation::Single(l), _) => l,
            (StateLocation::Product(l, _) | StateLocation::Detached(_, l, _), Side::Left) => l,
            (StateLocation::Product(_, r) | StateLocation::Detached(_, _, r), Side::Right) => r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicState {
    pub location: StateLocation,
    pub zone: Dbm,
    pub history: ZoneHistory,
}

/// Origin of a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Switch(usize),
    Sync(usize, usize),
    LeftTau(usize),
    RightTau(usize),
    /// A move of one side that the product does not cover.
    Exclusive(Side, usize),
    /// A move of one side from a detached state.
    Own(Side, usize),
}

impl EdgeKind {
    /// Whether the edge belongs to the composite graph of `side`.
    pub fn in_view(self, side: Side) -> bool {
        match self {
            EdgeKind::Switch(_) | EdgeKind::Sync(..) | EdgeKind::LeftTau(_) | EdgeKind::RightTau(_) => true,
            EdgeKind::Exclusive(s, _) | EdgeKind::Own(s, _) => s == side,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub action: Action,
    pub kind: EdgeKind,
    /// The target was reached by redirecting to an existing state.
    pub cut: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub states: usize,
    pub transitions: usize,
    pub cut_transitions: usize,
}

/// A finite zone-history graph. State 0 is the initial state; ids follow
/// discovery order.
#[derive(Clone, Debug)]
pub struct ZoneHistoryGraph {
    pub states: Vec<SymbolicState>,
    pub edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    pub clocks: ClockMap,
    /// Location names of the left (or only) and right automaton.
    pub location_names: [Vec<String>; 2],
}

impl ZoneHistoryGraph {
    fn new(
        states: Vec<SymbolicState>,
        edges: Vec<Edge>,
        clocks: ClockMap,
        location_names: [Vec<String>; 2],
    ) -> ZoneHistoryGraph {
        let mut out = vec![Vec::new(); states.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        ZoneHistoryGraph {
            states,
            edges,
            out,
            clocks,
            location_names,
        }
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[state].iter().map(move |&e| &self.edges[e])
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            states: self.states.len(),
            transitions: self.edges.len(),
            cut_transitions: self.edges.iter().filter(|e| e.cut).count(),
        }
    }

    pub fn location_label(&self, loc: StateLocation) -> String {
        let [l, r] = &self.location_names;
        match loc {
            StateLocation::Single(x) => l[x].clone(),
            StateLocation::Product(x, y) => format!("{}.{}", l[x], r[y]),
            StateLocation::Detached(side, x, y) => format!("{}.{}[{side}]", l[x], r[y]),
        }
    }

    /// Histories of all `action`-successors of `state`.
    pub fn histories_of(&self, state: usize, action: &Action) -> Vec<&ZoneHistory> {
        let mut out: Vec<&ZoneHistory> = Vec::new();
        for e in self.outgoing(state).filter(|e| &e.action == action) {
            let h = &self.states[e.target].history;
            if !out.contains(&h) {
                out.push(h);
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        dot::render(self)
    }
}

/// Ceilings for k-normalization: per-clock maximal constants, then χ.
pub fn ceilings(automata: &[&CompiledTa], clocks: &ClockMap, history_ceiling: Option<i32>) -> Vec<i32> {
    let mut c = vec![0; clocks.dim()];
    for ta in automata {
        let constraints = ta
            .locations
            .iter()
            .flat_map(|l| l.invariant.iter())
            .chain(ta.switches.iter().flat_map(|s| s.guard.iter()));
        for k in constraints {
            let clock = if k.i == 0 { k.j } else { k.i };
            let v = k.bound.value().unwrap_or(0).abs();
            c[clock] = c[clock].max(v);
        }
    }
    let global = c.iter().copied().max().unwrap_or(0);
    c[clocks.history()] = history_ceiling.unwrap_or(global);
    c
}

/// The zone-history graph of a single automaton.
pub fn build_graph(ta: &TimedAutomaton, config: &GraphConfig) -> Result<ZoneHistoryGraph, GraphError> {
    let p = prepare_single(ta, config)?;
    explore::build_single(&p, config)
}

/// χ-span of `zone↑ ∧ invariant`: how long the state may be resided in.
pub fn residence(zone: &Dbm, invariant: &[crate::dbm::Constraint]) -> Span {
    let d = zone.up().and_constraints(invariant);
    d.span_or_empty(d.history_clock())
}
