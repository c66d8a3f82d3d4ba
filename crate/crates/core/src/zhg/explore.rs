use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::{Edge, EdgeKind, GraphConfig, GraphError, Mode, Prepared, StateLocation, SymbolicState, ZoneHistoryGraph};
use crate::dbm::Dbm;
use crate::history::{cut_equal, update_from, Step, ZoneHistory};
use crate::model::{Action, CompiledSwitch, CompiledTa};

pub(crate) struct Move {
    pub action: Action,
    pub kind: EdgeKind,
    pub state: SymbolicState,
}

/// Target zone and history of `step` from `(zone, history)`, or `None`
/// when the step is disabled. `restart` starts a fresh χ window and
/// records a history element.
pub(crate) fn advance(
    zone: &Dbm,
    history: &ZoneHistory,
    step: &Step<'_>,
    restart: bool,
    config: &GraphConfig,
    ceilings: &[i32],
) -> Option<(Dbm, ZoneHistory)> {
    let mut next = step.apply(zone);
    if next.is_empty() {
        return None;
    }
    if restart {
        next = next.restart_history();
    }
    let next = next.k_normalize(ceilings);
    let history = update_from(history, restart.then_some(zone), step, config.bound, ceilings);
    Some((next, history))
}

/// Whether a step labeled `action` restarts χ under `mode`.
pub(crate) fn restarts(mode: Mode, action: &Action) -> bool {
    mode == Mode::Strong || !action.is_tau()
}

pub(crate) fn switch_step<'a>(ta: &'a CompiledTa, sw: &'a CompiledSwitch) -> Step<'a> {
    Step {
        guard: &sw.guard,
        source_invariant: &ta.locations[sw.source].invariant,
        resets: &sw.resets,
        target_invariant: &ta.locations[sw.target].invariant,
    }
}

pub(crate) fn initial_state(location: StateLocation, clock_count: usize, config: &GraphConfig) -> SymbolicState {
    SymbolicState {
        location,
        zone: Dbm::initial_zone(clock_count, config.domain),
        history: ZoneHistory::empty(),
    }
}

/// Successor of `z` along switch `switch` of a single automaton.
pub fn successor(p: &Prepared, z: &SymbolicState, switch: usize, config: &GraphConfig) -> Option<SymbolicState> {
    let sw = &p.ta.switches[switch];
    if z.location.of(super::Side::Left) != sw.source {
        return None;
    }
    let step = switch_step(&p.ta, sw);
    let (zone, history) = advance(
        &z.zone,
        &z.history,
        &step,
        restarts(config.mode, &sw.action),
        config,
        &p.ceilings,
    )?;
    Some(SymbolicState {
        location: StateLocation::Single(sw.target),
        zone,
        history,
    })
}

pub(crate) fn build_single(p: &Prepared, config: &GraphConfig) -> Result<ZoneHistoryGraph, GraphError> {
    let init = initial_state(StateLocation::Single(p.ta.initial), p.clocks.names.len(), config);
    let (states, edges) = explore(init, config, |z, out| {
        for &s in &p.ta.out[z.location.of(super::Side::Left)] {
            if let Some(state) = successor(p, z, s, config) {
                out.push(Move {
                    action: p.ta.switches[s].action.clone(),
                    kind: EdgeKind::Switch(s),
                    state,
                });
            }
        }
    })?;
    Ok(ZoneHistoryGraph::new(
        states,
        edges,
        p.clocks.clone(),
        [p.names.clone(), Vec::new()],
    ))
}

/// Worklist exploration with history-based loop cutting.
///
/// A successor `z'` of `z` is redirected to an existing state with the same
/// location and zone as `z'` and a cut-equal history, provided `z` itself
/// has a sibling (same location and zone) whose history differs from but is
/// cut-equal to its own. The first such existing state in discovery order
/// is used.
pub(crate) fn explore(
    initial: SymbolicState,
    config: &GraphConfig,
    mut expand: impl FnMut(&SymbolicState, &mut Vec<Move>),
) -> Result<(Vec<SymbolicState>, Vec<Edge>), GraphError> {
    let start = Instant::now();
    let mut states: Vec<SymbolicState> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut by_zone: HashMap<(StateLocation, Dbm), Vec<usize>> = HashMap::new();
    let mut exact: HashMap<SymbolicState, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let cutting = config.cut.applies(config.bound);

    type Index = HashMap<(StateLocation, Dbm), Vec<usize>>;
    let add = |s: SymbolicState,
               states: &mut Vec<SymbolicState>,
               by_zone: &mut Index,
               exact: &mut HashMap<SymbolicState, usize>,
               queue: &mut VecDeque<usize>|
     -> Result<usize, GraphError> {
        if states.len() >= config.max_states {
            return Err(GraphError::StateBudget {
                limit: config.max_states,
            });
        }
        let id = states.len();
        by_zone.entry((s.location, s.zone.clone())).or_default().push(id);
        exact.insert(s.clone(), id);
        states.push(s);
        queue.push_back(id);
        Ok(id)
    };
    add(initial, &mut states, &mut by_zone, &mut exact, &mut queue)?;

    let mut moves = Vec::new();
    while let Some(z) = queue.pop_front() {
        if let Some(limit) = config.timeout {
            if start.elapsed() > limit {
                return Err(GraphError::Timeout {
                    seconds: limit.as_secs(),
                });
            }
        }
        moves.clear();
        expand(&states[z], &mut moves);
        let key = (states[z].location, states[z].zone.clone());
        for m in moves.drain(..) {
            let h = &states[z].history;
            let sibling = cutting && by_zone[&key]
                .iter()
                .any(|&o| states[o].history != *h && cut_equal(h, &states[o].history));
            let redirect = if sibling {
                by_zone
                    .get(&(m.state.location, m.state.zone.clone()))
                    .and_then(|ids| ids.iter().copied().find(|&t| cut_equal(&states[t].history, &m.state.history)))
            } else {
                None
            };
            let (target, cut) = match redirect {
                Some(t) => (t, states[t].history != m.state.history),
                None => match exact.get(&m.state) {
                    Some(&t) => (t, false),
                    None => (add(m.state, &mut states, &mut by_zone, &mut exact, &mut queue)?, false),
                },
            };
            edges.push(Edge {
                source: z,
                target,
                action: m.action,
                kind: m.kind,
                cut,
            });
        }
    }
    Ok((states, edges))
}
