use std::collections::{HashMap, HashSet, VecDeque};

use super::explore::{advance, explore, initial_state, restarts, Move};
use super::{
    residence, prepare_pair, EdgeKind, GraphConfig, GraphError, Mode, PreparedPair, Side, StateLocation, SymbolicState,
    ZoneHistoryGraph,
};
use crate::dbm::{Bound, Constraint, Dbm, Federation, Span};
use crate::history::{Step, ZoneHistory};
use crate::model::{Action, CompiledTa, TimedAutomaton};

/// One switch of the product of the two automata.
struct ProductMove {
    kind: EdgeKind,
    action: Action,
    target: (usize, usize),
    guard: Vec<Constraint>,
    source_invariant: Vec<Constraint>,
    resets: Vec<usize>,
    target_invariant: Vec<Constraint>,
}

impl ProductMove {
    fn step(&self) -> Step<'_> {
        Step {
            guard: &self.guard,
            source_invariant: &self.source_invariant,
            resets: &self.resets,
            target_invariant: &self.target_invariant,
        }
    }
}

/// Invariant `inv` pulled back through resetting `resets`: atoms on reset
/// clocks are decided at zero. `None` if some atom fails there.
fn pull_back(inv: &[Constraint], resets: &[usize]) -> Option<Vec<Constraint>> {
    let mut out = Vec::with_capacity(inv.len());
    for c in inv {
        if resets.contains(&c.i) || resets.contains(&c.j) {
            if c.bound < Bound::LE_ZERO {
                return None;
            }
        } else {
            out.push(*c);
        }
    }
    Some(out)
}

/// Valuations (with the delay already taken) from which `step` can fire and
/// land inside the target invariant.
fn pre_set(zone: &Dbm, step: &Step<'_>) -> Dbm {
    match pull_back(step.target_invariant, step.resets) {
        Some(wp) => step.apply_before_reset(zone).and_constraints(&wp),
        None => Dbm::empty(zone.dim(), zone.domain()),
    }
}

struct Semantics<'p> {
    p: &'p PreparedPair,
    config: &'p GraphConfig,
    moves: HashMap<(usize, usize), Vec<ProductMove>>,
}

impl<'p> Semantics<'p> {
    fn ta(&self, side: Side) -> &'p CompiledTa {
        match side {
            Side::Left => &self.p.left,
            Side::Right => &self.p.right,
        }
    }

    fn free_side(&self, d: &mut Dbm, side: Side) {
        for &c in &self.ta(side).clocks {
            d.free_clock(c);
        }
    }

    fn product_moves(&mut self, l: usize, r: usize) -> &'_ [ProductMove] {
        let (a, b) = (&self.p.left, &self.p.right);
        self.moves.entry((l, r)).or_insert_with(|| {
            let joint = |x: &[Constraint], y: &[Constraint]| x.iter().chain(y).copied().collect::<Vec<_>>();
            let mut out = Vec::new();
            for &sa in &a.out[l] {
                let swa = &a.switches[sa];
                if swa.action.is_tau() {
                    continue;
                }
                for &sb in &b.out[r] {
                    let swb = &b.switches[sb];
                    if swb.action != swa.action {
                        continue;
                    }
                    out.push(ProductMove {
                        kind: EdgeKind::Sync(sa, sb),
                        action: swa.action.clone(),
                        target: (swa.target, swb.target),
                        guard: joint(&swa.guard, &swb.guard),
                        source_invariant: joint(&a.locations[l].invariant, &b.locations[r].invariant),
                        resets: joint_resets(&swa.resets, &swb.resets),
                        target_invariant: joint(
                            &a.locations[swa.target].invariant,
                            &b.locations[swb.target].invariant,
                        ),
                    });
                }
            }
            for &sa in &a.out[l] {
                let sw = &a.switches[sa];
                if sw.action.is_tau() {
                    out.push(ProductMove {
                        kind: EdgeKind::LeftTau(sa),
                        action: Action::Tau,
                        target: (sw.target, r),
                        guard: sw.guard.clone(),
                        source_invariant: joint(&a.locations[l].invariant, &b.locations[r].invariant),
                        resets: sw.resets.clone(),
                        target_invariant: joint(&a.locations[sw.target].invariant, &b.locations[r].invariant),
                    });
                }
            }
            for &sb in &b.out[r] {
                let sw = &b.switches[sb];
                if sw.action.is_tau() {
                    out.push(ProductMove {
                        kind: EdgeKind::RightTau(sb),
                        action: Action::Tau,
                        target: (l, sw.target),
                        guard: sw.guard.clone(),
                        source_invariant: joint(&a.locations[l].invariant, &b.locations[r].invariant),
                        resets: sw.resets.clone(),
                        target_invariant: joint(&a.locations[l].invariant, &b.locations[sw.target].invariant),
                    });
                }
            }
            out
        })
    }

    /// Step of one side alone, with `frozen` the other side's location.
    fn own_step(&self, side: Side, switch: usize, frozen: usize) -> (Vec<Constraint>, Vec<Constraint>) {
        let ta = self.ta(side);
        let sw = &ta.switches[switch];
        let mut src = ta.locations[sw.source].invariant.clone();
        let mut tgt = ta.locations[sw.target].invariant.clone();
        if self.config.conjoin_frozen_invariant {
            let inv = &self.ta(side.other()).locations[frozen].invariant;
            src.extend_from_slice(inv);
            tgt.extend_from_slice(inv);
        }
        (src, tgt)
    }

    fn detached_successor(
        &self,
        z: &SymbolicState,
        side: Side,
        switch: usize,
        frozen: usize,
        step: &Step<'_>,
    ) -> Option<SymbolicState> {
        let sw = &self.ta(side).switches[switch];
        let (mut zone, history) = advance(
            &z.zone,
            &z.history,
            step,
            restarts(self.config.mode, &sw.action),
            self.config,
            &self.p.ceilings,
        )?;
        self.free_side(&mut zone, side.other());
        // Freeing keeps bounds implied through the frozen clocks.
        let zone = zone.k_normalize(&self.p.ceilings);
        let elements = history
            .elements()
            .iter()
            .map(|e| {
                let mut e = e.clone();
                self.free_side(&mut e, side.other());
                e.k_normalize(&self.p.ceilings)
            })
            .collect();
        let location = match side {
            Side::Left => StateLocation::Detached(side, sw.target, frozen),
            Side::Right => StateLocation::Detached(side, frozen, sw.target),
        };
        Some(SymbolicState {
            location,
            zone,
            history: ZoneHistory::from_elements(elements),
        })
    }

    /// Pre-sets of the product moves labeled `action` from `(l, r, zone)`;
    /// in weak mode also from every state the other side reaches by its own
    /// τ-steps, projected onto the clocks of `side` and χ.
    fn cover(&mut self, side: Side, l: usize, r: usize, zone: &Dbm, action: &Action) -> Federation {
        let mut cover = Federation::empty(zone.dim(), zone.domain());
        let hidden = &self.ta(side.other()).clocks;
        if self.config.mode == Mode::Strong {
            for m in self.product_moves(l, r) {
                if &m.action == action {
                    cover.push(pre_set(zone, &m.step()));
                }
            }
            return cover;
        }
        let ceilings = &self.p.ceilings;
        let mut seen: HashSet<(usize, usize, Dbm)> = HashSet::new();
        let mut queue = VecDeque::from([(l, r, zone.clone())]);
        seen.insert((l, r, zone.clone()));
        while let Some((l, r, d)) = queue.pop_front() {
            let mut next = Vec::new();
            for m in self.product_moves(l, r) {
                if &m.action == action {
                    let mut pre = pre_set(&d, &m.step());
                    for &c in hidden {
                        pre.free_clock(c);
                    }
                    cover.push(pre);
                }
                let other_tau = match (side, m.kind) {
                    (Side::Left, EdgeKind::RightTau(_)) | (Side::Right, EdgeKind::LeftTau(_)) => true,
                    _ => false,
                };
                if other_tau {
                    let d2 = m.step().apply(&d);
                    if !d2.is_empty() {
                        next.push((m.target.0, m.target.1, d2.k_normalize(ceilings)));
                    }
                }
            }
            for s in next {
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        cover
    }

    fn expand(&mut self, z: &SymbolicState, out: &mut Vec<Move>) {
        match z.location {
            StateLocation::Product(l, r) => {
                let n = self.product_moves(l, r).len();
                for i in 0..n {
                    let m = &self.moves[&(l, r)][i];
                    if let Some((zone, history)) = advance(
                        &z.zone,
                        &z.history,
                        &m.step(),
                        restarts(self.config.mode, &m.action),
                        self.config,
                        &self.p.ceilings,
                    ) {
                        out.push(Move {
                            action: m.action.clone(),
                            kind: m.kind,
                            state: SymbolicState {
                                location: StateLocation::Product(m.target.0, m.target.1),
                                zone,
                                history,
                            },
                        });
                    }
                }
                for side in [Side::Left, Side::Right] {
                    let (own, frozen) = match side {
                        Side::Left => (l, r),
                        Side::Right => (r, l),
                    };
                    for &s in &self.ta(side).out[own] {
                        let sw = &self.ta(side).switches[s];
                        let (src, tgt) = self.own_step(side, s, frozen);
                        let step = Step {
                            guard: &sw.guard,
                            source_invariant: &src,
                            resets: &sw.resets,
                            target_invariant: &tgt,
                        };
                        let mut own_pre = pre_set(&z.zone, &step);
                        if own_pre.is_empty() {
                            continue;
                        }
                        if self.config.mode == Mode::Weak {
                            self.free_side(&mut own_pre, side.other());
                        }
                        let action = sw.action.clone();
                        if self.cover(side, l, r, &z.zone, &action).covers(&own_pre) {
                            continue;
                        }
                        if let Some(state) = self.detached_successor(z, side, s, frozen, &step) {
                            out.push(Move {
                                action,
                                kind: EdgeKind::Exclusive(side, s),
                                state,
                            });
                        }
                    }
                }
            }
            StateLocation::Detached(side, l, r) => {
                let (own, frozen) = match side {
                    Side::Left => (l, r),
                    Side::Right => (r, l),
                };
                for &s in &self.ta(side).out[own] {
                    let sw = &self.ta(side).switches[s];
                    let (src, tgt) = self.own_step(side, s, frozen);
                    let step = Step {
                        guard: &sw.guard,
                        source_invariant: &src,
                        resets: &sw.resets,
                        target_invariant: &tgt,
                    };
                    if let Some(state) = self.detached_successor(z, side, s, frozen, &step) {
                        out.push(Move {
                            action: sw.action.clone(),
                            kind: EdgeKind::Own(side, s),
                            state,
                        });
                    }
                }
            }
            StateLocation::Single(_) => unreachable!("composite exploration has no single-automaton states"),
        }
    }
}

fn joint_resets(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut r: Vec<usize> = a.iter().chain(b).copied().collect();
    r.sort_unstable();
    r.dedup();
    r
}

/// The composite graphs of both automata with respect to each other,
/// explored together: the product states are shared and each side adds
/// its exclusive moves.
#[derive(Clone, Debug)]
pub struct CompositeGraph {
    pub graph: ZoneHistoryGraph,
    pub prepared: PreparedPair,
    pub config: GraphConfig,
}

pub fn build_composite_pair(
    a: &TimedAutomaton,
    b: &TimedAutomaton,
    config: &GraphConfig,
) -> Result<CompositeGraph, GraphError> {
    let p = prepare_pair(a, b, config)?;
    let graph = build_from_prepared(&p, config)?;
    Ok(CompositeGraph {
        graph,
        prepared: p,
        config: config.clone(),
    })
}

fn build_from_prepared(p: &PreparedPair, config: &GraphConfig) -> Result<ZoneHistoryGraph, GraphError> {
    let mut sem = Semantics {
        p,
        config,
        moves: HashMap::new(),
    };
    let init = initial_state(
        StateLocation::Product(p.left.initial, p.right.initial),
        p.clocks.names.len(),
        config,
    );
    let (states, edges) = explore(init, config, |z, out| sem.expand(z, out))?;
    Ok(ZoneHistoryGraph::new(states, edges, p.clocks.clone(), p.names.clone()))
}

/// The composite zone-history graph of `a` with respect to `b`.
pub fn build_composite(a: &TimedAutomaton, b: &TimedAutomaton, config: &GraphConfig) -> Result<ZoneHistoryGraph, GraphError> {
    let c = build_composite_pair(a, b, config)?;
    Ok(c.view(Side::Left).to_graph())
}

/// The part of a composite exploration that belongs to one side: product
/// states, that side's detached states, and the transitions among them.
#[derive(Clone, Debug)]
pub struct View<'g> {
    pub side: Side,
    pub graph: &'g ZoneHistoryGraph,
    /// Graph ids of the view's states, ascending; index 0 is the initial
    /// state.
    pub states: Vec<usize>,
    /// Outgoing `(action, view index)` pairs per view state.
    pub moves: Vec<Vec<(Action, usize)>>,
    /// χ-span of the residence window per view state.
    pub residence: Vec<Span>,
    pub history_ceiling: i32,
}

impl CompositeGraph {
    pub fn view(&self, side: Side) -> View<'_> {
        let g = &self.graph;
        let mut local = vec![usize::MAX; g.len()];
        let mut states = Vec::new();
        for (i, s) in g.states.iter().enumerate() {
            let member = match s.location {
                StateLocation::Detached(owner, ..) => owner == side,
                _ => true,
            };
            if member {
                local[i] = states.len();
                states.push(i);
            }
        }
        let ta = match side {
            Side::Left => &self.prepared.left,
            Side::Right => &self.prepared.right,
        };
        let moves = states
            .iter()
            .map(|&i| {
                g.outgoing(i)
                    .filter(|e| e.kind.in_view(side))
                    .map(|e| (e.action.clone(), local[e.target]))
                    .collect()
            })
            .collect();
        let residence = states
            .iter()
            .map(|&i| {
                let s = &g.states[i];
                residence(&s.zone, &ta.locations[s.location.of(side)].invariant)
            })
            .collect();
        View {
            side,
            graph: g,
            states,
            moves,
            residence,
            history_ceiling: *self.prepared.ceilings.last().expect("χ has a ceiling"),
        }
    }
}

impl View<'_> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, local: usize) -> &SymbolicState {
        &self.graph.states[self.states[local]]
    }

    /// The view as a standalone graph with its own discovery-order ids.
    pub fn to_graph(&self) -> ZoneHistoryGraph {
        let mut local = vec![usize::MAX; self.graph.len()];
        for (k, &i) in self.states.iter().enumerate() {
            local[i] = k;
        }
        let states = self.states.iter().map(|&i| self.graph.states[i].clone()).collect();
        let edges = self
            .graph
            .edges
            .iter()
            .filter(|e| e.kind.in_view(self.side) && local[e.source] != usize::MAX && local[e.target] != usize::MAX)
            .map(|e| super::Edge {
                source: local[e.source],
                target: local[e.target],
                ..e.clone()
            })
            .collect();
        ZoneHistoryGraph::new(states, edges, self.graph.clocks.clone(), self.graph.location_names.clone())
    }
}
