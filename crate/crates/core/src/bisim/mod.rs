//! Symbolic timed (bi)simulation over the two composite zone-history
//! graphs of a pair of automata.

mod par;
mod verdict;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dbm::Span;
use crate::history::{compare_within, Containment, HistoryBound};
use crate::model::{Action, TimedAutomaton};
use crate::zhg::{build_composite_pair, CompositeGraph, GraphConfig, GraphError, Mode, Side, View};

pub use par::Parallelism;
pub use verdict::{Counterexample, CounterexampleStep, Failure, StateRef, VERDICT_SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "sim")]
    Simulation,
    #[serde(rename = "bisim")]
    Bisimulation,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Simulation => "simulation",
            Kind::Bisimulation => "bisimulation",
        })
    }
}

/// Order used on residence spans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidenceOrder {
    /// Relative length.
    #[default]
    Length,
    /// Endpoint containment.
    Containment,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub graph: GraphConfig,
    pub kind: Kind,
    pub residence: ResidenceOrder,
    pub parallelism: Parallelism,
    /// Limit on state pairs explored by the game.
    pub max_pairs: usize,
}

pub const DEFAULT_MAX_PAIRS: usize = 20_000_000;

impl CheckConfig {
    pub fn new(bound: HistoryBound, mode: Mode, kind: Kind) -> CheckConfig {
        CheckConfig {
            graph: GraphConfig::with_bound(bound, mode),
            kind,
            residence: ResidenceOrder::default(),
            parallelism: Parallelism::default(),
            max_pairs: DEFAULT_MAX_PAIRS,
        }
    }

    pub fn mode(&self) -> Mode {
        self.graph.mode
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStats {
    pub graph_states: usize,
    pub transitions: usize,
    pub cut_transitions: usize,
    pub left_states: usize,
    pub right_states: usize,
    pub pairs: usize,
    pub surviving_pairs: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub mode: Mode,
    pub kind: Kind,
    pub bound: HistoryBound,
    pub stats: CheckStats,
    /// Surviving pairs of graph state ids, when the relation holds.
    pub witness: Option<Vec<(usize, usize)>>,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
}

/// Per-view successor table: `succ[state][action]` lists targets.
struct Moves {
    succ: Vec<Vec<Vec<usize>>>,
}

struct Game<'v> {
    views: [&'v View<'v>; 2],
    /// Strong moves per view.
    strong: [Moves; 2],
    /// Defender answers per view: strong moves, or τ-closed moves in weak
    /// mode (τ may be answered by staying put).
    answer: [Moves; 2],
    /// τ-closure per view (weak mode) or the state alone.
    closure: [Vec<Vec<usize>>; 2],
    actions: usize,
}

fn action_ids(views: &[&View<'_>; 2]) -> BTreeMap<Action, usize> {
    let mut ids = BTreeMap::new();
    ids.insert(Action::Tau, 0);
    for v in views {
        for ms in &v.moves {
            for (a, _) in ms {
                let next = ids.len();
                ids.entry(a.clone()).or_insert(next);
            }
        }
    }
    ids
}

fn strong_moves(v: &View<'_>, ids: &BTreeMap<Action, usize>) -> Moves {
    let mut succ = vec![vec![Vec::new(); ids.len()]; v.len()];
    for (s, ms) in v.moves.iter().enumerate() {
        for (a, t) in ms {
            let row = &mut succ[s][ids[a]];
            if !row.contains(t) {
                row.push(*t);
            }
        }
    }
    Moves { succ }
}

fn tau_closure(m: &Moves) -> Vec<Vec<usize>> {
    (0..m.succ.len())
        .map(|s| {
            let mut seen = vec![s];
            let mut i = 0;
            while i < seen.len() {
                for &t in &m.succ[seen[i]][0] {
                    if !seen.contains(&t) {
                        seen.push(t);
                    }
                }
                i += 1;
            }
            seen.sort_unstable();
            seen
        })
        .collect()
}

fn weak_moves(m: &Moves, closure: &[Vec<usize>], actions: usize) -> Moves {
    let n = m.succ.len();
    let mut succ = vec![vec![Vec::new(); actions]; n];
    for s in 0..n {
        succ[s][0] = closure[s].clone();
        for a in 1..actions {
            let mut out: Vec<usize> = Vec::new();
            for &s1 in &closure[s] {
                for &t in &m.succ[s1][a] {
                    out.extend_from_slice(&closure[t]);
                }
            }
            out.sort_unstable();
            out.dedup();
            succ[s][a] = out;
        }
    }
    Moves { succ }
}

impl<'v> Game<'v> {
    fn new(views: [&'v View<'v>; 2], mode: Mode) -> Game<'v> {
        let ids = action_ids(&views);
        let actions = ids.len();
        let strong = [strong_moves(views[0], &ids), strong_moves(views[1], &ids)];
        let (answer, closure) = match mode {
            Mode::Strong => {
                let single = |v: &View<'_>| (0..v.len()).map(|s| vec![s]).collect::<Vec<_>>();
                (
                    [strong_moves(views[0], &ids), strong_moves(views[1], &ids)],
                    [single(views[0]), single(views[1])],
                )
            }
            Mode::Weak => {
                let c = [tau_closure(&strong[0]), tau_closure(&strong[1])];
                (
                    [weak_moves(&strong[0], &c[0], actions), weak_moves(&strong[1], &c[1], actions)],
                    c,
                )
            }
        };
        Game {
            views,
            strong,
            answer,
            closure,
            actions,
        }
    }

    /// State of `side` in pair `(p, q)`.
    fn at(p: usize, q: usize, side: Side) -> usize {
        match side {
            Side::Left => p,
            Side::Right => q,
        }
    }

    /// Residence and history conditions with `side` attacking.
    fn local_failure(&self, p: usize, q: usize, side: Side, order: ResidenceOrder) -> Option<Failure> {
        let (a, d) = (side as usize, side.other() as usize);
        let (sa, sd) = (Self::at(p, q, side), Self::at(p, q, side.other()));
        let shorter = |x: &Span, y: &Span| match order {
            ResidenceOrder::Length => x.is_no_longer_than(y),
            ResidenceOrder::Containment => x.is_inside(y),
        };
        let res = &self.views[a].residence[sa];
        if !self.closure[d][sd].iter().any(|&t| shorter(res, &self.views[d].residence[t])) {
            return Some(Failure::Residence { attacker: side });
        }
        let ha = &self.views[a].state(sa).history;
        let hd = &self.views[d].state(sd).history;
        if !compare_within(ha, hd, Containment::Weak, self.views[a].history_ceiling) {
            return Some(Failure::History { attacker: side });
        }
        None
    }

}

fn sides(kind: Kind) -> &'static [Side] {
    match kind {
        Kind::Simulation => &[Side::Left],
        Kind::Bisimulation => &[Side::Left, Side::Right],
    }
}

/// Pair ids: a dense table when the product of the view sizes is small,
/// a hash map otherwise.
enum PairIndex {
    Dense { width: usize, ids: Vec<u32> },
    Sparse(HashMap<(usize, usize), u32>),
}

const DENSE_PAIR_LIMIT: usize = 1 << 26;
const ABSENT: u32 = u32::MAX;

impl PairIndex {
    fn new(left: usize, right: usize) -> PairIndex {
        match left.checked_mul(right) {
            Some(n) if n <= DENSE_PAIR_LIMIT => PairIndex::Dense {
                width: right,
                ids: vec![ABSENT; n],
            },
            _ => PairIndex::Sparse(HashMap::new()),
        }
    }

    fn get(&self, p: usize, q: usize) -> Option<usize> {
        let id = match self {
            PairIndex::Dense { width, ids } => ids[p * width + q],
            PairIndex::Sparse(m) => *m.get(&(p, q))?,
        };
        (id != ABSENT).then_some(id as usize)
    }

    /// Id of `(p, q)`, assigning `next` when new.
    fn intern(&mut self, p: usize, q: usize, next: usize) -> (usize, bool) {
        let slot = match self {
            PairIndex::Dense { width, ids } => &mut ids[p * *width + q],
            PairIndex::Sparse(m) => m.entry((p, q)).or_insert(ABSENT),
        };
        if *slot == ABSENT {
            *slot = u32::try_from(next).expect("pair count fits in u32");
            (next, true)
        } else {
            (*slot as usize, false)
        }
    }
}

/// One attacker move from `(p, q)` with the defender's candidate answers.
struct Attack<'g> {
    side: Side,
    action: usize,
    target: usize,
    answers: &'g [usize],
}

impl Attack<'_> {
    fn pair(&self, answer: usize) -> (usize, usize) {
        match self.side {
            Side::Left => (self.target, answer),
            Side::Right => (answer, self.target),
        }
    }
}

impl<'v> Game<'v> {
    fn attacks<'g>(&'g self, p: usize, q: usize, kind: Kind) -> impl Iterator<Item = Attack<'g>> + 'g {
        sides(kind).iter().flat_map(move |&side| {
            let (a, d) = (side as usize, side.other() as usize);
            let (sa, sd) = (Self::at(p, q, side), Self::at(p, q, side.other()));
            (0..self.actions).flat_map(move |action| {
                self.strong[a].succ[sa][action].iter().map(move |&target| Attack {
                    side,
                    action,
                    target,
                    answers: &self.answer[d].succ[sd][action],
                })
            })
        })
    }
}

/// Pairs reachable from the initial pair through attacks and answers.
/// Pairs failing the local check are kept but not expanded.
struct PairSpace {
    pairs: Vec<(usize, usize)>,
    index: PairIndex,
    local: Vec<bool>,
}

impl PairSpace {
    fn explore(game: &Game<'_>, config: &CheckConfig, start: Instant) -> Result<PairSpace, GraphError> {
        let mut index = PairIndex::new(game.views[0].len(), game.views[1].len());
        index.intern(0, 0, 0);
        let mut pairs = vec![(0, 0)];
        let mut local: Vec<bool> = Vec::new();
        while local.len() < pairs.len() {
            let frontier = local.len()..pairs.len();
            let current = &pairs;
            let ok = par::map(frontier.len(), config.parallelism, |k| {
                let (p, q) = current[frontier.start + k];
                sides(config.kind)
                    .iter()
                    .all(|&s| game.local_failure(p, q, s, config.residence).is_none())
            });
            local.extend_from_slice(&ok);
            for i in frontier {
                if !local[i] {
                    continue;
                }
                if i % 4096 == 0 {
                    out_of_time(config, start)?;
                }
                let (p, q) = pairs[i];
                for attack in game.attacks(p, q, config.kind) {
                    for &u in attack.answers {
                        let (t1, t2) = attack.pair(u);
                        if index.intern(t1, t2, pairs.len()).1 {
                            if pairs.len() >= config.max_pairs {
                                return Err(GraphError::PairBudget {
                                    limit: config.max_pairs,
                                });
                            }
                            pairs.push((t1, t2));
                        }
                    }
                }
            }
        }
        Ok(PairSpace { pairs, index, local })
    }

    fn id(&self, pair: (usize, usize)) -> usize {
        self.index.get(pair.0, pair.1).expect("answer pairs of expanded pairs are interned")
    }
}

/// Greatest relation over the reachable pairs; returns the round in which
/// each pair was removed (`None` for survivors) and the number of rounds.
fn refine(
    game: &Game<'_>,
    space: &PairSpace,
    config: &CheckConfig,
    start: Instant,
) -> Result<(Vec<Option<usize>>, usize), GraphError> {
    let n = space.pairs.len();
    let mut removed: Vec<Option<usize>> = space.local.iter().map(|&ok| if ok { None } else { Some(0) }).collect();
    let mut alive = space.local.clone();
    let mut round = 0;
    loop {
        out_of_time(config, start)?;
        round += 1;
        let next = par::map(n, config.parallelism, |i| {
            if !alive[i] {
                return false;
            }
            let (p, q) = space.pairs[i];
            game.attacks(p, q, config.kind)
                .all(|at| at.answers.iter().any(|&u| alive[space.id(at.pair(u))]))
        });
        let mut changed = false;
        for i in 0..n {
            if alive[i] && !next[i] {
                removed[i] = Some(round);
                changed = true;
            }
        }
        alive = next;
        if !changed {
            return Ok((removed, round));
        }
    }
}

fn out_of_time(config: &CheckConfig, start: Instant) -> Result<(), GraphError> {
    match config.graph.timeout {
        Some(limit) if start.elapsed() > limit => Err(GraphError::Timeout {
            seconds: limit.as_secs(),
        }),
        _ => Ok(()),
    }
}

/// Decides whether `b` simulates `a` (or both directions for bisimulation)
/// on the composite zone-history graphs.
pub fn check(a: &TimedAutomaton, b: &TimedAutomaton, config: &CheckConfig) -> Result<Verdict, GraphError> {
    let start = Instant::now();
    let cg = build_composite_pair(a, b, &config.graph)?;
    decide(&cg, config, start)
}

/// Runs the game on an already built composite graph.
pub fn check_composite(cg: &CompositeGraph, config: &CheckConfig) -> Result<Verdict, GraphError> {
    decide(cg, config, Instant::now())
}

fn decide(cg: &CompositeGraph, config: &CheckConfig, start: Instant) -> Result<Verdict, GraphError> {
    let left = cg.view(Side::Left);
    let right = cg.view(Side::Right);
    let game = Game::new([&left, &right], config.mode());
    let space = PairSpace::explore(&game, config, start)?;
    let (removed, rounds) = refine(&game, &space, config, start)?;
    let holds = removed[0].is_none();
    let gs = cg.graph.stats();
    let surviving: Vec<(usize, usize)> = (0..removed.len())
        .filter(|&i| removed[i].is_none())
        .map(|i| {
            let (p, q) = space.pairs[i];
            (left.states[p], right.states[q])
        })
        .collect();
    let stats = CheckStats {
        graph_states: gs.states,
        transitions: gs.transitions,
        cut_transitions: gs.cut_transitions,
        left_states: left.len(),
        right_states: right.len(),
        pairs: removed.len(),
        surviving_pairs: surviving.len(),
        rounds,
    };
    let counterexample = (!holds).then(|| counterexample(&game, &space, &removed, config));
    Ok(Verdict {
        holds,
        mode: config.mode(),
        kind: config.kind,
        bound: config.graph.bound,
        stats,
        witness: holds.then_some(surviving),
        counterexample,
        elapsed: start.elapsed(),
    })
}

fn state_ref(view: &View<'_>, local: usize) -> StateRef {
    let id = view.states[local];
    StateRef {
        id,
        location: view.graph.location_label(view.graph.states[id].location),
    }
}

/// Distinguishing play from the initial pair: at every pair the attacker
/// picks the first move all of whose answers were removed earlier, and the
/// defender answers with the latest-removed pair.
fn counterexample(game: &Game<'_>, space: &PairSpace, removed: &[Option<usize>], config: &CheckConfig) -> Counterexample {
    let names: BTreeMap<usize, Action> = action_ids(&game.views).into_iter().map(|(a, i)| (i, a)).collect();
    let rank = |i: usize| removed[i].unwrap_or(usize::MAX);
    let mut cur = 0;
    let mut steps = Vec::new();
    let failure = loop {
        let (p, q) = space.pairs[cur];
        let round = rank(cur);
        if round == 0 {
            break sides(config.kind)
                .iter()
                .find_map(|&s| game.local_failure(p, q, s, config.residence))
                .expect("pair removed in round 0 fails locally");
        }
        let o = game
            .attacks(p, q, config.kind)
            .find(|at| at.answers.iter().all(|&u| rank(space.id(at.pair(u))) < round))
            .expect("removed pair has a winning attack");
        let best = o
            .answers
            .iter()
            .map(|&u| (u, space.id(o.pair(u))))
            .max_by_key(|&(u, j)| (rank(j), std::cmp::Reverse(u)));
        let action = names[&o.action].to_string();
        let (a, d) = (o.side as usize, o.side.other() as usize);
        steps.push(CounterexampleStep {
            attacker: o.side,
            action: action.clone(),
            attacker_target: state_ref(game.views[a], o.target),
            defender_target: best.map(|(u, _)| state_ref(game.views[d], u)),
        });
        match best {
            Some((_, j)) => cur = j,
            None => {
                break Failure::Unmatched {
                    attacker: o.side,
                    action,
                }
            }
        }
    };
    let (p, q) = space.pairs[0];
    Counterexample {
        start: (state_ref(game.views[0], p), state_ref(game.views[1], q)),
        steps,
        failure,
    }
}

/// One verdict per bound, in ascending bound order.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub verdicts: Vec<Verdict>,
    /// Bounds at which a verdict held after failing at a smaller bound.
    pub monotonicity_violations: Vec<HistoryBound>,
}

pub fn check_bounded_sweep(
    a: &TimedAutomaton,
    b: &TimedAutomaton,
    bounds: &[HistoryBound],
    config: &CheckConfig,
) -> Result<Sweep, GraphError> {
    let mut bounds = bounds.to_vec();
    bounds.sort();
    bounds.dedup();
    let mut verdicts = Vec::with_capacity(bounds.len());
    for &bound in &bounds {
        let mut c = config.clone();
        c.graph.bound = bound;
        verdicts.push(check(a, b, &c)?);
    }
    let mut violations = Vec::new();
    let mut failed = false;
    for v in &verdicts {
        if failed && v.holds {
            violations.push(v.bound);
        }
        failed |= !v.holds;
    }
    Ok(Sweep {
        verdicts,
        monotonicity_violations: violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub strong: bool,
    pub weak: bool,
}

impl Audit {
    /// Strong simulation held while weak simulation failed.
    pub fn violated(&self) -> bool {
        self.strong && !self.weak
    }
}

/// Runs strong and weak simulation at `bound`.
pub fn strong_implies_weak_audit(
    a: &TimedAutomaton,
    b: &TimedAutomaton,
    bound: HistoryBound,
    base: &CheckConfig,
) -> Result<Audit, GraphError> {
    let run = |mode| {
        let mut c = base.clone();
        c.graph.bound = bound;
        c.graph.mode = mode;
        c.kind = Kind::Simulation;
        check(a, b, &c).map(|v| v.holds)
    };
    Ok(Audit {
        strong: run(Mode::Strong)?,
        weak: run(Mode::Weak)?,
    })
}

/// Strong when neither automaton has τ-switches, weak otherwise.
pub fn default_mode(a: &TimedAutomaton, b: &TimedAutomaton) -> Mode {
    if a.has_tau() || b.has_tau() {
        Mode::Weak
    } else {
        Mode::Strong
    }
}

/// Why a counterexample does not replay.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("counterexample step {step}: {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub reason: String,
}

/// Replays `cx` on the views of `cg`: every attacker move and defender
/// answer must exist, and the last pair must fail as recorded.
pub fn replay_counterexample(cg: &CompositeGraph, config: &CheckConfig, cx: &Counterexample) -> Result<(), ReplayError> {
    let views = [cg.view(Side::Left), cg.view(Side::Right)];
    let game = Game::new([&views[0], &views[1]], config.mode());
    let ids = action_ids(&game.views);
    let local = |side: Side, r: &StateRef| views[side as usize].states.binary_search(&r.id).ok();
    let fail = |step: usize, reason: &str| ReplayError {
        step,
        reason: reason.to_string(),
    };
    if local(Side::Left, &cx.start.0) != Some(0) || local(Side::Right, &cx.start.1) != Some(0) {
        return Err(fail(0, "does not start at the initial pair"));
    }
    let (mut p, mut q) = (0, 0);
    for (k, step) in cx.steps.iter().enumerate() {
        let side = step.attacker;
        let (a, d) = (side as usize, side.other() as usize);
        let action = if step.action == "tau" {
            Action::Tau
        } else {
            Action::visible(&step.action)
        };
        let act = *ids.get(&action).ok_or_else(|| fail(k, "unknown action"))?;
        let (sa, sd) = (Game::at(p, q, side), Game::at(p, q, side.other()));
        let t = local(side, &step.attacker_target).ok_or_else(|| fail(k, "attacker target not in view"))?;
        if !game.strong[a].succ[sa][act].contains(&t) {
            return Err(fail(k, "attacker move does not exist"));
        }
        let answers = &game.answer[d].succ[sd][act];
        match &step.defender_target {
            Some(r) => {
                let u = local(side.other(), r).ok_or_else(|| fail(k, "defender target not in view"))?;
                if !answers.contains(&u) {
                    return Err(fail(k, "defender answer does not exist"));
                }
                (p, q) = match side {
                    Side::Left => (t, u),
                    Side::Right => (u, t),
                };
            }
            None => {
                let last = k + 1 == cx.steps.len();
                let recorded = matches!(&cx.failure, Failure::Unmatched { attacker, .. } if *attacker == side);
                if !answers.is_empty() || !last || !recorded {
                    return Err(fail(k, "unanswered move is not the recorded failure"));
                }
                return Ok(());
            }
        }
    }
    let attacker = match &cx.failure {
        Failure::Residence { attacker } | Failure::History { attacker } => *attacker,
        Failure::Unmatched { .. } => return Err(fail(cx.steps.len(), "unmatched failure without an unanswered move")),
    };
    match game.local_failure(p, q, attacker, config.residence) {
        Some(f) if f == cx.failure => Ok(()),
        _ => Err(fail(cx.steps.len(), "last pair does not fail as recorded")),
    }
}
