//! Explicit discrete-time semantics with capped clock values, and exact
//! (bi)simulation on the resulting finite transition systems. Shares no
//! code with the zone engine.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::bisim::Kind;
use crate::model::{common_scale, ensure_valid, scale, Action, ClockConstraint, Constant, ModelError, TimedAutomaton};
use crate::zhg::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("explicit state budget of {limit} states exceeded")]
    StateBudget { limit: usize },
}

pub const DEFAULT_ORACLE_STATES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tau,
    Delay,
    Visible(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExplicitState {
    pub location: usize,
    /// Clock values in declaration order, capped at the cap value.
    pub valuation: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct ExplicitLts {
    pub states: Vec<ExplicitState>,
    pub initial: usize,
    pub transitions: Vec<Vec<(Label, usize)>>,
    pub cap: i64,
}

fn satisfies(cc: &ClockConstraint, clocks: &[String], u: &[i64]) -> bool {
    cc.atoms.iter().all(|a| {
        let k = clocks.iter().position(|c| c == &a.clock).expect("validated clock");
        a.op.holds(Constant::from_integer(u[k]), a.bound)
    })
}

/// Reachable part of the unit-delay transition system of `ta`, whose
/// constants must be integers no larger than `cap - 1`.
pub fn build_explicit(ta: &TimedAutomaton, cap: i64, max_states: usize) -> Result<ExplicitLts, OracleError> {
    let loc = |id: &str| ta.location_index(id).ok_or_else(|| ModelError::UnknownLocation(id.to_string()));
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); ta.locations.len()];
    for (i, s) in ta.switches.iter().enumerate() {
        out[loc(&s.source)?].push(i);
    }
    let mut states = Vec::new();
    let mut index: HashMap<ExplicitState, usize> = HashMap::new();
    let mut transitions: Vec<Vec<(Label, usize)>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: ExplicitState,
                      states: &mut Vec<ExplicitState>,
                      transitions: &mut Vec<Vec<(Label, usize)>>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, OracleError> {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        if states.len() >= max_states {
            return Err(OracleError::StateBudget { limit: max_states });
        }
        let i = states.len();
        index.insert(s.clone(), i);
        states.push(s);
        transitions.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };
    let init = ExplicitState {
        location: loc(&ta.initial)?,
        valuation: vec![0; ta.clocks.len()],
    };
    let initial = intern(init, &mut states, &mut transitions, &mut queue)?;
    while let Some(i) = queue.pop_front() {
        let s = states[i].clone();
        let mut succ = Vec::new();
        let later: Vec<i64> = s.valuation.iter().map(|v| (v + 1).min(cap)).collect();
        if satisfies(&ta.locations[s.location].invariant, &ta.clocks, &later) {
            succ.push((
                Label::Delay,
                ExplicitState {
                    location: s.location,
                    valuation: later,
                },
            ));
        }
        for &k in &out[s.location] {
            let sw = &ta.switches[k];
            if !satisfies(&sw.guard, &ta.clocks, &s.valuation) {
                continue;
            }
            let target = loc(&sw.target)?;
            let u: Vec<i64> = ta
                .clocks
                .iter()
                .zip(&s.valuation)
                .map(|(c, &v)| if sw.resets.contains(c) { 0 } else { v })
                .collect();
            if !satisfies(&ta.locations[target].invariant, &ta.clocks, &u) {
                continue;
            }
            let label = match &sw.action {
                Action::Tau => Label::Tau,
                Action::Visible(a) => Label::Visible(a.clone()),
            };
            succ.push((
                label,
                ExplicitState {
                    location: target,
                    valuation: u,
                },
            ));
        }
        for (label, t) in succ {
            let j = intern(t, &mut states, &mut transitions, &mut queue)?;
            if !transitions[i].contains(&(label.clone(), j)) {
                transitions[i].push((label, j));
            }
        }
    }
    Ok(ExplicitLts {
        states,
        initial,
        transitions,
        cap,
    })
}

/// `table[state][label]` successor lists.
type Table = Vec<Vec<Vec<usize>>>;

fn table(l: &ExplicitLts, ids: &BTreeMap<Label, usize>) -> Table {
    let mut t = vec![vec![Vec::new(); ids.len()]; l.states.len()];
    for (s, ts) in l.transitions.iter().enumerate() {
        for (label, d) in ts {
            t[s][ids[label]].push(*d);
        }
    }
    t
}

/// τ*·a·τ* for visible actions and delays, τ* for τ.
fn saturate(t: &Table, tau: usize) -> Table {
    let n = t.len();
    let closure: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            let mut out = Vec::new();
            while let Some(x) = stack.pop() {
                out.push(x);
                for &y in &t[x][tau] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    let labels = t.first().map_or(0, Vec::len);
    (0..n)
        .map(|s| {
            (0..labels)
                .map(|a| {
                    if a == tau {
                        return closure[s].clone();
                    }
                    let mut out = Vec::new();
                    for &x in &closure[s] {
                        for &y in &t[x][a] {
                            out.extend_from_slice(&closure[y]);
                        }
                    }
                    out.sort_unstable();
                    out.dedup();
                    out
                })
                .collect()
        })
        .collect()
}

/// Whether `l2` simulates `l1` (both directions for bisimulation) from
/// their initial states.
pub fn explicit_bisim(l1: &ExplicitLts, l2: &ExplicitLts, mode: Mode, kind: Kind) -> bool {
    let mut ids: BTreeMap<Label, usize> = BTreeMap::new();
    for l in [l1, l2] {
        for ts in &l.transitions {
            for (label, _) in ts {
                let n = ids.len();
                ids.entry(label.clone()).or_insert(n);
            }
        }
    }
    let tau_id = {
        let n = ids.len();
        *ids.entry(Label::Tau).or_insert(n)
    };
    let (t1, t2) = (table(l1, &ids), table(l2, &ids));
    let (a1, a2) = match mode {
        Mode::Strong => (t1.clone(), t2.clone()),
        Mode::Weak => (saturate(&t1, tau_id), saturate(&t2, tau_id)),
    };
    let (n1, n2) = (t1.len(), t2.len());
    let mut rel = vec![true; n1 * n2];
    let labels = ids.len();
    loop {
        let mut changed = false;
        for s in 0..n1 {
            for t in 0..n2 {
                if !rel[s * n2 + t] {
                    continue;
                }
                let forward = (0..labels)
                    .all(|a| t1[s][a].iter().all(|&s2| a2[t][a].iter().any(|&t2x| rel[s2 * n2 + t2x])));
                let backward = kind == Kind::Simulation
                    || (0..labels).all(|a| t2[t][a].iter().all(|&t2x| a1[s][a].iter().any(|&s2| rel[s2 * n2 + t2x])));
                if !(forward && backward) {
                    rel[s * n2 + t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    rel[l1.initial * n2 + l2.initial]
}

/// Scales both automata to integer constants and decides the relation on
/// their explicit systems, capping clocks at the largest constant plus
/// `cap_margin`.
pub fn oracle_check(
    a: &TimedAutomaton,
    b: &TimedAutomaton,
    mode: Mode,
    kind: Kind,
    cap_margin: i64,
) -> Result<bool, OracleError> {
    ensure_valid(a)?;
    ensure_valid(b)?;
    let f = common_scale([a, b]);
    let (a, b) = (scale(a, f), scale(b, f));
    let k = a
        .global_max_constant()
        .max(b.global_max_constant())
        .to_integer();
    let cap = k + cap_margin;
    let l1 = build_explicit(&a, cap, DEFAULT_ORACLE_STATES)?;
    let l2 = build_explicit(&b, cap, DEFAULT_ORACLE_STATES)?;
    Ok(explicit_bisim(&l1, &l2, mode, kind))
}
