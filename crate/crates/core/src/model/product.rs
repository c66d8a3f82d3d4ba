use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::types::{Action, Atom, ClockConstraint, Location, Switch, TimedAutomaton, HISTORY_CLOCK, REFERENCE_CLOCK};
use super::ModelError;

/// Renames clocks and location ids of `b` that collide with `a` (or with a
/// reserved name) by appending primes. Returns the pair unchanged when it
/// is already disjoint.
pub fn rename_apart(a: &TimedAutomaton, b: &TimedAutomaton) -> (TimedAutomaton, TimedAutomaton) {
    let taken_clocks: BTreeSet<&str> = a.clocks.iter().map(String::as_str).collect();
    let taken_locs: BTreeSet<&str> = a.locations.iter().map(|l| l.id.as_str()).collect();
    let own_clocks: BTreeSet<&str> = b.clocks.iter().map(String::as_str).collect();
    let own_locs: BTreeSet<&str> = b.locations.iter().map(|l| l.id.as_str()).collect();

    let mut clock_map = BTreeMap::new();
    let mut used: BTreeSet<String> = own_clocks.iter().map(|s| s.to_string()).collect();
    for c in &b.clocks {
        if taken_clocks.contains(c.as_str()) || c == HISTORY_CLOCK || c == REFERENCE_CLOCK {
            let fresh = fresh_name(c, |n| taken_clocks.contains(n) || used.contains(n));
            used.insert(fresh.clone());
            clock_map.insert(c.clone(), fresh);
        }
    }
    let mut loc_map = BTreeMap::new();
    let mut used: BTreeSet<String> = own_locs.iter().map(|s| s.to_string()).collect();
    for l in &b.locations {
        if taken_locs.contains(l.id.as_str()) {
            let fresh = fresh_name(&l.id, |n| taken_locs.contains(n) || used.contains(n));
            used.insert(fresh.clone());
            loc_map.insert(l.id.clone(), fresh);
        }
    }
    if clock_map.is_empty() && loc_map.is_empty() {
        return (a.clone(), b.clone());
    }
    let rc = |c: &String| clock_map.get(c).cloned().unwrap_or_else(|| c.clone());
    let rl = |l: &String| loc_map.get(l).cloned().unwrap_or_else(|| l.clone());
    let rcc = |cc: &ClockConstraint| ClockConstraint {
        atoms: cc
            .atoms
            .iter()
            .map(|x| Atom {
                clock: rc(&x.clock),
                ..x.clone()
            })
            .collect(),
    };
    let renamed = TimedAutomaton {
        name: b.name.clone(),
        clocks: b.clocks.iter().map(rc).collect(),
        alphabet: b.alphabet.clone(),
        locations: b
            .locations
            .iter()
            .map(|l| Location {
                id: rl(&l.id),
                invariant: rcc(&l.invariant),
            })
            .collect(),
        initial: rl(&b.initial),
        switches: b
            .switches
            .iter()
            .map(|s| Switch {
                source: rl(&s.source),
                target: rl(&s.target),
                guard: rcc(&s.guard),
                action: s.action.clone(),
                resets: s.resets.iter().map(rc).collect(),
            })
            .collect(),
    };
    (a.clone(), renamed)
}

fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = format!("{base}'");
    while taken(&name) || name == HISTORY_CLOCK || name == REFERENCE_CLOCK {
        name.push('\'');
    }
    name
}

/// Which composition rule produced a product switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProductRule {
    /// Both sides take a switch with the same visible action.
    Sync { left: usize, right: usize },
    /// The left side takes a τ-switch alone.
    LeftTau(usize),
    /// The right side takes a τ-switch alone.
    RightTau(usize),
}

/// Parallel product with provenance of every location and switch.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: TimedAutomaton,
    /// Location indices `(left, right)` of each product location.
    pub pairs: Vec<(usize, usize)>,
    /// Rule behind each product switch.
    pub rules: Vec<ProductRule>,
}

pub fn pair_id(left: &str, right: &str) -> String {
    format!("{left}.{right}")
}

fn conj(a: &ClockConstraint, b: &ClockConstraint) -> ClockConstraint {
    ClockConstraint {
        atoms: a.atoms.iter().chain(b.atoms.iter()).cloned().collect(),
    }
}

/// Synchronous product: shared visible actions synchronize, τ-switches
/// interleave. Only product locations reachable in the location graph are
/// kept.
pub fn parallel_product(a: &TimedAutomaton, b: &TimedAutomaton) -> Result<Product, ModelError> {
    if a.alphabet != b.alphabet {
        return Err(ModelError::AlphabetMismatch {
            left: a.alphabet.iter().cloned().collect(),
            right: b.alphabet.iter().cloned().collect(),
        });
    }
    if let Some(c) = a.clocks.iter().find(|c| b.clocks.contains(c)) {
        return Err(ModelError::SharedClock(c.clone()));
    }
    let ia = a.location_index(&a.initial).ok_or_else(|| ModelError::UnknownLocation(a.initial.clone()))?;
    let ib = b.location_index(&b.initial).ok_or_else(|| ModelError::UnknownLocation(b.initial.clone()))?;
    let out_a = outgoing(a)?;
    let out_b = outgoing(b)?;

    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs = vec![(ia, ib)];
    index.insert((ia, ib), 0);
    let mut queue = VecDeque::from([(ia, ib)]);
    let mut raw: Vec<((usize, usize), (usize, usize), ProductRule)> = Vec::new();
    while let Some((la, lb)) = queue.pop_front() {
        let mut moves = Vec::new();
        for &sa in &out_a[la] {
            let swa = &a.switches[sa];
            if swa.action.is_tau() {
                continue;
            }
            for &sb in &out_b[lb] {
                if b.switches[sb].action == swa.action {
                    moves.push(((tgt(a, sa), tgt(b, sb)), ProductRule::Sync { left: sa, right: sb }));
                }
            }
        }
        for &sa in &out_a[la] {
            if a.switches[sa].action.is_tau() {
                moves.push(((tgt(a, sa), lb), ProductRule::LeftTau(sa)));
            }
        }
        for &sb in &out_b[lb] {
            if b.switches[sb].action.is_tau() {
                moves.push(((la, tgt(b, sb)), ProductRule::RightTau(sb)));
            }
        }
        for (to, rule) in moves {
            if !index.contains_key(&to) {
                index.insert(to, pairs.len());
                pairs.push(to);
                queue.push_back(to);
            }
            raw.push(((la, lb), to, rule));
        }
    }

    let name_of = |(x, y): (usize, usize)| pair_id(&a.locations[x].id, &b.locations[y].id);
    let locations = pairs
        .iter()
        .map(|&(x, y)| Location {
            id: name_of((x, y)),
            invariant: conj(&a.locations[x].invariant, &b.locations[y].invariant),
        })
        .collect();
    let mut switches = Vec::new();
    let mut rules = Vec::new();
    for (from, to, rule) in raw {
        let sw = match rule {
            ProductRule::Sync { left, right } => {
                let (sa, sb) = (&a.switches[left], &b.switches[right]);
                Switch {
                    source: name_of(from),
                    target: name_of(to),
                    guard: conj(&sa.guard, &sb.guard),
                    action: sa.action.clone(),
                    resets: sa.resets.union(&sb.resets).cloned().collect(),
                }
            }
            ProductRule::LeftTau(i) | ProductRule::RightTau(i) => {
                let s = if matches!(rule, ProductRule::LeftTau(_)) { &a.switches[i] } else { &b.switches[i] };
                Switch {
                    source: name_of(from),
                    target: name_of(to),
                    guard: s.guard.clone(),
                    action: Action::Tau,
                    resets: s.resets.clone(),
                }
            }
        };
        switches.push(sw);
        rules.push(rule);
    }
    let automaton = TimedAutomaton {
        name: format!("{}x{}", a.name, b.name),
        clocks: a.clocks.iter().chain(b.clocks.iter()).cloned().collect(),
        alphabet: a.alphabet.clone(),
        locations,
        initial: name_of((ia, ib)),
        switches,
    };
    Ok(Product { automaton, pairs, rules })
}

fn tgt(ta: &TimedAutomaton, s: usize) -> usize {
    ta.location_index(&ta.switches[s].target).expect("validated target")
}

/// Switch indices by source location index.
pub(crate) fn outgoing(ta: &TimedAutomaton) -> Result<Vec<Vec<usize>>, ModelError> {
    let mut out = vec![Vec::new(); ta.locations.len()];
    for (i, s) in ta.switches.iter().enumerate() {
        let src = ta.location_index(&s.source).ok_or_else(|| ModelError::UnknownLocation(s.source.clone()))?;
        ta.location_index(&s.target).ok_or_else(|| ModelError::UnknownLocation(s.target.clone()))?;
        out[src].push(i);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::types::Relation;
    use crate::model::{parse_model, validate};

    fn split_one() -> TimedAutomaton {
        parse_model("ta a\nclocks x\nactions a\nlocation l0 initial\nswitch l0 -> l1 guard x <= 3 action a\n").unwrap()
    }

    fn split_two() -> TimedAutomaton {
        parse_model(
            "ta b\nclocks y\nactions a\nlocation m0 initial\nswitch m0 -> m1 guard y <= 2 action a\n\
             switch m0 -> m2 guard y >= 2 & y <= 3 action a\n",
        )
        .unwrap()
    }

    #[test]
    fn split_product_has_two_sync_switches() {
        let p = parallel_product(&split_one(), &split_two()).unwrap();
        let ta = &p.automaton;
        assert_eq!(ta.switches.len(), 2);
        assert!(ta.switches.iter().all(|s| s.source == "l0.m0" && s.resets.is_empty()));
        assert_eq!(
            ta.switches[0].guard.atoms,
            vec![Atom::new("x", Relation::Le, 3), Atom::new("y", Relation::Le, 2)]
        );
        assert_eq!(
            ta.switches[1].guard.atoms,
            vec![Atom::new("x", Relation::Le, 3), Atom::new("y", Relation::Ge, 2), Atom::new("y", Relation::Le, 3)]
        );
        assert!(validate(ta).is_empty());
    }

    #[test]
    fn switchless_side_contributes_only_the_other_taus() {
        let a = parse_model("ta a\nclocks x\nactions go\nlocation p initial\nswitch p -> q guard x <= 1\nswitch p -> q action go\n").unwrap();
        let b = parse_model("ta b\nclocks y\nactions go\nlocation s initial\n").unwrap();
        let p = parallel_product(&a, &b).unwrap();
        assert_eq!(p.rules, vec![ProductRule::LeftTau(0)]);
    }

    #[test]
    fn alphabet_mismatch() {
        let a = parse_model("ta a\nactions go\nlocation p initial\n").unwrap();
        let b = parse_model("ta b\nactions stop\nlocation s initial\n").unwrap();
        assert!(matches!(parallel_product(&a, &b), Err(ModelError::AlphabetMismatch { .. })));
    }

    #[test]
    fn rename_shared_clock() {
        let a = split_one();
        let mut b = split_one();
        b.name = "b".into();
        let (a2, b2) = rename_apart(&a, &b);
        assert_eq!(a2, a);
        assert_eq!(b2.clocks, vec!["x'".to_string()]);
        assert_eq!(b2.switches[0].guard.atoms[0].clock, "x'");
        assert_eq!(b2.initial, "l0'");
        assert!(validate(&b2).is_empty());
    }

    #[test]
    fn rename_disjoint_is_identity() {
        let (a, b) = rename_apart(&split_one(), &split_two());
        assert_eq!(a, split_one());
        assert_eq!(b, split_two());
    }
}
