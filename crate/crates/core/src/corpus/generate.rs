use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    mutation_sites, validate, Action, Atom, ClockConstraint, Location, Mutation, Relation, Switch, TimedAutomaton,
};

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub locations: (usize, usize),
    pub clocks: (usize, usize),
    pub max_constant: i64,
    pub switches: (usize, usize),
    pub tau_probability: f64,
    pub reset_probability: f64,
    pub invariant_probability: f64,
    pub alphabet: Vec<String>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            locations: (2, 4),
            clocks: (1, 2),
            max_constant: 3,
            switches: (2, 6),
            tau_probability: 0.2,
            reset_probability: 0.5,
            invariant_probability: 0.3,
            alphabet: vec!["a".into(), "b".into()],
        }
    }
}

impl GeneratorConfig {
    /// Same shape without τ-switches.
    pub fn tau_free() -> GeneratorConfig {
        GeneratorConfig {
            tau_probability: 0.0,
            ..GeneratorConfig::default()
        }
    }
}

const RELATIONS: [Relation; 4] = [Relation::Lt, Relation::Le, Relation::Ge, Relation::Gt];

fn random_guard(rng: &mut impl Rng, clocks: &[String], max: i64) -> ClockConstraint {
    let n = rng.gen_range(0..=2);
    let atoms = (0..n)
        .map(|_| {
            let clock = clocks.choose(rng).expect("at least one clock");
            Atom::new(clock, *RELATIONS.choose(rng).unwrap(), rng.gen_range(0..=max))
        })
        .collect();
    ClockConstraint::of(atoms)
}

fn random_invariant(rng: &mut impl Rng, clocks: &[String], cfg: &GeneratorConfig) -> ClockConstraint {
    if !rng.gen_bool(cfg.invariant_probability) {
        return ClockConstraint::truth();
    }
    let clock = clocks.choose(rng).unwrap();
    let v = rng.gen_range(0..=cfg.max_constant);
    let op = if v > 0 && rng.gen_bool(0.5) { Relation::Lt } else { Relation::Le };
    ClockConstraint::of(vec![Atom::new(clock, op, v)])
}

/// One random automaton; retries until it passes validation.
pub fn random_automaton(rng: &mut impl Rng, cfg: &GeneratorConfig, name: &str) -> TimedAutomaton {
    loop {
        let n_loc = rng.gen_range(cfg.locations.0..=cfg.locations.1);
        let n_clk = rng.gen_range(cfg.clocks.0..=cfg.clocks.1);
        let n_sw = rng.gen_range(cfg.switches.0..=cfg.switches.1);
        let clocks: Vec<String> = ["x", "y", "z", "w"][..n_clk].iter().map(|s| s.to_string()).collect();
        let locations: Vec<Location> = (0..n_loc)
            .map(|i| Location {
                id: format!("q{i}"),
                invariant: random_invariant(rng, &clocks, cfg),
            })
            .collect();
        let switches = (0..n_sw)
            .map(|_| {
                let action = if rng.gen_bool(cfg.tau_probability) {
                    Action::Tau
                } else {
                    Action::Visible(cfg.alphabet.choose(rng).unwrap().clone())
                };
                Switch {
                    source: locations.choose(rng).unwrap().id.clone(),
                    target: locations.choose(rng).unwrap().id.clone(),
                    guard: random_guard(rng, &clocks, cfg.max_constant),
                    action,
                    resets: clocks.iter().filter(|_| rng.gen_bool(cfg.reset_probability)).cloned().collect(),
                }
            })
            .collect();
        let ta = TimedAutomaton {
            name: name.to_string(),
            clocks,
            alphabet: cfg.alphabet.iter().cloned().collect(),
            initial: "q0".into(),
            locations,
            switches,
        };
        if validate(&ta).is_empty() {
            return ta;
        }
    }
}

/// A behavior-preserving copy: clocks and locations renamed, locations and
/// switches permuted.
pub fn renamed_copy(rng: &mut impl Rng, ta: &TimedAutomaton) -> TimedAutomaton {
    let rc = |c: &str| format!("{c}c");
    let rl = |l: &str| format!("{l}c");
    let mut out = ta.clone();
    out.name = format!("{}_copy", ta.name);
    out.clocks = ta.clocks.iter().map(|c| rc(c)).collect();
    let fix = |cc: &ClockConstraint| ClockConstraint {
        atoms: cc
            .atoms
            .iter()
            .map(|a| Atom {
                clock: rc(&a.clock),
                ..a.clone()
            })
            .collect(),
    };
    out.locations = ta
        .locations
        .iter()
        .map(|l| Location {
            id: rl(&l.id),
            invariant: fix(&l.invariant),
        })
        .collect();
    out.locations.shuffle(rng);
    out.initial = rl(&ta.initial);
    out.switches = ta
        .switches
        .iter()
        .map(|s| Switch {
            source: rl(&s.source),
            target: rl(&s.target),
            guard: fix(&s.guard),
            action: s.action.clone(),
            resets: s.resets.iter().map(|c| rc(c)).collect::<BTreeSet<_>>(),
        })
        .collect();
    out.switches.shuffle(rng);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairOrigin {
    RenamedCopy,
    Mutant(Mutation),
    Independent,
}

#[derive(Clone, Debug)]
pub struct RandomPair {
    pub left: TimedAutomaton,
    pub right: TimedAutomaton,
    pub origin: PairOrigin,
}

/// Pairs in rotation: renamed copy, single mutant, independent automaton.
pub fn random_pairs(seed: u64, count: usize, cfg: &GeneratorConfig) -> Vec<RandomPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let left = random_automaton(&mut rng, cfg, &format!("r{}", out.len()));
        let pair = match out.len() % 3 {
            0 => Some(RandomPair {
                right: renamed_copy(&mut rng, &left),
                left,
                origin: PairOrigin::RenamedCopy,
            }),
            1 => {
                let sites = mutation_sites(&left);
                let m = *sites.choose(&mut rng).expect("generated automata have switches");
                let right = m.apply(&left).expect("site is valid");
                validate(&right).is_empty().then_some(RandomPair {
                    left,
                    right,
                    origin: PairOrigin::Mutant(m),
                })
            }
            _ => Some(RandomPair {
                right: random_automaton(&mut rng, cfg, &format!("r{}b", out.len())),
                left,
                origin: PairOrigin::Independent,
            }),
        };
        out.extend(pair);
    }
    out
}
