//! Mutant corpus: every mutant is checked against its base model at a
//! range of bounds and scored against the explicit oracle.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tabisim::bisim::{check, default_mode, CheckConfig, Kind};
use tabisim::corpus::{random_automaton, GeneratorConfig};
use tabisim::history::HistoryBound;
use tabisim::model::{load_model, mutation_sites, validate, Atom, Relation, TimedAutomaton};
use tabisim::oracle::oracle_check;

pub const CORPUS_BASES: [&str; 7] = [
    "coffee.ta",
    "coffee-brew.ta",
    "deadline-c.ta",
    "deadline-a.ta",
    "split-one.ta",
    "split-two.ta",
    "split-partial.ta",
];

pub struct Instance {
    pub base: String,
    pub mutant: String,
    pub truth: Option<bool>,
    /// Per bound: `None` when the check ran out of budget.
    pub verdicts: Vec<Option<bool>>,
    /// Wall time at the timing bound for the pair and its non-deterministic
    /// counterpart, when the base is deterministic.
    pub timing: Option<(Duration, Duration)>,
}

pub struct MutantReport {
    pub bases: usize,
    pub bounds: Vec<usize>,
    pub instances: Vec<Instance>,
}

impl MutantReport {
    /// True and false positives at bound index `k` among oracle-checked
    /// instances; positive means reported bisimilar.
    pub fn positives(&self, k: usize) -> (usize, usize) {
        let mut tp = 0;
        let mut fp = 0;
        for i in &self.instances {
            if let (Some(truth), Some(Some(true))) = (i.truth, i.verdicts.get(k)) {
                if truth {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        (tp, fp)
    }

    pub fn precision(&self, k: usize) -> f64 {
        let (tp, fp) = self.positives(k);
        if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        }
    }

    pub fn median_times(&self) -> Option<(Duration, Duration)> {
        let (mut det, mut nondet): (Vec<_>, Vec<_>) = self.instances.iter().filter_map(|i| i.timing).unzip();
        if det.is_empty() {
            return None;
        }
        det.sort();
        nondet.sort();
        Some((det[det.len() / 2], nondet[nondet.len() / 2]))
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Corpus models plus deterministic random automata until the mutant count
/// reaches `min_mutants`.
pub fn bases(seed: u64, min_mutants: usize) -> Vec<(String, TimedAutomaton)> {
    let mut out: Vec<(String, TimedAutomaton)> = CORPUS_BASES
        .iter()
        .map(|f| (f.to_string(), load_model(&corpus_dir().join(f)).unwrap()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GeneratorConfig::tau_free();
    let count = |bs: &[(String, TimedAutomaton)]| bs.iter().map(|(_, t)| mutation_sites(t).len()).sum::<usize>();
    while count(&out) < min_mutants {
        let name = format!("random{}", out.len());
        let ta = random_automaton(&mut rng, &cfg, &name);
        if ta.is_deterministic() {
            out.push((name, ta));
        }
    }
    out
}

/// Splits every visible switch in two copies whose guards overlap at one
/// point of the first clock; the union of the copies is the original guard.
pub fn nondeterministic(ta: &TimedAutomaton) -> TimedAutomaton {
    let mut out = ta.clone();
    out.name = format!("{}_nd", ta.name);
    let Some(clock) = ta.clocks.first() else {
        return out;
    };
    out.switches.clear();
    for s in &ta.switches {
        if s.action.is_tau() {
            out.switches.push(s.clone());
            continue;
        }
        for op in [Relation::Le, Relation::Ge] {
            let mut c = s.clone();
            c.guard.atoms.push(Atom::new(clock, op, 1));
            out.switches.push(c);
        }
    }
    out
}

fn verdict(a: &TimedAutomaton, b: &TimedAutomaton, bound: usize) -> Option<(bool, Duration)> {
    let mut c = CheckConfig::new(HistoryBound::Finite(bound), default_mode(a, b), Kind::Bisimulation);
    c.graph.max_states = 50_000;
    c.max_pairs = 5_000_000;
    let start = Instant::now();
    match check(a, b, &c) {
        Ok(v) => Some((v.holds, start.elapsed())),
        Err(e) if e.is_budget() => None,
        Err(e) => panic!("{} vs {}: {e}", a.name, b.name),
    }
}

/// Fastest of a few runs, to damp scheduler noise.
fn timed(a: &TimedAutomaton, b: &TimedAutomaton, bound: usize) -> Option<Duration> {
    (0..3).map(|_| verdict(a, b, bound).map(|(_, t)| t)).min().flatten()
}

pub fn run(seed: u64, min_mutants: usize, bounds: &[usize], timing_bound: usize) -> MutantReport {
    let bases = bases(seed, min_mutants);
    let mut instances = Vec::new();
    for (name, base) in &bases {
        let nd_base = nondeterministic(base);
        for m in mutation_sites(base) {
            let mutant = m.apply(base).unwrap();
            if !validate(&mutant).is_empty() {
                continue;
            }
            let mode = default_mode(base, &mutant);
            let truth = oracle_check(base, &mutant, mode, Kind::Bisimulation, 1).ok();
            let verdicts = bounds.iter().map(|&b| verdict(base, &mutant, b).map(|(h, _)| h)).collect();
            let timing = if base.is_deterministic() {
                let nd_mutant = nondeterministic(&mutant);
                timed(base, &mutant, timing_bound).zip(timed(&nd_base, &nd_mutant, timing_bound))
            } else {
                None
            };
            instances.push(Instance {
                base: name.clone(),
                mutant: m.tag(),
                truth,
                verdicts,
                timing,
            });
        }
    }
    MutantReport {
        bases: bases.len(),
        bounds: bounds.to_vec(),
        instances,
    }
}
