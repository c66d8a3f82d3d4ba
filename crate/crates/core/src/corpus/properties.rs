use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bisim::{check, check_composite, replay_counterexample, strong_implies_weak_audit, CheckConfig, Kind};
use crate::history::HistoryBound;
use crate::model::{serialize, validate, TimedAutomaton};
use crate::oracle::oracle_check;
use crate::zhg::{build_composite_pair, Mode};

use super::generate::{random_pairs, GeneratorConfig, PairOrigin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// A symbolic rejection is confirmed by the explicit oracle.
    OracleRejection,
    /// Once rejected at some bound, rejected at every larger bound.
    Monotonicity,
    /// Strong simulation implies weak simulation.
    StrongImpliesWeak,
    Reflexivity,
    Symmetry,
    CounterexampleReplay,
}

#[derive(Clone, Debug)]
pub struct PropertyConfig {
    pub bounds: Vec<usize>,
    pub modes: Vec<Mode>,
    /// Bound for the reflexivity, symmetry and strong-implies-weak checks.
    pub audit_bound: usize,
    pub max_states: usize,
    pub max_pairs: usize,
    pub generator: GeneratorConfig,
    pub shrink: bool,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        PropertyConfig {
            bounds: vec![0, 1, 2, 3, 5],
            modes: vec![Mode::Strong, Mode::Weak],
            audit_bound: 3,
            max_states: 20_000,
            max_pairs: 2_000_000,
            generator: GeneratorConfig::default(),
            shrink: true,
        }
    }
}

impl PropertyConfig {
    fn check_config(&self, bound: usize, mode: Mode, kind: Kind) -> CheckConfig {
        let mut c = CheckConfig::new(HistoryBound::Finite(bound), mode, kind);
        c.graph.max_states = self.max_states;
        c.max_pairs = self.max_pairs;
        c
    }

    /// Twice the location count of the larger automaton.
    pub fn large_bound(left: &TimedAutomaton, right: &TimedAutomaton) -> usize {
        2 * left.locations.len().max(right.locations.len())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub property: Property,
    pub pair: usize,
    pub origin: String,
    pub mode: Mode,
    pub bound: usize,
    pub detail: String,
    /// Minimized reproducer in the text model format.
    pub left: String,
    pub right: String,
    pub shrunk_locations: usize,
}

/// Symbolic acceptance at the large bound that the oracle refutes.
#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub pair: usize,
    pub origin: String,
    pub mode: Mode,
    pub bound: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub pairs: usize,
    pub checks: usize,
    /// Checks abandoned at the state or pair budget.
    pub skipped: usize,
    pub rejections: usize,
    pub confirmed_rejections: usize,
    pub large_bound_verdicts: usize,
    pub large_bound_agreements: usize,
    pub audits: usize,
    pub violations: Vec<Violation>,
    pub findings: Vec<Finding>,
    pub elapsed: Duration,
}

impl PropertyReport {
    pub fn violations_of(&self, p: Property) -> usize {
        self.violations.iter().filter(|v| v.property == p).count()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "seed {} pairs {} checks {} skipped {}\nrejections {} confirmed {}\nlarge-bound verdicts {} agreeing {} findings {}\naudits {}\n",
            self.seed,
            self.pairs,
            self.checks,
            self.skipped,
            self.rejections,
            self.confirmed_rejections,
            self.large_bound_verdicts,
            self.large_bound_agreements,
            self.findings.len(),
            self.audits
        );
        for v in &self.violations {
            out += &format!(
                "VIOLATION {:?} pair {} ({}) {} b={}: {}\n{}\n{}\n",
                v.property, v.pair, v.origin, v.mode, v.bound, v.detail, v.left, v.right
            );
        }
        for f in &self.findings {
            out += &format!("finding: pair {} ({}) {} b={} accepted, oracle rejects\n", f.pair, f.origin, f.mode, f.bound);
        }
        out
    }
}

fn origin_name(o: &PairOrigin) -> String {
    match o {
        PairOrigin::RenamedCopy => "renamed copy".into(),
        PairOrigin::Mutant(m) => format!("mutant {}", m.tag()),
        PairOrigin::Independent => "independent".into(),
    }
}

/// Whether `property` is violated on `(a, b)` in `mode` at `bound`. Budget
/// overruns count as not violated.
fn violated(property: Property, a: &TimedAutomaton, b: &TimedAutomaton, mode: Mode, bound: usize, cfg: &PropertyConfig) -> bool {
    let holds = |x: &TimedAutomaton, y: &TimedAutomaton, bound, mode, kind| {
        check(x, y, &cfg.check_config(bound, mode, kind)).map(|v| v.holds).ok()
    };
    match property {
        Property::OracleRejection => {
            holds(a, b, bound, mode, Kind::Bisimulation) == Some(false)
                && oracle_check(a, b, mode, Kind::Bisimulation, 1).unwrap_or(false)
        }
        Property::Monotonicity => {
            (0..bound).any(|smaller| holds(a, b, smaller, mode, Kind::Bisimulation) == Some(false))
                && holds(a, b, bound, mode, Kind::Bisimulation) == Some(true)
        }
        Property::StrongImpliesWeak => strong_implies_weak_audit(a, b, HistoryBound::Finite(bound), &cfg.check_config(bound, mode, Kind::Simulation))
            .map(|x| x.violated())
            .unwrap_or(false),
        Property::Reflexivity => holds(a, a, bound, mode, Kind::Bisimulation) == Some(false),
        Property::Symmetry => match (holds(a, b, bound, mode, Kind::Bisimulation), holds(b, a, bound, mode, Kind::Bisimulation)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        },
        Property::CounterexampleReplay => {
            let c = cfg.check_config(bound, mode, Kind::Bisimulation);
            let Ok(cg) = build_composite_pair(a, b, &c.graph) else {
                return false;
            };
            match check_composite(&cg, &c) {
                Ok(v) => v
                    .counterexample
                    .is_some_and(|cx| replay_counterexample(&cg, &c, &cx).is_err()),
                Err(_) => false,
            }
        }
    }
}

/// Single-edit reductions of `ta`, each still valid.
fn reductions(ta: &TimedAutomaton) -> Vec<TimedAutomaton> {
    let mut out = Vec::new();
    for i in 0..ta.switches.len() {
        let mut t = ta.clone();
        t.switches.remove(i);
        out.push(t);
    }
    for (k, l) in ta.locations.iter().enumerate() {
        if l.id == ta.initial {
            continue;
        }
        let mut t = ta.clone();
        let id = t.locations.remove(k).id;
        t.switches.retain(|s| s.source != id && s.target != id);
        out.push(t);
    }
    for (i, s) in ta.switches.iter().enumerate() {
        for j in 0..s.guard.atoms.len() {
            let mut t = ta.clone();
            t.switches[i].guard.atoms.remove(j);
            out.push(t);
        }
        if !s.resets.is_empty() {
            let mut t = ta.clone();
            t.switches[i].resets.clear();
            out.push(t);
        }
    }
    for k in 0..ta.locations.len() {
        if !ta.locations[k].invariant.is_true() {
            let mut t = ta.clone();
            t.locations[k].invariant.atoms.clear();
            out.push(t);
        }
    }
    out.retain(|t| validate(t).is_empty());
    out
}

/// Greedy minimization: applies single-edit reductions to either side while
/// `fails` keeps holding.
pub fn shrink(
    mut a: TimedAutomaton,
    mut b: TimedAutomaton,
    fails: impl Fn(&TimedAutomaton, &TimedAutomaton) -> bool,
) -> (TimedAutomaton, TimedAutomaton) {
    'outer: loop {
        for candidate in reductions(&a) {
            if fails(&candidate, &b) {
                a = candidate;
                continue 'outer;
            }
        }
        for candidate in reductions(&b) {
            if fails(&a, &candidate) {
                b = candidate;
                continue 'outer;
            }
        }
        return (a, b);
    }
}

struct Run<'c> {
    cfg: &'c PropertyConfig,
    report: PropertyReport,
}

impl Run<'_> {
    #[allow(clippy::too_many_arguments)]
    fn violation(
        &mut self,
        property: Property,
        pair: usize,
        origin: &PairOrigin,
        a: &TimedAutomaton,
        b: &TimedAutomaton,
        mode: Mode,
        bound: usize,
        detail: String,
    ) {
        let (a, b) = if self.cfg.shrink {
            shrink(a.clone(), b.clone(), |x, y| violated(property, x, y, mode, bound, self.cfg))
        } else {
            (a.clone(), b.clone())
        };
        self.report.violations.push(Violation {
            property,
            pair,
            origin: origin_name(origin),
            mode,
            bound,
            detail,
            shrunk_locations: a.locations.len().max(b.locations.len()),
            left: serialize(&a),
            right: serialize(&b),
        });
    }

    fn check(&mut self, a: &TimedAutomaton, b: &TimedAutomaton, c: &CheckConfig) -> Option<bool> {
        self.report.checks += 1;
        match check(a, b, c) {
            Ok(v) => Some(v.holds),
            Err(e) if e.is_budget() => {
                self.report.skipped += 1;
                None
            }
            Err(e) => panic!("generated pair failed to check: {e}"),
        }
    }

    fn sweep(&mut self, i: usize, origin: &PairOrigin, a: &TimedAutomaton, b: &TimedAutomaton, mode: Mode) {
        let cfg = self.cfg;
        let oracle = oracle_check(a, b, mode, Kind::Bisimulation, 1).expect("generated pairs fit the oracle");
        let large = PropertyConfig::large_bound(a, b);
        let mut bounds = cfg.bounds.clone();
        bounds.push(large);
        bounds.sort_unstable();
        bounds.dedup();
        let mut failed_at = None;
        for bound in bounds {
            let c = cfg.check_config(bound, mode, Kind::Bisimulation);
            self.report.checks += 1;
            let (cg, v) = match build_composite_pair(a, b, &c.graph).and_then(|cg| check_composite(&cg, &c).map(|v| (cg, v))) {
                Ok(x) => x,
                Err(e) if e.is_budget() => {
                    self.report.skipped += 1;
                    break;
                }
                Err(e) => panic!("generated pair failed to check: {e}"),
            };
            if !v.holds {
                self.report.rejections += 1;
                if oracle {
                    self.violation(Property::OracleRejection, i, origin, a, b, mode, bound, "oracle holds".into());
                } else {
                    self.report.confirmed_rejections += 1;
                }
                let cx = v.counterexample.as_ref().expect("failing verdicts carry a counterexample");
                if let Err(e) = replay_counterexample(&cg, &c, cx) {
                    self.violation(Property::CounterexampleReplay, i, origin, a, b, mode, bound, e.to_string());
                }
                failed_at.get_or_insert(bound);
            } else if let Some(f) = failed_at {
                self.violation(Property::Monotonicity, i, origin, a, b, mode, bound, format!("failed at bound {f}"));
            }
            if bound == large {
                self.report.large_bound_verdicts += 1;
                if v.holds == oracle {
                    self.report.large_bound_agreements += 1;
                } else if v.holds {
                    self.report.findings.push(Finding {
                        pair: i,
                        origin: origin_name(origin),
                        mode,
                        bound,
                    });
                }
            }
        }
    }

    fn audits(&mut self, i: usize, origin: &PairOrigin, a: &TimedAutomaton, b: &TimedAutomaton, mode: Mode) {
        let cfg = self.cfg;
        let bound = cfg.audit_bound;
        let bisim = cfg.check_config(bound, mode, Kind::Bisimulation);
        if self.check(a, a, &bisim) == Some(false) {
            self.violation(Property::Reflexivity, i, origin, a, b, mode, bound, "left against itself".into());
        }
        let forward = self.check(a, b, &bisim);
        let backward = self.check(b, a, &bisim);
        if let (Some(x), Some(y)) = (forward, backward) {
            if x != y {
                self.violation(Property::Symmetry, i, origin, a, b, mode, bound, format!("forward {x}, backward {y}"));
            }
        }
    }

    fn strong_weak(&mut self, i: usize, origin: &PairOrigin, a: &TimedAutomaton, b: &TimedAutomaton) {
        let bound = self.cfg.audit_bound;
        let base = self.cfg.check_config(bound, Mode::Strong, Kind::Simulation);
        self.report.checks += 2;
        match strong_implies_weak_audit(a, b, HistoryBound::Finite(bound), &base) {
            Ok(audit) => {
                self.report.audits += 1;
                if audit.violated() {
                    self.violation(Property::StrongImpliesWeak, i, origin, a, b, Mode::Strong, bound, "weak simulation fails".into());
                }
            }
            Err(e) if e.is_budget() => self.report.skipped += 1,
            Err(e) => panic!("generated pair failed to check: {e}"),
        }
    }
}

/// Generates `count` pairs from `seed` and checks every property on each.
pub fn run_random_properties(seed: u64, count: usize, cfg: &PropertyConfig) -> PropertyReport {
    let start = Instant::now();
    let mut run = Run {
        cfg,
        report: PropertyReport {
            seed,
            ..PropertyReport::default()
        },
    };
    for (i, p) in random_pairs(seed, count, &cfg.generator).iter().enumerate() {
        run.report.pairs += 1;
        for &mode in &cfg.modes {
            run.sweep(i, &p.origin, &p.left, &p.right, mode);
            run.audits(i, &p.origin, &p.left, &p.right, mode);
        }
        run.strong_weak(i, &p.origin, &p.left, &p.right);
    }
    run.report.elapsed = start.elapsed();
    run.report
}
