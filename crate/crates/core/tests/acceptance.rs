//! Acceptance run: one PASS/FAIL line per criterion, then a non-zero exit
//! if any criterion fails outside the known findings below.

mod support;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tabisim::bisim::{check, check_composite, strong_implies_weak_audit, CheckConfig, Kind};
use tabisim::corpus::{parse_manifest, random_pairs, run_goldens, run_random_properties, Property, PropertyConfig, MANIFEST};
use tabisim::dbm::{Constraint, Dbm, TimeDomain};
use tabisim::history::{compare, cut_equal, postfix_equal, Containment, HistoryBound, ZoneHistory};
use tabisim::model::{load_model, Action, TimedAutomaton};
use tabisim::zhg::{build_composite_pair, build_graph, GraphConfig, Mode};

use support::{dbm_enum, mutants};

/// Random pairs whose oracle accepts a symbolic rejection, and pairs the
/// symbolic check accepts at the large bound while the oracle rejects. Both
/// are analysed in the README; any other discrepancy fails the run.
const KNOWN_REJECTIONS: [usize; 1] = [43];
const KNOWN_ACCEPTANCES: [usize; 2] = [61, 136];

const PROPERTY_SEED: u64 = 1;
const PROPERTY_PAIRS: usize = 200;

struct Outcome {
    criterion: usize,
    passed: bool,
    known: bool,
    summary: String,
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus(name: &str) -> TimedAutomaton {
    load_model(&corpus_dir().join(name)).unwrap()
}

fn goldens() -> Outcome {
    let start = Instant::now();
    let report = run_goldens(&corpus_dir()).unwrap();
    let elapsed = start.elapsed();
    let failed: Vec<_> = report.outcomes.iter().filter(|o| !o.passed).map(|o| o.case.name.as_str()).collect();
    Outcome {
        criterion: 1,
        passed: failed.is_empty() && elapsed < Duration::from_secs(5),
        known: false,
        summary: format!("{} cases, failed {:?}, {:.2?}", report.outcomes.len(), failed, elapsed),
    }
}

fn history(zones: &[&[Constraint]]) -> ZoneHistory {
    // Index 1 is χ.
    ZoneHistory::from_elements(zones.iter().map(|cs| Dbm::universe(2, TimeDomain::Dense).and_constraints(*cs)).collect())
}

fn span_goldens() -> Outcome {
    let (lo, up) = (Constraint::lower, Constraint::upper);
    let h = history(&[&[lo(1, 4, true)], &[lo(1, 10, false)], &[lo(1, 12, false), up(1, 42, false)]]);
    let h1 = history(&[&[lo(1, 7, true)], &[lo(1, 12, false), up(1, 42, false)]]);
    let h2 = history(&[&[lo(1, 17, false), up(1, 41, false)]]);
    let (weak, strict) = (Containment::Weak, Containment::Strict);
    let outcomes = [
        compare(&h, &h1, weak),
        compare(&h2, &h, strict),
        compare(&h2, &h1, strict),
        !compare(&h, &h2, weak),
        !compare(&h1, &h2, weak),
        !compare(&h1, &h, weak),
        cut_equal(&h, &h1),
        !postfix_equal(&h, &h1),
    ];
    let matched = outcomes.iter().filter(|&&x| x).count();
    Outcome {
        criterion: 2,
        passed: matched == outcomes.len(),
        known: false,
        summary: format!("{matched}/{} comparison outcomes match", outcomes.len()),
    }
}

fn dbm_oracle() -> Outcome {
    let reports = dbm_enum::run(7, 500);
    let passed = reports.iter().all(|r| r.instances >= 500 && r.disagreements == 0);
    let parts: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}/{}", r.op, r.instances - r.disagreements, r.instances))
        .collect();
    Outcome {
        criterion: 3,
        passed,
        known: false,
        summary: parts.join(", "),
    }
}

fn golden_pairs() -> Vec<(String, TimedAutomaton, TimedAutomaton, HistoryBound)> {
    let text = std::fs::read_to_string(corpus_dir().join(MANIFEST)).unwrap();
    parse_manifest(&text)
        .unwrap()
        .into_iter()
        .map(|c| (c.name, corpus(&c.left), corpus(&c.right), c.bound))
        .collect()
}

fn properties() -> Vec<Outcome> {
    let report = run_random_properties(PROPERTY_SEED, PROPERTY_PAIRS, &PropertyConfig::default());
    let rejection: BTreeSet<usize> = report
        .violations
        .iter()
        .filter(|v| v.property == Property::OracleRejection)
        .map(|v| v.pair)
        .collect();
    let accepted: BTreeSet<usize> = report.findings.iter().map(|f| f.pair).collect();
    let known = rejection == KNOWN_REJECTIONS.into_iter().collect()
        && accepted == KNOWN_ACCEPTANCES.into_iter().collect();
    for v in &report.violations {
        eprintln!("violation: {:?} pair {} ({}) {} b={}: {}", v.property, v.pair, v.origin, v.mode, v.bound, v.detail);
    }
    for f in &report.findings {
        eprintln!("finding: pair {} ({}) {} b={} accepted, oracle rejects", f.pair, f.origin, f.mode, f.bound);
    }
    let other = report.violations.len()
        - report.violations_of(Property::OracleRejection)
        - report.violations_of(Property::Monotonicity)
        - report.violations_of(Property::StrongImpliesWeak);
    let sound = rejection.is_empty() && report.findings.is_empty();
    let within_time = report.elapsed <= Duration::from_secs(600);
    let crit4 = Outcome {
        criterion: 4,
        passed: sound && within_time && other == 0,
        known: known && within_time && other == 0,
        summary: format!(
            "{} pairs, {} rejections ({} confirmed, unconfirmed on pairs {:?}), large bound {}/{} agree, accepted against the oracle on pairs {:?}, {} other violations, {} checks over budget, {:.1?}",
            report.pairs,
            report.rejections,
            report.confirmed_rejections,
            rejection,
            report.large_bound_agreements,
            report.large_bound_verdicts,
            accepted,
            other,
            report.skipped,
            report.elapsed
        ),
    };
    let mono = report.violations_of(Property::Monotonicity);
    let crit5 = Outcome {
        criterion: 5,
        passed: mono == 0,
        known: false,
        summary: format!("{mono} monotonicity violations"),
    };
    let mut golden_audits = 0;
    let mut golden_violations = 0;
    for (_, a, b, bound) in golden_pairs() {
        let audit = strong_implies_weak_audit(&a, &b, bound, &CheckConfig::new(bound, Mode::Strong, Kind::Simulation)).unwrap();
        golden_audits += 1;
        golden_violations += usize::from(audit.violated());
    }
    let sw = report.violations_of(Property::StrongImpliesWeak);
    let crit6 = Outcome {
        criterion: 6,
        passed: sw == 0 && golden_violations == 0,
        known: false,
        summary: format!(
            "{} random audits with {sw} violations, {golden_audits} golden audits with {golden_violations} violations",
            report.audits
        ),
    };
    vec![crit4, crit5, crit6]
}

/// The deadline loop at unbounded history closes with one cut edge back to
/// the first l1 state.
fn deadline_cut() -> bool {
    let g = build_graph(&corpus("deadline-c.ta"), &GraphConfig::with_bound(HistoryBound::Unbounded, Mode::Strong)).unwrap();
    let labels: Vec<String> = (0..g.len()).map(|s| g.location_label(g.states[s].location)).collect();
    let cuts: Vec<_> = g.edges.iter().filter(|e| e.cut).collect();
    labels == ["l0", "l1", "l2", "l0"]
        && cuts.len() == 1
        && (cuts[0].source, cuts[0].target) == (3, 1)
        && cuts[0].action == Action::visible("a")
}

fn build_all(a: &TimedAutomaton, b: &TimedAutomaton, bound: HistoryBound, built: &mut usize, errors: &mut Vec<String>, name: &str) {
    for mode in [Mode::Strong, Mode::Weak] {
        let c = GraphConfig::with_bound(bound, mode);
        let results = [
            build_graph(a, &c).map(|g| g.len()),
            build_graph(b, &c).map(|g| g.len()),
            build_composite_pair(a, b, &c).map(|cg| cg.graph.len()),
        ];
        for r in results {
            match r {
                Ok(_) => *built += 1,
                Err(e) => errors.push(format!("{name} {mode} b={bound}: {e}")),
            }
        }
    }
}

/// Every golden and random-corpus graph builds within the default state
/// budget, at every swept bound.
fn termination() -> Outcome {
    let mut built = 0;
    let mut errors = Vec::new();
    for (name, a, b, bound) in golden_pairs() {
        build_all(&a, &b, bound, &mut built, &mut errors, &name);
    }
    let cfg = PropertyConfig::default();
    for (i, p) in random_pairs(PROPERTY_SEED, PROPERTY_PAIRS, &cfg.generator).iter().enumerate() {
        let mut bounds = cfg.bounds.clone();
        bounds.push(PropertyConfig::large_bound(&p.left, &p.right));
        for b in bounds {
            build_all(&p.left, &p.right, HistoryBound::Finite(b), &mut built, &mut errors, &format!("pair {i}"));
        }
    }
    let cut = deadline_cut();
    Outcome {
        criterion: 7,
        passed: errors.is_empty() && cut,
        known: false,
        summary: format!(
            "{built} graphs built, errors {errors:?}, deadline back-edge {}",
            if cut { "ok" } else { "wrong" }
        ),
    }
}

fn tradeoff() -> Outcome {
    let start = Instant::now();
    let bounds = [0, 1, 2, 3, 5, 10];
    let report = mutants::run(5, 110, &bounds, 3);
    let elapsed = start.elapsed();
    let at = |b| bounds.iter().position(|&x| x == b).unwrap();
    let checked = report.instances.iter().filter(|i| i.truth.is_some()).count();
    let curve: Vec<String> = bounds
        .iter()
        .enumerate()
        .map(|(k, b)| format!("b={b} {:.3}", report.precision(k)))
        .collect();
    let times = report.median_times();
    let slower = times.is_some_and(|(det, nondet)| nondet > det);
    let passed = report.instances.len() >= 100
        && report.bases >= 5
        && report.precision(at(0)) < report.precision(at(3))
        && report.precision(at(10)) == 1.0
        && slower
        && elapsed <= Duration::from_secs(1800);
    Outcome {
        criterion: 8,
        passed,
        known: false,
        summary: format!(
            "{} mutants over {} bases, {checked} oracle-checked, precision {}, median wall time deterministic {:?} vs non-deterministic {:?}, {:.1?}",
            report.instances.len(),
            report.bases,
            curve.join(" "),
            times.map(|t| t.0),
            times.map(|t| t.1),
            elapsed
        ),
    }
}

fn rendered(a: &TimedAutomaton, b: &TimedAutomaton, bound: HistoryBound, mode: Mode) -> String {
    let c = CheckConfig::new(bound, mode, Kind::Bisimulation);
    let cg = build_composite_pair(a, b, &c.graph).unwrap();
    let v = check_composite(&cg, &c).unwrap();
    let views = [cg.graph.to_dot(), v.render_text(false), v.to_json(false).to_string()];
    views.join("\n")
}

fn determinism() -> Outcome {
    let mut runs = 0;
    let mut differing = Vec::new();
    for (name, a, b, bound) in golden_pairs() {
        for mode in [Mode::Strong, Mode::Weak] {
            let first = rendered(&a, &b, bound, mode);
            for _ in 0..3 {
                runs += 1;
                if rendered(&a, &b, bound, mode) != first {
                    differing.push(format!("{name} {mode}"));
                }
            }
        }
    }
    // Sequential and parallel refinement must agree as well.
    let (a, b) = (corpus("coffee.ta"), corpus("coffee-brew.ta"));
    let mut c = CheckConfig::new(HistoryBound::Finite(3), Mode::Weak, Kind::Bisimulation);
    let par = check(&a, &b, &c).unwrap();
    c.parallelism = tabisim::bisim::Parallelism::Sequential;
    let seq = check(&a, &b, &c).unwrap();
    let same = par.render_text(false) == seq.render_text(false);
    Outcome {
        criterion: 9,
        passed: differing.is_empty() && same,
        known: false,
        summary: format!("{runs} repeated runs, differing {differing:?}, sequential matches parallel: {same}"),
    }
}

fn main() -> ExitCode {
    let mut outcomes = vec![goldens(), span_goldens(), dbm_oracle(), termination()];
    outcomes.extend(properties());
    outcomes.push(tradeoff());
    outcomes.push(determinism());
    outcomes.sort_by_key(|o| o.criterion);
    let mut ok = true;
    for o in &outcomes {
        let status = match (o.passed, o.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known finding)",
            (false, false) => "FAIL",
        };
        println!("criterion {}: {status}: {}", o.criterion, o.summary);
        ok &= o.passed || o.known;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
