use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tabisim::bisim::{check_composite, CheckConfig, Kind, Parallelism};
use tabisim::corpus::{random_pairs, GeneratorConfig};
use tabisim::history::HistoryBound;
use tabisim::model::{load_model, TimedAutomaton};
use tabisim::zhg::{build_composite_pair, Mode};

fn corpus(name: &str) -> TimedAutomaton {
    load_model(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)).unwrap()
}

/// Refinement rounds only; the composite graph is built once per workload.
fn refinement(c: &mut Criterion) {
    let pairs = random_pairs(1, 200, &GeneratorConfig::default());
    let random = &pairs[147];
    let workloads = [
        ("coffee-weak-b3", corpus("coffee.ta"), corpus("coffee-brew.ta"), 3, Mode::Weak),
        ("random147-strong-b3", random.left.clone(), random.right.clone(), 3, Mode::Strong),
        ("random147-weak-b3", random.left.clone(), random.right.clone(), 3, Mode::Weak),
    ];
    let mut group = c.benchmark_group("refinement");
    group.sample_size(10);
    for (name, a, b, bound, mode) in workloads {
        let mut config = CheckConfig::new(HistoryBound::Finite(bound), mode, Kind::Bisimulation);
        let cg = build_composite_pair(&a, &b, &config.graph).unwrap();
        for p in [Parallelism::Sequential, Parallelism::Parallel] {
            config.parallelism = p;
            group.bench_with_input(BenchmarkId::new(name, format!("{p:?}").to_lowercase()), &config, |bench, config| {
                bench.iter(|| check_composite(&cg, config).unwrap().holds)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, refinement);
criterion_main!(benches);
