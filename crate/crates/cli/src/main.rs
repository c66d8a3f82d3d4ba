use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tabisim::bisim::{check_composite, default_mode, CheckConfig, Kind, Verdict};
use tabisim::corpus::{run_goldens, run_random_properties, PropertyConfig};
use tabisim::history::HistoryBound;
use tabisim::model::{load_model, mutation_sites, serialize, validate, ModelError, TimedAutomaton};
use tabisim::oracle::oracle_check;
use tabisim::zhg::{build_composite_pair, GraphError, Mode, Side};

const HOLDS: u8 = 0;
const FAILS: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "tabisim", version, about = "Timed (bi)simulation checking on zone-history graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether RIGHT simulates or is bisimilar to LEFT.
    Check(CheckArgs),
    /// Write every single-site mutant of MODEL into OUTDIR.
    Mutate { model: PathBuf, outdir: PathBuf },
    /// Run the golden cases listed in DIR/MANIFEST.
    Goldens { dir: PathBuf },
    /// Run the random property suites.
    Props {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").args(["strong", "weak"])))]
#[command(group(ArgGroup::new("kind").args(["sim", "bisim"])))]
struct CheckArgs {
    left: PathBuf,
    right: PathBuf,
    /// History bound: a non-negative integer or `inf`.
    #[arg(long, default_value = "3", conflicts_with = "sweep")]
    bound: HistoryBound,
    #[arg(long)]
    strong: bool,
    #[arg(long)]
    weak: bool,
    #[arg(long)]
    sim: bool,
    #[arg(long)]
    bisim: bool,
    /// Write the composite graph and both views as DOT files.
    #[arg(long, value_name = "DIR")]
    emit_dot: Option<PathBuf>,
    /// Compare with the explicit-state oracle.
    #[arg(long)]
    oracle_check: bool,
    /// Check at each listed bound, e.g. `0,1,2,inf`.
    #[arg(long, value_delimiter = ',', value_name = "B1,B2,...")]
    sweep: Option<Vec<HistoryBound>>,
    #[arg(long, default_value_t = tabisim::zhg::DEFAULT_MAX_STATES as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 1800, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall times in the output.
    #[arg(long)]
    timings: bool,
}

enum Failed {
    Usage(String),
    Budget(String),
}

impl From<ModelError> for Failed {
    fn from(e: ModelError) -> Self {
        Failed::Usage(e.to_string())
    }
}

impl From<GraphError> for Failed {
    fn from(e: GraphError) -> Self {
        if e.is_budget() {
            Failed::Budget(e.to_string())
        } else {
            Failed::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => run_check(&args),
        Command::Mutate { model, outdir } => mutate(&model, &outdir),
        Command::Goldens { dir } => goldens(&dir),
        Command::Props { seed, count } => props(seed, count),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failed::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failed::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(BUDGET)
        }
    }
}

fn load(path: &Path) -> Result<TimedAutomaton, Failed> {
    load_model(path).map_err(|e| match e {
        ModelError::Io { .. } => Failed::Usage(e.to_string()),
        e => Failed::Usage(format!("{}: {e}", path.display())),
    })
}

fn run_check(args: &CheckArgs) -> Result<u8, Failed> {
    let a = load(&args.left)?;
    let b = load(&args.right)?;
    let mode = if args.strong {
        Mode::Strong
    } else if args.weak {
        Mode::Weak
    } else {
        default_mode(&a, &b)
    };
    let kind = if args.sim { Kind::Simulation } else { Kind::Bisimulation };
    let mut config = CheckConfig::new(args.bound, mode, kind);
    config.graph.max_states = usize::try_from(args.max_states).unwrap_or(usize::MAX);
    config.graph.timeout = Some(Duration::from_secs(args.timeout));

    let oracle = args.oracle_check.then(|| oracle_check(&a, &b, mode, kind, 1));
    let oracle = oracle.map(|r| r.map_err(|e| e.to_string()));

    let Some(bounds) = &args.sweep else {
        let v = run_one(&a, &b, &config, args.emit_dot.as_deref(), None)?;
        print!("{}", render_single(&v, oracle.as_ref(), args));
        return Ok(if v.holds { HOLDS } else { FAILS });
    };
    let mut bounds = bounds.clone();
    bounds.sort();
    bounds.dedup();
    let mut verdicts = Vec::new();
    for &bound in &bounds {
        config.graph.bound = bound;
        verdicts.push(run_one(&a, &b, &config, args.emit_dot.as_deref(), Some(bound))?);
    }
    print!("{}", render_sweep(&verdicts, oracle.as_ref(), args));
    // The largest bound is the most precise verdict.
    let last = verdicts.last().ok_or_else(|| Failed::Usage("empty sweep".into()))?;
    Ok(if last.holds { HOLDS } else { FAILS })
}

fn run_one(
    a: &TimedAutomaton,
    b: &TimedAutomaton,
    config: &CheckConfig,
    dot_dir: Option<&Path>,
    suffix: Option<HistoryBound>,
) -> Result<Verdict, Failed> {
    let cg = build_composite_pair(a, b, &config.graph)?;
    if let Some(dir) = dot_dir {
        let tag = suffix.map(|b| format!("-b{b}")).unwrap_or_default();
        let io = |e: std::io::Error| Failed::Usage(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join(format!("composite{tag}.dot")), cg.graph.to_dot()).map_err(io)?;
        fs::write(dir.join(format!("left{tag}.dot")), cg.view(Side::Left).to_graph().to_dot()).map_err(io)?;
        fs::write(dir.join(format!("right{tag}.dot")), cg.view(Side::Right).to_graph().to_dot()).map_err(io)?;
    }
    Ok(check_composite(&cg, config)?)
}

fn oracle_json(v: Option<&Result<bool, String>>, holds: bool) -> Value {
    match v {
        None => Value::Null,
        Some(Ok(o)) => json!({ "holds": o, "agrees": *o == holds }),
        Some(Err(e)) => json!({ "error": e }),
    }
}

fn oracle_line(v: &Result<bool, String>, holds: bool) -> String {
    match v {
        Ok(o) if *o == holds => format!("oracle: {} (agrees)\n", if *o { "holds" } else { "fails" }),
        Ok(o) => format!("oracle: {} (disagrees)\n", if *o { "holds" } else { "fails" }),
        Err(e) => format!("oracle: unavailable ({e})\n"),
    }
}

fn render_single(v: &Verdict, oracle: Option<&Result<bool, String>>, args: &CheckArgs) -> String {
    match args.format {
        Format::Json => {
            let mut doc = v.to_json(args.timings);
            if oracle.is_some() {
                doc["oracle"] = oracle_json(oracle, v.holds);
            }
            format!("{doc:#}\n")
        }
        Format::Text => {
            let mut out = v.render_text(args.timings);
            if let Some(o) = oracle {
                out.push_str(&oracle_line(o, v.holds));
            }
            out
        }
    }
}

fn monotonicity_violations(verdicts: &[Verdict]) -> Vec<HistoryBound> {
    let mut failed = false;
    let mut out = Vec::new();
    for v in verdicts {
        if failed && v.holds {
            out.push(v.bound);
        }
        failed |= !v.holds;
    }
    out
}

fn render_sweep(verdicts: &[Verdict], oracle: Option<&Result<bool, String>>, args: &CheckArgs) -> String {
    let violations = monotonicity_violations(verdicts);
    let last_holds = verdicts.last().is_some_and(|v| v.holds);
    match args.format {
        Format::Json => {
            let mut doc = json!({
                "sweep": verdicts.iter().map(|v| v.to_json(args.timings)).collect::<Vec<_>>(),
                "monotonicity_violations": violations.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            });
            if oracle.is_some() {
                doc["oracle"] = oracle_json(oracle, last_holds);
            }
            format!("{doc:#}\n")
        }
        Format::Text => {
            let mut out = String::new();
            let _ = write!(out, "{:>5}  {:<14} {:>8} {:>10}", "b", "verdict", "states", "pairs");
            if args.timings {
                let _ = write!(out, " {:>12}", "wall ms");
            }
            out.push('\n');
            for v in verdicts {
                let flag = if violations.contains(&v.bound) { "  non-monotone" } else { "" };
                let _ = write!(
                    out,
                    "{:>5}  {:<14} {:>8} {:>10}",
                    v.bound.to_string(),
                    v.relation_name(),
                    v.stats.graph_states,
                    v.stats.pairs
                );
                if args.timings {
                    let _ = write!(out, " {:>12.3}", v.elapsed.as_secs_f64() * 1000.0);
                }
                let _ = writeln!(out, "{flag}");
            }
            if let Some(o) = oracle {
                out.push_str(&oracle_line(o, last_holds));
            }
            out
        }
    }
}

fn mutate(model: &Path, outdir: &Path) -> Result<u8, Failed> {
    let ta = load(model)?;
    let stem = model.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    let io = |e: std::io::Error| Failed::Usage(format!("{}: {e}", outdir.display()));
    fs::create_dir_all(outdir).map_err(io)?;
    let mut manifest = String::new();
    let mut count = 0;
    for m in mutation_sites(&ta) {
        let mutant = m.apply(&ta)?;
        if !validate(&mutant).is_empty() {
            eprintln!("skipping {}: mutant does not validate", m.tag());
            continue;
        }
        let file = format!("{stem}-{}.ta", m.tag());
        fs::write(outdir.join(&file), serialize(&mutant)).map_err(io)?;
        let _ = writeln!(manifest, "{file} {} {}", m.operator(), m.tag());
        count += 1;
    }
    fs::write(outdir.join("MANIFEST"), manifest).map_err(io)?;
    println!("{count} mutants written to {}", outdir.display());
    Ok(HOLDS)
}

fn goldens(dir: &Path) -> Result<u8, Failed> {
    let report = run_goldens(dir).map_err(|e| Failed::Usage(e.to_string()))?;
    print!("{}", report.render());
    Ok(if report.all_passed() { HOLDS } else { FAILS })
}

fn props(seed: u64, count: usize) -> Result<u8, Failed> {
    let report = run_random_properties(seed, count, &PropertyConfig::default());
    print!("{}", report.render());
    Ok(if report.violations.is_empty() { HOLDS } else { FAILS })
}
