use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::bisim::{check, CheckConfig, Kind};
use crate::history::HistoryBound;
use crate::model::{load_model, ModelError};
use crate::zhg::{GraphError, Mode};

/// Name of the manifest file inside a corpus directory.
pub const MANIFEST: &str = "MANIFEST";

/// Scenarios the manifest must contain.
pub const REQUIRED_CASES: &[&str] = &[
    "coffee-weak",
    "coffee-strong",
    "deadline-b0",
    "deadline-b1",
    "deadline-b2",
    "deadline-b3",
    "deadline-unbounded",
    "split-strong",
    "split-partial",
];

#[derive(Debug, Error)]
pub enum GoldenError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("manifest lacks required cases: {}", .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("{case}: {source}")]
    Model { case: String, source: ModelError },
    #[error("{case}: {source}")]
    Check { case: String, source: GraphError },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenCase {
    pub name: String,
    pub left: String,
    pub right: String,
    pub expected_exit: i32,
    pub bound: HistoryBound,
    pub mode: Mode,
    pub kind: Kind,
}

/// Checker flags shared by the manifest and the command line.
pub fn parse_flags(flags: &[&str]) -> Result<(HistoryBound, Mode, Kind), String> {
    let (mut bound, mut mode, mut kind) = (HistoryBound::Finite(3), Mode::Strong, Kind::Bisimulation);
    let mut it = flags.iter();
    while let Some(&f) = it.next() {
        match f {
            "--strong" => mode = Mode::Strong,
            "--weak" => mode = Mode::Weak,
            "--sim" => kind = Kind::Simulation,
            "--bisim" => kind = Kind::Bisimulation,
            "--bound" => {
                let v = it.next().ok_or("--bound needs a value")?;
                bound = v.parse().map_err(|_| format!("bad bound {v:?}"))?;
            }
            other => return Err(format!("unknown flag {other:?}")),
        }
    }
    Ok((bound, mode, kind))
}

pub fn parse_manifest(text: &str) -> Result<Vec<GoldenCase>, GoldenError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| GoldenError::Manifest { line: i + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() < 4 {
            return Err(err("expected name, two models and an exit code".into()));
        }
        let expected_exit = words[3].parse().map_err(|_| err(format!("bad exit code {:?}", words[3])))?;
        let (bound, mode, kind) = parse_flags(&words[4..]).map_err(err)?;
        out.push(GoldenCase {
            name: words[0].to_string(),
            left: words[1].to_string(),
            right: words[2].to_string(),
            expected_exit,
            bound,
            mode,
            kind,
        });
    }
    let missing: Vec<String> = REQUIRED_CASES
        .iter()
        .filter(|r| !out.iter().any(|c| c.name == **r))
        .map(|r| r.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(GoldenError::Uncovered(missing));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenOutcome {
    pub case: GoldenCase,
    pub actual_exit: i32,
    pub passed: bool,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub outcomes: Vec<GoldenOutcome>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn render(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| {
                format!(
                    "{} {:<22} expected {} got {} ({} {} b={})\n",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.case.name,
                    o.case.expected_exit,
                    o.actual_exit,
                    o.case.mode,
                    o.case.kind,
                    o.case.bound
                )
            })
            .collect()
    }
}

/// Runs every case of `dir/MANIFEST`.
pub fn run_goldens(dir: &Path) -> Result<GoldenReport, GoldenError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|source| GoldenError::Io { path, source })?;
    let mut outcomes = Vec::new();
    for case in parse_manifest(&text)? {
        let start = Instant::now();
        let load = |f: &str| {
            load_model(&dir.join(f)).map_err(|source| GoldenError::Model {
                case: case.name.clone(),
                source,
            })
        };
        let (a, b) = (load(&case.left)?, load(&case.right)?);
        let v = check(&a, &b, &CheckConfig::new(case.bound, case.mode, case.kind)).map_err(|source| {
            GoldenError::Check {
                case: case.name.clone(),
                source,
            }
        })?;
        let actual_exit = if v.holds { 0 } else { 1 };
        outcomes.push(GoldenOutcome {
            passed: actual_exit == case.expected_exit,
            actual_exit,
            elapsed: start.elapsed(),
            case,
        });
    }
    Ok(GoldenReport { outcomes })
}
