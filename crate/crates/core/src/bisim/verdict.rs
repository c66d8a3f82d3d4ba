use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Kind, Verdict};
use crate::history::HistoryBound;
use crate::zhg::Side;

/// Version of the JSON verdict document.
pub const VERDICT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRef {
    /// Id in the composite exploration (discovery order).
    pub id: usize,
    pub location: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleStep {
    pub attacker: Side,
    pub action: String,
    pub attacker_target: StateRef,
    /// The defender's best answer; absent when it has none.
    pub defender_target: Option<StateRef>,
}

/// Why the last pair of a counterexample is not related.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Failure {
    /// The attacker may stay longer than the defender.
    Residence { attacker: Side },
    /// The attacker's history is not contained in the defender's.
    History { attacker: Side },
    /// The defender cannot answer the attacker's last action.
    Unmatched { attacker: Side, action: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub start: (StateRef, StateRef),
    pub steps: Vec<CounterexampleStep>,
    pub failure: Failure,
}

fn bound_json(b: HistoryBound) -> Value {
    match b {
        HistoryBound::Finite(n) => json!(n),
        HistoryBound::Unbounded => json!("inf"),
    }
}

impl Verdict {
    pub fn relation_name(&self) -> &'static str {
        match (self.kind, self.holds) {
            (Kind::Simulation, true) => "simulated",
            (Kind::Simulation, false) => "not simulated",
            (Kind::Bisimulation, true) => "bisimilar",
            (Kind::Bisimulation, false) => "not bisimilar",
        }
    }

    /// JSON document; wall time is included only with `timings`.
    pub fn to_json(&self, timings: bool) -> Value {
        let mut v = json!({
            "schema_version": VERDICT_SCHEMA_VERSION,
            "holds": self.holds,
            "mode": self.mode,
            "kind": self.kind,
            "bound": bound_json(self.bound),
            "stats": self.stats,
            "counterexample": self.counterexample,
        });
        if timings {
            v["wall_time_ms"] = json!(self.elapsed.as_secs_f64() * 1000.0);
        }
        v
    }

    pub fn render_text(&self, timings: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} ({} {}, bound {})",
            self.relation_name(),
            self.mode,
            self.kind,
            self.bound
        );
        if let Some(cx) = &self.counterexample {
            let _ = writeln!(out, "counterexample from ({}, {}):", cx.start.0.location, cx.start.1.location);
            for (i, s) in cx.steps.iter().enumerate() {
                let answer = match &s.defender_target {
                    Some(t) => format!("{} s{}", t.location, t.id),
                    None => "no answer".to_string(),
                };
                let _ = writeln!(
                    out,
                    "  {}. {} plays {} to {} s{}; {} answers {}",
                    i + 1,
                    s.attacker,
                    s.action,
                    s.attacker_target.location,
                    s.attacker_target.id,
                    s.attacker.other(),
                    answer
                );
            }
            let reason = match &cx.failure {
                Failure::Residence { attacker } => format!("{attacker} side can stay longer"),
                Failure::History { attacker } => format!("{attacker} side history is not contained in the other"),
                Failure::Unmatched { attacker, action } => format!("{} side cannot answer {action}", attacker.other()),
            };
            let _ = writeln!(out, "  fails: {reason}");
        }
        let s = &self.stats;
        let _ = writeln!(
            out,
            "states {} (left view {}, right view {}), transitions {} ({} cut), pairs {} ({} surviving), rounds {}",
            s.graph_states,
            s.left_states,
            s.right_states,
            s.transitions,
            s.cut_transitions,
            s.pairs,
            s.surviving_pairs,
            s.rounds
        );
        if timings {
            let _ = writeln!(out, "wall time {:.3} ms", self.elapsed.as_secs_f64() * 1000.0);
        }
        out
    }
}
