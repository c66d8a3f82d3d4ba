use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Reserved name of the history clock.
pub const HISTORY_CLOCK: &str = "chi";
/// Reserved name of the reference clock.
pub const REFERENCE_CLOCK: &str = "zero";

pub type Constant = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Visible(String),
    Tau,
}

impl Action {
    pub fn visible(name: &str) -> Action {
        Action::Visible(name.to_string())
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Visible(a) => write!(f, "{a}"),
            Action::Tau => write!(f, "tau"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    /// Mirror across the `<=`/`>=` and `<`/`>` axis.
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Gt => Relation::Lt,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le)
    }

    pub fn holds(self, lhs: Constant, rhs: Constant) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// `clock op bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub clock: String,
    pub op: Relation,
    pub bound: Constant,
}

impl Atom {
    pub fn new(clock: &str, op: Relation, bound: i64) -> Atom {
        Atom {
            clock: clock.to_string(),
            op,
            bound: Constant::from_integer(bound),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.clock, self.op.symbol(), self.bound)
    }
}

/// Conjunction of atoms; empty means `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockConstraint {
    pub atoms: Vec<Atom>,
}

impl ClockConstraint {
    pub fn truth() -> ClockConstraint {
        ClockConstraint::default()
    }

    pub fn of(atoms: Vec<Atom>) -> ClockConstraint {
        ClockConstraint { atoms }
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" & "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Location {
    pub id: String,
    pub invariant: ClockConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Switch {
    pub source: String,
    pub target: String,
    pub guard: ClockConstraint,
    pub action: Action,
    pub resets: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimedAutomaton {
    pub name: String,
    pub clocks: Vec<String>,
    pub alphabet: BTreeSet<String>,
    pub locations: Vec<Location>,
    pub initial: String,
    pub switches: Vec<Switch>,
}

impl TimedAutomaton {
    pub fn location(&self, id: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn location_index(&self, id: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.id == id)
    }

    pub fn has_tau(&self) -> bool {
        self.switches.iter().any(|s| s.action.is_tau())
    }

    /// All atoms in invariants and guards.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.locations
            .iter()
            .flat_map(|l| l.invariant.atoms.iter())
            .chain(self.switches.iter().flat_map(|s| s.guard.atoms.iter()))
    }

    /// Largest constant compared against `clock`.
    pub fn max_constant(&self, clock: &str) -> Constant {
        self.atoms()
            .filter(|a| a.clock == clock)
            .map(|a| a.bound)
            .max()
            .unwrap_or_else(|| Constant::from_integer(0))
    }

    pub fn global_max_constant(&self) -> Constant {
        self.atoms()
            .map(|a| a.bound)
            .max()
            .unwrap_or_else(|| Constant::from_integer(0))
    }

    /// No τ-switches and no two switches with the same source and action.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.switches
            .iter()
            .all(|s| !s.action.is_tau() && seen.insert((s.source.as_str(), &s.action)))
    }
}
