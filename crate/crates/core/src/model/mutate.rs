use std::collections::BTreeSet;

use super::types::TimedAutomaton;
use super::ModelError;

/// Complements the reset set of one switch against all clocks.
pub fn mutate_invert_resets(ta: &TimedAutomaton, switch_index: usize) -> Result<TimedAutomaton, ModelError> {
    let mut out = ta.clone();
    let sw = out.switches.get_mut(switch_index).ok_or(ModelError::IndexOutOfRange {
        what: "switch",
        index: switch_index,
    })?;
    let all: BTreeSet<String> = ta.clocks.iter().cloned().collect();
    sw.resets = all.difference(&sw.resets).cloned().collect();
    Ok(out)
}

/// Flips the comparison operator of one guard atom (`<=` to `>=`, `<` to
/// `>` and back).
pub fn mutate_change_guard(
    ta: &TimedAutomaton,
    switch_index: usize,
    atom_index: usize,
) -> Result<TimedAutomaton, ModelError> {
    let mut out = ta.clone();
    let sw = out.switches.get_mut(switch_index).ok_or(ModelError::IndexOutOfRange {
        what: "switch",
        index: switch_index,
    })?;
    let atom = sw.guard.atoms.get_mut(atom_index).ok_or(ModelError::IndexOutOfRange {
        what: "guard atom",
        index: atom_index,
    })?;
    atom.op = atom.op.flipped();
    Ok(out)
}

/// Mutation operator and site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mutation {
    InvertResets { switch: usize },
    ChangeGuard { switch: usize, atom: usize },
}

impl Mutation {
    pub fn apply(self, ta: &TimedAutomaton) -> Result<TimedAutomaton, ModelError> {
        match self {
            Mutation::InvertResets { switch } => mutate_invert_resets(ta, switch),
            Mutation::ChangeGuard { switch, atom } => mutate_change_guard(ta, switch, atom),
        }
    }

    /// Deterministic file-name stem.
    pub fn tag(self) -> String {
        match self {
            Mutation::InvertResets { switch } => format!("invert-resets-s{switch}"),
            Mutation::ChangeGuard { switch, atom } => format!("change-guard-s{switch}-a{atom}"),
        }
    }

    pub fn operator(self) -> &'static str {
        match self {
            Mutation::InvertResets { .. } => "invert-resets",
            Mutation::ChangeGuard { .. } => "change-guard",
        }
    }
}

/// Every applicable site: one reset inversion per switch, one operator flip
/// per guard atom.
pub fn mutation_sites(ta: &TimedAutomaton) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (i, s) in ta.switches.iter().enumerate() {
        out.push(Mutation::InvertResets { switch: i });
        for j in 0..s.guard.atoms.len() {
            out.push(Mutation::ChangeGuard { switch: i, atom: j });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;
    use crate::model::types::Relation;

    fn two_clocks() -> TimedAutomaton {
        parse_model(
            "ta m\nclocks x y\nactions a\nlocation l initial\nswitch l -> l guard x <= 2 & y < 2 action a reset x\n\
             switch l -> l action a\n",
        )
        .unwrap()
    }

    #[test]
    fn invert_resets_complements() {
        let ta = two_clocks();
        let m = mutate_invert_resets(&ta, 0).unwrap();
        assert_eq!(m.switches[0].resets, BTreeSet::from(["y".to_string()]));
        let m = mutate_invert_resets(&ta, 1).unwrap();
        assert_eq!(m.switches[1].resets.len(), 2);
        assert_eq!(mutate_invert_resets(&m, 1).unwrap(), ta);
        assert!(mutate_invert_resets(&ta, 2).is_err());
    }

    #[test]
    fn change_guard_flips() {
        let ta = two_clocks();
        let m = mutate_change_guard(&ta, 0, 0).unwrap();
        assert_eq!(m.switches[0].guard.atoms[0].op, Relation::Ge);
        let m = mutate_change_guard(&ta, 0, 1).unwrap();
        assert_eq!(m.switches[0].guard.atoms[1].op, Relation::Gt);
        assert_eq!(mutate_change_guard(&m, 0, 1).unwrap(), ta);
        assert!(mutate_change_guard(&ta, 1, 0).is_err());
    }

    #[test]
    fn sites() {
        assert_eq!(mutation_sites(&two_clocks()).len(), 4);
    }
}
