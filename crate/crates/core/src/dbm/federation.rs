use super::matrix::{Dbm, TimeDomain};

/// Finite union of zones over one clock index map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Federation {
    dim: usize,
    domain: TimeDomain,
    parts: Vec<Dbm>,
}

impl Federation {
    pub fn empty(dim: usize, domain: TimeDomain) -> Federation {
        Federation {
            dim,
            domain,
            parts: Vec::new(),
        }
    }

    pub fn from_dbm(d: Dbm) -> Federation {
        let mut f = Federation::empty(d.dim(), d.domain());
        f.push(d);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[Dbm] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Adds a zone; empty zones and exact duplicates are dropped.
    pub fn push(&mut self, d: Dbm) {
        assert_eq!(d.dim(), self.dim, "DBM dimension mismatch");
        if !d.is_empty() && !self.parts.contains(&d) {
            self.parts.push(d);
        }
    }

    pub fn union(&mut self, other: &Federation) {
        for d in &other.parts {
            self.push(d.clone());
        }
    }

    /// `self \ d`.
    pub fn subtract_dbm(&self, d: &Dbm) -> Federation {
        let mut out = Federation::empty(self.dim, self.domain);
        for p in &self.parts {
            out.union(&p.subtract(d));
        }
        out
    }

    /// `self \ other`.
    pub fn subtract(&self, other: &Federation) -> Federation {
        let mut rest = self.clone();
        for d in &other.parts {
            if rest.is_empty() {
                break;
            }
            rest = rest.subtract_dbm(d);
        }
        rest
    }

    /// Whether `d` lies within the union, by subtracting every part from
    /// `{d}` and testing what is left.
    pub fn covers(&self, d: &Dbm) -> bool {
        Federation::from_dbm(d.clone()).subtract(self).is_empty()
    }

    pub fn contains_scaled(&self, valuation: &[i64], scale: i64) -> bool {
        self.parts.iter().any(|p| p.contains_scaled(valuation, scale))
    }

    pub fn contains(&self, valuation: &[i64]) -> bool {
        self.contains_scaled(valuation, 1)
    }

    pub fn to_disjunction(&self, names: &[&str]) -> String {
        if self.parts.is_empty() {
            return "false".to_string();
        }
        self.parts
            .iter()
            .map(|p| format!("({})", p.to_conjunction(names)))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// `true` iff `d` is contained in the union of `cover`.
pub fn federation_covers(cover: &Federation, d: &Dbm) -> bool {
    cover.covers(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbm::Constraint;

    fn y_between(lo: i32, up: i32) -> Dbm {
        Dbm::universe(2, TimeDomain::Dense)
            .and_constraints(&[Constraint::lower(1, lo, false), Constraint::upper(1, up, false)])
    }

    #[test]
    fn overlapping_parts_cover_their_hull() {
        let mut cover = Federation::from_dbm(y_between(0, 2));
        cover.push(y_between(2, 3));
        assert!(federation_covers(&cover, &y_between(0, 3)));
    }

    #[test]
    fn strict_subset_does_not_cover() {
        let cover = Federation::from_dbm(y_between(0, 2));
        assert!(!federation_covers(&cover, &y_between(0, 3)));
    }

    #[test]
    fn gap_is_detected_in_dense_time() {
        let mut cover = Federation::from_dbm(y_between(0, 1));
        cover.push(y_between(2, 3));
        assert!(!cover.covers(&y_between(0, 3)));
    }

    #[test]
    fn empty_cover() {
        let cover = Federation::empty(2, TimeDomain::Dense);
        assert!(cover.covers(&Dbm::empty(2, TimeDomain::Dense)));
        assert!(!cover.covers(&y_between(0, 0)));
    }
}
