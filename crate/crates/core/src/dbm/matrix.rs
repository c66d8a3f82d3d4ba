use std::fmt;

use serde::{Deserialize, Serialize};

use super::bound::Bound;
use super::federation::Federation;
use super::span::Span;
use super::DbmError;

/// Interpretation of clock values.
///
/// `Discrete` is the integer clock domain: every strict bound is tightened
/// to its non-strict integer equivalent during canonicalization, which keeps
/// all zone operations exact on integer valuations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDomain {
    #[default]
    Discrete,
    Dense,
}

/// A single difference constraint `c_i - c_j ⊴ bound` over matrix indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub i: usize,
    pub j: usize,
    pub bound: Bound,
}

impl Constraint {
    pub fn new(i: usize, j: usize, bound: Bound) -> Self {
        Constraint { i, j, bound }
    }

    /// `c <= v` (or `<` when strict).
    pub fn upper(clock: usize, value: i32, strict: bool) -> Self {
        Constraint::new(clock, 0, Bound::finite(value, strict))
    }

    /// `c >= v` (or `>` when strict).
    pub fn lower(clock: usize, value: i32, strict: bool) -> Self {
        Constraint::new(0, clock, Bound::finite(-value, strict))
    }
}

/// Difference-bound matrix over a reference clock (index 0) and `dim - 1`
/// real clocks. Entry `(i, j)` bounds `c_i - c_j`.
///
/// Values are kept canonical (shortest-path closed) after every public
/// operation. The empty zone is a distinguished value: all empty matrices of
/// the same dimension and domain compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    domain: TimeDomain,
    empty: bool,
    m: Vec<Bound>,
}

impl Dbm {
    /// All clocks non-negative, otherwise unconstrained.
    pub fn universe(dim: usize, domain: TimeDomain) -> Dbm {
        assert!(dim >= 1, "a DBM needs at least the reference clock");
        let mut m = vec![Bound::INFINITY; dim * dim];
        for j in 0..dim {
            m[j] = Bound::LE_ZERO;
            m[j * dim + j] = Bound::LE_ZERO;
        }
        Dbm {
            dim,
            domain,
            empty: false,
            m,
        }
    }

    /// Every clock equal to zero.
    pub fn zero(dim: usize, domain: TimeDomain) -> Dbm {
        Dbm {
            dim,
            domain,
            empty: false,
            m: vec![Bound::LE_ZERO; dim * dim],
        }
    }

    pub fn empty(dim: usize, domain: TimeDomain) -> Dbm {
        Dbm {
            dim,
            domain,
            empty: true,
            m: vec![Bound::LE_ZERO; dim * dim],
        }
    }

    /// The initial zone over `clock_count` clocks plus the history clock:
    /// all of them zero.
    pub fn initial_zone(clock_count: usize, domain: TimeDomain) -> Dbm {
        Dbm::zero(clock_count + 2, domain)
    }

    /// Builds a canonical zone from a raw bound matrix (row-major).
    pub fn from_bounds(dim: usize, domain: TimeDomain, bounds: Vec<Bound>) -> Dbm {
        assert_eq!(bounds.len(), dim * dim);
        let mut d = Dbm {
            dim,
            domain,
            empty: false,
            m: bounds,
        };
        d.close();
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> TimeDomain {
        self.domain
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    fn mark_empty(&mut self) {
        self.empty = true;
        self.m.iter_mut().for_each(|b| *b = Bound::LE_ZERO);
    }

    fn admit(&self, b: Bound) -> Bound {
        match self.domain {
            TimeDomain::Discrete => b.tighten_integer(),
            TimeDomain::Dense => b,
        }
    }

    /// Floyd-Warshall closure; detects emptiness through negative cycles.
    fn close(&mut self) {
        if self.empty {
            return;
        }
        let n = self.dim;
        if self.domain == TimeDomain::Discrete {
            for b in self.m.iter_mut() {
                *b = b.tighten_integer();
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = self.m[i * n + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = ik.add(self.m[k * n + j]);
                    if via < self.m[i * n + j] {
                        self.m[i * n + j] = via;
                    }
                }
            }
            if self.m[k * n + k] < Bound::LE_ZERO {
                self.mark_empty();
                return;
            }
        }
        for i in 0..n {
            if self.m[i * n + i] < Bound::LE_ZERO {
                self.mark_empty();
                return;
            }
        }
    }

    /// Conjoins one constraint, keeping the matrix canonical in O(n²).
    pub fn constrain(&mut self, c: Constraint) -> &mut Self {
        if self.empty {
            return self;
        }
        let b = self.admit(c.bound);
        let (i, j) = (c.i, c.j);
        if b >= self.get(i, j) {
            return self;
        }
        if b.add(self.get(j, i)) < Bound::LE_ZERO {
            self.mark_empty();
            return self;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.get(k, i);
            if ki.is_infinite() {
                continue;
            }
            let kij = ki.add(b);
            for l in 0..n {
                let via = kij.add(self.get(j, l));
                if via < self.get(k, l) {
                    self.set(k, l, via);
                }
            }
        }
        self
    }

    pub fn constrain_all<'a>(&mut self, cs: impl IntoIterator<Item = &'a Constraint>) -> &mut Self {
        for c in cs {
            if self.empty {
                break;
            }
            self.constrain(*c);
        }
        self
    }

    /// Conjunction of a set of constraints, as a new zone.
    pub fn and_constraints<'a>(&self, cs: impl IntoIterator<Item = &'a Constraint>) -> Dbm {
        let mut d = self.clone();
        d.constrain_all(cs);
        d
    }

    /// Intersection of two zones over the same clock index map.
    pub fn intersect(&self, other: &Dbm) -> Dbm {
        self.check_compatible(other);
        if self.empty || other.empty {
            return Dbm::empty(self.dim, self.domain);
        }
        let mut d = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && !d.empty {
                    d.constrain(Constraint::new(i, j, other.get(i, j)));
                }
            }
        }
        d
    }

    /// Future: removes every upper bound against the reference clock.
    pub fn up(&self) -> Dbm {
        let mut d = self.clone();
        if !d.empty {
            for i in 1..d.dim {
                d.set(i, 0, Bound::INFINITY);
            }
        }
        d
    }

    /// Sets clock `clock` to zero.
    pub fn reset_clock(&mut self, clock: usize) -> &mut Self {
        assert!(clock > 0 && clock < self.dim);
        if self.empty {
            return self;
        }
        for j in 0..self.dim {
            if j != clock {
                let zj = self.get(0, j);
                let jz = self.get(j, 0);
                self.set(clock, j, zj);
                self.set(j, clock, jz);
            }
        }
        self.set(clock, clock, Bound::LE_ZERO);
        self
    }

    /// Resets every model clock in `clocks` to zero. The history clock
    /// (last index) is rejected.
    pub fn reset(&self, clocks: &[usize]) -> Result<Dbm, DbmError> {
        if clocks.contains(&self.history_clock()) {
            return Err(DbmError::HistoryClockReset);
        }
        let mut d = self.clone();
        for &c in clocks {
            d.reset_clock(c);
        }
        Ok(d)
    }

    /// Index of the history clock.
    pub fn history_clock(&self) -> usize {
        self.dim - 1
    }

    /// `self ∧ χ = 0`.
    pub fn with_history_zero(&self) -> Dbm {
        let chi = self.history_clock();
        self.and_constraints(&[Constraint::upper(chi, 0, false)])
    }

    /// Resets the history clock; used when a step starts a fresh
    /// observation window.
    pub fn restart_history(&self) -> Dbm {
        let mut d = self.clone();
        let chi = d.history_clock();
        d.reset_clock(chi);
        d
    }

    /// Forgets every constraint on `clock` apart from non-negativity.
    pub fn free_clock(&mut self, clock: usize) -> &mut Self {
        assert!(clock > 0 && clock < self.dim);
        if self.empty {
            return self;
        }
        for j in 0..self.dim {
            if j != clock {
                let j0 = self.get(j, 0);
                self.set(clock, j, Bound::INFINITY);
                self.set(j, clock, j0);
            }
        }
        self
    }

    /// True iff every valuation of `inner` lies in `self`.
    pub fn includes(&self, inner: &Dbm) -> bool {
        self.check_compatible(inner);
        if inner.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        inner.m.iter().zip(&self.m).all(|(a, b)| a <= b)
    }

    /// k-normalization with per-index ceilings (`ceilings[0]` is ignored).
    ///
    /// Upper bounds above a clock's ceiling become infinite and lower bounds
    /// beyond it are relaxed to `> ceiling`, so only finitely many distinct
    /// normalized zones exist for fixed ceilings.
    pub fn k_normalize(&self, ceilings: &[i32]) -> Dbm {
        assert_eq!(ceilings.len(), self.dim);
        if self.empty {
            return self.clone();
        }
        let mut d = self.clone();
        let ceil = |k: usize| if k == 0 { 0 } else { ceilings[k] };
        let mut changed = false;
        for i in 0..d.dim {
            for j in 0..d.dim {
                if i == j {
                    continue;
                }
                let b = d.get(i, j);
                if b.is_infinite() {
                    continue;
                }
                if b > Bound::le(ceil(i)) {
                    d.set(i, j, Bound::INFINITY);
                    changed = true;
                } else {
                    let floor = d.admit(Bound::lt(-ceil(j)));
                    if b < floor {
                        d.set(i, j, floor);
                        changed = true;
                    }
                }
            }
        }
        if changed {
            d.close();
        }
        d
    }

    /// Set difference as a federation of pairwise disjoint zones.
    ///
    /// Each part conjoins the minuend with the negation of one facet of the
    /// subtrahend; facets already implied by the remaining minuend are
    /// skipped.
    pub fn subtract(&self, subtrahend: &Dbm) -> Federation {
        self.check_compatible(subtrahend);
        let mut out = Federation::empty(self.dim, self.domain);
        if self.empty {
            return out;
        }
        if subtrahend.empty || self.intersect(subtrahend).is_empty() {
            out.push(self.clone());
            return out;
        }
        let mut remaining = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let facet = subtrahend.get(i, j);
                if facet.is_infinite() || remaining.get(i, j) <= facet {
                    continue;
                }
                let mut part = remaining.clone();
                part.constrain(Constraint::new(j, i, facet.complement()));
                out.push(part);
                remaining.constrain(Constraint::new(i, j, facet));
                if remaining.is_empty() {
                    return out;
                }
            }
        }
        out
    }

    /// The span of clock `clock`: its lower and upper bound against the
    /// reference clock.
    pub fn span(&self, clock: usize) -> Result<Span, DbmError> {
        if self.empty {
            return Err(DbmError::EmptySpan);
        }
        let lo = self.get(0, clock);
        Ok(Span::interval(
            -lo.value().expect("lower bounds are finite"),
            lo.is_strict(),
            self.get(clock, 0),
        ))
    }

    /// Span of `clock` with endpoints beyond `ceiling` relaxed the way
    /// k-normalization relaxes them, ignoring bounds the closure re-derives.
    pub fn span_within(&self, clock: usize, ceiling: i32) -> Span {
        if self.empty {
            return Span::Empty;
        }
        let lo = self.get(0, clock).max(self.admit(Bound::lt(-ceiling)));
        let up = self.get(clock, 0);
        let up = if up > Bound::le(ceiling) { Bound::INFINITY } else { up };
        Span::interval(-lo.value().expect("lower bounds are finite"), lo.is_strict(), up)
    }

    /// Span of `clock`, mapping the empty zone to the empty span.
    pub fn span_or_empty(&self, clock: usize) -> Span {
        self.span(clock).unwrap_or(Span::Empty)
    }

    /// Membership of a valuation given as integers scaled by `scale`
    /// (`valuation[0]` is the reference clock and must be 0).
    pub fn contains_scaled(&self, valuation: &[i64], scale: i64) -> bool {
        assert_eq!(valuation.len(), self.dim);
        if self.empty {
            return false;
        }
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| self.get(i, j).admits_scaled(valuation[i] - valuation[j], scale))
        })
    }

    pub fn contains(&self, valuation: &[i64]) -> bool {
        self.contains_scaled(valuation, 1)
    }

    /// Conjunction rendering, e.g. `0<=x & x<=2 & x-chi<=0`.
    ///
    /// `names[k]` names matrix index `k + 1`. Lower bounds are always
    /// listed; upper and difference bounds only when finite.
    pub fn to_conjunction(&self, names: &[&str]) -> String {
        assert_eq!(names.len() + 1, self.dim);
        if self.empty {
            return "false".to_string();
        }
        let rel = |b: Bound| if b.is_strict() { "<" } else { "<=" };
        let mut atoms = Vec::new();
        for i in 1..self.dim {
            let name = names[i - 1];
            let lo = self.get(0, i);
            atoms.push(format!("{}{}{}", -lo.value().unwrap(), rel(lo), name));
            let up = self.get(i, 0);
            if let Some(v) = up.value() {
                atoms.push(format!("{}{}{}", name, rel(up), v));
            }
        }
        for i in 1..self.dim {
            for j in 1..self.dim {
                if i == j {
                    continue;
                }
                let b = self.get(i, j);
                if let Some(v) = b.value() {
                    atoms.push(format!("{}-{}{}{}", names[i - 1], names[j - 1], rel(b), v));
                }
            }
        }
        atoms.join(" & ")
    }

    fn check_compatible(&self, other: &Dbm) {
        assert_eq!(self.dim, other.dim, "DBM dimension mismatch");
        assert_eq!(self.domain, other.domain, "DBM time-domain mismatch");
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "Dbm(false)");
        }
        let names: Vec<String> = (1..self.dim).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "Dbm({})", self.to_conjunction(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: TimeDomain = TimeDomain::Dense;

    // index 1 = x, index 2 = chi (one real clock plus the history clock)
    fn zone(cs: &[Constraint]) -> Dbm {
        Dbm::universe(3, D).and_constraints(cs)
    }

    #[test]
    fn initial_zone_with_one_clock() {
        let d = Dbm::initial_zone(1, D);
        assert_eq!(d.dim(), 3);
        assert!(d.contains(&[0, 0, 0]));
        assert!(!d.contains(&[0, 1, 0]));
        assert!(!d.contains(&[0, 0, 1]));
        assert_eq!(d.get(1, 2), Bound::LE_ZERO);
    }

    #[test]
    fn initial_zone_without_clocks() {
        let d = Dbm::initial_zone(0, D);
        assert_eq!(d.dim(), 2);
        assert!(d.contains(&[0, 0]));
        assert!(!d.contains(&[0, 3]));
    }

    #[test]
    fn future_of_origin() {
        let d = Dbm::zero(2, D).up();
        assert_eq!(d, Dbm::universe(2, D));
        assert_eq!(d.up(), d);
    }

    #[test]
    fn future_keeps_differences() {
        // x = 0, y = 1
        let d = Dbm::universe(3, D).and_constraints(&[
            Constraint::upper(1, 0, false),
            Constraint::upper(2, 1, false),
            Constraint::lower(2, 1, false),
        ]);
        let f = d.up();
        assert_eq!(f.get(2, 1), Bound::le(1));
        assert_eq!(f.get(1, 2), Bound::le(-1));
        assert_eq!(f.get(0, 2), Bound::le(-1));
        assert!(f.get(1, 0).is_infinite());
    }

    #[test]
    fn reset_identity_and_effect() {
        let d = zone(&[Constraint::upper(1, 4, false), Constraint::lower(1, 2, true)]);
        assert_eq!(d.reset(&[]).unwrap(), d);
        assert_eq!(d.reset(&[2]), Err(DbmError::HistoryClockReset));
        let r = d.reset(&[1]).unwrap();
        assert_eq!(r.get(1, 0), Bound::LE_ZERO);
        assert_eq!(r.get(0, 1), Bound::LE_ZERO);
    }

    #[test]
    fn interval_intersection() {
        let a = zone(&[Constraint::lower(1, 0, false)]);
        let b = zone(&[Constraint::upper(1, 2, false)]);
        let c = a.intersect(&b);
        assert_eq!(c.get(1, 0), Bound::le(2));
        assert_eq!(c.get(0, 1), Bound::le(0));

        let lo = zone(&[Constraint::upper(1, 1, false)]);
        let hi = zone(&[Constraint::lower(1, 3, false)]);
        assert!(lo.intersect(&hi).is_empty());
    }

    #[test]
    fn empty_zones_are_one_value() {
        let a = zone(&[Constraint::upper(1, 1, false), Constraint::lower(1, 3, false)]);
        let b = zone(&[Constraint::upper(2, 0, true)]);
        assert!(a.is_empty() && b.is_empty());
        assert_eq!(a, b);
        assert_eq!(a, Dbm::empty(3, D));
    }

    #[test]
    fn inclusion() {
        let ge0 = Dbm::universe(2, D);
        let eq0 = Dbm::zero(2, D);
        assert!(ge0.includes(&eq0));
        assert!(!eq0.includes(&ge0));
        assert!(eq0.includes(&Dbm::empty(2, D)));
    }

    #[test]
    fn k_normalize_relaxes_beyond_ceiling() {
        let d = zone(&[Constraint::lower(1, 7, false)]);
        let n = d.k_normalize(&[0, 5, 5]);
        assert_eq!(n.get(0, 1), Bound::lt(-5));
        let within = zone(&[Constraint::upper(1, 3, false), Constraint::lower(1, 1, false)]);
        assert_eq!(within.k_normalize(&[0, 5, 5]), within);

        let disc = Dbm::universe(3, TimeDomain::Discrete).and_constraints(&[Constraint::lower(1, 7, false)]);
        assert_eq!(disc.k_normalize(&[0, 5, 5]).get(0, 1), Bound::le(-6));
    }

    #[test]
    fn discrete_domain_tightens_strict_bounds() {
        let d = Dbm::universe(2, TimeDomain::Discrete)
            .and_constraints(&[Constraint::lower(1, 1, true), Constraint::upper(1, 2, true)]);
        assert!(d.is_empty());
        let dense = Dbm::universe(2, D)
            .and_constraints(&[Constraint::lower(1, 1, true), Constraint::upper(1, 2, true)]);
        assert!(!dense.is_empty());
    }

    #[test]
    fn self_subtraction_is_empty() {
        let d = zone(&[Constraint::upper(1, 5, false)]);
        assert!(d.subtract(&d).is_empty());
    }

    #[test]
    fn subtract_empty_is_identity() {
        let d = zone(&[Constraint::upper(1, 5, false)]);
        let f = d.subtract(&Dbm::empty(3, D));
        assert_eq!(f.parts(), &[d]);
    }

    #[test]
    fn subtract_middle_leaves_two_sides() {
        let d = Dbm::universe(2, D).and_constraints(&[Constraint::upper(1, 5, false)]);
        let s = Dbm::universe(2, D)
            .and_constraints(&[Constraint::lower(1, 1, false), Constraint::upper(1, 2, false)]);
        let f = d.subtract(&s);
        assert_eq!(f.parts().len(), 2);
        let member = |v: i64, scale: i64| f.contains_scaled(&[0, v], scale);
        assert!(member(0, 2));
        assert!(member(1, 2)); // 0.5
        assert!(!member(2, 2)); // 1
        assert!(!member(4, 2)); // 2
        assert!(member(5, 2)); // 2.5
        assert!(member(10, 2)); // 5
        assert!(!member(11, 2));
    }

    #[test]
    fn spans() {
        // chi <= 2
        let d = zone(&[Constraint::upper(2, 2, false)]);
        assert_eq!(d.span(2).unwrap(), Span::interval(0, false, Bound::le(2)));
        assert_eq!(Dbm::zero(3, D).span(1).unwrap(), Span::interval(0, false, Bound::le(0)));
        let gt4 = zone(&[Constraint::lower(1, 4, true)]);
        assert_eq!(gt4.span(1).unwrap(), Span::interval(4, true, Bound::INFINITY));
        assert_eq!(Dbm::empty(3, D).span(1), Err(DbmError::EmptySpan));
    }

    #[test]
    fn conjunction_rendering() {
        let d = Dbm::initial_zone(1, D).up().and_constraints(&[Constraint::upper(1, 2, false)]);
        assert_eq!(d.to_conjunction(&["x", "chi"]), "0<=x & x<=2 & 0<=chi & chi<=2 & x-chi<=0 & chi-x<=0");
        assert_eq!(Dbm::empty(3, D).to_conjunction(&["x", "chi"]), "false");
    }
}
