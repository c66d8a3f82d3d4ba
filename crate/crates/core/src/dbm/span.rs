use std::cmp::Ordering;
use std::fmt;

use super::bound::Bound;

/// Interval of values a clock takes within a zone.
///
/// A strict lower endpoint (`x > 4`) ranks above the non-strict one at the
/// same value; upper endpoints use the [`Bound`] order. The empty span comes
/// from the constant-false history element.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Span {
    Empty,
    Interval { lo: i32, lo_strict: bool, up: Bound },
}

impl Span {
    pub fn interval(lo: i32, lo_strict: bool, up: Bound) -> Span {
        Span::Interval { lo, lo_strict, up }
    }

    /// Closed interval `[lo, up]`.
    pub fn closed(lo: i32, up: i32) -> Span {
        Span::interval(lo, false, Bound::le(up))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Span::Empty)
    }

    /// Length `up - lo`; strict when either endpoint is.
    pub fn length(&self) -> Option<Bound> {
        match *self {
            Span::Empty => None,
            Span::Interval { lo, lo_strict, up } => Some(match up.value() {
                None => Bound::INFINITY,
                Some(u) => Bound::finite(u - lo, lo_strict || up.is_strict()),
            }),
        }
    }

    /// `a ≺ b`: both endpoints of `a` strictly inside those of `b`.
    pub fn is_strictly_inside(&self, other: &Span) -> bool {
        match (self, other) {
            (Span::Empty, Span::Empty) => false,
            (Span::Empty, _) => true,
            (_, Span::Empty) => false,
            (
                &Span::Interval { lo, lo_strict, up },
                &Span::Interval {
                    lo: lo2,
                    lo_strict: s2,
                    up: up2,
                },
            ) => lower_cmp(lo, lo_strict, lo2, s2) == Ordering::Greater && up < up2,
        }
    }

    /// `a ⪯ b`: containment of the endpoints.
    pub fn is_inside(&self, other: &Span) -> bool {
        match (self, other) {
            (Span::Empty, _) => true,
            (_, Span::Empty) => false,
            (
                &Span::Interval { lo, lo_strict, up },
                &Span::Interval {
                    lo: lo2,
                    lo_strict: s2,
                    up: up2,
                },
            ) => lower_cmp(lo, lo_strict, lo2, s2) != Ordering::Less && up <= up2,
        }
    }

    /// `a ≤ b` on lengths; two unbounded spans compare as equal.
    pub fn is_no_longer_than(&self, other: &Span) -> bool {
        match (self.length(), other.length()) {
            (None, _) => true,
            (_, None) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }
}

fn lower_cmp(a: i32, a_strict: bool, b: i32, b_strict: bool) -> Ordering {
    a.cmp(&b).then(a_strict.cmp(&b_strict))
}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Span::Empty => write!(f, "()"),
            Span::Interval { lo, lo_strict, up } => {
                let open = if lo_strict { "(" } else { "[" };
                match up.value() {
                    None => write!(f, "{open}{lo}, inf)"),
                    Some(u) => {
                        let close = if up.is_strict() { ")" } else { "]" };
                        write!(f, "{open}{lo}, {u}{close}")
                    }
                }
            }
        }
    }
}
