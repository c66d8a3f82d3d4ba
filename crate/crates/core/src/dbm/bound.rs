use std::fmt;

/// Upper bound on a clock difference `ci - cj`.
///
/// Encoded as `value << 1 | non_strict` so that the derived integer order is
/// the bound order: `(v, <)` sorts directly below `(v, <=)`, and
/// [`Bound::INFINITY`] is greater than every finite bound.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i32);

impl Bound {
    pub const INFINITY: Bound = Bound(i32::MAX);
    pub const LE_ZERO: Bound = Bound(1);
    pub const LT_ZERO: Bound = Bound(0);

    pub const fn finite(value: i32, strict: bool) -> Bound {
        Bound((value << 1) | (!strict) as i32)
    }

    pub const fn le(value: i32) -> Bound {
        Bound::finite(value, false)
    }

    pub const fn lt(value: i32) -> Bound {
        Bound::finite(value, true)
    }

    pub const fn is_infinite(self) -> bool {
        self.0 == i32::MAX
    }

    /// The numeric part, or `None` for infinity.
    pub const fn value(self) -> Option<i32> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0 >> 1)
        }
    }

    pub const fn is_strict(self) -> bool {
        !self.is_infinite() && self.0 & 1 == 0
    }

    /// Sum of two bounds: infinity absorbs, strictness is or-ed.
    pub fn add(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            return Bound::INFINITY;
        }
        Bound((((self.0 >> 1) + (other.0 >> 1)) << 1) | (self.0 & other.0 & 1))
    }

    /// Bound of the complementary constraint on the reversed difference:
    /// `not (ci - cj <= v)` is `cj - ci < -v`.
    pub fn complement(self) -> Bound {
        debug_assert!(!self.is_infinite());
        let v = self.0 >> 1;
        Bound::finite(-v, !self.is_strict())
    }

    /// Integer tightening: over integer-valued clocks `x < v` is `x <= v - 1`.
    pub fn tighten_integer(self) -> Bound {
        if self.is_strict() {
            Bound::le((self.0 >> 1) - 1)
        } else {
            self
        }
    }

    /// Whether the integer difference `diff` satisfies this bound, with the
    /// bound value scaled by `scale` (used for rational valuations).
    pub fn admits_scaled(self, diff: i64, scale: i64) -> bool {
        match self.value() {
            None => true,
            Some(v) => {
                let limit = v as i64 * scale;
                if self.is_strict() {
                    diff < limit
                } else {
                    diff <= limit
                }
            }
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(v) if self.is_strict() => write!(f, "<{v}"),
            Some(v) => write!(f, "<={v}"),
        }
    }
}
