//! Difference-bound matrices over the model clocks plus the history clock.
//!
//! Matrix index 0 is the reference clock, model clocks follow, and the
//! history clock χ always occupies the last index.

mod bound;
mod federation;
mod matrix;
mod span;

pub use bound::Bound;
pub use federation::{federation_covers, Federation};
pub use matrix::{Constraint, Dbm, TimeDomain};
pub use span::Span;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbmError {
    #[error("span of empty zone")]
    EmptySpan,
    #[error("the history clock is never reset")]
    HistoryClockReset,
}
