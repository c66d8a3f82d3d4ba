//! Zone histories: the sequence of zones through which a symbolic state was
//! reached, each carrying the history clock χ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dbm::{Constraint, Dbm, Federation, Span};

/// Maximum number of retained history elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HistoryBound {
    Finite(usize),
    Unbounded,
}

impl HistoryBound {
    pub fn keeps(self, len: usize) -> usize {
        match self {
            HistoryBound::Finite(b) => len.min(b),
            HistoryBound::Unbounded => len,
        }
    }
}

impl fmt::Display for HistoryBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryBound::Finite(b) => write!(f, "{b}"),
            HistoryBound::Unbounded => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for HistoryBound {
    type Err = std::num::ParseIntError;

    /// `inf` or a non-negative integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            Ok(HistoryBound::Unbounded)
        } else {
            s.parse().map(HistoryBound::Finite)
        }
    }
}

/// Strict (`≺`) or non-strict (`⪯`) span containment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Strict,
    Weak,
}

/// One symbolic step: `R(Z↑ ∧ g ∧ I(src)) ∧ I(dst)`.
#[derive(Clone, Copy, Debug)]
pub struct Step<'a> {
    pub guard: &'a [Constraint],
    pub source_invariant: &'a [Constraint],
    pub resets: &'a [usize],
    pub target_invariant: &'a [Constraint],
}

impl Step<'_> {
    pub fn apply(&self, zone: &Dbm) -> Dbm {
        self.apply_before_reset(zone)
            .reset(self.resets)
            .expect("switches never reset the history clock")
            .and_constraints(self.target_invariant)
    }

    /// `Z↑ ∧ g ∧ I(src)`.
    pub fn apply_before_reset(&self, zone: &Dbm) -> Dbm {
        zone.up()
            .and_constraints(self.guard)
            .and_constraints(self.source_invariant)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ZoneHistory {
    elements: Vec<Dbm>,
}

impl ZoneHistory {
    pub fn empty() -> ZoneHistory {
        ZoneHistory::default()
    }

    pub fn from_elements(elements: Vec<Dbm>) -> ZoneHistory {
        ZoneHistory { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Oldest first.
    pub fn elements(&self) -> &[Dbm] {
        &self.elements
    }

    /// The newest `min(k, len)` elements.
    pub fn postfix(&self, k: usize) -> ZoneHistory {
        let start = self.len().saturating_sub(k);
        ZoneHistory {
            elements: self.elements[start..].to_vec(),
        }
    }

    pub fn truncate(&self, bound: HistoryBound) -> ZoneHistory {
        self.postfix(bound.keeps(self.len()))
    }

    /// χ-spans of every element; false elements give the empty span.
    pub fn spans(&self) -> Vec<Span> {
        self.elements
            .iter()
            .map(|e| e.span_or_empty(e.history_clock()))
            .collect()
    }

    /// χ-spans relaxed beyond `ceiling`, see [`Dbm::span_within`].
    pub fn spans_within(&self, ceiling: i32) -> Vec<Span> {
        self.elements
            .iter()
            .map(|e| e.span_within(e.history_clock(), ceiling))
            .collect()
    }

    /// `(e1) . (e2) . ...`, or `eps` for the empty history.
    pub fn render(&self, names: &[&str]) -> String {
        if self.elements.is_empty() {
            return "eps".to_string();
        }
        self.elements
            .iter()
            .map(|e| format!("({})", e.to_conjunction(names)))
            .collect::<Vec<_>>()
            .join(" . ")
    }

    pub fn render_spans(&self) -> String {
        if self.elements.is_empty() {
            return "eps".to_string();
        }
        self.spans()
            .iter()
            .map(|s| format!("{s:?}"))
            .collect::<Vec<_>>()
            .join(" . ")
    }
}

impl fmt::Debug for ZoneHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZoneHistory[{}]", self.render_spans())
    }
}

fn normalize(d: Dbm, ceilings: &[i32]) -> Dbm {
    d.k_normalize(ceilings)
}

/// History update along `step` from source zone `source`: every element is
/// pushed through the step and one element for the step itself, built from
/// `source ∧ χ = 0`, is appended. The result keeps the newest `bound`
/// elements.
pub fn update(h: &ZoneHistory, source: &Dbm, step: &Step<'_>, bound: HistoryBound, ceilings: &[i32]) -> ZoneHistory {
    update_from(h, Some(&source.with_history_zero()), step, bound, ceilings)
}

/// Like [`update`], with the zone the new element starts from given
/// explicitly (`None` appends nothing).
pub fn update_from(
    h: &ZoneHistory,
    base: Option<&Dbm>,
    step: &Step<'_>,
    bound: HistoryBound,
    ceilings: &[i32],
) -> ZoneHistory {
    let keep = bound.keeps(h.len() + usize::from(base.is_some()));
    let mut elements: Vec<Dbm> = Vec::with_capacity(keep);
    let skip = h.len() + usize::from(base.is_some()) - keep;
    for e in h.elements.iter().skip(skip) {
        elements.push(normalize(step.apply(e), ceilings));
    }
    if let Some(base) = base {
        if keep > 0 {
            elements.push(normalize(step.apply(base), ceilings));
        }
    }
    ZoneHistory { elements }
}

fn span_rel(a: &Span, b: &Span, mode: Containment) -> bool {
    match mode {
        Containment::Strict => a.is_strictly_inside(b),
        Containment::Weak => a.is_inside(b),
    }
}

/// Element-wise χ-span comparison; histories of different length compare
/// their postfixes of the shorter length.
pub fn compare(h: &ZoneHistory, h2: &ZoneHistory, mode: Containment) -> bool {
    let k = h.len().min(h2.len());
    let (a, b) = (h.postfix(k), h2.postfix(k));
    a.spans().iter().zip(b.spans().iter()).all(|(x, y)| span_rel(x, y, mode))
}

/// [`compare`] on spans relaxed beyond the χ ceiling. Values above the
/// ceiling are indistinguishable to every guard and invariant, but the
/// closure of a normalized zone can still separate them.
pub fn compare_within(h: &ZoneHistory, h2: &ZoneHistory, mode: Containment, ceiling: i32) -> bool {
    let k = h.len().min(h2.len());
    let (a, b) = (h.postfix(k), h2.postfix(k));
    a.spans_within(ceiling)
        .iter()
        .zip(b.spans_within(ceiling).iter())
        .all(|(x, y)| span_rel(x, y, mode))
}

/// `h ⪯ h2 ∧ h2 ⪯ h`.
pub fn postfix_equal(h: &ZoneHistory, h2: &ZoneHistory) -> bool {
    compare(h, h2, Containment::Weak) && compare(h2, h, Containment::Weak)
}

/// Postfix comparison at length `min(|h|, |h2|, ||h| - |h2||)`, both ways.
/// Equal-length histories compare nothing and are always cut-equal.
pub fn cut_equal(h: &ZoneHistory, h2: &ZoneHistory) -> bool {
    let k = h.len().min(h2.len()).min(h.len().abs_diff(h2.len()));
    postfix_equal(&h.postfix(k), &h2.postfix(k))
}

/// Element-wise disjunction of histories, oldest first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct JoinedHistory {
    pub elements: Vec<Federation>,
}

impl JoinedHistory {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Joins histories after padding the shorter ones at the old end with
/// false elements.
pub fn join<'a>(hs: impl IntoIterator<Item = &'a ZoneHistory>) -> JoinedHistory {
    let hs: Vec<&ZoneHistory> = hs.into_iter().collect();
    let len = hs.iter().map(|h| h.len()).max().unwrap_or(0);
    let Some(first) = hs.iter().find_map(|h| h.elements.first()) else {
        return JoinedHistory {
            elements: Vec::new(),
        };
    };
    let (dim, domain) = (first.dim(), first.domain());
    let mut elements = vec![Federation::empty(dim, domain); len];
    for h in hs {
        let pad = len - h.len();
        for (i, e) in h.elements.iter().enumerate() {
            elements[pad + i].push(e.clone());
        }
    }
    JoinedHistory { elements }
}

/// True iff some element of `h`, aligned at the newest end, is not
/// contained in the matching element of `cover`. Positions `cover` lacks
/// count as false.
pub fn not_covered(h: &ZoneHistory, cover: &JoinedHistory) -> bool {
    let n = h.len();
    let m = cover.len();
    h.elements.iter().enumerate().any(|(i, e)| {
        let j = (m + i).checked_sub(n);
        match j {
            Some(j) => !cover.elements[j].covers(e),
            None => !e.is_empty(),
        }
    })
}
