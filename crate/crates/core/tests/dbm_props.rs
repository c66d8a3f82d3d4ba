use proptest::prelude::*;

use tabisim::dbm::{Bound, Constraint, Dbm, Span, TimeDomain};

const MAX: i32 = 4;

fn bound() -> impl Strategy<Value = Bound> {
    prop_oneof![
        1 => Just(Bound::INFINITY),
        4 => (-MAX..=MAX, any::<bool>()).prop_map(|(v, s)| Bound::finite(v, s)),
    ]
}

fn domain() -> impl Strategy<Value = TimeDomain> {
    prop_oneof![Just(TimeDomain::Discrete), Just(TimeDomain::Dense)]
}

/// A raw, generally non-canonical bound matrix.
fn raw_matrix() -> impl Strategy<Value = (usize, Vec<Bound>)> {
    (2usize..=3).prop_flat_map(|dim| (Just(dim), proptest::collection::vec(bound(), dim * dim)))
}

fn zone() -> impl Strategy<Value = Dbm> {
    (2usize..=4, domain())
        .prop_flat_map(|(dim, d)| {
            let c = (0..dim, 0..dim, -MAX..=MAX, any::<bool>());
            (Just(dim), Just(d), proptest::collection::vec(c, 0..5), any::<bool>())
        })
        .prop_map(|(dim, d, cs, up)| {
            let mut z = Dbm::universe(dim, d);
            for (i, j, v, s) in cs {
                if i != j {
                    z.constrain(Constraint::new(i, j, Bound::finite(v, s)));
                }
            }
            if up {
                z.up()
            } else {
                z
            }
        })
}

fn matrix(z: &Dbm) -> Vec<Bound> {
    let n = z.dim();
    (0..n).flat_map(|i| (0..n).map(move |j| z.get(i, j))).collect()
}

fn grid(dim: usize, top: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0]];
    for _ in 1..dim {
        out = out.into_iter().flat_map(|p| (0..=top).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

/// Whether a point satisfies every raw entry, diagonal included.
fn satisfies(dim: usize, m: &[Bound], p: &[i64], scale: i64) -> bool {
    (0..dim).all(|i| (0..dim).all(|j| m[i * dim + j].admits_scaled(p[i] - p[j], scale)))
}

fn span() -> impl Strategy<Value = Span> {
    prop_oneof![
        1 => Just(Span::Empty),
        6 => (0..5i32, any::<bool>(), prop_oneof![Just(None), (0..6i32, any::<bool>()).prop_map(Some)]).prop_map(
            |(lo, ls, up)| match up {
                None => Span::interval(lo, ls, Bound::INFINITY),
                Some((len, us)) => Span::interval(lo, ls, Bound::finite(lo + len, us)),
            }
        ),
    ]
}

proptest! {
    #[test]
    fn canonicalization_preserves_valuations_and_is_idempotent((dim, m) in raw_matrix(), d in domain()) {
        let z = Dbm::from_bounds(dim, d, m.clone());
        if !z.is_empty() {
            prop_assert_eq!(Dbm::from_bounds(dim, d, matrix(&z)), z.clone());
        }
        let scale = if d == TimeDomain::Dense { 2 } else { 1 };
        for p in grid(dim, (MAX as i64 + 2) * scale) {
            prop_assert_eq!(satisfies(dim, &m, &p, scale), z.contains_scaled(&p, scale), "{:?}", p);
        }
    }

    /// Normalization only widens, and never changes whether the zone meets
    /// or lies inside a constraint within the ceilings.
    #[test]
    fn k_normalize_keeps_constraints_within_ceilings(
        z in zone(),
        ceil in proptest::collection::vec(0..=MAX, 4),
        clock in 1usize..4,
        c in 0..=MAX,
        upper in any::<bool>(),
        strict in any::<bool>(),
    ) {
        let n = z.dim();
        let clock = 1 + (clock - 1) % (n - 1);
        let mut ceilings = vec![0];
        ceilings.extend(&ceil[..n - 1]);
        let c = c.min(ceilings[clock]);
        let norm = z.k_normalize(&ceilings);
        prop_assert!(norm.includes(&z));
        prop_assert_eq!(norm.k_normalize(&ceilings), norm.clone());
        let atom = if upper { Constraint::upper(clock, c, strict) } else { Constraint::lower(clock, c, strict) };
        let g = Dbm::universe(n, z.domain()).and_constraints(&[atom]);
        prop_assert_eq!(g.includes(&z), g.includes(&norm));
        prop_assert_eq!(g.intersect(&z).is_empty(), g.intersect(&norm).is_empty());
    }

    /// Relaxed spans see a zone the way its normalization does.
    #[test]
    fn relaxed_span_is_invariant_under_normalization(
        z in zone(),
        ceil in proptest::collection::vec(0..=MAX, 4),
        clock in 1usize..4,
    ) {
        let n = z.dim();
        let clock = 1 + (clock - 1) % (n - 1);
        let mut ceilings = vec![0];
        ceilings.extend(&ceil[..n - 1]);
        let k = ceilings[clock];
        let relaxed = z.span_within(clock, k);
        prop_assert!(z.span_or_empty(clock).is_inside(&relaxed));
        prop_assert_eq!(z.k_normalize(&ceilings).span_within(clock, k), relaxed);
    }

    #[test]
    fn span_inside_is_a_partial_order(a in span(), b in span(), c in span()) {
        prop_assert!(a.is_inside(&a));
        if a.is_inside(&b) && b.is_inside(&a) {
            prop_assert_eq!(a, b);
        }
        if a.is_inside(&b) && b.is_inside(&c) {
            prop_assert!(a.is_inside(&c));
        }
    }

    #[test]
    fn strict_span_inside_is_irreflexive_and_implies_inside(a in span(), b in span()) {
        prop_assert!(!a.is_strictly_inside(&a));
        if a.is_strictly_inside(&b) {
            prop_assert!(a.is_inside(&b));
        }
    }
}
