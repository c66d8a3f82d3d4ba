//! Zone operations checked against brute-force enumeration of valuations.
//!
//! Discrete zones are compared on all integer valuations with components up
//! to three times the largest constant. Dense zones are compared on a grid
//! of step 1/3; delays and reset preimages are searched on a grid twice as
//! fine so that open intervals between grid points are not missed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tabisim::dbm::{federation_covers, Bound, Constraint, Dbm, Federation, TimeDomain};

pub const MAX_CONSTANT: i32 = 3;
const LIMIT: i64 = 3 * MAX_CONSTANT as i64;

#[derive(Clone, Copy, Debug)]
pub struct OpReport {
    pub op: &'static str,
    pub instances: usize,
    pub disagreements: usize,
    /// Instances where the expected answer was `true` (or, for set-valued
    /// operations, where the result was non-empty on the grid).
    pub positives: usize,
}

#[derive(Clone, Copy)]
struct Grid {
    dim: usize,
    domain: TimeDomain,
    scale: i64,
    fine: i64,
}

impl Grid {
    fn new(dim: usize, domain: TimeDomain) -> Grid {
        match domain {
            TimeDomain::Discrete => Grid { dim, domain, scale: 1, fine: 1 },
            TimeDomain::Dense => Grid { dim, domain, scale: 3, fine: 2 },
        }
    }

    fn points(&self) -> Vec<Vec<i64>> {
        let top = LIMIT * self.scale;
        let mut out = vec![vec![0i64]];
        for _ in 1..self.dim {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..=top).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn has(&self, z: &Dbm, p: &[i64]) -> bool {
        z.contains_scaled(p, self.scale)
    }

    fn has_fine(&self, z: &Dbm, p: &[i64]) -> bool {
        z.contains_scaled(p, self.scale * self.fine)
    }
}

fn random_constraint(rng: &mut impl Rng, dim: usize) -> Constraint {
    let i = rng.gen_range(0..dim);
    let j = loop {
        let j = rng.gen_range(0..dim);
        if j != i {
            break j;
        }
    };
    let c = if j == 0 {
        rng.gen_range(0..=MAX_CONSTANT)
    } else if i == 0 {
        rng.gen_range(-MAX_CONSTANT..=0)
    } else {
        rng.gen_range(-MAX_CONSTANT..=MAX_CONSTANT)
    };
    Constraint::new(i, j, Bound::finite(c, rng.gen_bool(0.4)))
}

fn random_zone(rng: &mut impl Rng, g: Grid) -> Dbm {
    let mut z = Dbm::universe(g.dim, g.domain);
    for _ in 0..rng.gen_range(1..=3) {
        z.constrain(random_constraint(rng, g.dim));
    }
    if rng.gen_bool(0.3) {
        z = z.up();
    }
    z
}

fn random_grid(rng: &mut impl Rng) -> Grid {
    if rng.gen_bool(0.5) {
        Grid::new(rng.gen_range(2..=4), TimeDomain::Discrete)
    } else {
        Grid::new(rng.gen_range(2..=3), TimeDomain::Dense)
    }
}

/// The negation of one finite bound of `z`, or `None` if `z` is the
/// universe.
fn negated_bound(rng: &mut impl Rng, z: &Dbm) -> Option<Constraint> {
    let mut finite = Vec::new();
    for i in 0..z.dim() {
        for j in 0..z.dim() {
            if i != j && !z.get(i, j).is_infinite() {
                finite.push((i, j));
            }
        }
    }
    let &(i, j) = finite.choose(rng)?;
    Some(Constraint::new(j, i, z.get(i, j).complement()))
}

struct Tally {
    op: &'static str,
    instances: usize,
    disagreements: usize,
    positives: usize,
}

impl Tally {
    fn new(op: &'static str) -> Tally {
        Tally { op, instances: 0, disagreements: 0, positives: 0 }
    }

    fn record(&mut self, agrees: bool, positive: bool) {
        self.instances += 1;
        self.disagreements += usize::from(!agrees);
        self.positives += usize::from(positive);
    }

    fn report(&self) -> OpReport {
        OpReport { op: self.op, instances: self.instances, disagreements: self.disagreements, positives: self.positives }
    }
}

fn future(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("future");
    for _ in 0..n {
        let g = random_grid(rng);
        let z = random_zone(rng, g);
        let up = z.up();
        let mut agrees = true;
        let mut any = false;
        for p in g.points() {
            let lo = p[1..].iter().min().copied().unwrap_or(0) * g.fine;
            let expected = (0..=lo).any(|d| {
                let q: Vec<i64> = p.iter().enumerate().map(|(i, v)| if i == 0 { 0 } else { v * g.fine - d }).collect();
                g.has_fine(&z, &q)
            });
            agrees &= expected == g.has(&up, &p);
            any |= expected;
        }
        t.record(agrees, any);
    }
    t.report()
}

fn reset(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("reset");
    while t.instances < n {
        let g = random_grid(rng);
        if g.dim < 3 {
            continue;
        }
        let z = random_zone(rng, g);
        // Model clocks are 1..dim-1; the last index is the history clock.
        let model: Vec<usize> = (1..g.dim - 1).collect();
        let k = rng.gen_range(1..=model.len());
        let clocks: Vec<usize> = model.choose_multiple(rng, k).copied().collect();
        let r = z.reset(&clocks).expect("model clocks may be reset");
        let top = (LIMIT + 3 * MAX_CONSTANT as i64) * g.scale * g.fine;
        let mut agrees = z.reset(&[g.dim - 1]).is_err();
        let mut any = false;
        for p in g.points() {
            let expected = clocks.iter().all(|&c| p[c] == 0) && {
                let base: Vec<i64> = p.iter().map(|v| v * g.fine).collect();
                preimage_exists(&z, g, &base, &clocks, top)
            };
            agrees &= expected == g.has(&r, &p);
            any |= expected;
        }
        t.record(agrees, any);
    }
    t.report()
}

fn preimage_exists(z: &Dbm, g: Grid, p: &[i64], free: &[usize], top: i64) -> bool {
    match free.split_first() {
        None => g.has_fine(z, p),
        Some((&c, rest)) => (0..=top).any(|u| {
            let mut q = p.to_vec();
            q[c] = u;
            preimage_exists(z, g, &q, rest, top)
        }),
    }
}

fn intersect(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("intersect");
    for _ in 0..n {
        let g = random_grid(rng);
        let (a, b) = (random_zone(rng, g), random_zone(rng, g));
        let c = a.intersect(&b);
        let mut agrees = true;
        let mut any = false;
        for p in g.points() {
            let expected = g.has(&a, &p) && g.has(&b, &p);
            agrees &= expected == g.has(&c, &p);
            any |= expected;
        }
        t.record(agrees, any);
    }
    t.report()
}

fn includes(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("includes");
    for _ in 0..n {
        let g = random_grid(rng);
        let outer = random_zone(rng, g);
        let inner = if rng.gen_bool(0.5) {
            let mut d = outer.clone();
            d.constrain(random_constraint(rng, g.dim));
            d
        } else {
            random_zone(rng, g)
        };
        let expected = g.points().iter().all(|p| !g.has(&inner, p) || g.has(&outer, p));
        t.record(expected == outer.includes(&inner), expected);
    }
    t.report()
}

fn subtract(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("subtract");
    for _ in 0..n {
        let g = random_grid(rng);
        let (a, b) = (random_zone(rng, g), random_zone(rng, g));
        let diff = a.subtract(&b);
        let mut agrees = true;
        let mut any = false;
        for p in g.points() {
            let expected = g.has(&a, &p) && !g.has(&b, &p);
            agrees &= expected == diff.contains_scaled(&p, g.scale);
            any |= expected;
        }
        t.record(agrees, any);
    }
    t.report()
}

fn covers(rng: &mut impl Rng, n: usize) -> OpReport {
    let mut t = Tally::new("federation_covers");
    for _ in 0..n {
        let g = random_grid(rng);
        let d = random_zone(rng, g);
        let mut cover = Federation::empty(g.dim, g.domain);
        match rng.gen_range(0..3) {
            // Split `d` along one of its own bounds or a random cut.
            0 => {
                let cut = negated_bound(rng, &d).unwrap_or_else(|| random_constraint(rng, g.dim));
                let inside = Constraint::new(cut.j, cut.i, cut.bound.complement());
                cover.push(d.and_constraints(&[cut]));
                cover.push(d.and_constraints(&[inside]));
            }
            // Drop one piece of such a split.
            1 => {
                let cut = random_constraint(rng, g.dim);
                cover.push(d.and_constraints(&[cut]));
                cover.push(random_zone(rng, g));
            }
            _ => {
                for _ in 0..rng.gen_range(1..=3) {
                    cover.push(random_zone(rng, g));
                }
            }
        }
        let expected = g
            .points()
            .iter()
            .all(|p| !g.has(&d, p) || cover.parts().iter().any(|z| g.has(z, p)));
        t.record(expected == federation_covers(&cover, &d), expected);
    }
    t.report()
}

/// Runs `per_op` instances of every operation.
pub fn run(seed: u64, per_op: usize) -> Vec<OpReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        future(&mut rng, per_op),
        reset(&mut rng, per_op),
        intersect(&mut rng, per_op),
        includes(&mut rng, per_op),
        subtract(&mut rng, per_op),
        covers(&mut rng, per_op),
    ]
}
