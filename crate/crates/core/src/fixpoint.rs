//! Stage iteration for monotone operators on finite sets.
//!
//! Stage `ξ` is `apply(below(ξ)) ∪ below(ξ)`, where `below(0)` is empty and
//! `below(ξ)` is stage `ξ - 1` otherwise. The closure index is the least `ξ`
//! whose stage equals `below(ξ)`; that stage is the least fixed point. Ranks
//! are 0-based stage indices.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A (purportedly) monotone map on subsets of `0..universe()`.
pub trait MonotoneOperator {
    type Error;

    fn universe(&self) -> usize;

    fn apply(&self, x: &FixedBitSet) -> Result<FixedBitSet, Self::Error>;
}

/// Operator backed by a closure; infallible.
pub struct FnOperator<F> {
    universe: usize,
    f: F,
}

impl<F: Fn(&FixedBitSet) -> FixedBitSet> FnOperator<F> {
    pub fn new(universe: usize, f: F) -> Self {
        FnOperator { universe, f }
    }
}

impl<F: Fn(&FixedBitSet) -> FixedBitSet> MonotoneOperator for FnOperator<F> {
    type Error = std::convert::Infallible;

    fn universe(&self) -> usize {
        self.universe
    }

    fn apply(&self, x: &FixedBitSet) -> Result<FixedBitSet, Self::Error> {
        Ok((self.f)(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixpointError<E> {
    #[error("operator output has {got} bits, expected {expected}")]
    WrongUniverse { expected: usize, got: usize },
    #[error("iteration exceeded {0} stages")]
    NoClosure(usize),
    #[error(transparent)]
    Operator(E),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSequence {
    /// Stages `0..=closure`; the last equals the one before it (or is empty).
    stages: Vec<FixedBitSet>,
}

impl StageSequence {
    pub fn closure(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, xi: usize) -> &FixedBitSet {
        &self.stages[xi.min(self.closure())]
    }

    /// Union of the stages strictly before `xi`.
    pub fn below(&self, xi: usize) -> FixedBitSet {
        if xi == 0 {
            FixedBitSet::with_capacity(self.universe())
        } else {
            self.stage(xi - 1).clone()
        }
    }

    pub fn stages(&self) -> &[FixedBitSet] {
        &self.stages
    }

    pub fn fixed_point(&self) -> &FixedBitSet {
        self.stages.last().unwrap()
    }

    pub fn universe(&self) -> usize {
        self.stages[0].len()
    }

    pub fn prewellorder(&self) -> Prewellorder {
        prewellorder(self)
    }
}

/// Iterates `op` from the empty set until the stages close.
pub fn iterate<O: MonotoneOperator>(op: &O) -> Result<StageSequence, FixpointError<O::Error>> {
    let n = op.universe();
    let mut below = FixedBitSet::with_capacity(n);
    let mut stages = Vec::new();
    loop {
        let mut next = op.apply(&below).map_err(FixpointError::Operator)?;
        if next.len() != n {
            return Err(FixpointError::WrongUniverse {
                expected: n,
                got: next.len(),
            });
        }
        next.union_with(&below);
        let closed = next == below;
        stages.push(next.clone());
        if closed {
            return Ok(StageSequence { stages });
        }
        if stages.len() > n + 1 {
            return Err(FixpointError::NoClosure(n + 1));
        }
        below = next;
    }
}

/// Stage rank of each element; `None` outside the fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prewellorder {
    rank: Vec<Option<usize>>,
}

impl Prewellorder {
    pub fn rank(&self, m: usize) -> Option<usize> {
        self.rank[m]
    }

    pub fn ranks(&self) -> &[Option<usize>] {
        &self.rank
    }

    /// `m` strictly precedes `n`: both ranked and `m` earlier.
    pub fn precedes(&self, m: usize, n: usize) -> bool {
        matches!((self.rank[m], self.rank[n]), (Some(a), Some(b)) if a < b)
    }

    pub fn field(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.rank.len());
        for (m, r) in self.rank.iter().enumerate() {
            if r.is_some() {
                set.insert(m);
            }
        }
        set
    }
}

pub fn prewellorder(s: &StageSequence) -> Prewellorder {
    let mut rank = vec![None; s.universe()];
    for (xi, stage) in s.stages.iter().enumerate() {
        for m in stage.ones() {
            rank[m].get_or_insert(xi);
        }
    }
    Prewellorder { rank }
}

/// Outcome of [`check_monotone`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotoneReport {
    Success { samples: usize },
    Violation { smaller: FixedBitSet, larger: FixedBitSet },
}

impl MonotoneReport {
    pub fn is_success(&self) -> bool {
        matches!(self, MonotoneReport::Success { .. })
    }
}

impl fmt::Display for MonotoneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneReport::Success { samples } => write!(f, "monotone on {samples} samples"),
            MonotoneReport::Violation { smaller, larger } => write!(
                f,
                "not monotone: {:?} ⊆ {:?}",
                smaller.ones().collect::<Vec<_>>(),
                larger.ones().collect::<Vec<_>>()
            ),
        }
    }
}

/// Spot-checks monotonicity on `samples` pairs `X ⊆ Y`. The first pair is
/// always `(∅, universe)`; the rest are random.
pub fn check_monotone<O: MonotoneOperator>(
    op: &O,
    samples: usize,
    seed: u64,
) -> Result<MonotoneReport, O::Error> {
    let n = op.universe();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let (x, y) = if i == 0 {
            let mut full = FixedBitSet::with_capacity(n);
            full.insert_range(..);
            (FixedBitSet::with_capacity(n), full)
        } else {
            random_pair(&mut rng, n)
        };
        let fx = op.apply(&x)?;
        let fy = op.apply(&y)?;
        if !fx.is_subset(&fy) {
            return Ok(MonotoneReport::Violation {
                smaller: x,
                larger: y,
            });
        }
    }
    Ok(MonotoneReport::Success { samples })
}

/// A random pair `X ⊆ Y` over `0..n`.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> (FixedBitSet, FixedBitSet) {
    let mut x = FixedBitSet::with_capacity(n);
    let mut y = FixedBitSet::with_capacity(n);
    let py: f64 = rng.gen();
    let px: f64 = rng.gen();
    for m in 0..n {
        if rng.gen_bool(py) {
            y.insert(m);
            if rng.gen_bool(px) {
                x.insert(m);
            }
        }
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &i in items {
            s.insert(i);
        }
        s
    }

    fn ladder(n: usize) -> FnOperator<impl Fn(&FixedBitSet) -> FixedBitSet> {
        FnOperator::new(n, move |x: &FixedBitSet| {
            let mut out = set(n, &[0]);
            for m in x.ones() {
                if m + 1 < n {
                    out.insert(m + 1);
                }
            }
            out
        })
    }

    #[test]
    fn ladder_ranks_are_indices() {
        let s = iterate(&ladder(5)).unwrap();
        assert_eq!(s.closure(), 5);
        assert_eq!(s.below(0), set(5, &[]));
        for xi in 0..5 {
            assert_eq!(s.stage(xi), &set(5, &(0..=xi).collect::<Vec<_>>()));
        }
        let r = s.prewellorder();
        for m in 0..5 {
            assert_eq!(r.rank(m), Some(m));
        }
        assert!(r.precedes(1, 3));
        assert!(!r.precedes(3, 3));
    }

    #[test]
    fn identity_has_empty_fixed_point() {
        let op = FnOperator::new(2, |x: &FixedBitSet| x.clone());
        let s = iterate(&op).unwrap();
        assert_eq!(s.closure(), 0);
        assert!(s.fixed_point().is_clear());
        assert_eq!(s.prewellorder().ranks(), &[None, None]);
    }

    #[test]
    fn constant_base_closes_after_one_stage() {
        let op = FnOperator::new(3, |_: &FixedBitSet| set(3, &[0, 1, 2]));
        let s = iterate(&op).unwrap();
        assert_eq!(s.closure(), 1);
        assert_eq!(s.fixed_point().count_ones(..), 3);
    }

    #[test]
    fn wrong_universe_is_reported() {
        let op = FnOperator::new(3, |_: &FixedBitSet| set(4, &[0]));
        assert_eq!(
            iterate(&op).unwrap_err(),
            FixpointError::WrongUniverse {
                expected: 3,
                got: 4
            }
        );
    }

    #[test]
    fn monotone_checks() {
        assert!(check_monotone(&ladder(6), 100, 1).unwrap().is_success());
        let complement = FnOperator::new(4, |x: &FixedBitSet| {
            let mut c = x.clone();
            c.toggle_range(..);
            c
        });
        assert_eq!(
            check_monotone(&complement, 10, 1).unwrap(),
            MonotoneReport::Violation {
                smaller: set(4, &[]),
                larger: set(4, &[0, 1, 2, 3])
            }
        );
    }

    /// Horn-rule operator: `m` is produced when all premises of one of its
    /// rules are present.
    fn horn(n: usize, rules: Vec<(usize, Vec<usize>)>) -> impl Fn(&FixedBitSet) -> FixedBitSet {
        move |x| {
            let mut out = FixedBitSet::with_capacity(n);
            for (head, body) in &rules {
                if body.iter().all(|&b| x.contains(b)) {
                    out.insert(*head);
                }
            }
            out
        }
    }

    fn arb_horn() -> impl Strategy<Value = (usize, Vec<(usize, Vec<usize>)>)> {
        (1usize..=12).prop_flat_map(|n| {
            let rule = (0..n, proptest::collection::vec(0..n, 0..3));
            (Just(n), proptest::collection::vec(rule, 0..20))
        })
    }

    proptest! {
        #[test]
        fn stage_laws_hold_for_horn_operators((n, rules) in arb_horn(), seed in any::<u64>()) {
            let op = FnOperator::new(n, horn(n, rules));
            let s = iterate(&op).unwrap();
            prop_assert!(s.closure() <= n);
            for xi in 0..=s.closure() {
                let mut expect = op.apply(&s.below(xi)).unwrap();
                expect.union_with(&s.below(xi));
                prop_assert_eq!(s.stage(xi), &expect);
                if xi < s.closure() {
                    prop_assert!(s.below(xi) != *s.stage(xi));
                }
            }
            let fp = s.fixed_point();
            let mut again = op.apply(fp).unwrap();
            again.union_with(fp);
            prop_assert_eq!(&again, fp);
            prop_assert!(op.apply(fp).unwrap().is_subset(fp));
            prop_assert_eq!(&s.prewellorder().field(), fp);

            // Least among sampled prefixed points.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let (mut p, _) = random_pair(&mut rng, n);
                loop {
                    let mut next = op.apply(&p).unwrap();
                    next.union_with(&p);
                    if next == p { break; }
                    p = next;
                }
                prop_assert!(fp.is_subset(&p));
            }
            prop_assert!(check_monotone(&op, 20, seed).unwrap().is_success());
        }
    }
}
