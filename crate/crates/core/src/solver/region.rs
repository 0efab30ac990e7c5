//! Clock regions over integer constants.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use crate::game::{Guard, VarId};
use crate::rational::{self, Rational};

/// Equivalence class of clock valuations: integer parts up to the
/// per-clock maximal constant, which clocks have a zero fractional part,
/// and the order of the remaining fractional parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    /// Integer part of each clock; `None` once it exceeds its constant.
    pub ints: Vec<Option<u64>>,
    /// Bounded clocks with zero fractional part, sorted.
    pub zero: Vec<VarId>,
    /// Bounded clocks with positive fractional part, grouped by equal
    /// fractional part, groups in increasing order.
    pub classes: Vec<Vec<VarId>>,
}

impl Region {
    pub fn of(val: &[Rational], max: &[u64]) -> Region {
        let mut ints = Vec::with_capacity(val.len());
        let mut zero = Vec::new();
        let mut by_frac: BTreeMap<Rational, Vec<VarId>> = BTreeMap::new();
        for (x, v) in val.iter().enumerate() {
            if *v > rational::int(max[x] as i64) {
                ints.push(None);
                continue;
            }
            let k = rational::floor(v).to_u64().expect("clock values are non-negative");
            ints.push(Some(k));
            let frac = rational::fract(v);
            if frac.is_zero() {
                zero.push(x);
            } else {
                by_frac.entry(frac).or_default().push(x);
            }
        }
        Region {
            ints,
            zero,
            classes: by_frac.into_values().collect(),
        }
    }

    pub fn zero_region(dim: usize) -> Region {
        Region {
            ints: vec![Some(0); dim],
            zero: (0..dim).collect(),
            classes: Vec::new(),
        }
    }

    /// The immediate time successor, or `None` when every clock is above
    /// its constant.
    pub fn next(&self, max: &[u64]) -> Option<Region> {
        if self.ints.iter().all(Option::is_none) {
            return None;
        }
        let mut r = self.clone();
        if !self.zero.is_empty() {
            let mut moved = Vec::new();
            for &x in &self.zero {
                if r.ints[x] == Some(max[x]) {
                    r.ints[x] = None;
                } else {
                    moved.push(x);
                }
            }
            r.zero.clear();
            if !moved.is_empty() {
                r.classes.insert(0, moved);
            }
        } else {
            let last = r.classes.pop().expect("bounded clock with a fractional part");
            for &x in &last {
                r.ints[x] = r.ints[x].map(|k| k + 1);
            }
            r.zero = last;
        }
        Some(r)
    }

    /// This region followed by all its strict time successors.
    pub fn time_successors(&self, max: &[u64]) -> Vec<Region> {
        let mut out = vec![self.clone()];
        while let Some(r) = out.last().unwrap().next(max) {
            out.push(r);
        }
        out
    }

    pub fn reset(&self, clocks: impl IntoIterator<Item = VarId>) -> Region {
        let mut r = self.clone();
        for x in clocks {
            r.ints[x] = Some(0);
            for c in r.classes.iter_mut() {
                c.retain(|&y| y != x);
            }
            if !r.zero.contains(&x) {
                r.zero.push(x);
            }
        }
        r.classes.retain(|c| !c.is_empty());
        r.zero.sort_unstable();
        r
    }

    /// Whether every valuation of the region satisfies `guard`. The guard
    /// must have integer bounds no larger than the maximal constants.
    pub fn satisfies(&self, guard: &Guard) -> bool {
        self.satisfies_bounds(&integer_bounds(guard))
    }

    /// Same as [`Region::satisfies`] on bounds from [`integer_bounds`].
    pub fn satisfies_bounds(&self, bounds: &[(VarId, i64, i64)]) -> bool {
        bounds.iter().all(|&(x, lo, hi)| match self.ints[x] {
            None => false,
            Some(k) => {
                let k = k as i64;
                if self.zero.contains(&x) {
                    lo <= k && k <= hi
                } else {
                    lo <= k && k < hi
                }
            }
        })
    }
}

/// The conjuncts of an integer-bounded guard as `(clock, lo, hi)`.
pub fn integer_bounds(guard: &Guard) -> Vec<(VarId, i64, i64)> {
    guard
        .conjuncts
        .iter()
        .map(|(&x, i)| {
            let lo = i.lo.to_integer().to_i64().expect("guard bound fits in i64");
            let hi = i.hi.to_integer().to_i64().expect("guard bound fits in i64");
            (x, lo, hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Interval;
    use crate::rational::{int, ratio};

    #[test]
    fn single_clock_regions() {
        let max = [1];
        let rs = Region::zero_region(1).time_successors(&max);
        assert_eq!(rs.len(), 4);
        assert_eq!(rs[1], Region::of(&[ratio(1, 2)], &max));
        assert_eq!(rs[2], Region::of(&[int(1)], &max));
        assert_eq!(rs[3], Region::of(&[int(5)], &max));
    }

    #[test]
    fn point_guard_boundary() {
        let g = Guard::new().with(0, Interval::point(int(1)));
        let max = [1];
        assert!(Region::of(&[int(1)], &max).satisfies(&g));
        assert!(!Region::of(&[ratio(1, 2)], &max).satisfies(&g));
        assert!(!Region::of(&[ratio(3, 2)], &max).satisfies(&g));
    }

    #[test]
    fn successors_follow_fraction_order() {
        let max = [2, 2];
        let r = Region::of(&[ratio(1, 3), int(0)], &max);
        let next = r.next(&max).unwrap();
        assert_eq!(next, Region::of(&[ratio(1, 2), ratio(1, 6)], &max));
        let after = next.next(&max).unwrap();
        assert_eq!(after, Region::of(&[int(1), ratio(2, 3)], &max));
    }

    #[test]
    fn reset_moves_clock_to_zero() {
        let max = [2, 2];
        let r = Region::of(&[ratio(3, 2), ratio(1, 4)], &max).reset([0]);
        assert_eq!(r, Region::of(&[int(0), ratio(1, 4)], &max));
    }
}
