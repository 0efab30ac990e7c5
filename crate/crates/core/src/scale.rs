//! Uniform rescaling of timed games to integer constants.

use num_bigint::BigInt;

use crate::game::{Flavor, Game};
use crate::rational::{self, Rational};

/// Multiplies every guard bound by the lcm `D` of their denominators.
///
/// The result is related to `g` by the time rescale `t ↦ D·t`: a valuation
/// `v` of `g` corresponds to `D·v` in the scaled game.
pub fn scale_to_integers(g: &Game) -> (Game, BigInt) {
    debug_assert_eq!(g.flavor, Flavor::Timed);
    let bounds = g
        .edges
        .values()
        .flat_map(|e| e.guard.conjuncts.values())
        .flat_map(|i| [&i.lo, &i.hi]);
    let d = rational::lcm_of_denominators(bounds);
    (rescale_bounds(g, &Rational::from_integer(d.clone())), d)
}

/// Multiplies every guard bound and reset value by `factor`.
pub fn rescale_bounds(g: &Game, factor: &Rational) -> Game {
    let mut out = g.clone();
    for e in out.edges.values_mut() {
        for i in e.guard.conjuncts.values_mut() {
            *i = i.scale(factor);
        }
        for v in e.reset.assignments.values_mut() {
            *v = &*v * factor;
        }
    }
    out
}
