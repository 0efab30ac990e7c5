//! Reduction of an initialized singular game to a stopwatch game.
//!
//! Every non-zero slope is normalized to 1 by rescaling the variable by its
//! slope in the current location: guards are divided by the slope of the
//! source location and reset values by the slope of the target location.

use num_traits::{One, Zero};

use crate::game::{Edge, Flavor, Game, Guard, Location, Reset};
use crate::rational::Rational;
use crate::semantics::Configuration;

pub fn to_stopwatch(g: &Game) -> Game {
    let locations = g
        .locations
        .iter()
        .map(|(id, l)| {
            let flow = l
                .flow
                .iter()
                .map(|r| if r.is_zero() { Rational::zero() } else { Rational::one() })
                .collect();
            (
                id.clone(),
                Location {
                    flow,
                    ..l.clone()
                },
            )
        })
        .collect();

    let edges = g
        .edges
        .iter()
        .map(|(id, e)| {
            let src_flow = &g.locations[&e.src].flow;
            let dst_flow = &g.locations[&e.dst].flow;
            let guard = Guard {
                conjuncts: e
                    .guard
                    .conjuncts
                    .iter()
                    .map(|(&x, i)| {
                        let i = if src_flow[x].is_zero() {
                            i.clone()
                        } else {
                            i.divide(&src_flow[x])
                        };
                        (x, i)
                    })
                    .collect(),
            };
            let reset = Reset {
                assignments: e
                    .reset
                    .assignments
                    .iter()
                    .map(|(&x, v)| {
                        let v = if dst_flow[x].is_zero() {
                            v.clone()
                        } else {
                            v / &dst_flow[x]
                        };
                        (x, v)
                    })
                    .collect(),
            };
            (
                id.clone(),
                Edge {
                    id: id.clone(),
                    src: e.src.clone(),
                    action: e.action.clone(),
                    guard,
                    reset,
                    dst: e.dst.clone(),
                    provenance: Some(id.clone()),
                },
            )
        })
        .collect();

    Game {
        flavor: Flavor::Stopwatch,
        vars: g.vars.clone(),
        actions: g.actions.clone(),
        observations: g.observations.clone(),
        locations,
        edges,
        init: g.init.clone(),
    }
}

/// Maps a configuration of the singular game `source` to the stopwatch game:
/// each variable is divided by its slope when that slope is non-zero.
pub fn gamma1(source: &Game, q: &Configuration) -> Configuration {
    let flow = &source.locations[&q.loc].flow;
    let val = q
        .val
        .iter()
        .zip(flow)
        .map(|(v, r)| if r.is_zero() { v.clone() } else { v / r })
        .collect();
    Configuration::new(q.loc.clone(), val)
}

/// Inverse of [`gamma1`]; `source` is the singular game.
pub fn gamma1_inv(source: &Game, q: &Configuration) -> Configuration {
    let flow = &source.locations[&q.loc].flow;
    let val = q
        .val
        .iter()
        .zip(flow)
        .map(|(v, r)| if r.is_zero() { v.clone() } else { v * r })
        .collect();
    Configuration::new(q.loc.clone(), val)
}
