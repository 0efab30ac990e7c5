//! Reduction of an updatable timed game to a timed game.
//!
//! Locations remember, per clock, the value it was last updated to. The new
//! clock measures the time elapsed since that update, so every update
//! becomes a reset to zero and guards are shifted by the remembered offset.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use crate::game::{Annotation, Edge, EdgeId, Flavor, Game, Guard, Location, LocationId, Reset};
use crate::rational::Rational;
use crate::semantics::Configuration;

fn with_offset(l: &LocationId, g: Vec<Rational>) -> LocationId {
    LocationId::annotated(l.clone(), Annotation::Offset(g))
}

pub fn to_timed(u: &Game) -> Game {
    let n = u.dim();
    let start = with_offset(&u.init, vec![Rational::zero(); n]);

    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start.clone());

    let mut edges = BTreeMap::new();
    while let Some(lt) = queue.pop_front() {
        let index = order.len();
        order.push(lt.clone());
        let base = lt.inner().clone();
        let offset = lt.offset().expect("offset annotation").to_vec();
        for e in u.outgoing(&base) {
            let guard = Guard {
                conjuncts: e
                    .guard
                    .conjuncts
                    .iter()
                    .map(|(&x, i)| (x, i.shift_down(&offset[x])))
                    .collect(),
            };
            let mut next = offset.clone();
            let mut reset = Reset::new();
            for (&x, v) in &e.reset.assignments {
                next[x] = v.clone();
                reset = reset.with(x, Rational::zero());
            }
            let dst = with_offset(&e.dst, next);
            if seen.insert(dst.clone()) {
                queue.push_back(dst.clone());
            }
            let id = EdgeId(format!("{}@{}", e.id, index));
            edges.insert(
                id.clone(),
                Edge {
                    id,
                    src: lt.clone(),
                    action: e.action.clone(),
                    guard,
                    reset,
                    dst,
                    provenance: Some(e.id.clone()),
                },
            );
        }
    }

    let locations = order
        .into_iter()
        .map(|lt| {
            let base = &u.locations[lt.inner()];
            (
                lt.clone(),
                Location {
                    id: lt,
                    owner: base.owner,
                    obs: base.obs.clone(),
                    flow: base.flow.clone(),
                },
            )
        })
        .collect();

    Game {
        flavor: Flavor::Timed,
        vars: u.vars.clone(),
        actions: u.actions.clone(),
        observations: u.observations.clone(),
        locations,
        edges,
        init: start,
    }
}

/// `(l, v) ↦ ((l, g), v − g)`.
pub fn gamma2(q_u: &Configuration, offset: &[Rational]) -> Configuration {
    let val = q_u.val.iter().zip(offset).map(|(v, g)| v - g).collect();
    Configuration::new(
        with_offset(&q_u.loc, offset.to_vec()),
        val,
    )
}

/// `((l, g), v) ↦ (l, v + g)`. Panics if the location carries no offset.
pub fn gamma2_inv(q_t: &Configuration) -> Configuration {
    let offset = q_t.loc.offset().expect("offset-annotated location");
    let val = q_t.val.iter().zip(offset).map(|(v, g)| v + g).collect();
    Configuration::new(q_t.loc.inner().clone(), val)
}
