//! Reduction of a stopwatch game to an updatable timed game.
//!
//! First every location is annotated with the frozen value of each stopped
//! variable; then stopped variables are turned into clocks that are
//! re-assigned their frozen value on every edge entering a location where
//! they are stopped.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};

use crate::game::{Annotation, Edge, EdgeId, Flavor, Game, Location, LocationId, Reset};
use crate::rational::Rational;
use crate::semantics::Configuration;

/// Which annotated locations to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Closure {
    /// Only annotations reachable from the initial location.
    #[default]
    Reachable,
    /// Every base location crossed with every consistent annotation over
    /// the constants of the game.
    FullProduct,
}

/// How guards on stopped variables are carried into the updatable game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardRewrite {
    /// Evaluate the conjunct of a stopped variable against its frozen value
    /// at the source location: drop the conjunct if it holds, drop the
    /// edge otherwise.
    #[default]
    StaticFrozen,
    /// Copy guards unchanged. Not a bisimulation in general; kept for
    /// counterexample tests.
    Literal,
}

fn running(rate: &Rational) -> bool {
    rate.is_one()
}

/// Annotation of the initial location: stopped variables are frozen at 0.
pub fn initial_annotation(g: &Game) -> Vec<Option<Rational>> {
    g.locations[&g.init]
        .flow
        .iter()
        .map(|r| if running(r) { None } else { Some(Rational::zero()) })
        .collect()
}

/// Annotation of the target of `e` when it is taken from a location
/// annotated with `f`.
pub fn successor_annotation(g: &Game, e: &Edge, f: &[Option<Rational>]) -> Vec<Option<Rational>> {
    let dst_flow = &g.locations[&e.dst].flow;
    (0..g.dim())
        .map(|x| {
            if running(&dst_flow[x]) {
                None
            } else {
                match e.reset.get(x) {
                    Some(r) => Some(r.clone()),
                    None => f[x].clone(),
                }
            }
        })
        .collect()
}

pub fn annotate_resets(g: &Game) -> Game {
    annotate_resets_with(g, Closure::Reachable)
}

pub fn annotate_resets_with(g: &Game, closure: Closure) -> Game {
    let annotated = |l: &LocationId, f: Vec<Option<Rational>>| {
        LocationId::annotated(l.clone(), Annotation::Frozen(f))
    };

    let mut order: Vec<LocationId> = Vec::new();
    let mut seen: BTreeSet<LocationId> = BTreeSet::new();
    let mut queue = VecDeque::new();

    let start = annotated(&g.init, initial_annotation(g));
    seen.insert(start.clone());
    queue.push_back(start);
    if closure == Closure::FullProduct {
        let mut consts: BTreeSet<Rational> = g.constants();
        consts.insert(Rational::zero());
        for (id, loc) in &g.locations {
            for f in all_annotations(&loc.flow, &consts) {
                let a = annotated(id, f);
                if seen.insert(a.clone()) {
                    queue.push_back(a);
                }
            }
        }
    }

    let mut edges = BTreeMap::new();
    while let Some(al) = queue.pop_front() {
        let index = order.len();
        order.push(al.clone());
        let base = al.inner().clone();
        let f = al.frozen().expect("frozen annotation").to_vec();
        for e in g.outgoing(&base) {
            let dst = annotated(&e.dst, successor_annotation(g, e, &f));
            if seen.insert(dst.clone()) {
                queue.push_back(dst.clone());
            }
            let id = EdgeId(format!("{}@{}", e.id, index));
            edges.insert(
                id.clone(),
                Edge {
                    id,
                    src: al.clone(),
                    action: e.action.clone(),
                    guard: e.guard.clone(),
                    reset: e.reset.clone(),
                    dst,
                    provenance: Some(e.id.clone()),
                },
            );
        }
    }

    let locations = order
        .into_iter()
        .map(|al| {
            let base = &g.locations[al.inner()];
            (
                al.clone(),
                Location {
                    id: al,
                    owner: base.owner,
                    obs: base.obs.clone(),
                    flow: base.flow.clone(),
                },
            )
        })
        .collect();

    Game {
        flavor: Flavor::AnnotatedStopwatch,
        vars: g.vars.clone(),
        actions: g.actions.clone(),
        observations: g.observations.clone(),
        locations,
        edges,
        init: annotated(&g.init, initial_annotation(g)),
    }
}

fn all_annotations(flow: &[Rational], consts: &BTreeSet<Rational>) -> Vec<Vec<Option<Rational>>> {
    let mut out: Vec<Vec<Option<Rational>>> = vec![Vec::new()];
    for rate in flow {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let choices: Vec<Option<Rational>> = if running(rate) {
                    vec![None]
                } else {
                    consts.iter().cloned().map(Some).collect()
                };
                choices.into_iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn to_updatable(g: &Game) -> Game {
    to_updatable_with(g, GuardRewrite::StaticFrozen)
}

pub fn to_updatable_with(g: &Game, rewrite: GuardRewrite) -> Game {
    let locations = g
        .locations
        .iter()
        .map(|(id, l)| {
            (
                id.clone(),
                Location {
                    flow: vec![Rational::one(); g.dim()],
                    ..l.clone()
                },
            )
        })
        .collect();

    let mut edges = BTreeMap::new();
    'edges: for (id, e) in &g.edges {
        let f_src = e.src.frozen().expect("annotated source");
        let f_dst = e.dst.frozen().expect("annotated target");
        let mut guard = e.guard.clone();
        if rewrite == GuardRewrite::StaticFrozen {
            for (x, frozen) in f_src.iter().enumerate() {
                let Some(c) = frozen else { continue };
                match guard.get(x) {
                    Some(i) if i.contains(c) => {
                        guard.conjuncts.remove(&x);
                    }
                    Some(_) => continue 'edges,
                    None => {}
                }
            }
        }
        let mut reset = Reset::new();
        for x in 0..g.dim() {
            let value = match &f_dst[x] {
                Some(c) => Some(c.clone()),
                None => e.reset.get(x).cloned(),
            };
            if let Some(v) = value {
                reset = reset.with(x, v);
            }
        }
        edges.insert(
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
        );
    }

    Game {
        flavor: Flavor::Updatable,
        vars: g.vars.clone(),
        actions: g.actions.clone(),
        observations: g.observations.clone(),
        locations,
        edges,
        init: g.init.clone(),
    }
}

/// Whether `q_annot` (a configuration of the annotated or updatable game
/// `annotated`) is related to the stopwatch configuration `q_w`: same base
/// location, some constructed annotation, equal valuations.
pub fn beta_contains(annotated: &Game, q_w: &Configuration, q_annot: &Configuration) -> bool {
    q_annot.loc.frozen().is_some()
        && q_annot.loc.inner() == &q_w.loc
        && annotated.locations.contains_key(&q_annot.loc)
        && q_annot.val == q_w.val
}

/// The annotated configuration whose annotation agrees with the stopped
/// variables of `q_w`, if that annotated location was constructed.
pub fn beta_forward(stopwatch: &Game, annotated: &Game, q_w: &Configuration) -> Option<Configuration> {
    let flow = &stopwatch.locations[&q_w.loc].flow;
    let f = flow
        .iter()
        .zip(&q_w.val)
        .map(|(r, v)| if running(r) { None } else { Some(v.clone()) })
        .collect();
    let loc = LocationId::annotated(q_w.loc.clone(), Annotation::Frozen(f));
    annotated
        .locations
        .contains_key(&loc)
        .then(|| Configuration::new(loc, q_w.val.clone()))
}

/// Drops the annotation.
pub fn beta_backward(q_annot: &Configuration) -> Configuration {
    Configuration::new(q_annot.loc.inner().clone(), q_annot.val.clone())
}
