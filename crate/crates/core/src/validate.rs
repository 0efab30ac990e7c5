//! Structural validation and flavor classification.

use std::fmt;

use num_traits::{One, Zero};

use crate::game::{Annotation, EdgeId, Flavor, Game, LocationId, Owner, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InitMissing(LocationId),
    InitNotPl1(LocationId),
    LocationKeyMismatch(LocationId),
    EdgeKeyMismatch(EdgeId),
    FlowNotTotal(LocationId),
    UnknownObservation { location: LocationId, obs: String },
    DanglingEndpoint { edge: EdgeId, location: LocationId },
    UnknownAction { edge: EdgeId, action: String },
    UnknownVariable { edge: EdgeId, var: VarId },
    GuardNotTotal { edge: EdgeId, var: VarId },
    GuardNotCompact { edge: EdgeId, var: VarId },
    /// The variable changes slope across the edge without being reset.
    InitializationBroken { edge: EdgeId, var: VarId },
    FlowOutOfFlavor { location: LocationId, var: VarId },
    ResetNotZero { edge: EdgeId, var: VarId },
    AnnotationMismatch(LocationId),
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::InitMissing(_) => "InitMissing",
            Violation::InitNotPl1(_) => "InitNotPl1",
            Violation::LocationKeyMismatch(_) => "LocationKeyMismatch",
            Violation::EdgeKeyMismatch(_) => "EdgeKeyMismatch",
            Violation::FlowNotTotal(_) => "FlowNotTotal",
            Violation::UnknownObservation { .. } => "UnknownObservation",
            Violation::DanglingEndpoint { .. } => "DanglingEndpoint",
            Violation::UnknownAction { .. } => "UnknownAction",
            Violation::UnknownVariable { .. } => "UnknownVariable",
            Violation::GuardNotTotal { .. } => "GuardNotTotal",
            Violation::GuardNotCompact { .. } => "GuardNotCompact",
            Violation::InitializationBroken { .. } => "InitializationBroken",
            Violation::FlowOutOfFlavor { .. } => "FlowOutOfFlavor",
            Violation::ResetNotZero { .. } => "ResetNotZero",
            Violation::AnnotationMismatch(_) => "AnnotationMismatch",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitMissing(l) => write!(f, "initial location {l} does not exist"),
            Violation::InitNotPl1(l) => write!(f, "initial location {l} is not owned by Pl1"),
            Violation::LocationKeyMismatch(l) => write!(f, "location stored under key {l} has a different id"),
            Violation::EdgeKeyMismatch(e) => write!(f, "edge stored under key {e} has a different id"),
            Violation::FlowNotTotal(l) => write!(f, "flow of {l} is not defined for every variable"),
            Violation::UnknownObservation { location, obs } => {
                write!(f, "location {location} carries undeclared observation {obs}")
            }
            Violation::DanglingEndpoint { edge, location } => {
                write!(f, "edge {edge} refers to missing location {location}")
            }
            Violation::UnknownAction { edge, action } => {
                write!(f, "edge {edge} uses undeclared action {action}")
            }
            Violation::UnknownVariable { edge, var } => {
                write!(f, "edge {edge} mentions variable index {var} out of range")
            }
            Violation::GuardNotTotal { edge, var } => {
                write!(f, "guard of edge {edge} has no conjunct for variable {var}")
            }
            Violation::GuardNotCompact { edge, var } => {
                write!(f, "guard of edge {edge} has an empty interval for variable {var}")
            }
            Violation::InitializationBroken { edge, var } => write!(
                f,
                "variable {var} changes slope along edge {edge} but is not reset"
            ),
            Violation::FlowOutOfFlavor { location, var } => {
                write!(f, "slope of variable {var} in {location} is not allowed for this flavor")
            }
            Violation::ResetNotZero { edge, var } => {
                write!(f, "edge {edge} resets clock {var} to a non-zero value")
            }
            Violation::AnnotationMismatch(l) => {
                write!(f, "annotation of {l} does not match its slopes")
            }
        }
    }
}

/// Every invariant of the declared flavor that `g` breaks. Empty means valid.
pub fn validate_game(g: &Game) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.dim();

    match g.location(&g.init) {
        None => out.push(Violation::InitMissing(g.init.clone())),
        Some(l) if l.owner != Owner::Pl1 => out.push(Violation::InitNotPl1(g.init.clone())),
        Some(_) => {}
    }

    for (key, loc) in &g.locations {
        if key != &loc.id {
            out.push(Violation::LocationKeyMismatch(key.clone()));
        }
        if loc.flow.len() != n {
            out.push(Violation::FlowNotTotal(key.clone()));
            continue;
        }
        if !g.observations.contains(&loc.obs) {
            out.push(Violation::UnknownObservation {
                location: key.clone(),
                obs: loc.obs.clone(),
            });
        }
        for (x, rate) in loc.flow.iter().enumerate() {
            let allowed = match g.flavor {
                Flavor::Isr => true,
                Flavor::Stopwatch | Flavor::AnnotatedStopwatch => rate.is_zero() || rate.is_one(),
                Flavor::Updatable | Flavor::Timed => rate.is_one(),
            };
            if !allowed {
                out.push(Violation::FlowOutOfFlavor {
                    location: key.clone(),
                    var: x,
                });
            }
        }
        if g.flavor == Flavor::AnnotatedStopwatch {
            let ok = match key.annotation() {
                Some(Annotation::Frozen(f)) => {
                    f.len() == n
                        && f.iter()
                            .zip(&loc.flow)
                            .all(|(fx, rate)| fx.is_none() == rate.is_one())
                }
                _ => false,
            };
            if !ok {
                out.push(Violation::AnnotationMismatch(key.clone()));
            }
        }
    }

    for (key, e) in &g.edges {
        if key != &e.id {
            out.push(Violation::EdgeKeyMismatch(key.clone()));
        }
        if !g.actions.contains(&e.action) {
            out.push(Violation::UnknownAction {
                edge: key.clone(),
                action: e.action.clone(),
            });
        }
        let mut endpoints_ok = true;
        for l in [&e.src, &e.dst] {
            if !g.locations.contains_key(l) {
                endpoints_ok = false;
                out.push(Violation::DanglingEndpoint {
                    edge: key.clone(),
                    location: l.clone(),
                });
            }
        }
        for &x in e.guard.conjuncts.keys().chain(e.reset.assignments.keys()) {
            if x >= n {
                out.push(Violation::UnknownVariable {
                    edge: key.clone(),
                    var: x,
                });
            }
        }
        for (&x, i) in &e.guard.conjuncts {
            if x < n && !i.is_compact() {
                out.push(Violation::GuardNotCompact {
                    edge: key.clone(),
                    var: x,
                });
            }
        }
        if g.flavor.requires_total_guards() {
            for x in 0..n {
                if e.guard.get(x).is_none() {
                    out.push(Violation::GuardNotTotal {
                        edge: key.clone(),
                        var: x,
                    });
                }
            }
        }
        if g.flavor == Flavor::Timed {
            for (&x, v) in &e.reset.assignments {
                if !v.is_zero() {
                    out.push(Violation::ResetNotZero {
                        edge: key.clone(),
                        var: x,
                    });
                }
            }
        }
        if endpoints_ok {
            let src = &g.locations[&e.src];
            let dst = &g.locations[&e.dst];
            if src.flow.len() == n && dst.flow.len() == n {
                for x in 0..n {
                    if src.flow[x] != dst.flow[x] && e.reset.get(x).is_none() {
                        out.push(Violation::InitializationBroken {
                            edge: key.clone(),
                            var: x,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("game is invalid: {} violation(s), first: {}", .0.len(), .0[0])]
pub struct Invalid(pub Vec<Violation>);

/// The most specific flavor whose invariants `g` satisfies.
pub fn classify_flavor(g: &Game) -> Result<Flavor, Invalid> {
    let violations = validate_game(g);
    if !violations.is_empty() {
        return Err(Invalid(violations));
    }
    let flows = || g.locations.values().flat_map(|l| l.flow.iter());
    let all_clocks = flows().all(|r| r.is_one());
    if all_clocks {
        let zero_resets = g
            .edges
            .values()
            .all(|e| e.reset.assignments.values().all(|v| v.is_zero()));
        return Ok(if zero_resets {
            Flavor::Timed
        } else {
            Flavor::Updatable
        });
    }
    if flows().all(|r| r.is_zero() || r.is_one()) {
        let annotated = g
            .locations
            .keys()
            .all(|id| matches!(id.annotation(), Some(Annotation::Frozen(_))));
        return Ok(if annotated {
            Flavor::AnnotatedStopwatch
        } else {
            Flavor::Stopwatch
        });
    }
    Ok(Flavor::Isr)
}
