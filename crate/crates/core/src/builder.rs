use std::collections::{BTreeMap, BTreeSet};

use crate::game::{Edge, EdgeId, Flavor, Game, Guard, Interval, Location, LocationId, Owner, Reset, VarId};
use crate::rational::Rational;

/// Convenience constructor for games over base locations. Actions and
/// observations are collected from what is used.
#[derive(Debug, Clone)]
pub struct GameBuilder {
    game: Game,
}

impl GameBuilder {
    pub fn new(flavor: Flavor, vars: &[&str]) -> Self {
        GameBuilder {
            game: Game {
                flavor,
                vars: vars.iter().map(|v| v.to_string()).collect(),
                actions: BTreeSet::new(),
                observations: BTreeSet::new(),
                locations: BTreeMap::new(),
                edges: BTreeMap::new(),
                init: LocationId::base(""),
            },
        }
    }

    pub fn location(mut self, name: &str, owner: Owner, obs: &str, flow: &[Rational]) -> Self {
        let id = LocationId::base(name);
        if self.game.locations.is_empty() {
            self.game.init = id.clone();
        }
        self.game.observations.insert(obs.to_string());
        self.game.locations.insert(
            id.clone(),
            Location {
                id,
                owner,
                obs: obs.to_string(),
                flow: flow.to_vec(),
            },
        );
        self
    }

    pub fn edge(
        mut self,
        id: &str,
        src: &str,
        action: &str,
        guard: &[(VarId, Interval)],
        reset: &[(VarId, Rational)],
        dst: &str,
    ) -> Self {
        self.game.actions.insert(action.to_string());
        let edge = Edge {
            id: EdgeId::new(id),
            src: LocationId::base(src),
            action: action.to_string(),
            guard: Guard {
                conjuncts: guard.iter().cloned().collect(),
            },
            reset: Reset {
                assignments: reset.iter().cloned().collect(),
            },
            dst: LocationId::base(dst),
            provenance: None,
        };
        self.game.edges.insert(edge.id.clone(), edge);
        self
    }

    pub fn init(mut self, name: &str) -> Self {
        self.game.init = LocationId::base(name);
        self
    }

    pub fn observation(mut self, obs: &str) -> Self {
        self.game.observations.insert(obs.to_string());
        self
    }

    pub fn build(self) -> Game {
        self.game
    }
}
