//! Initialized singular games and their reduction to timed games.
//!
//! A game is transformed along the chain
//! singular → stopwatch → annotated stopwatch → updatable timed → timed,
//! every link of which comes with an explicit bisimulation witness. Timed
//! games are solved on the region graph and winning strategies are pulled
//! back to the original game.

pub mod bisim;
pub mod builder;
pub mod chain;
pub mod fixtures;
pub mod game;
pub mod gen;
pub mod rational;
pub mod scale;
pub mod semantics;
pub mod solver;
pub mod strategy;
pub mod to_stopwatch;
pub mod to_timed;
pub mod to_updatable;
pub mod validate;

pub use builder::GameBuilder;
pub use chain::{Chain, LiftError, LiftedHistory, PerStage, Stage};
pub use game::{
    Annotation, Edge, EdgeId, Flavor, Game, Guard, Interval, Location, LocationId, Owner, Reset, VarId,
};
pub use rational::Rational;
pub use semantics::{Configuration, DelayWindow, History, Move, Run, SemanticsError, Strategy, Trace};
pub use solver::{Objective, Synthesis};
pub use validate::{classify_flavor, validate_game, Invalid, Violation};
