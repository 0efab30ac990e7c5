//! Inputs shared by the benchmarks.

use hygame_core::gen::{random_isr, random_timed, IsrParams, TimedParams};
use hygame_core::Game;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn singular_games(n: u64) -> Vec<Game> {
    (0..n)
        .map(|s| random_isr(&mut ChaCha8Rng::seed_from_u64(s), &IsrParams::default()))
        .collect()
}

pub fn timed_games(n: u64) -> Vec<Game> {
    (0..n)
        .map(|s| random_timed(&mut ChaCha8Rng::seed_from_u64(s), &TimedParams::default()))
        .collect()
}
