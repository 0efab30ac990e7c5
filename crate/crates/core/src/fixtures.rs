//! Hand-built games used by tests, benchmarks and the command line.

use crate::builder::GameBuilder;
use crate::game::{Flavor, Game, Interval, Owner};
use crate::rational::{int, ratio};

/// Four-location singular game with slopes 2 and −1.
///
/// Pl1 leaves `start` after choosing how far `x` (slope 2) has grown. The
/// environment then either hands control back towards `GOAL` or, if `x`
/// gets large enough while `y` (slope −1) is still high, sends the play
/// back to `start`. Pl1 wins `reach:GOAL` by leaving `start` with `x < 2`.
pub fn worked_example() -> Game {
    let iv = |a: i64, b: i64| Interval::new(int(a), int(b));
    GameBuilder::new(Flavor::Isr, &["x", "y"])
        .location("start", Owner::Pl1, "Start", &[int(2), int(0)])
        .location("wait", Owner::Pl2, "Wait", &[int(2), int(-1)])
        .location("approach", Owner::Pl1, "Approach", &[int(-1), int(0)])
        .location("goal", Owner::Pl1, "GOAL", &[int(0), int(0)])
        .edge("go", "start", "go", &[(0, iv(1, 2)), (1, iv(0, 0))], &[(1, int(3))], "wait")
        .edge("release", "wait", "release", &[(0, iv(0, 10)), (1, iv(0, 3))], &[(0, int(4)), (1, int(0))], "approach")
        .edge("bounce", "wait", "bounce", &[(0, iv(6, 8)), (1, iv(1, 3))], &[(0, int(0)), (1, int(0))], "start")
        .edge("land", "approach", "land", &[(0, iv(1, 2)), (1, iv(0, 0))], &[(0, int(0))], "goal")
        .edge("stay", "goal", "stay", &[(0, iv(0, 0)), (1, iv(0, 0))], &[], "goal")
        .init("start")
        .build()
}

/// Stopwatch game where `x` is frozen at 0 in `l0` and the only edge
/// requires `x ∈ [0, 0]`. Copying that guard literally into the updatable
/// game forbids every positive delay.
pub fn frozen_point_guard() -> Game {
    GameBuilder::new(Flavor::Stopwatch, &["x", "y"])
        .location("l0", Owner::Pl1, "A", &[int(0), int(1)])
        .location("l1", Owner::Pl1, "B", &[int(0), int(1)])
        .edge(
            "e",
            "l0",
            "a",
            &[(0, Interval::point(int(0))), (1, Interval::new(int(0), int(5)))],
            &[],
            "l1",
        )
        .edge(
            "back",
            "l1",
            "b",
            &[(0, Interval::point(int(0))), (1, Interval::new(int(0), int(10)))],
            &[(1, int(0))],
            "l0",
        )
        .build()
}

/// Single-clock timed game with a half-integer bound, used for scaling.
pub fn half_bounds() -> Game {
    GameBuilder::new(Flavor::Timed, &["x"])
        .location("l0", Owner::Pl1, "A", &[int(1)])
        .location("l1", Owner::Pl2, "B", &[int(1)])
        .edge("e", "l0", "a", &[(0, Interval::new(ratio(1, 2), ratio(3, 2)))], &[(0, int(0))], "l1")
        .edge("f", "l1", "b", &[(0, Interval::new(int(0), int(1)))], &[], "l0")
        .build()
}
