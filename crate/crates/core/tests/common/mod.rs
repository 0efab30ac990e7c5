#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hygame_core::gen::{random_isr, random_timed, IsrParams, TimedParams};
use hygame_core::rational::{int, ratio};
use hygame_core::{Game, GameBuilder, Flavor, Interval, Owner, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn isr_game(seed: u64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_isr(&mut rng, &IsrParams::default())
}

pub fn timed_game(seed: u64) -> Game {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_timed(&mut rng, &TimedParams::default())
}

/// Winner of a reachability objective by brute force over the discrete
/// semantics where every delay is a multiple of `1/(2D)`, `D` being the
/// common denominator of the guard bounds. The game tree is cut at `depth`.
///
/// Clock values are stored as integer multiples of the grid unit, and a
/// value above the largest constant of its clock is kept at that constant
/// plus one unit, which no guard can tell apart from any larger value.
pub fn granular_reach_winner(g: &Game, target: &str, depth: usize) -> bool {
    assert!(g.locations.values().all(|l| l.flow.iter().all(|r| r == &int(1))));
    let mut d = BigInt::one();
    for e in g.edges.values() {
        for iv in e.guard.conjuncts.values() {
            d = d.lcm(iv.lo.denom()).lcm(iv.hi.denom());
        }
    }
    let unit = d.to_i64().unwrap() * 2;
    let to_units = |q: &Rational| -> i64 {
        let v = q * Rational::from_integer(BigInt::from(unit));
        assert!(v.is_integer());
        v.to_integer().to_i64().unwrap()
    };
    let dim = g.vars.len();
    let mut cap = vec![0i64; dim];
    for e in g.edges.values() {
        for (&x, iv) in &e.guard.conjuncts {
            cap[x] = cap[x].max(to_units(&iv.hi)).max(to_units(&iv.lo));
        }
    }
    let max_delay = cap.iter().copied().max().unwrap_or(0) + 1;

    let locs: Vec<_> = g.locations.keys().cloned().collect();
    let loc_index: BTreeMap<_, _> = locs.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    struct E {
        src: usize,
        dst: usize,
        guard: Vec<(usize, i64, i64)>,
        reset: Vec<usize>,
    }
    let edges: Vec<E> = g
        .edges
        .values()
        .map(|e| E {
            src: loc_index[&e.src],
            dst: loc_index[&e.dst],
            guard: e
                .guard
                .conjuncts
                .iter()
                .map(|(&x, iv)| (x, to_units(&iv.lo), to_units(&iv.hi)))
                .collect(),
            reset: e.reset.assignments.keys().copied().collect(),
        })
        .collect();

    type State = (usize, Vec<i64>);
    let init: State = (loc_index[&g.init], vec![0; dim]);
    let mut states: Vec<State> = vec![init.clone()];
    let mut index: BTreeMap<State, usize> = BTreeMap::new();
    index.insert(init, 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (l, v) = states[i].clone();
        let mut out = BTreeSet::new();
        for e in edges.iter().filter(|e| e.src == l) {
            for t in 0..=max_delay {
                let mut w: Vec<i64> = v.iter().zip(&cap).map(|(&a, &c)| (a + t).min(c + 1)).collect();
                if !e.guard.iter().all(|&(x, lo, hi)| lo <= w[x] && w[x] <= hi) {
                    continue;
                }
                for &x in &e.reset {
                    w[x] = 0;
                }
                let s = (e.dst, w);
                let n = *index.entry(s.clone()).or_insert_with(|| {
                    states.push(s);
                    states.len() - 1
                });
                out.insert(n);
            }
        }
        succ.push(out.into_iter().collect());
        i += 1;
    }

    let owner: Vec<Owner> = states.iter().map(|(l, _)| g.locations[&locs[*l]].owner).collect();
    let mut win: Vec<bool> = states.iter().map(|(l, _)| g.locations[&locs[*l]].obs == target).collect();
    for _ in 0..depth {
        let next: Vec<bool> = (0..states.len())
            .map(|s| {
                win[s]
                    || match owner[s] {
                        Owner::Pl1 => succ[s].iter().any(|&n| win[n]),
                        Owner::Pl2 => !succ[s].is_empty() && succ[s].iter().all(|&n| win[n]),
                    }
            })
            .collect();
        if next == win {
            break;
        }
        win = next;
    }
    win[0]
}

fn base(i: usize) -> GameBuilder {
    let a = int(1 + (i % 3) as i64);
    let hi = int(3 + i as i64);
    GameBuilder::new(Flavor::Isr, &["x", "y"])
        .location("l0", Owner::Pl1, "A", &[a.clone(), int(0)])
        .location("l1", if i % 2 == 0 { Owner::Pl2 } else { Owner::Pl1 }, "B", &[int(-1), int(2)])
        .location("l2", Owner::Pl1, "GOAL", &[a, int(0)])
        .edge(
            "go",
            "l0",
            "go",
            &[(0, Interval::new(int(0), hi.clone())), (1, Interval::new(int(0), int(1)))],
            &[(0, ratio(i as i64, 2)), (1, int(0))],
            "l1",
        )
        .edge(
            "back",
            "l1",
            "back",
            &[(0, Interval::new(int(-5), hi.clone())), (1, Interval::new(int(0), int(4)))],
            &[(0, int(0)), (1, ratio(1, 3))],
            "l0",
        )
        .edge(
            "win",
            "l1",
            "win",
            &[(0, Interval::new(int(-5), int(5))), (1, Interval::point(int(1)))],
            &[(0, int(1)), (1, int(1))],
            "l2",
        )
        .edge(
            "stay",
            "l2",
            "stay",
            &[(0, Interval::new(int(0), hi)), (1, Interval::new(int(1), int(1)))],
            &[(0, int(0))],
            "l2",
        )
}

/// Twenty invalid games, each paired with the one violation kind it must
/// trigger, and twenty valid games.
pub fn validation_fixtures() -> (Vec<(Game, &'static str)>, Vec<Game>) {
    use hygame_core::EdgeId;
    let mut bad = Vec::new();
    for i in 0..5 {
        let mut g = base(i).build();
        let e = ["go", "back", "win", "go", "back"][i];
        let var = if e == "win" { 0 } else { i % 2 };
        g.edges.get_mut(&EdgeId::new(e)).unwrap().reset.assignments.remove(&var);
        bad.push((g, "InitializationBroken"));
    }
    for i in 0..5 {
        let mut g = base(i).build();
        let e = ["go", "back", "win", "stay", "go"][i];
        let iv = g.edges.get_mut(&EdgeId::new(e)).unwrap().guard.conjuncts.get_mut(&(i % 2)).unwrap();
        iv.lo = &iv.hi + ratio(1, 1 + i as i64);
        bad.push((g, "GuardNotCompact"));
    }
    for i in 0..5 {
        let mut g = base(i).build();
        let e = ["stay", "win", "back", "go", "win"][i];
        g.edges.get_mut(&EdgeId::new(e)).unwrap().guard.conjuncts.remove(&(i % 2));
        bad.push((g, "GuardNotTotal"));
    }
    for i in 0..5 {
        let mut g = base(i).build();
        let init = g.init.clone();
        g.locations.get_mut(&init).unwrap().owner = Owner::Pl2;
        bad.push((g, "InitNotPl1"));
    }
    let mut good: Vec<Game> = (0..8).map(|i| base(i).build()).collect();
    good.push(hygame_core::fixtures::worked_example());
    good.push(hygame_core::fixtures::frozen_point_guard());
    good.push(hygame_core::fixtures::half_bounds());
    for seed in 0..9 {
        good.push(isr_game(1000 + seed));
    }
    (bad, good)
}
