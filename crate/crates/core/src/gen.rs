//! Seeded random games.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::builder::GameBuilder;
use crate::game::{Flavor, Game, Interval, Owner, VarId};
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone)]
pub struct IsrParams {
    pub max_locations: usize,
    pub max_vars: usize,
    pub flows: Vec<i64>,
    pub max_den: i64,
    pub bound: i64,
    pub max_out: usize,
}

impl Default for IsrParams {
    fn default() -> Self {
        IsrParams {
            max_locations: 5,
            max_vars: 3,
            flows: vec![-2, -1, 0, 1, 2, 3],
            max_den: 3,
            bound: 2,
            max_out: 3,
        }
    }
}

fn small_rational(rng: &mut impl Rng, bound: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(-bound * d..=bound * d), d)
}

fn interval(rng: &mut impl Rng, bound: i64, max_den: i64) -> Interval {
    let a = small_rational(rng, bound, max_den);
    let b = small_rational(rng, bound, max_den);
    if a <= b {
        Interval::new(a, b)
    } else {
        Interval::new(b, a)
    }
}

const OBSERVATIONS: [&str; 3] = ["A", "B", "GOAL"];

/// Random initialized singular game.
///
/// Every generated game validates and some variable is frozen somewhere.
/// Reset values and most guard bounds stay in `[-bound, bound]`. The first
/// edge out of each location instead accepts the box `[-3 bound, 3 bound]`
/// and leads to the next location in a cycle through all of them. So every
/// location is reachable and every reachable configuration has a move at
/// delay 0. The
/// first edge out of the initial location also assigns a nonzero value to
/// variable 0. Together these keep every stage of the translation chain in
/// its own flavor.
pub fn random_isr(rng: &mut impl Rng, p: &IsrParams) -> Game {
    let n = rng.gen_range(2..=p.max_locations.max(2));
    let dim = rng.gen_range(1..=p.max_vars.max(1));
    let var_names: Vec<String> = ["x", "y", "z", "w", "v"].iter().take(dim).map(|s| s.to_string()).collect();
    let names: Vec<String> = (0..n).map(|i| format!("l{i}")).collect();

    let usual: Vec<i64> = (0..dim).map(|_| *p.flows.choose(rng).unwrap()).collect();
    let mut flows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|x| if rng.gen_bool(0.9) { usual[x] } else { *p.flows.choose(rng).unwrap() })
                .collect()
        })
        .collect();
    if !flows.iter().flatten().any(|&r| r == 0) {
        let i = rng.gen_range(0..n);
        let x = rng.gen_range(0..dim);
        flows[i][x] = 0;
    }

    let var_refs: Vec<&str> = var_names.iter().map(|s| s.as_str()).collect();
    let mut b = GameBuilder::new(Flavor::Isr, &var_refs);
    for (i, name) in names.iter().enumerate() {
        let owner = if i == 0 || rng.gen_bool(0.5) { Owner::Pl1 } else { Owner::Pl2 };
        let obs = *OBSERVATIONS.choose(rng).unwrap();
        let flow: Vec<Rational> = flows[i].iter().map(|&r| int(r)).collect();
        b = b.location(name, owner, obs, &flow);
    }

    let mut count = 0;
    for src in 0..n {
        let outs = rng.gen_range(1..=p.max_out.max(1));
        for k in 0..outs {
            let dst = if k == 0 { (src + 1) % n } else { rng.gen_range(0..n) };
            let wide = Interval::new(int(-3 * p.bound), int(3 * p.bound));
            let mut guard: Vec<(VarId, Interval)> = (0..dim)
                .map(|x| {
                    let iv = if k == 0 { wide.clone() } else { interval(rng, p.bound, p.max_den) };
                    (x, iv)
                })
                .collect();
            let mut reset: Vec<(VarId, Rational)> = Vec::new();
            for x in 0..dim {
                if flows[src][x] != flows[dst][x] || rng.gen_bool(0.2) {
                    reset.push((x, small_rational(rng, p.bound, p.max_den)));
                }
            }
            if src == 0 && k == 0 {
                for (x, iv) in guard.iter_mut() {
                    if flows[0][*x] == 0 {
                        let lo = iv.lo.clone().min(int(0));
                        let hi = iv.hi.clone().max(int(0));
                        *iv = Interval::new(lo, hi);
                    }
                }
                let value = small_rational(rng, p.bound, p.max_den);
                let value = if value == int(0) { int(1) } else { value };
                reset.retain(|(x, _)| *x != 0);
                reset.push((0, value));
            }
            let id = format!("e{count}");
            count += 1;
            b = b.edge(&id, &names[src], &format!("a{}", count % 3), &guard, &reset, &names[dst]);
        }
    }
    b.build()
}

#[derive(Debug, Clone)]
pub struct TimedParams {
    pub max_locations: usize,
    pub max_clocks: usize,
    pub bound: i64,
    pub max_out: usize,
}

impl Default for TimedParams {
    fn default() -> Self {
        TimedParams {
            max_locations: 4,
            max_clocks: 2,
            bound: 3,
            max_out: 3,
        }
    }
}

/// Random timed game with integer guard bounds in `[0, bound]`. Guards are
/// partial; some location is always observed as `GOAL`.
pub fn random_timed(rng: &mut impl Rng, p: &TimedParams) -> Game {
    let n = rng.gen_range(2..=p.max_locations.max(2));
    let dim = rng.gen_range(1..=p.max_clocks.max(1));
    let clocks: Vec<&str> = ["x", "y", "z"].iter().copied().take(dim).collect();
    let goal = rng.gen_range(1..n);
    let mut b = GameBuilder::new(Flavor::Timed, &clocks);
    let ones: Vec<Rational> = vec![int(1); dim];
    for i in 0..n {
        let owner = if i == 0 || rng.gen_bool(0.5) { Owner::Pl1 } else { Owner::Pl2 };
        let obs = if i == goal { "GOAL" } else { OBSERVATIONS[rng.gen_range(0..2)] };
        b = b.location(&format!("l{i}"), owner, obs, &ones);
    }
    let mut count = 0;
    for src in 0..n {
        for _ in 0..rng.gen_range(1..=p.max_out.max(1)) {
            let dst = rng.gen_range(0..n);
            let mut guard = Vec::new();
            for x in 0..dim {
                if rng.gen_bool(0.7) {
                    let a = rng.gen_range(0..=p.bound);
                    let c = rng.gen_range(0..=p.bound);
                    guard.push((x, Interval::new(int(a.min(c)), int(a.max(c)))));
                }
            }
            let reset: Vec<(VarId, Rational)> =
                (0..dim).filter(|_| rng.gen_bool(0.4)).map(|x| (x, int(0))).collect();
            b = b.edge(&format!("e{count}"), &format!("l{src}"), "a", &guard, &reset, &format!("l{dst}"));
            count += 1;
        }
    }
    b.build()
}
