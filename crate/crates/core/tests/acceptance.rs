mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hygame_core::bisim::{sample_tuples, verify_stages, with_witness, ChainCheck};
use hygame_core::fixtures::worked_example;
use hygame_core::rational::{int, ratio};
use hygame_core::semantics::{enabled_edges, play, play_from, step, trace_of, RandomStrategy};
use hygame_core::solver::{synthesize_limited, Synthesis};
use hygame_core::strategy::{check_trace_inclusion, pull_back_strategy, Pushed};
use hygame_core::{
    classify_flavor, validate_game, Chain, Configuration, EdgeId, Flavor, Game, Objective, Run,
    Stage, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{granular_reach_winner, isr_game, timed_game, validation_fixtures};

const GAMES: u64 = 200;
const NODE_LIMIT: usize = 20_000;

type Outcome = Result<String, String>;

fn criterion_validation() -> Outcome {
    let (bad, good) = validation_fixtures();
    let mut errors = Vec::new();
    for (i, (g, kind)) in bad.iter().enumerate() {
        let v = validate_game(g);
        let kinds: BTreeSet<_> = v.iter().map(|v| v.kind()).collect();
        if kinds != BTreeSet::from([*kind]) {
            errors.push(format!("negative fixture {i}: expected {kind}, got {kinds:?}"));
        }
    }
    for (i, g) in good.iter().enumerate() {
        let v = validate_game(g);
        if !v.is_empty() {
            errors.push(format!("positive fixture {i}: {v:?}"));
        }
    }
    if errors.is_empty() {
        Ok(format!("{} rejected, {} accepted", bad.len(), good.len()))
    } else {
        Err(errors.join("; "))
    }
}

fn criterion_flavors() -> Outcome {
    let mut errors = Vec::new();
    for seed in 0..GAMES {
        let g = isr_game(seed);
        let chain = match Chain::build(&g) {
            Ok(c) => c,
            Err(e) => {
                errors.push(format!("game {seed}: {e}"));
                continue;
            }
        };
        let expected = [
            (Stage::Stopwatch, Flavor::Stopwatch),
            (Stage::Annotated, Flavor::AnnotatedStopwatch),
            (Stage::Updatable, Flavor::Updatable),
            (Stage::Timed, Flavor::Timed),
        ];
        for (stage, flavor) in expected {
            let got = classify_flavor(chain.stage(stage));
            if got.as_ref().ok() != Some(&flavor) {
                errors.push(format!("game {seed} stage {stage}: expected {flavor}, got {got:?}"));
            }
        }
    }
    if errors.is_empty() {
        Ok(format!("{GAMES} games, every stage in its flavor"))
    } else {
        Err(errors.join("; "))
    }
}

fn criterion_commutation() -> Outcome {
    let mut errors = Vec::new();
    let mut checked = 0;
    let mut short = 0;
    let mut min_samples = usize::MAX;
    for seed in 0..GAMES {
        let chain = Chain::build(&isr_game(seed)).map_err(|e| e.to_string())?;
        let cfg = ChainCheck::new(50, 8, seed);
        let report = verify_stages(&chain, cfg);
        min_samples = min_samples.min(report.samples);
        if report.samples < 50 {
            short += 1;
            let (tuples, _) = sample_tuples(&chain, cfg);
            let found: BTreeSet<_> = tuples.iter().map(|t| t[Stage::Isr].clone()).collect();
            if let Err(q) = closed_under_moves(&chain.isr, &found) {
                errors.push(format!(
                    "game {seed}: only {} configurations sampled and {q:?} escapes them",
                    report.samples
                ));
            }
        }
        for l in &report.links {
            checked += l.checked;
            if let Some(cex) = l.counterexamples.first() {
                errors.push(format!("game {seed} link {}: {:?}", l.link.name(), cex));
            }
        }
    }
    if errors.is_empty() {
        Ok(format!(
            "{checked} link checks, 0 failures; {short} games have fewer than 50 reachable configurations in total (smallest {min_samples}) and were checked on all of them"
        ))
    } else {
        Err(format!("{} failures, first: {}", errors.len(), errors[0]))
    }
}

/// Checks that `found` is the whole reachable set: every move out of it
/// lands back in it, and no move's successor depends on its delay. Returns
/// an offending configuration otherwise.
fn closed_under_moves(g: &Game, found: &BTreeSet<Configuration>) -> Result<(), Configuration> {
    for q in found {
        for (e, w) in enabled_edges(g, q) {
            let point = w.hi() == Some(w.lo());
            let drifts = (0..g.dim()).any(|x| g.flow(&q.loc, x) != &int(0) && e.reset.get(x).is_none());
            if drifts && !point {
                return Err(q.clone());
            }
            let next = step(g, q, &hygame_core::Move::new(e.id.clone(), w.lo().clone())).unwrap();
            if !found.contains(&next) {
                return Err(next);
            }
        }
    }
    Ok(())
}

fn criterion_frozen_values() -> Outcome {
    let mut runs = 0;
    let mut configs = 0;
    let mut errors = Vec::new();
    for seed in 0..GAMES {
        let chain = Chain::build(&isr_game(seed)).map_err(|e| e.to_string())?;
        let g = &chain.annotated;
        for r in 0..5 {
            let env = RandomStrategy::new(seed * 31 + r);
            let ctrl = RandomStrategy::new(seed * 37 + r + 7);
            let run = play(g, &ctrl, &env, 12).map_err(|e| e.to_string())?;
            runs += 1;
            for q in run.configurations() {
                configs += 1;
                let f = q.loc.frozen().expect("annotated location");
                for (x, v) in q.val.iter().enumerate() {
                    if g.flow(&q.loc, x) == &int(0) && f[x].as_ref() != Some(v) {
                        errors.push(format!("game {seed} run {r}: {} x{x}={v}", q.loc));
                    }
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(format!("{runs} runs, {configs} configurations"))
    } else {
        Err(format!("{} violations, first: {}", errors.len(), errors[0]))
    }
}

#[derive(Debug, Clone, Copy)]
enum Mutation {
    Guard,
    Reset,
    Label,
}

/// Applies one mutation to `stage` of `chain` at a configuration reached by
/// the checker's own sampling. Returns a description, or `None` when the
/// stage offers nothing to mutate.
fn mutate(chain: &mut Chain, stage: Stage, kind: Mutation, cfg: ChainCheck, pick: u64) -> Option<String> {
    let (tuples, _) = sample_tuples(chain, cfg);
    let g = chain.stage(stage).clone();
    let mut exercised: Vec<(Configuration, EdgeId, hygame_core::DelayWindow)> = Vec::new();
    for t in &tuples {
        for (e, w) in enabled_edges(&g, &t[stage]) {
            exercised.push((t[stage].clone(), e.id.clone(), w));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(pick);
    match kind {
        Mutation::Guard => {
            if exercised.is_empty() {
                return None;
            }
            let (q, e, w) = exercised[rng.gen_range(0..exercised.len())].clone();
            let src = q.loc.clone();
            let edge = chain.stage_mut(stage).edges.get_mut(&e).unwrap();
            let running = edge
                .guard
                .conjuncts
                .keys()
                .copied()
                .find(|&x| g.flow(&src, x) != &int(0));
            let (x, lo) = match running {
                Some(x) => {
                    let iv = &edge.guard.conjuncts[&x];
                    let at = &q.val[x] + w.lo();
                    (x, std::cmp::max(iv.lo.clone(), at) + ratio(1, 2))
                }
                None => {
                    let x = *edge.guard.conjuncts.keys().next()?;
                    (x, &q.val[x] + ratio(1, 2))
                }
            };
            edge.guard.conjuncts.get_mut(&x).unwrap().lo = lo.clone();
            Some(format!("{stage} edge {e}: lower bound of var {x} raised to {lo}"))
        }
        Mutation::Reset => {
            let candidates: Vec<_> = exercised
                .iter()
                .filter(|(_, e, _)| !g.edges[e].reset.is_empty())
                .collect();
            if candidates.is_empty() {
                return None;
            }
            let (_, e, _) = candidates[rng.gen_range(0..candidates.len())];
            let edge = chain.stage_mut(stage).edges.get_mut(e).unwrap();
            let (x, v) = edge.reset.assignments.iter_mut().next().unwrap();
            *v += int(1);
            Some(format!("{stage} edge {e}: reset of var {x} shifted to {v}"))
        }
        Mutation::Label => {
            let locs: Vec<_> = tuples.iter().map(|t| t[stage].loc.clone()).collect();
            let l = locs[rng.gen_range(0..locs.len())].clone();
            let game = chain.stage_mut(stage);
            let loc = game.locations.get_mut(&l).unwrap();
            loc.obs = format!("{}-mutant", loc.obs);
            let obs = loc.obs.clone();
            game.observations.insert(obs.clone());
            Some(format!("{stage} location {l}: observation renamed to {obs}"))
        }
    }
}

fn criterion_mutation() -> Outcome {
    let stages = [Stage::Stopwatch, Stage::Updatable, Stage::Timed];
    let kinds = [Mutation::Guard, Mutation::Reset, Mutation::Label];
    let mut made = 0;
    let mut detected = 0;
    let mut missed = Vec::new();
    let mut seed = 0u64;
    while made < 50 {
        seed += 1;
        let chain = Chain::build(&isr_game(5000 + seed)).map_err(|e| e.to_string())?;
        let cfg = ChainCheck::new(30, 6, seed);
        if !verify_stages(&chain, cfg).all_pass() {
            return Err(format!("unmutated game {} fails the checker", 5000 + seed));
        }
        let stage = stages[made % 3];
        let kind = kinds[(made / 3) % 3];
        let mut mutant = chain.clone();
        let Some(desc) = mutate(&mut mutant, stage, kind, cfg, seed) else {
            continue;
        };
        mutant.rebuild_after(stage);
        made += 1;
        let report = verify_stages(&mutant, cfg);
        let replayed = report.links.iter().any(|l| {
            l.counterexamples
                .iter()
                .any(|cex| with_witness(&mutant, l.link, |w| cex.replay(w)))
        });
        if replayed {
            detected += 1;
        } else {
            missed.push(format!("{kind:?} {desc}"));
        }
    }
    let line = format!("{detected}/{made} mutants detected with replayable counterexamples");
    if detected >= 48 {
        Ok(if missed.is_empty() { line } else { format!("{line}; missed: {}", missed.join(", ")) })
    } else {
        Err(format!("{line}; missed: {}", missed.join(", ")))
    }
}

fn criterion_oracle() -> Outcome {
    let mut errors = Vec::new();
    let mut wins = 0;
    for seed in 0..50 {
        let g = timed_game(seed);
        let syn = synthesize_limited(&g, &Objective::reach("GOAL"), NODE_LIMIT).map_err(|e| e.to_string())?;
        let oracle = granular_reach_winner(&g, "GOAL", syn.graph.len());
        if oracle != syn.initial_winning() {
            errors.push(format!("game {seed}: solver {} oracle {oracle}", syn.initial_winning()));
        }
        wins += usize::from(oracle);
    }
    if errors.is_empty() {
        Ok(format!("50 games agree, Pl1 wins {wins}"))
    } else {
        Err(errors.join("; "))
    }
}

fn goal_play(
    g: &Game,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    bound: usize,
) -> Result<Run, String> {
    let mut run = Run::new(Configuration::initial(g));
    while run.last().obs(g) != "GOAL" && run.len() < bound {
        let before = run.len();
        run = play_from(g, run, s1, s2, before + 1).map_err(|e| e.to_string())?;
        if run.len() == before {
            break;
        }
    }
    Ok(run)
}

fn end_to_end(chain: &Chain, syn: &Synthesis, name: &str) -> Result<(), String> {
    let bound = syn.graph.len();
    let sigma_s = pull_back_strategy(chain, syn.player());
    let sigma_t = syn.player();
    for seed in 0..100 {
        let env = RandomStrategy::new(seed);
        let run_s = goal_play(&chain.isr, &sigma_s, &env, bound)?;
        let trace_s = trace_of(&chain.isr, &run_s);
        if trace_s.0.last().map(String::as_str) != Some("GOAL") {
            return Err(format!("{name} env {seed}: target missed, trace {:?}", trace_s.0));
        }
        let mirrored = Pushed { chain, inner: env };
        let run_t = goal_play(&chain.timed, &sigma_t, &mirrored, bound)?;
        let trace_t = trace_of(&chain.timed, &run_t);
        if trace_t != trace_s {
            return Err(format!("{name} env {seed}: traces differ {:?} vs {:?}", trace_s.0, trace_t.0));
        }
    }
    Ok(())
}

fn criterion_end_to_end() -> Outcome {
    let chain = Chain::build(&worked_example()).map_err(|e| e.to_string())?;
    let syn = synthesize_limited(&chain.timed, &Objective::reach("GOAL"), NODE_LIMIT).map_err(|e| e.to_string())?;
    if !syn.initial_winning() {
        return Err("worked example declared losing".into());
    }
    end_to_end(&chain, &syn, "worked example")?;
    let mut winning = 0;
    let mut too_large = 0;
    for seed in 0..GAMES {
        let chain = Chain::build(&isr_game(seed)).map_err(|e| e.to_string())?;
        let syn = match synthesize_limited(&chain.timed, &Objective::reach("GOAL"), NODE_LIMIT) {
            Ok(s) => s,
            Err(hygame_core::solver::SolverError::TooLarge { .. }) => {
                too_large += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        if syn.initial_winning() {
            winning += 1;
            end_to_end(&chain, &syn, &format!("game {seed}"))?;
        }
    }
    Ok(format!(
        "worked example and {winning} winning random games, 100 environments each; {too_large} games above the node limit"
    ))
}

fn criterion_traces() -> Outcome {
    let mut plays = 0;
    let mut errors = Vec::new();
    for game in 0..20 {
        let chain = Chain::build(&isr_game(9000 + game)).map_err(|e| e.to_string())?;
        for pair in 0..20u64 {
            let seed = game * 100 + pair;
            let report = if pair % 2 == 0 {
                let sigma_s = RandomStrategy::new(seed);
                let sigma_t = Pushed { chain: &chain, inner: sigma_s };
                check_trace_inclusion(&chain.isr, &chain.timed, &sigma_s, &sigma_t, 10, 3, seed)
            } else {
                let sigma_t = RandomStrategy::new(seed);
                let sigma_s = pull_back_strategy(&chain, sigma_t);
                check_trace_inclusion(&chain.timed, &chain.isr, &sigma_t, &sigma_s, 10, 3, seed)
            };
            plays += report.plays;
            if !report.holds() {
                errors.push(format!(
                    "game {game} pair {pair}: {} mismatches, {} inconclusive",
                    report.mismatches.len(),
                    report.inconclusive.len()
                ));
            }
        }
    }
    if errors.is_empty() {
        Ok(format!("400 strategy pairs, {plays} plays, 0 mismatches"))
    } else {
        Err(errors.join("; "))
    }
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("validation fixtures", 1, criterion_validation),
        ("flavor progression", 30, criterion_flavors),
        ("bisimulation commutation", 300, criterion_commutation),
        ("frozen-value invariant", 60, criterion_frozen_values),
        ("mutation sensitivity", 300, criterion_mutation),
        ("solver against granular oracle", 300, criterion_oracle),
        ("end-to-end synthesis", 300, criterion_end_to_end),
        ("trace inclusion", 120, criterion_traces),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{msg}; took longer than {budget} s"))
            }
            o => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {n} ({name}): PASS in {:.2?}: {msg}", elapsed),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL in {:.2?}: {msg}", elapsed);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
