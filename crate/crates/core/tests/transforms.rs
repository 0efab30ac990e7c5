mod common;

use hygame_core::bisim::{check_local_bisim, Beta2, Sampler, Verdict, Witness};
use hygame_core::fixtures::{frozen_point_guard, worked_example};
use hygame_core::rational::{int, ratio};
use hygame_core::semantics::{play, RandomStrategy};
use hygame_core::to_stopwatch::{gamma1, gamma1_inv, to_stopwatch};
use hygame_core::to_updatable::{annotate_resets, to_updatable, to_updatable_with, GuardRewrite};
use hygame_core::{Chain, Configuration, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..7).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma1_is_inverted_location_by_location(seed in 0u64..500, pick in 0usize..16, vals in prop::collection::vec(rational(), 3)) {
        let g = common::isr_game(seed);
        let locs: Vec<_> = g.locations.keys().cloned().collect();
        let loc = locs[pick % locs.len()].clone();
        let q = Configuration::new(loc, vals[..g.dim()].to_vec());
        prop_assert_eq!(gamma1_inv(&g, &gamma1(&g, &q)), q.clone());
        let w = to_stopwatch(&g);
        let r = gamma1(&g, &q);
        prop_assert_eq!(gamma1(&g, &gamma1_inv(&g, &r)), r);
        prop_assert!(w.locations.values().all(|l| l.flow.iter().all(|f| f.is_zero() || f.is_one())));
    }

    #[test]
    fn stopped_variables_hold_their_annotation(seed in 0u64..500, env in 0u64..1000) {
        let chain = Chain::build(&common::isr_game(seed)).unwrap();
        let a = &chain.annotated;
        let run = play(a, &RandomStrategy::new(env), &RandomStrategy::new(env + 1), 12).unwrap();
        for q in run.configurations() {
            let f = q.loc.frozen().unwrap();
            let flow = &a.locations[&q.loc].flow;
            for x in 0..a.dim() {
                if flow[x].is_zero() {
                    prop_assert_eq!(f[x].as_ref(), Some(&q.val[x]));
                } else {
                    prop_assert!(f[x].is_none());
                }
            }
        }
    }

    #[test]
    fn timed_stage_has_unit_flows_and_zero_resets(seed in 0u64..500) {
        let chain = Chain::build(&common::isr_game(seed)).unwrap();
        for l in chain.timed.locations.values() {
            prop_assert!(l.flow.iter().all(|f| f.is_one()));
        }
        for e in chain.timed.edges.values() {
            prop_assert!(e.reset.assignments.values().all(|v| v.is_zero()));
        }
    }
}

#[test]
fn dividing_by_a_negative_flow_swaps_the_bounds() {
    let g = worked_example();
    let w = to_stopwatch(&g);
    let release = w.edges.values().find(|e| e.action == "release").unwrap();
    // wait has flow (2, -1): y ∈ [0, 3] becomes y' ∈ [-3, 0]
    let y = release.guard.get(1).unwrap();
    assert_eq!((&y.lo, &y.hi), (&int(-3), &int(0)));
    let x = release.guard.get(0).unwrap();
    assert_eq!((&x.lo, &x.hi), (&int(0), &int(5)));
}

#[test]
fn literal_guards_on_stopped_variables_break_the_bisimulation() {
    let g = frozen_point_guard();
    let annotated = annotate_resets(&g);
    let literal = to_updatable_with(&annotated, GuardRewrite::Literal);
    let rewritten = to_updatable(&annotated);
    let q = Configuration::initial(&annotated);

    let broken = Beta2 { annotated: &annotated, updatable: &literal };
    let mut sampler = Sampler::new(5, 2);
    let Verdict::Fail(cex) = check_local_bisim(&broken, &q, &q, &mut sampler).unwrap() else {
        panic!("the literal rewrite should be refuted");
    };
    let (_, m) = cex.mv.clone().unwrap();
    assert!(m.delay > Rational::zero());
    assert!(cex.replay(&broken));

    let sound = Beta2 { annotated: &annotated, updatable: &rewritten };
    let mut sampler = Sampler::new(5, 2);
    assert!(check_local_bisim(&sound, &q, &q, &mut sampler).unwrap().is_pass());
    assert!(!cex.replay(&sound));
    assert_eq!(sound.left().edges.len(), broken.left().edges.len());
}

#[test]
fn rationals_are_kept_in_lowest_terms() {
    assert_eq!(ratio(2, 4), ratio(1, 2));
    assert_eq!(ratio(1, 3) + ratio(2, 3), Rational::one());
}
