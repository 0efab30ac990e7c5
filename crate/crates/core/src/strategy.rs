//! Strategy transfer along the reduction chain.

use crate::chain::{Chain, LiftError, Stage};
use crate::game::{Game, Owner};
use crate::semantics::{
    enabled_edges, play, step, trace_of, Configuration, History, Move, RandomStrategy, Run,
    Strategy, Trace,
};
use crate::to_stopwatch::gamma1_inv;
use crate::to_timed::gamma2_inv;
use crate::to_updatable::beta_backward;

pub use crate::chain::{lift_history, LiftedHistory};

/// Maps a configuration of the timed game back to the singular game.
pub fn project_configuration(chain: &Chain, q_t: &Configuration) -> Configuration {
    let q_u = gamma2_inv(q_t);
    let q_w = beta_backward(&q_u);
    gamma1_inv(&chain.isr, &q_w)
}

/// Maps a history of the timed game back to the singular game: valuations
/// through the inverse witnesses, edges along provenance, delays unchanged.
pub fn project_history(chain: &Chain, h_t: &Run) -> Option<Run> {
    let mut out = Run::new(project_configuration(chain, &h_t.start));
    for (m, q) in &h_t.steps {
        let e = chain.origin_edge(Stage::Timed, &m.edge)?;
        out.steps.push((
            Move::new(e, m.delay.clone()),
            project_configuration(chain, q),
        ));
    }
    Some(out)
}

/// A strategy of the timed game played in the singular game.
pub struct PulledBack<'a, S> {
    pub chain: &'a Chain,
    pub inner: S,
}

pub fn pull_back_strategy<S: Strategy>(chain: &Chain, sigma_t: S) -> PulledBack<'_, S> {
    PulledBack {
        chain,
        inner: sigma_t,
    }
}

impl<S: Strategy> PulledBack<'_, S> {
    pub fn try_choose(&self, h: &History) -> Result<Option<Move>, LiftError> {
        let lifted = lift_history(self.chain, h)?;
        let Some(m) = self.inner.choose(&self.chain.timed, lifted.at(Stage::Timed)) else {
            return Ok(None);
        };
        Ok(self
            .chain
            .origin_edge(Stage::Timed, &m.edge)
            .map(|e| Move::new(e, m.delay)))
    }
}

impl<S: Strategy> Strategy for PulledBack<'_, S> {
    fn choose(&self, _g: &Game, h: &History) -> Option<Move> {
        self.try_choose(h).ok().flatten()
    }
}

/// A strategy of the singular game played in the timed game: the timed
/// history is projected back, and the chosen move is lifted forward.
pub struct Pushed<'a, S> {
    pub chain: &'a Chain,
    pub inner: S,
}

impl<S: Strategy> Strategy for Pushed<'_, S> {
    fn choose(&self, _g: &Game, h: &History) -> Option<Move> {
        let h_s = project_history(self.chain, h)?;
        let m = self.inner.choose(&self.chain.isr, &h_s)?;
        let lifted = lift_history(self.chain, &h_s).ok()?;
        let (moves, _) = self.chain.lift_step(&lifted.last(), &m, h_s.len()).ok()?;
        Some(moves[Stage::Timed].clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InclusionReport {
    pub plays: usize,
    pub matched: usize,
    /// Traces of `g_b` that no explored behavior of `g_a` reproduces.
    pub mismatches: Vec<Trace>,
    /// Traces for which the search budget ran out.
    pub inconclusive: Vec<Trace>,
}

impl InclusionReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty() && self.inconclusive.is_empty()
    }
}

const SEARCH_BUDGET: usize = 50_000;

/// Plays `sigma_b` in `g_b` against `trials` seeded random environments
/// for `k` steps, and checks that every resulting trace is also produced
/// in `g_a` by `sigma_a` against some environment behavior. Environment
/// moves in `g_a` are searched among enabled edges with the delay used in
/// `g_b` or a window boundary/midpoint.
pub fn check_trace_inclusion(
    g_a: &Game,
    g_b: &Game,
    sigma_a: &dyn Strategy,
    sigma_b: &dyn Strategy,
    k: usize,
    trials: usize,
    seed: u64,
) -> InclusionReport {
    let mut report = InclusionReport::default();
    for trial in 0..trials {
        let env = RandomStrategy::new(seed.wrapping_mul(1_000_003).wrapping_add(trial as u64));
        let Ok(run_b) = play(g_b, sigma_b, &env, k) else {
            report.plays += 1;
            report.mismatches.push(Trace(Vec::new()));
            continue;
        };
        report.plays += 1;
        let trace = trace_of(g_b, &run_b);
        let delays: Vec<_> = run_b.moves().map(|m| m.delay.clone()).collect();
        let mut budget = SEARCH_BUDGET;
        let start = Run::new(Configuration::initial(g_a));
        match reproduce(g_a, sigma_a, &start, &trace.0, &delays, &mut budget) {
            Some(true) => report.matched += 1,
            Some(false) => report.mismatches.push(trace),
            None => report.inconclusive.push(trace),
        }
    }
    report
}

/// `Some(true)` if some environment behavior extends `h` to produce
/// `trace`; `None` when the budget is exhausted.
fn reproduce(
    g: &Game,
    sigma: &dyn Strategy,
    h: &Run,
    trace: &[String],
    delays: &[crate::rational::Rational],
    budget: &mut usize,
) -> Option<bool> {
    let i = h.len();
    let q = h.last();
    if q.obs(g) != trace[i] {
        return Some(false);
    }
    if i + 1 == trace.len() {
        return Some(true);
    }
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let candidates: Vec<Move> = match q.owner(g) {
        Owner::Pl1 => match sigma.choose(g, h) {
            Some(m) => vec![m],
            None => return Some(false),
        },
        Owner::Pl2 => {
            let mut out = Vec::new();
            for (e, w) in enabled_edges(g, q) {
                if g.locations[&e.dst].obs != trace[i + 1] {
                    continue;
                }
                let mut ts = vec![delays[i].clone(), w.lo().clone()];
                if let Some(hi) = w.hi() {
                    ts.push(crate::rational::midpoint(w.lo(), hi));
                    ts.push(hi.clone());
                }
                for t in ts {
                    if w.contains(&t) {
                        let m = Move::new(e.id.clone(), t);
                        if !out.contains(&m) {
                            out.push(m);
                        }
                    }
                }
            }
            out
        }
    };
    let mut exhausted = false;
    for m in candidates {
        let Ok(next) = step(g, q, &m) else { continue };
        let mut h2 = h.clone();
        h2.steps.push((m, next));
        match reproduce(g, sigma, &h2, trace, delays, budget) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => exhausted = true,
        }
    }
    if exhausted {
        return None;
    }
    Some(false)
}
