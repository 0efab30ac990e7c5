//! Transition-system semantics shared by all flavors.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{Edge, EdgeId, Game, Interval, LocationId, Owner};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub loc: LocationId,
    pub val: Vec<Rational>,
}

impl Configuration {
    pub fn new(loc: LocationId, val: Vec<Rational>) -> Self {
        Configuration { loc, val }
    }

    /// The initial location with every variable at zero.
    pub fn initial(g: &Game) -> Self {
        Configuration {
            loc: g.init.clone(),
            val: vec![Rational::zero(); g.dim()],
        }
    }

    pub fn owner(&self, g: &Game) -> Owner {
        g.locations[&self.loc].owner
    }

    pub fn obs<'g>(&self, g: &'g Game) -> &'g str {
        &g.locations[&self.loc].obs
    }
}

/// An edge together with the delay spent in the source location before
/// taking it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub edge: EdgeId,
    pub delay: Rational,
}

impl Move {
    pub fn new(edge: EdgeId, delay: Rational) -> Self {
        Move { edge, delay }
    }
}

/// Set of delays after which an edge is enabled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayWindow {
    Bounded(Interval),
    /// `[lo, ∞)`
    Ray(Rational),
}

impl DelayWindow {
    pub fn lo(&self) -> &Rational {
        match self {
            DelayWindow::Bounded(i) => &i.lo,
            DelayWindow::Ray(lo) => lo,
        }
    }

    pub fn hi(&self) -> Option<&Rational> {
        match self {
            DelayWindow::Bounded(i) => Some(&i.hi),
            DelayWindow::Ray(_) => None,
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        match self {
            DelayWindow::Bounded(i) => i.contains(t),
            DelayWindow::Ray(lo) => lo <= t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {edge} does not leave location {loc}")]
    WrongSource { edge: EdgeId, loc: LocationId },
    #[error("move ({edge}, {delay}) is not enabled at location {loc}")]
    MoveNotEnabled {
        edge: EdgeId,
        delay: String,
        loc: LocationId,
    },
    #[error("strategy of {owner:?} proposed a move that is not enabled: {source}")]
    IllegalStrategyMove {
        owner: Owner,
        #[source]
        source: Box<SemanticsError>,
    },
}

/// Delays `t ≥ 0` such that the valuation after waiting `t` satisfies the
/// guard of `e`. `None` when no such delay exists.
pub fn edge_window(g: &Game, q: &Configuration, e: &Edge) -> Option<DelayWindow> {
    let flow = &g.locations[&q.loc].flow;
    let mut lo = Rational::zero();
    let mut hi: Option<Rational> = None;
    for (&x, interval) in &e.guard.conjuncts {
        let v = &q.val[x];
        let rate = &flow[x];
        if rate.is_zero() {
            if !interval.contains(v) {
                return None;
            }
            continue;
        }
        let t = interval.shift_down(v).divide(rate);
        if t.lo > lo {
            lo = t.lo;
        }
        hi = Some(match hi {
            Some(h) if h <= t.hi => h,
            _ => t.hi,
        });
    }
    match hi {
        None => Some(DelayWindow::Ray(lo)),
        Some(h) if h.is_negative() || h < lo => None,
        Some(h) => Some(DelayWindow::Bounded(Interval::new(lo, h))),
    }
}

pub fn delay_window(g: &Game, q: &Configuration, e: &EdgeId) -> Option<DelayWindow> {
    let edge = g.edge(e)?;
    if edge.src != q.loc {
        return None;
    }
    edge_window(g, q, edge)
}

/// Outgoing edges of `q` with a non-empty delay window.
pub fn enabled_edges<'g>(g: &'g Game, q: &Configuration) -> Vec<(&'g Edge, DelayWindow)> {
    g.edges
        .values()
        .filter(|e| e.src == q.loc)
        .filter_map(|e| edge_window(g, q, e).map(|w| (e, w)))
        .collect()
}

pub fn step(g: &Game, q: &Configuration, m: &Move) -> Result<Configuration, SemanticsError> {
    let e = g
        .edge(&m.edge)
        .ok_or_else(|| SemanticsError::UnknownEdge(m.edge.clone()))?;
    if e.src != q.loc {
        return Err(SemanticsError::WrongSource {
            edge: m.edge.clone(),
            loc: q.loc.clone(),
        });
    }
    let enabled = !m.delay.is_negative()
        && edge_window(g, q, e).is_some_and(|w| w.contains(&m.delay));
    if !enabled {
        return Err(SemanticsError::MoveNotEnabled {
            edge: m.edge.clone(),
            delay: rational::format(&m.delay),
            loc: q.loc.clone(),
        });
    }
    let flow = &g.locations[&q.loc].flow;
    let val = q
        .val
        .iter()
        .enumerate()
        .map(|(x, v)| match e.reset.get(x) {
            Some(r) => r.clone(),
            None => v + &m.delay * &flow[x],
        })
        .collect();
    Ok(Configuration {
        loc: e.dst.clone(),
        val,
    })
}

/// A finite run; also used as a history.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: Configuration,
    pub steps: Vec<(Move, Configuration)>,
}

pub type History = Run;

impl Run {
    pub fn new(start: Configuration) -> Self {
        Run {
            start,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().map(|(_, q)| q).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn configurations(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, q)| q))
    }

    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.steps.iter().map(|(m, _)| m)
    }

    /// The prefix with the first `n` steps.
    pub fn prefix(&self, n: usize) -> Run {
        Run {
            start: self.start.clone(),
            steps: self.steps[..n].to_vec(),
        }
    }

    /// Appends `m` after checking it against the semantics of `g`.
    pub fn extend(&mut self, g: &Game, m: Move) -> Result<&Configuration, SemanticsError> {
        let next = step(g, self.last(), &m)?;
        self.steps.push((m, next));
        Ok(self.last())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace(pub Vec<String>);

pub fn trace_of(g: &Game, r: &Run) -> Trace {
    Trace(r.configurations().map(|q| q.obs(g).to_string()).collect())
}

/// A (possibly history-dependent) way of choosing moves. Returning `None`
/// means "no move", which is only legitimate when nothing is enabled.
pub trait Strategy {
    fn choose(&self, g: &Game, h: &History) -> Option<Move>;
}

impl<F> Strategy for F
where
    F: Fn(&Game, &History) -> Option<Move>,
{
    fn choose(&self, g: &Game, h: &History) -> Option<Move> {
        self(g, h)
    }
}

/// The outcome of `s1` against `s2`, cut after `k` steps or at the first
/// configuration where its owner's strategy returns no move.
pub fn play(
    g: &Game,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    k: usize,
) -> Result<Run, SemanticsError> {
    play_from(g, Run::new(Configuration::initial(g)), s1, s2, k)
}

pub fn play_from(
    g: &Game,
    mut run: Run,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    k: usize,
) -> Result<Run, SemanticsError> {
    while run.len() < k {
        let owner = run.last().owner(g);
        let s = match owner {
            Owner::Pl1 => s1,
            Owner::Pl2 => s2,
        };
        let Some(m) = s.choose(g, &run) else { break };
        run.extend(g, m)
            .map_err(|e| SemanticsError::IllegalStrategyMove {
                owner,
                source: Box::new(e),
            })?;
    }
    Ok(run)
}

/// Uniform rational in `w` with denominator at most `max_den`. Rays are
/// sampled in `[lo, lo + span]`.
pub fn sample_delay(rng: &mut impl Rng, w: &DelayWindow, max_den: i64, span: i64) -> Rational {
    let lo = w.lo().clone();
    let width = match w.hi() {
        Some(hi) => hi - &lo,
        None => rational::int(span),
    };
    let den = rng.gen_range(1..=max_den.max(1));
    let k = rng.gen_range(0..=den);
    lo + width * rational::ratio(k, den)
}

/// Seeded adversary: picks a uniformly random enabled edge and a random
/// delay in its window. The choice is a function of the seed and the
/// history, so replaying the same history yields the same move.
#[derive(Debug, Clone, Copy)]
pub struct RandomStrategy {
    pub seed: u64,
    pub max_den: i64,
}

impl RandomStrategy {
    pub fn new(seed: u64) -> Self {
        RandomStrategy { seed, max_den: 4 }
    }

    pub fn rng_for(&self, h: &History) -> ChaCha8Rng {
        let mut hasher = DefaultHasher::new();
        self.seed.hash(&mut hasher);
        h.hash(&mut hasher);
        ChaCha8Rng::seed_from_u64(hasher.finish())
    }
}

impl Strategy for RandomStrategy {
    fn choose(&self, g: &Game, h: &History) -> Option<Move> {
        let enabled = enabled_edges(g, h.last());
        if enabled.is_empty() {
            return None;
        }
        let mut rng = self.rng_for(h);
        let (e, w) = &enabled[rng.gen_range(0..enabled.len())];
        let delay = sample_delay(&mut rng, w, self.max_den, 3);
        Some(Move::new(e.id.clone(), delay))
    }
}
