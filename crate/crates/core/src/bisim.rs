//! Executable alternating-bisimulation checks.
//!
//! A [`Witness`] relates configurations of a left and a right game and
//! says how a move on one side is answered on the other. Every witness in
//! this crate answers with the same delay and the provenance-linked edge.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{Chain, PerStage, Stage};
use crate::game::{Game, Owner};
use crate::rational::{self, Rational};
use crate::semantics::{enabled_edges, sample_delay, step, Configuration, DelayWindow, Move};
use crate::to_stopwatch::{gamma1, gamma1_inv};
use crate::to_timed::gamma2_inv;
use crate::to_updatable::{beta_backward, beta_contains, beta_forward};
use crate::validate::Invalid;

pub trait Witness {
    fn left(&self) -> &Game;
    fn right(&self) -> &Game;
    fn related(&self, l: &Configuration, r: &Configuration) -> bool;
    fn forward(&self, l: &Configuration) -> Option<Configuration>;
    fn backward(&self, r: &Configuration) -> Option<Configuration>;
    /// Answer on the right to a move played on the left at `l`.
    fn move_forward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move>;
    /// Answer on the left to a move played on the right at `r`.
    fn move_backward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move>;
}

impl<W: Witness + ?Sized> Witness for &W {
    fn left(&self) -> &Game {
        (**self).left()
    }
    fn right(&self) -> &Game {
        (**self).right()
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        (**self).related(l, r)
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        (**self).forward(l)
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        (**self).backward(r)
    }
    fn move_forward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move> {
        (**self).move_forward(l, r, m)
    }
    fn move_backward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move> {
        (**self).move_backward(l, r, m)
    }
}

/// Right edge leaving `r` built from the left edge of `m`.
fn provenance_forward(right: &Game, r: &Configuration, m: &Move) -> Option<Move> {
    let e = right.edge_from(&r.loc, &m.edge)?;
    Some(Move::new(e.id.clone(), m.delay.clone()))
}

/// Left edge leaving `l` that the right edge of `m` was built from.
fn provenance_backward(left: &Game, right: &Game, l: &Configuration, m: &Move) -> Option<Move> {
    let origin = right.edge(&m.edge)?.provenance.as_ref()?;
    let e = left.edge(origin)?;
    (e.src == l.loc).then(|| Move::new(e.id.clone(), m.delay.clone()))
}

macro_rules! provenance_moves {
    () => {
        fn move_forward(&self, _l: &Configuration, r: &Configuration, m: &Move) -> Option<Move> {
            provenance_forward(self.right(), r, m)
        }
        fn move_backward(&self, l: &Configuration, _r: &Configuration, m: &Move) -> Option<Move> {
            provenance_backward(self.left(), self.right(), l, m)
        }
    };
}

/// Singular game ↔ stopwatch game: divide by the slope.
pub struct Gamma1<'a> {
    pub isr: &'a Game,
    pub stopwatch: &'a Game,
}

impl Witness for Gamma1<'_> {
    fn left(&self) -> &Game {
        self.isr
    }
    fn right(&self) -> &Game {
        self.stopwatch
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        self.isr.locations.contains_key(&l.loc)
            && self.stopwatch.locations.contains_key(&r.loc)
            && gamma1(self.isr, l) == *r
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        self.isr
            .locations
            .contains_key(&l.loc)
            .then(|| gamma1(self.isr, l))
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        self.isr
            .locations
            .contains_key(&r.loc)
            .then(|| gamma1_inv(self.isr, r))
    }
    provenance_moves!();
}

/// Stopwatch game ↔ annotated stopwatch game: same valuation.
pub struct Beta1<'a> {
    pub stopwatch: &'a Game,
    pub annotated: &'a Game,
}

impl Witness for Beta1<'_> {
    fn left(&self) -> &Game {
        self.stopwatch
    }
    fn right(&self) -> &Game {
        self.annotated
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        beta_contains(self.annotated, l, r)
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        beta_forward(self.stopwatch, self.annotated, l)
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        r.loc.frozen().map(|_| beta_backward(r))
    }
    provenance_moves!();
}

/// Annotated stopwatch game ↔ updatable game: identity.
pub struct Beta2<'a> {
    pub annotated: &'a Game,
    pub updatable: &'a Game,
}

impl Witness for Beta2<'_> {
    fn left(&self) -> &Game {
        self.annotated
    }
    fn right(&self) -> &Game {
        self.updatable
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        l == r
            && self.annotated.locations.contains_key(&l.loc)
            && self.updatable.locations.contains_key(&r.loc)
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        self.updatable
            .locations
            .contains_key(&l.loc)
            .then(|| l.clone())
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        self.annotated
            .locations
            .contains_key(&r.loc)
            .then(|| r.clone())
    }
    provenance_moves!();
}

/// Updatable game ↔ timed game: subtract the offset.
pub struct Gamma2<'a> {
    pub updatable: &'a Game,
    pub timed: &'a Game,
}

impl Witness for Gamma2<'_> {
    fn left(&self) -> &Game {
        self.updatable
    }
    fn right(&self) -> &Game {
        self.timed
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        r.loc.offset().is_some()
            && self.timed.locations.contains_key(&r.loc)
            && self.updatable.locations.contains_key(&l.loc)
            && gamma2_inv(r) == *l
    }
    fn forward(&self, _l: &Configuration) -> Option<Configuration> {
        // the offset is history dependent
        None
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        r.loc.offset().map(|_| gamma2_inv(r))
    }
    provenance_moves!();
}

/// The identity relation on one game.
pub struct Identity<'a>(pub &'a Game);

impl Witness for Identity<'_> {
    fn left(&self) -> &Game {
        self.0
    }
    fn right(&self) -> &Game {
        self.0
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        l == r && self.0.locations.contains_key(&l.loc)
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        Some(l.clone())
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        Some(r.clone())
    }
    fn move_forward(&self, _l: &Configuration, _r: &Configuration, m: &Move) -> Option<Move> {
        Some(m.clone())
    }
    fn move_backward(&self, _l: &Configuration, _r: &Configuration, m: &Move) -> Option<Move> {
        Some(m.clone())
    }
}

/// Relational composition; the middle configuration is recovered with the
/// backward map of the second witness.
pub struct Composed<A, B> {
    pub first: A,
    pub second: B,
}

pub fn compose<A: Witness, B: Witness>(first: A, second: B) -> Composed<A, B> {
    Composed { first, second }
}

impl<A: Witness, B: Witness> Witness for Composed<A, B> {
    fn left(&self) -> &Game {
        self.first.left()
    }
    fn right(&self) -> &Game {
        self.second.right()
    }
    fn related(&self, l: &Configuration, r: &Configuration) -> bool {
        match self.second.backward(r) {
            Some(mid) => self.first.related(l, &mid) && self.second.related(&mid, r),
            None => false,
        }
    }
    fn forward(&self, l: &Configuration) -> Option<Configuration> {
        self.second.forward(&self.first.forward(l)?)
    }
    fn backward(&self, r: &Configuration) -> Option<Configuration> {
        self.first.backward(&self.second.backward(r)?)
    }
    fn move_forward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move> {
        let mid = self.second.backward(r)?;
        let m_mid = self.first.move_forward(l, &mid, m)?;
        self.second.move_forward(&mid, r, &m_mid)
    }
    fn move_backward(&self, l: &Configuration, r: &Configuration, m: &Move) -> Option<Move> {
        let mid = self.second.backward(r)?;
        let m_mid = self.second.move_backward(&mid, r, m)?;
        self.first.move_backward(l, &mid, &m_mid)
    }
}

/// Delay sampler: window boundaries and midpoint, plus seeded uniform
/// rationals with a bounded denominator.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    pub extra: usize,
    pub max_den: i64,
}

impl Sampler {
    pub fn new(seed: u64, extra: usize) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            extra,
            max_den: 6,
        }
    }

    pub fn delays(&mut self, w: &DelayWindow) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        let lo = w.lo().clone();
        match w.hi() {
            Some(hi) => {
                out.insert(rational::midpoint(&lo, hi));
                out.insert(hi.clone());
            }
            None => {
                out.insert(&lo + rational::ratio(1, 2));
                out.insert(&lo + rational::int(1));
            }
        }
        out.insert(lo);
        for _ in 0..self.extra {
            out.insert(sample_delay(&mut self.rng, w, self.max_den, 3));
        }
        out.into_iter().collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Every enabled edge of `q` crossed with sampled delays.
    pub fn moves(&mut self, g: &Game, q: &Configuration) -> Vec<Move> {
        let mut out = Vec::new();
        for (e, w) in enabled_edges(g, q) {
            for t in self.delays(&w) {
                out.push(Move::new(e.id.clone(), t));
            }
        }
        out
    }

    /// A single random move, biased towards window boundaries.
    pub fn pick(&mut self, g: &Game, q: &Configuration) -> Option<Move> {
        let enabled = enabled_edges(g, q);
        if enabled.is_empty() {
            return None;
        }
        let (e, w) = &enabled[self.rng.gen_range(0..enabled.len())];
        let delays = self.delays(w);
        let t = delays[self.rng.gen_range(0..delays.len())].clone();
        Some(Move::new(e.id.clone(), t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureKind {
    /// The pair is not in the relation although it was claimed to be.
    NotRelated,
    LabelMismatch,
    /// The witness has no answer to the move.
    UnmatchedMove,
    /// The answer is not enabled on the other side.
    AnswerNotEnabled,
    /// Both moves are enabled but the successors are not related.
    SuccessorsUnrelated,
}

/// A replayable violation of one clause of the bisimulation conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: FailureKind,
    pub left: Configuration,
    pub right: Configuration,
    /// The move being matched, and the side it is played on.
    pub mv: Option<(Side, Move)>,
}

impl Counterexample {
    /// Re-executes the failing clause against `w`; true when the violation
    /// is confirmed.
    pub fn replay(&self, w: &dyn Witness) -> bool {
        match self.kind {
            FailureKind::NotRelated => !w.related(&self.left, &self.right),
            FailureKind::LabelMismatch => {
                self.left.obs(w.left()) != self.right.obs(w.right())
            }
            _ => {
                let Some((side, m)) = &self.mv else {
                    return false;
                };
                match check_move(w, &self.left, &self.right, *side, m) {
                    Some(kind) => kind == self.kind,
                    None => false,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { moves_checked: usize },
    Fail(Counterexample),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("configurations {left:?} and {right:?} belong to different players")]
pub struct OwnershipMismatch {
    pub left: Configuration,
    pub right: Configuration,
}

/// Which clauses to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Pl1 moves on the left and Pl2 moves on the right.
    Simulation,
    /// Moves of both players on both sides.
    #[default]
    Bisimulation,
}

/// Checks one played move against the witness. `None` when the move is
/// matched (or is not a legal move to begin with).
fn check_move(
    w: &dyn Witness,
    l: &Configuration,
    r: &Configuration,
    side: Side,
    m: &Move,
) -> Option<FailureKind> {
    match side {
        Side::Left => {
            let l2 = step(w.left(), l, m).ok()?;
            let Some(answer) = w.move_forward(l, r, m) else {
                return Some(FailureKind::UnmatchedMove);
            };
            let Ok(r2) = step(w.right(), r, &answer) else {
                return Some(FailureKind::AnswerNotEnabled);
            };
            (!w.related(&l2, &r2)).then_some(FailureKind::SuccessorsUnrelated)
        }
        Side::Right => {
            let r2 = step(w.right(), r, m).ok()?;
            let Some(answer) = w.move_backward(l, r, m) else {
                return Some(FailureKind::UnmatchedMove);
            };
            let Ok(l2) = step(w.left(), l, &answer) else {
                return Some(FailureKind::AnswerNotEnabled);
            };
            (!w.related(&l2, &r2)).then_some(FailureKind::SuccessorsUnrelated)
        }
    }
}

pub fn check_local_bisim(
    w: &dyn Witness,
    l: &Configuration,
    r: &Configuration,
    sampler: &mut Sampler,
) -> Result<Verdict, OwnershipMismatch> {
    check_local(w, l, r, sampler, Mode::Bisimulation)
}

pub fn check_local(
    w: &dyn Witness,
    l: &Configuration,
    r: &Configuration,
    sampler: &mut Sampler,
    mode: Mode,
) -> Result<Verdict, OwnershipMismatch> {
    let fail = |kind, mv| {
        Ok(Verdict::Fail(Counterexample {
            kind,
            left: l.clone(),
            right: r.clone(),
            mv,
        }))
    };
    let (Some(ll), Some(rl)) = (w.left().location(&l.loc), w.right().location(&r.loc)) else {
        return fail(FailureKind::NotRelated, None);
    };
    if ll.owner != rl.owner {
        return Err(OwnershipMismatch {
            left: l.clone(),
            right: r.clone(),
        });
    }
    if ll.obs != rl.obs {
        return fail(FailureKind::LabelMismatch, None);
    }
    let sides: &[Side] = match (mode, ll.owner) {
        (Mode::Bisimulation, _) => &[Side::Left, Side::Right],
        (Mode::Simulation, Owner::Pl1) => &[Side::Left],
        (Mode::Simulation, Owner::Pl2) => &[Side::Right],
    };
    let mut checked = 0;
    for &side in sides {
        let (g, q) = match side {
            Side::Left => (w.left(), l),
            Side::Right => (w.right(), r),
        };
        for m in sampler.moves(g, q) {
            checked += 1;
            if let Some(kind) = check_move(w, l, r, side, &m) {
                return fail(kind, Some((side, m)));
            }
        }
    }
    Ok(Verdict::Pass {
        moves_checked: checked,
    })
}

/// Adjacent and composed links of the chain that are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    Gamma1,
    Beta1,
    Beta2,
    Beta,
    Gamma2,
    EndToEnd,
}

impl Link {
    pub const ALL: [Link; 6] = [
        Link::Gamma1,
        Link::Beta1,
        Link::Beta2,
        Link::Beta,
        Link::Gamma2,
        Link::EndToEnd,
    ];

    pub fn stages(self) -> (Stage, Stage) {
        match self {
            Link::Gamma1 => (Stage::Isr, Stage::Stopwatch),
            Link::Beta1 => (Stage::Stopwatch, Stage::Annotated),
            Link::Beta2 => (Stage::Annotated, Stage::Updatable),
            Link::Beta => (Stage::Stopwatch, Stage::Updatable),
            Link::Gamma2 => (Stage::Updatable, Stage::Timed),
            Link::EndToEnd => (Stage::Isr, Stage::Timed),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::Gamma1 => "gamma1",
            Link::Beta1 => "beta1",
            Link::Beta2 => "beta2",
            Link::Beta => "beta",
            Link::Gamma2 => "gamma2",
            Link::EndToEnd => "end-to-end",
        }
    }
}

pub fn gamma1_witness(c: &Chain) -> Gamma1<'_> {
    Gamma1 {
        isr: &c.isr,
        stopwatch: &c.stopwatch,
    }
}

pub fn beta1_witness(c: &Chain) -> Beta1<'_> {
    Beta1 {
        stopwatch: &c.stopwatch,
        annotated: &c.annotated,
    }
}

pub fn beta2_witness(c: &Chain) -> Beta2<'_> {
    Beta2 {
        annotated: &c.annotated,
        updatable: &c.updatable,
    }
}

pub fn beta_witness(c: &Chain) -> Composed<Beta1<'_>, Beta2<'_>> {
    compose(beta1_witness(c), beta2_witness(c))
}

pub fn gamma2_witness(c: &Chain) -> Gamma2<'_> {
    Gamma2 {
        updatable: &c.updatable,
        timed: &c.timed,
    }
}

pub type EndToEnd<'a> = Composed<Composed<Gamma1<'a>, Composed<Beta1<'a>, Beta2<'a>>>, Gamma2<'a>>;

pub fn end_to_end_witness(c: &Chain) -> EndToEnd<'_> {
    compose(compose(gamma1_witness(c), beta_witness(c)), gamma2_witness(c))
}

/// Runs `f` with the witness of `link`.
pub fn with_witness<R>(c: &Chain, link: Link, f: impl FnOnce(&dyn Witness) -> R) -> R {
    match link {
        Link::Gamma1 => f(&gamma1_witness(c)),
        Link::Beta1 => f(&beta1_witness(c)),
        Link::Beta2 => f(&beta2_witness(c)),
        Link::Beta => f(&beta_witness(c)),
        Link::Gamma2 => f(&gamma2_witness(c)),
        Link::EndToEnd => f(&end_to_end_witness(c)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkReport {
    pub link: Link,
    pub checked: usize,
    pub passed: usize,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub samples: usize,
    pub links: Vec<LinkReport>,
    pub warnings: Vec<String>,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.links.iter().all(|l| l.counterexamples.is_empty())
    }

    pub fn failing_links(&self) -> Vec<Link> {
        self.links
            .iter()
            .filter(|l| !l.counterexamples.is_empty())
            .map(|l| l.link)
            .collect()
    }

    pub fn link(&self, link: Link) -> &LinkReport {
        self.links.iter().find(|l| l.link == link).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainCheck {
    /// Number of distinct reachable tuples to check.
    pub samples: usize,
    /// Length of each sampling play.
    pub depth: usize,
    pub seed: u64,
    /// Random delays per window on top of `{lo, mid, hi}`.
    pub extra_delays: usize,
}

impl ChainCheck {
    pub fn new(samples: usize, depth: usize, seed: u64) -> Self {
        ChainCheck {
            samples,
            depth,
            seed,
            extra_delays: 0,
        }
    }
}

/// Builds the chain of `isr` and checks every link on sampled reachable
/// configurations.
pub fn verify_chain(isr: &Game, cfg: ChainCheck) -> Result<ChainReport, Invalid> {
    let chain = Chain::build(isr)?;
    Ok(verify_stages(&chain, cfg))
}

/// Same as [`verify_chain`] on an already built (possibly edited) chain.
pub fn verify_stages(chain: &Chain, cfg: ChainCheck) -> ChainReport {
    let mut links: Vec<LinkReport> = Link::ALL
        .iter()
        .map(|&link| LinkReport {
            link,
            checked: 0,
            passed: 0,
            counterexamples: Vec::new(),
        })
        .collect();
    let mut warnings = Vec::new();
    let (tuples, lift_failures) = sample_tuples(chain, cfg);
    for (link, cex) in lift_failures {
        let r = links.iter_mut().find(|r| r.link == link).unwrap();
        r.checked += 1;
        r.counterexamples.push(cex);
    }
    let mut sampler = Sampler::new(cfg.seed ^ 0x5eed, cfg.extra_delays);
    for tuple in &tuples {
        for report in links.iter_mut() {
            let (a, b) = report.link.stages();
            let (l, r) = (&tuple[a], &tuple[b]);
            report.checked += 1;
            let verdict = with_witness(chain, report.link, |w| {
                if !w.related(l, r) {
                    return Ok(Verdict::Fail(Counterexample {
                        kind: FailureKind::NotRelated,
                        left: l.clone(),
                        right: r.clone(),
                        mv: None,
                    }));
                }
                check_local_bisim(w, l, r, &mut sampler)
            });
            match verdict {
                Ok(Verdict::Pass { .. }) => report.passed += 1,
                Ok(Verdict::Fail(cex)) => report.counterexamples.push(cex),
                Err(e) => report.counterexamples.push(Counterexample {
                    kind: FailureKind::NotRelated,
                    left: e.left,
                    right: e.right,
                    mv: None,
                }),
            }
        }
    }
    if tuples.is_empty() {
        warnings.push("no configurations sampled; verdict is vacuous".to_string());
    } else if tuples.len() < cfg.samples {
        warnings.push(format!(
            "only {} distinct reachable configurations found (asked for {})",
            tuples.len(),
            cfg.samples
        ));
    }
    ChainReport {
        samples: tuples.len(),
        links,
        warnings,
    }
}

/// Reachable configuration tuples, found by random plays of the singular
/// game lifted along the chain and topped up, when the plays find too few,
/// by a breadth-first search over window boundaries and midpoints. Moves that cannot be lifted are returned as
/// counterexamples of the link where lifting broke.
pub fn sample_tuples(
    chain: &Chain,
    cfg: ChainCheck,
) -> (Vec<PerStage<Configuration>>, Vec<(Link, Counterexample)>) {
    let mut seen = BTreeSet::new();
    let mut tuples = Vec::new();
    let mut failures = Vec::new();
    if cfg.samples == 0 {
        return (tuples, failures);
    }
    let mut sampler = Sampler::new(cfg.seed, 1);
    sampler.max_den = 64;
    let attempts = cfg.samples * 8 + 16;
    for _ in 0..attempts {
        if tuples.len() >= cfg.samples {
            break;
        }
        let mut at = chain.initial();
        for i in 0..=cfg.depth {
            if seen.insert(at.0.clone()) {
                tuples.push(at.clone());
                if tuples.len() >= cfg.samples {
                    break;
                }
            }
            if i == cfg.depth {
                break;
            }
            let Some(m) = sampler.pick(&chain.isr, &at[Stage::Isr]) else {
                break;
            };
            match chain.lift_step(&at, &m, i) {
                Ok((_, next)) => at = next,
                Err(err) => {
                    if let Some(f) = lift_failure(chain, &at, &m, &err) {
                        failures.push(f);
                    }
                    break;
                }
            }
        }
    }
    if tuples.len() < cfg.samples {
        // breadth-first over boundary and midpoint delays to fill up
        let mut expanded = BTreeSet::new();
        let mut frontier = vec![chain.initial()];
        'bfs: for i in 0..cfg.depth {
            let mut next = Vec::new();
            for at in frontier {
                if !expanded.insert(at.0.clone()) {
                    continue;
                }
                for m in sampler.moves(&chain.isr, &at[Stage::Isr]) {
                    match chain.lift_step(&at, &m, i) {
                        Ok((_, n)) => {
                            if seen.insert(n.0.clone()) {
                                tuples.push(n.clone());
                                if tuples.len() >= cfg.samples {
                                    break 'bfs;
                                }
                            }
                            next.push(n);
                        }
                        Err(err) => {
                            if let Some(f) = lift_failure(chain, &at, &m, &err) {
                                failures.push(f);
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    (tuples, failures)
}

fn lift_failure(
    chain: &Chain,
    at: &PerStage<Configuration>,
    m: &Move,
    err: &crate::chain::LiftError,
) -> Option<(Link, Counterexample)> {
    use crate::chain::LiftError;
    let (stage, kind) = match err {
        LiftError::NoMatchingEdge { stage, .. } => (*stage, FailureKind::UnmatchedMove),
        LiftError::NotEnabled { stage, .. } => (*stage, FailureKind::AnswerNotEnabled),
        LiftError::InvalidHistory { .. } => return None,
    };
    let prev = stage.previous()?;
    // replay the lifted move up to the previous stage
    let mut mv = m.clone();
    for s in &Stage::ALL[1..=prev as usize] {
        let e = chain.stage(*s).edge_from(&at[*s].loc, &mv.edge)?;
        mv = Move::new(e.id.clone(), mv.delay.clone());
    }
    let link = match stage {
        Stage::Stopwatch => Link::Gamma1,
        Stage::Annotated => Link::Beta1,
        Stage::Updatable => Link::Beta2,
        Stage::Timed => Link::Gamma2,
        Stage::Isr => return None,
    };
    Some((
        link,
        Counterexample {
            kind,
            left: at[prev].clone(),
            right: at[stage].clone(),
            mv: Some((Side::Left, mv)),
        },
    ))
}
