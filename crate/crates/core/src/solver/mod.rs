//! Region-graph synthesis for reachability and safety objectives on timed
//! games.

mod region;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub use region::{integer_bounds, Region};

use crate::game::{EdgeId, Flavor, Game, LocationId, Owner};
use crate::rational::{self, Rational};
use crate::scale::scale_to_integers;
use crate::semantics::{edge_window, enabled_edges, Configuration, History, Move, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("expected a timed game, got a {0} game")]
    NotTimed(Flavor),
    #[error("guard bound of edge {0} is not an integer; scale the game first")]
    NotScaled(EdgeId),
    #[error("region graph exceeds {0} nodes")]
    TooLarge(usize),
    #[error("no delay realizes the chosen region from {0:?}")]
    NoRealization(Configuration),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub loc: LocationId,
    pub region: Region,
    pub owner: Owner,
    pub obs: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionMove {
    /// Number of time-successor steps taken before the edge.
    pub delay: usize,
    /// Index into [`RegionGame::edges`].
    pub edge: usize,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct RegionGame {
    pub max: Vec<u64>,
    pub nodes: Vec<Node>,
    pub moves: Vec<Vec<RegionMove>>,
    pub edges: Vec<EdgeId>,
    pub init: usize,
    locations: HashMap<LocationId, usize>,
    index: HashMap<(usize, Region), usize>,
}

impl RegionGame {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_of(&self, loc: &LocationId, region: &Region) -> Option<usize> {
        let l = *self.locations.get(loc)?;
        self.index.get(&(l, region.clone())).copied()
    }

    /// The region in which the edge of `m` is taken from `node`.
    pub fn delay_region(&self, node: usize, m: &RegionMove) -> Region {
        let mut r = self.nodes[node].region.clone();
        for _ in 0..m.delay {
            r = r.next(&self.max).expect("delay index within the time successors");
        }
        r
    }

    fn entry(&self, node: usize, m: &RegionMove) -> (Region, EdgeId) {
        (self.delay_region(node, m), self.edges[m.edge].clone())
    }

    /// Nodes with a move into each node, once per move.
    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (i, moves) in self.moves.iter().enumerate() {
            for m in moves {
                pred[m.target].push(i);
            }
        }
        pred
    }
}

/// Per-clock maximal constants of a game with integer guard bounds.
pub fn max_constants(g: &Game) -> Result<Vec<u64>, SolverError> {
    let mut out = vec![0u64; g.dim()];
    for e in g.edges.values() {
        for (&x, i) in &e.guard.conjuncts {
            for b in [&i.lo, &i.hi] {
                if !rational::is_integer(b) {
                    return Err(SolverError::NotScaled(e.id.clone()));
                }
                if b.is_positive() {
                    let v = b.to_integer().to_u64().expect("bound fits in u64");
                    out[x] = out[x].max(v);
                }
            }
        }
    }
    Ok(out)
}

pub fn build_region_graph(g: &Game) -> Result<RegionGame, SolverError> {
    build_region_graph_limited(g, usize::MAX)
}

/// Region nodes reachable from the initial location with all clocks at 0.
pub fn build_region_graph_limited(g: &Game, limit: usize) -> Result<RegionGame, SolverError> {
    if g.flavor != Flavor::Timed {
        return Err(SolverError::NotTimed(g.flavor));
    }
    let max = max_constants(g)?;
    let edge_index: HashMap<&EdgeId, usize> = g.edges.keys().enumerate().map(|(i, e)| (e, i)).collect();
    let mut rg = RegionGame {
        max: max.clone(),
        nodes: Vec::new(),
        moves: Vec::new(),
        edges: g.edges.keys().cloned().collect(),
        init: 0,
        locations: g.locations.keys().cloned().enumerate().map(|(i, l)| (l, i)).collect(),
        index: HashMap::new(),
    };
    let locs: Vec<&LocationId> = g.locations.keys().collect();
    let outgoing: Vec<Vec<_>> = locs
        .iter()
        .map(|l| g.outgoing(l).map(|e| (e, integer_bounds(&e.guard))).collect())
        .collect();
    let mut queue = VecDeque::new();
    let intern = |rg: &mut RegionGame, queue: &mut VecDeque<usize>, l: usize, region: Region| {
        let key = (l, region);
        if let Some(&i) = rg.index.get(&key) {
            return Ok(i);
        }
        if rg.nodes.len() >= limit {
            return Err(SolverError::TooLarge(limit));
        }
        let loc = &g.locations[locs[l]];
        let i = rg.nodes.len();
        rg.nodes.push(Node {
            loc: loc.id.clone(),
            region: key.1.clone(),
            owner: loc.owner,
            obs: loc.obs.clone(),
        });
        rg.moves.push(Vec::new());
        rg.index.insert(key, i);
        queue.push_back(i);
        Ok(i)
    };
    let init = rg.locations[&g.init];
    rg.init = intern(&mut rg, &mut queue, init, Region::zero_region(g.dim()))?;
    while let Some(i) = queue.pop_front() {
        let region = rg.nodes[i].region.clone();
        let mut moves = Vec::new();
        let l = rg.locations[&rg.nodes[i].loc];
        for (delay, r) in region.time_successors(&max).into_iter().enumerate() {
            for (e, bounds) in &outgoing[l] {
                if !r.satisfies_bounds(bounds) {
                    continue;
                }
                let after = r.reset(e.reset.assignments.keys().copied());
                let dst = rg.locations[&e.dst];
                let target = intern(&mut rg, &mut queue, dst, after)?;
                moves.push(RegionMove {
                    delay,
                    edge: edge_index[&e.id],
                    target,
                });
            }
        }
        rg.moves[i] = moves;
    }
    Ok(rg)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    /// Eventually visit one of these observations.
    Reach(BTreeSet<String>),
    /// Only ever visit these observations.
    Safe(BTreeSet<String>),
}

impl Objective {
    pub fn reach(obs: &str) -> Self {
        Objective::Reach([obs.to_string()].into())
    }

    pub fn safe(obs: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Objective::Safe(obs.into_iter().map(Into::into).collect())
    }

    /// Parses `reach:A,B` or `safe:A,B`.
    pub fn parse(text: &str) -> Option<Objective> {
        let (kind, rest) = text.split_once(':')?;
        let set: BTreeSet<String> = rest
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if set.is_empty() {
            return None;
        }
        match kind {
            "reach" => Some(Objective::Reach(set)),
            "safe" => Some(Objective::Safe(set)),
            _ => None,
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (kind, set) = match self {
            Objective::Reach(s) => ("reach", s),
            Objective::Safe(s) => ("safe", s),
        };
        let parts: Vec<&str> = set.iter().map(String::as_str).collect();
        write!(f, "{kind}:{}", parts.join(","))
    }
}

/// Positional strategy on region nodes: the time-successor region to wait
/// for and the edge to take.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegionStrategy {
    pub entries: BTreeMap<usize, (Region, EdgeId)>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub winning: Vec<bool>,
    /// For reachability: number of attractor rounds before the node joined
    /// the winning set.
    pub rank: Vec<Option<usize>>,
    pub strategy: RegionStrategy,
}

impl Solution {
    pub fn winning_set(&self) -> BTreeSet<usize> {
        (0..self.winning.len()).filter(|&i| self.winning[i]).collect()
    }
}

/// Least fixpoint of the Pl1 controllable predecessor from the target
/// nodes. Deadlocked non-target nodes are losing.
pub fn solve_reachability(rg: &RegionGame, target: &BTreeSet<String>) -> Solution {
    let n = rg.len();
    let pred = rg.predecessors();
    let mut pending: Vec<usize> = rg.moves.iter().map(Vec::len).collect();
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut wave: Vec<usize> = (0..n).filter(|&i| target.contains(&rg.nodes[i].obs)).collect();
    for &i in &wave {
        rank[i] = Some(0);
    }
    let mut round = 0;
    while !wave.is_empty() {
        round += 1;
        let mut next = Vec::new();
        for &j in &wave {
            for &p in &pred[j] {
                if rank[p].is_some() {
                    continue;
                }
                let joins = match rg.nodes[p].owner {
                    Owner::Pl1 => true,
                    Owner::Pl2 => {
                        pending[p] -= 1;
                        pending[p] == 0
                    }
                };
                if joins {
                    rank[p] = Some(round);
                    next.push(p);
                }
            }
        }
        wave = next;
    }
    let mut strategy = RegionStrategy::default();
    for i in 0..n {
        let (Some(r), Owner::Pl1) = (rank[i], rg.nodes[i].owner) else { continue };
        if r == 0 {
            continue;
        }
        let m = rg.moves[i]
            .iter()
            .find(|m| rank[m.target].is_some_and(|t| t < r))
            .expect("attractor node has a progressing move");
        strategy.entries.insert(i, rg.entry(i, m));
    }
    Solution {
        winning: rank.iter().map(Option::is_some).collect(),
        rank,
        strategy,
    }
}

/// Complement of the Pl2 attractor to unsafe nodes. A play that halts
/// without visiting an unsafe node is safe.
pub fn solve_safety(rg: &RegionGame, safe: &BTreeSet<String>) -> Solution {
    let n = rg.len();
    let pred = rg.predecessors();
    let mut pending: Vec<usize> = rg.moves.iter().map(Vec::len).collect();
    let mut bad: Vec<bool> = (0..n).map(|i| !safe.contains(&rg.nodes[i].obs)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&i| bad[i]).collect();
    while let Some(j) = stack.pop() {
        for &p in &pred[j] {
            if bad[p] {
                continue;
            }
            let joins = match rg.nodes[p].owner {
                Owner::Pl2 => true,
                Owner::Pl1 => {
                    pending[p] -= 1;
                    pending[p] == 0
                }
            };
            if joins {
                bad[p] = true;
                stack.push(p);
            }
        }
    }
    let winning: Vec<bool> = bad.iter().map(|b| !b).collect();
    let mut strategy = RegionStrategy::default();
    for i in 0..n {
        if !winning[i] || rg.nodes[i].owner != Owner::Pl1 {
            continue;
        }
        if let Some(m) = rg.moves[i].iter().find(|m| winning[m.target]) {
            strategy.entries.insert(i, rg.entry(i, m));
        }
    }
    Solution {
        winning,
        rank: vec![None; n],
        strategy,
    }
}

pub fn solve(rg: &RegionGame, objective: &Objective) -> Solution {
    match objective {
        Objective::Reach(t) => solve_reachability(rg, t),
        Objective::Safe(s) => solve_safety(rg, s),
    }
}

/// A delay after which `val` lies in `region`, searched among the instants
/// where some clock crosses an integer up to its constant plus one, and
/// the midpoints between consecutive such instants.
pub fn concretize_delay(val: &[Rational], region: &Region, max: &[u64]) -> Option<Rational> {
    let mut instants = BTreeSet::new();
    instants.insert(Rational::zero());
    for (x, v) in val.iter().enumerate() {
        for k in 0..=max[x] + 1 {
            let t = rational::int(k as i64) - v;
            if !t.is_negative() {
                instants.insert(t);
            }
        }
    }
    let instants: Vec<Rational> = instants.into_iter().collect();
    let mut candidates = Vec::with_capacity(instants.len() * 2);
    for (i, t) in instants.iter().enumerate() {
        candidates.push(t.clone());
        if let Some(next) = instants.get(i + 1) {
            candidates.push(rational::midpoint(t, next));
        }
    }
    candidates.into_iter().find(|t| {
        let shifted: Vec<Rational> = val.iter().map(|v| v + t).collect();
        Region::of(&shifted, max) == *region
    })
}

/// Turns a strategy entry into a concrete move of the scaled game.
pub fn concretize_move(
    rg: &RegionGame,
    q: &Configuration,
    chosen: &(Region, EdgeId),
) -> Result<Move, SolverError> {
    concretize_delay(&q.val, &chosen.0, &rg.max)
        .map(|t| Move::new(chosen.1.clone(), t))
        .ok_or_else(|| SolverError::NoRealization(q.clone()))
}

/// Everything produced by solving a timed game.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub objective: Objective,
    /// The timed game with guard bounds multiplied by `scale`.
    pub scaled: Game,
    pub scale: BigInt,
    pub graph: RegionGame,
    pub solution: Solution,
}

impl Synthesis {
    pub fn initial_winning(&self) -> bool {
        self.solution.winning[self.graph.init]
    }

    pub fn player(&self) -> RegionPlayer<'_> {
        RegionPlayer { synthesis: self }
    }
}

pub fn synthesize(timed: &Game, objective: &Objective) -> Result<Synthesis, SolverError> {
    synthesize_limited(timed, objective, usize::MAX)
}

pub fn synthesize_limited(
    timed: &Game,
    objective: &Objective,
    limit: usize,
) -> Result<Synthesis, SolverError> {
    if timed.flavor != Flavor::Timed {
        return Err(SolverError::NotTimed(timed.flavor));
    }
    let (scaled, scale) = scale_to_integers(timed);
    let graph = build_region_graph_limited(&scaled, limit)?;
    let solution = solve(&graph, objective);
    Ok(Synthesis {
        objective: objective.clone(),
        scaled,
        scale,
        graph,
        solution,
    })
}

/// Plays a region strategy in the unscaled timed game. Outside the
/// strategy's domain it takes the first enabled edge as early as possible.
pub struct RegionPlayer<'a> {
    pub synthesis: &'a Synthesis,
}

impl RegionPlayer<'_> {
    pub fn region_of(&self, q: &Configuration) -> Region {
        let d = Rational::from_integer(self.synthesis.scale.clone());
        let scaled: Vec<Rational> = q.val.iter().map(|v| v * &d).collect();
        Region::of(&scaled, &self.synthesis.graph.max)
    }

    pub fn strategy_move(&self, q: &Configuration) -> Option<Result<Move, SolverError>> {
        let s = self.synthesis;
        let d = Rational::from_integer(s.scale.clone());
        let scaled = Configuration::new(
            q.loc.clone(),
            q.val.iter().map(|v| v * &d).collect(),
        );
        let region = Region::of(&scaled.val, &s.graph.max);
        let node = s.graph.node_of(&q.loc, &region)?;
        let chosen = s.solution.strategy.entries.get(&node)?;
        Some(concretize_move(&s.graph, &scaled, chosen).map(|m| Move::new(m.edge, m.delay / &d)))
    }
}

impl Strategy for RegionPlayer<'_> {
    fn choose(&self, g: &Game, h: &History) -> Option<Move> {
        let q = h.last();
        if let Some(Ok(m)) = self.strategy_move(q) {
            return Some(m);
        }
        let (e, _) = enabled_edges(g, q).into_iter().next()?;
        let w = edge_window(g, q, e)?;
        Some(Move::new(e.id.clone(), w.lo().clone()))
    }
}
