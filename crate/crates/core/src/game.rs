//! Data model shared by every game flavor of the reduction chain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{self, Rational};

/// Index into [`Game::vars`].
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Owner {
    Pl1,
    Pl2,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Pl1 => Owner::Pl2,
            Owner::Pl2 => Owner::Pl1,
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn is_compact(&self) -> bool {
        self.lo <= self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// `{ v / by | v in self }`; endpoints swap when `by` is negative.
    pub fn divide(&self, by: &Rational) -> Interval {
        assert!(!by.is_zero(), "interval division by zero");
        let a = &self.lo / by;
        let b = &self.hi / by;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn scale(&self, by: &Rational) -> Interval {
        self.divide(&(Rational::one() / by))
    }

    /// `{ v - by | v in self }`.
    pub fn shift_down(&self, by: &Rational) -> Interval {
        Interval::new(&self.lo - by, &self.hi - by)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::format(&self.lo),
            rational::format(&self.hi)
        )
    }
}

/// Conjunction of per-variable interval constraints. An absent variable is
/// unconstrained.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub conjuncts: BTreeMap<VarId, Interval>,
}

impl Guard {
    pub fn new() -> Self {
        Guard::default()
    }

    pub fn with(mut self, var: VarId, interval: Interval) -> Self {
        self.conjuncts.insert(var, interval);
        self
    }

    pub fn get(&self, var: VarId) -> Option<&Interval> {
        self.conjuncts.get(&var)
    }

    pub fn is_satisfied_by(&self, val: &[Rational]) -> bool {
        self.conjuncts.iter().all(|(&x, i)| i.contains(&val[x]))
    }
}

/// Per-variable assignments; an absent variable keeps its value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Reset {
    pub assignments: BTreeMap<VarId, Rational>,
}

impl Reset {
    pub fn new() -> Self {
        Reset::default()
    }

    pub fn with(mut self, var: VarId, value: Rational) -> Self {
        self.assignments.insert(var, value);
        self
    }

    pub fn get(&self, var: VarId) -> Option<&Rational> {
        self.assignments.get(&var)
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Extra memory carried by locations of the intermediate games.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    /// Frozen value of each stopped variable; `None` for running ones.
    Frozen(Vec<Option<Rational>>),
    /// Offset of each clock from the variable it encodes.
    Offset(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocationId {
    Base(String),
    Annotated(Box<LocationId>, Annotation),
}

impl LocationId {
    pub fn base(name: impl Into<String>) -> Self {
        LocationId::Base(name.into())
    }

    pub fn annotated(inner: LocationId, annotation: Annotation) -> Self {
        LocationId::Annotated(Box::new(inner), annotation)
    }

    /// The location one annotation level down, or `self` for a base id.
    pub fn inner(&self) -> &LocationId {
        match self {
            LocationId::Base(_) => self,
            LocationId::Annotated(inner, _) => inner,
        }
    }

    pub fn annotation(&self) -> Option<&Annotation> {
        match self {
            LocationId::Base(_) => None,
            LocationId::Annotated(_, a) => Some(a),
        }
    }

    pub fn frozen(&self) -> Option<&[Option<Rational>]> {
        match self.annotation() {
            Some(Annotation::Frozen(f)) => Some(f),
            _ => None,
        }
    }

    pub fn offset(&self) -> Option<&[Rational]> {
        match self.annotation() {
            Some(Annotation::Offset(g)) => Some(g),
            _ => None,
        }
    }

    /// Name of the innermost base location.
    pub fn root(&self) -> &str {
        match self {
            LocationId::Base(name) => name,
            LocationId::Annotated(inner, _) => inner.root(),
        }
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocationId::Base(name) => f.write_str(name),
            LocationId::Annotated(inner, Annotation::Frozen(values)) => {
                write!(f, "{inner}[f:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match v {
                        Some(v) => f.write_str(&rational::format(v))?,
                        None => f.write_str("_")?,
                    }
                }
                f.write_str("]")
            }
            LocationId::Annotated(inner, Annotation::Offset(values)) => {
                write!(f, "{inner}[g:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&rational::format(v))?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub id: LocationId,
    pub owner: Owner,
    pub obs: String,
    /// Slope of every variable, indexed by [`VarId`].
    pub flow: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub String);

impl EdgeId {
    pub fn new(id: impl Into<String>) -> Self {
        EdgeId(id.into())
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: LocationId,
    pub action: String,
    pub guard: Guard,
    pub reset: Reset,
    pub dst: LocationId,
    /// The edge of the previous game in the reduction chain this one was
    /// built from.
    pub provenance: Option<EdgeId>,
}

impl Edge {
    /// Variables assigned by this edge. For timed games this is the set of
    /// clocks reset to zero.
    pub fn reset_set(&self) -> BTreeSet<VarId> {
        self.reset.assignments.keys().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Isr,
    Stopwatch,
    AnnotatedStopwatch,
    Updatable,
    Timed,
}

impl Flavor {
    pub const ALL: [Flavor; 5] = [
        Flavor::Isr,
        Flavor::Stopwatch,
        Flavor::AnnotatedStopwatch,
        Flavor::Updatable,
        Flavor::Timed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Isr => "isr",
            Flavor::Stopwatch => "stopwatch",
            Flavor::AnnotatedStopwatch => "annotated-stopwatch",
            Flavor::Updatable => "updatable",
            Flavor::Timed => "timed",
        }
    }

    pub fn from_name(name: &str) -> Option<Flavor> {
        Flavor::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Whether every game of flavor `self` is also a game of flavor `other`.
    pub fn refines(self, other: Flavor) -> bool {
        use Flavor::*;
        match (self, other) {
            (a, b) if a == b => true,
            (_, Isr) => true,
            (Timed, Updatable) => true,
            (Timed | Updatable | AnnotatedStopwatch, Stopwatch) => true,
            _ => false,
        }
    }

    /// Whether guards must constrain every variable.
    pub fn requires_total_guards(self) -> bool {
        matches!(
            self,
            Flavor::Isr | Flavor::Stopwatch | Flavor::AnnotatedStopwatch
        )
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A turn-based game on a finite graph with real variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub flavor: Flavor,
    pub vars: Vec<String>,
    pub actions: BTreeSet<String>,
    pub observations: BTreeSet<String>,
    pub locations: BTreeMap<LocationId, Location>,
    pub edges: BTreeMap<EdgeId, Edge>,
    pub init: LocationId,
}

impl Game {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn location(&self, id: &LocationId) -> Option<&Location> {
        self.locations.get(id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn outgoing<'a>(&'a self, loc: &'a LocationId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.values().filter(move |e| &e.src == loc)
    }

    /// Edge leaving `src` whose provenance is `origin`.
    pub fn edge_from(&self, src: &LocationId, origin: &EdgeId) -> Option<&Edge> {
        self.edges
            .values()
            .find(|e| &e.src == src && e.provenance.as_ref() == Some(origin))
    }

    pub fn flow(&self, loc: &LocationId, x: VarId) -> &Rational {
        &self.locations[loc].flow[x]
    }

    /// Every rational constant appearing in a guard bound or reset value.
    pub fn constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for e in self.edges.values() {
            for i in e.guard.conjuncts.values() {
                out.insert(i.lo.clone());
                out.insert(i.hi.clone());
            }
            out.extend(e.reset.assignments.values().cloned());
        }
        out
    }

    /// Largest guard bound mentioning each variable (zero when none).
    pub fn max_constants(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for e in self.edges.values() {
            for (&x, i) in &e.guard.conjuncts {
                for b in [&i.lo, &i.hi] {
                    if *b > out[x] {
                        out[x] = b.clone();
                    }
                }
            }
        }
        out
    }
}
