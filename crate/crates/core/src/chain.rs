//! The full reduction chain and deterministic lifting of runs along it.

use std::fmt;

use crate::game::{EdgeId, Game};
use crate::semantics::{step, Configuration, Move, Run, SemanticsError};
use crate::to_stopwatch::to_stopwatch;
use crate::to_timed::to_timed;
use crate::to_updatable::{annotate_resets, to_updatable};
use crate::validate::{validate_game, Invalid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Isr = 0,
    Stopwatch = 1,
    Annotated = 2,
    Updatable = 3,
    Timed = 4,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Isr,
        Stage::Stopwatch,
        Stage::Annotated,
        Stage::Updatable,
        Stage::Timed,
    ];

    pub fn previous(self) -> Option<Stage> {
        match self {
            Stage::Isr => None,
            s => Some(Stage::ALL[s as usize - 1]),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Isr => "isr",
            Stage::Stopwatch => "stopwatch",
            Stage::Annotated => "annotated",
            Stage::Updatable => "updatable",
            Stage::Timed => "timed",
        };
        f.write_str(s)
    }
}

/// One value per stage of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerStage<T>(pub [T; 5]);

impl<T> PerStage<T> {
    pub fn get(&self, s: Stage) -> &T {
        &self.0[s as usize]
    }
}

impl<T> std::ops::Index<Stage> for PerStage<T> {
    type Output = T;
    fn index(&self, s: Stage) -> &T {
        &self.0[s as usize]
    }
}

/// An initialized singular game together with the four games derived from
/// it.
#[derive(Debug, Clone)]
pub struct Chain {
    pub isr: Game,
    pub stopwatch: Game,
    pub annotated: Game,
    pub updatable: Game,
    pub timed: Game,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiftError {
    #[error("step {index} of the history is not a legal move: {source}")]
    InvalidHistory {
        index: usize,
        #[source]
        source: SemanticsError,
    },
    #[error("step {index}: no edge of the {stage} game corresponds to the move")]
    NoMatchingEdge { index: usize, stage: Stage },
    #[error("step {index}: matched move is not enabled in the {stage} game: {source}")]
    NotEnabled {
        index: usize,
        stage: Stage,
        #[source]
        source: SemanticsError,
    },
}

impl Chain {
    pub fn build(isr: &Game) -> Result<Chain, Invalid> {
        let violations = validate_game(isr);
        if !violations.is_empty() {
            return Err(Invalid(violations));
        }
        let stopwatch = to_stopwatch(isr);
        let annotated = annotate_resets(&stopwatch);
        let updatable = to_updatable(&annotated);
        let timed = to_timed(&updatable);
        Ok(Chain {
            isr: isr.clone(),
            stopwatch,
            annotated,
            updatable,
            timed,
        })
    }

    /// Rebuilds every stage after `from` out of the (possibly edited) game
    /// stored at `from`.
    pub fn rebuild_after(&mut self, from: Stage) {
        if from < Stage::Stopwatch {
            self.stopwatch = to_stopwatch(&self.isr);
        }
        if from < Stage::Annotated {
            self.annotated = annotate_resets(&self.stopwatch);
        }
        if from < Stage::Updatable {
            self.updatable = to_updatable(&self.annotated);
        }
        if from < Stage::Timed {
            self.timed = to_timed(&self.updatable);
        }
    }

    pub fn stage(&self, s: Stage) -> &Game {
        match s {
            Stage::Isr => &self.isr,
            Stage::Stopwatch => &self.stopwatch,
            Stage::Annotated => &self.annotated,
            Stage::Updatable => &self.updatable,
            Stage::Timed => &self.timed,
        }
    }

    pub fn stage_mut(&mut self, s: Stage) -> &mut Game {
        match s {
            Stage::Isr => &mut self.isr,
            Stage::Stopwatch => &mut self.stopwatch,
            Stage::Annotated => &mut self.annotated,
            Stage::Updatable => &mut self.updatable,
            Stage::Timed => &mut self.timed,
        }
    }

    /// Follows provenance links from an edge of stage `s` back to the
    /// singular game.
    pub fn origin_edge(&self, s: Stage, e: &EdgeId) -> Option<EdgeId> {
        let mut stage = s;
        let mut edge = e.clone();
        while let Some(prev) = stage.previous() {
            edge = self.stage(stage).edge(&edge)?.provenance.clone()?;
            stage = prev;
        }
        self.isr.edge(&edge).map(|_| edge)
    }

    pub fn initial(&self) -> PerStage<Configuration> {
        PerStage(Stage::ALL.map(|s| Configuration::initial(self.stage(s))))
    }

    /// Plays the move `m` of the singular game at `at`, and the same move
    /// (same delay, provenance-matched edge) at every later stage.
    pub fn lift_step(
        &self,
        at: &PerStage<Configuration>,
        m: &Move,
        index: usize,
    ) -> Result<(PerStage<Move>, PerStage<Configuration>), LiftError> {
        let mut moves: Vec<Move> = Vec::with_capacity(5);
        let mut next: Vec<Configuration> = Vec::with_capacity(5);
        let q = step(&self.isr, &at[Stage::Isr], m)
            .map_err(|source| LiftError::InvalidHistory { index, source })?;
        moves.push(m.clone());
        next.push(q);
        for s in &Stage::ALL[1..] {
            let g = self.stage(*s);
            let prev_move = moves.last().unwrap();
            let e = g
                .edge_from(&at[*s].loc, &prev_move.edge)
                .ok_or(LiftError::NoMatchingEdge { index, stage: *s })?;
            let mv = Move::new(e.id.clone(), prev_move.delay.clone());
            let q = step(g, &at[*s], &mv).map_err(|source| LiftError::NotEnabled {
                index,
                stage: *s,
                source,
            })?;
            moves.push(mv);
            next.push(q);
        }
        Ok((
            PerStage(moves.try_into().unwrap()),
            PerStage(next.try_into().unwrap()),
        ))
    }
}

/// The images of a history of the singular game at every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedHistory(pub PerStage<Run>);

impl LiftedHistory {
    pub fn at(&self, s: Stage) -> &Run {
        &self.0[s]
    }

    pub fn last(&self) -> PerStage<Configuration> {
        PerStage(Stage::ALL.map(|s| self.at(s).last().clone()))
    }
}

/// Lifts a history of the singular game along the whole chain.
pub fn lift_history(chain: &Chain, h: &Run) -> Result<LiftedHistory, LiftError> {
    let init = chain.initial();
    if h.start != init[Stage::Isr] {
        return Err(LiftError::InvalidHistory {
            index: 0,
            source: SemanticsError::WrongSource {
                edge: EdgeId::new("<start>"),
                loc: h.start.loc.clone(),
            },
        });
    }
    let mut runs = init.0.clone().map(Run::new);
    let mut at = init;
    for (i, (m, q)) in h.steps.iter().enumerate() {
        let (moves, next) = chain.lift_step(&at, m, i)?;
        if &next[Stage::Isr] != q {
            return Err(LiftError::InvalidHistory {
                index: i,
                source: SemanticsError::MoveNotEnabled {
                    edge: m.edge.clone(),
                    delay: crate::rational::format(&m.delay),
                    loc: at[Stage::Isr].loc.clone(),
                },
            });
        }
        for s in Stage::ALL {
            runs[s as usize].steps.push((moves[s].clone(), next[s].clone()));
        }
        at = next;
    }
    Ok(LiftedHistory(PerStage(runs)))
}
