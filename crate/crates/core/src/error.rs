use thiserror::Error;

use crate::game::Player;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("time {t} is not on the lattice (multiple of {lattice})")]
    OffLattice { t: String, lattice: u64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("illegal move by {player} in round {round}")]
    IllegalMove { player: Player, round: usize },

    #[error("{player} failed in round {round}: {source}")]
    Strategy {
        player: Player,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("component {component} failed at round {round}: {source}")]
    Component {
        component: usize,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("strategy tree path {path}: {source}")]
    TreePath {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error("dangerous rationals span the whole space (simplex lemma violated)")]
    FullDimensional,

    #[error("certificate failure in round {round}: {detail}")]
    CertificateFailure { round: usize, detail: String },

    #[error("shifted Bob step {remaining} does not exceed a_star")]
    StepExhausted { remaining: String },

    #[error("Alice step {a} must be a lattice time exceeding {bound}")]
    BadAliceStep { a: String, bound: String },

    #[error("initial time {t1} is below the required t0 = {t0}")]
    BadInitialTime { t1: String, t0: String },

    #[error("diagonal entry {0} is not a dyadic rational")]
    NonDyadic(String),

    #[error("no common time lattice within budget: {0}")]
    LatticeClash(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn in_round(self, player: Player, round: usize) -> Error {
        match self {
            e @ (Error::IllegalMove { .. } | Error::Strategy { .. }) => e,
            other => Error::Strategy {
                player,
                round,
                source: Box::new(other),
            },
        }
    }

    /// Innermost cause, skipping round/component wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Strategy { source, .. }
            | Error::Component { source, .. }
            | Error::TreePath { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
