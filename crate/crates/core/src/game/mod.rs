//! The modified Schmidt game for the weighted contraction family on ℝⁿ:
//! boxes, legality, the match loop and the strategy combinators.

mod boxes;
mod play;
mod product;
mod schedule;
mod strategy;
mod transport;
mod weights;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Q};

pub use boxes::{box_of, legal_move, unit_cube, GameBox};
pub use play::{play, Move, Transcript};
pub use product::{product_strategy, ProductStrategy};
pub use schedule::{assigned_component, interleave_strategies, Interleaved, SubView};
pub use strategy::{Annotation, CenteredDummy, ComponentReport, Reply, SessionInit, Strategy};
pub use transport::{
    affine_shift, classic_adapter, domain_shift, transport_affine, transport_domain,
    AffineTransport, DomainTransport,
};
pub use weights::GameWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Init,
    Alice,
    Bob,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Init => "init",
            Player::Alice => "alice",
            Player::Bob => "bob",
        })
    }
}

/// Step sizes and start time of an `(a, b)`-game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameParams {
    pub a: Q,
    pub b: Q,
    pub t1: Q,
    pub a_star: Q,
}

impl GameParams {
    /// Validates `a, b > a_star = 0` and that `a, b, t1` are lattice times.
    pub fn new(a: Q, b: Q, t1: Q, w: &GameWeights) -> Result<Self> {
        let params = GameParams {
            a,
            b,
            t1,
            a_star: Q::from_integer(0.into()),
        };
        params.validate(w)?;
        Ok(params)
    }

    pub fn validate(&self, w: &GameWeights) -> Result<()> {
        for (name, x) in [("a", &self.a), ("b", &self.b)] {
            if x <= &self.a_star {
                return Err(Error::InvalidParams(format!(
                    "{name} = {} must exceed a_star = {}",
                    format_rational(x),
                    format_rational(&self.a_star)
                )));
            }
        }
        w.require_lattice(&self.a)?;
        w.require_lattice(&self.b)?;
        w.require_lattice(&self.t1)
    }

    /// Time of Bob's `k`-th box (1-based).
    pub fn bob_time(&self, k: usize) -> Q {
        &self.t1 + Q::from_integer((k as i64 - 1).into()) * (&self.a + &self.b)
    }

    /// Time of Alice's `k`-th box (1-based).
    pub fn alice_time(&self, k: usize) -> Q {
        self.bob_time(k) + &self.a
    }
}
