use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{GameBox, GameParams, GameWeights, Move, Player};
use crate::geometry::{AffineDiagonalMap, HyperplaneExact};
use crate::rational::{half, serde_q, RationalVector, Q};

/// What a strategy learns when its session starts.
#[derive(Debug, Clone)]
pub struct SessionInit<'a> {
    pub weights: &'a GameWeights,
    pub params: &'a GameParams,
    pub role: Player,
    /// Bob's opening box `B_1`.
    pub first_bob: &'a GameBox,
}

impl SessionInit<'_> {
    /// The time step this player makes on each move.
    pub fn step(&self) -> &Q {
        match self.role {
            Player::Bob => &self.params.b,
            _ => &self.params.a,
        }
    }
}

/// Per-round metadata attached to a move (round certificates of the
/// badly-approximable strategy).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub danger_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<HyperplaneExact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_lo: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
}

impl Annotation {
    pub fn is_empty(&self) -> bool {
        self == &Annotation::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub bx: GameBox,
    pub note: Option<Annotation>,
}

impl From<GameBox> for Reply {
    fn from(bx: GameBox) -> Self {
        Reply { bx, note: None }
    }
}

/// What a target-set strategy claims about the outcome so far: the final box
/// should satisfy the badness inequality with constant `c_prime` for every
/// `q ≤ q_max`, coordinates weighted by `verify_weights` (zero = ignored),
/// measured through the map `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub label: String,
    #[serde(with = "serde_q::vec")]
    pub verify_weights: Vec<Q>,
    #[serde(with = "serde_q")]
    pub kappa: Q,
    #[serde(with = "serde_q::opt")]
    pub c_prime: Option<Q>,
    pub q_max: u64,
    pub f: AffineDiagonalMap,
    pub rounds: usize,
    pub certificates_ok: bool,
}

/// A player's strategy. Sessions are stateful: `begin` is called once after
/// Bob's opening, then `respond` once per move.
pub trait Strategy: Send {
    fn name(&self) -> String;

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()>;

    /// Reply to the opponent's latest box. `history` holds every move so far,
    /// including `opponent` as its last entry.
    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply>;

    /// An independent copy of the current session state.
    fn fork(&self) -> Box<dyn Strategy>;

    /// Bob's opening box; Alice strategies never get asked.
    fn open(&mut self, weights: &GameWeights, params: &GameParams) -> Result<GameBox> {
        crate::game::box_of(
            RationalVector::splat(half(), weights.dim()),
            &params.t1,
            weights,
        )
    }

    fn components(&self) -> Vec<ComponentReport> {
        Vec::new()
    }
}

/// Always replies with the concentric box one step later.
#[derive(Debug, Clone, Default)]
pub struct CenteredDummy {
    session: Option<(GameWeights, Q)>,
}

impl CenteredDummy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Strategy for CenteredDummy {
    fn name(&self) -> String {
        "centered".into()
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        self.session = Some((init.weights.clone(), init.step().clone()));
        Ok(())
    }

    fn respond(&mut self, opponent: &GameBox, _history: &[Move]) -> Result<Reply> {
        let (w, step) = self.session.as_ref().expect("begin() precedes respond()");
        Ok(opponent.centered_child(step, w)?.into())
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}
