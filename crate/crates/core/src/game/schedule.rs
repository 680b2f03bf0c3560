use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::game::{
    Annotation, ComponentReport, GameBox, GameParams, GameWeights, Move, Player, Reply,
    SessionInit, Strategy, Transcript,
};
use crate::rational::Q;

/// The component (1-based) that plays round `k` when `m` strategies are
/// interleaved: the `i` with `k ≡ 2^{i−1} (mod 2^i)`, or `None` for the
/// unassigned rounds `k ≡ 0 (mod 2^m)`.
pub fn assigned_component(k: usize, m: usize) -> Option<usize> {
    assert!(k >= 1, "rounds are 1-based");
    let i = k.trailing_zeros() as usize + 1;
    (i <= m).then_some(i)
}

/// The game a single component sees: its own Bob boxes (the real Bob boxes of
/// the rounds it is assigned) and its own replies.
#[derive(Debug, Clone)]
pub struct SubView {
    pub component: usize,
    pub params: Option<GameParams>,
    pub moves: Vec<Move>,
}

impl SubView {
    /// The virtual transcript, once the component has moved at least once.
    pub fn transcript(&self, w: &GameWeights) -> Option<Transcript> {
        Some(Transcript {
            weights: w.clone(),
            params: self.params.clone()?,
            moves: self.moves.clone(),
        })
    }

    pub fn last_box(&self) -> Option<&GameBox> {
        self.moves.last().map(|m| &m.bx)
    }
}

struct Slot {
    strategy: Box<dyn Strategy>,
    view: SubView,
}

/// Several Alice strategies sharing one game: round `k` belongs to component
/// [`assigned_component`]`(k, m)`; unassigned rounds are centered moves.
pub struct Interleaved {
    slots: Vec<Slot>,
    session: Option<(GameWeights, GameParams)>,
}

pub fn interleave_strategies(strategies: Vec<Box<dyn Strategy>>) -> Interleaved {
    let slots = strategies
        .into_iter()
        .enumerate()
        .map(|(i, strategy)| Slot {
            strategy,
            view: SubView {
                component: i + 1,
                params: None,
                moves: Vec::new(),
            },
        })
        .collect();
    Interleaved {
        slots,
        session: None,
    }
}

impl Interleaved {
    pub fn views(&self) -> impl Iterator<Item = &SubView> {
        self.slots.iter().map(|s| &s.view)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Virtual Bob step of component `i`: the time from its reply in round `k`
    /// to the real Bob box of round `k + 2^i`.
    pub fn virtual_bob_step(params: &GameParams, i: usize) -> Q {
        let period = Q::from_integer(BigInt::from(1u64) << i);
        period * (&params.a + &params.b) - &params.a
    }
}

impl Strategy for Interleaved {
    fn name(&self) -> String {
        let names: Vec<String> = self.slots.iter().map(|s| s.strategy.name()).collect();
        format!("interleave[{}]", names.join(", "))
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        self.session = Some((init.weights.clone(), init.params.clone()));
        Ok(())
    }

    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply> {
        let (w, params) = self.session.as_ref().expect("begin() precedes respond()");
        let k = history.last().map_or(1, |m| m.round);
        let Some(i) = assigned_component(k, self.slots.len()) else {
            return Ok(opponent.centered_child(&params.a, w)?.into());
        };
        let tag = |e: Error| Error::Component {
            component: i,
            round: k,
            source: Box::new(e),
        };
        let slot = &mut self.slots[i - 1];
        let player = if slot.view.params.is_none() {
            let b = Self::virtual_bob_step(params, i);
            let vparams = GameParams {
                a: params.a.clone(),
                b,
                t1: opponent.t.clone(),
                a_star: params.a_star.clone(),
            };
            let init = SessionInit {
                weights: w,
                params: &vparams,
                role: Player::Alice,
                first_bob: opponent,
            };
            slot.strategy.begin(&init).map_err(tag)?;
            slot.view.params = Some(vparams);
            Player::Init
        } else {
            Player::Bob
        };
        let round = slot.view.moves.len() / 2 + 1;
        slot.view.moves.push(Move {
            round,
            player,
            bx: opponent.clone(),
            note: None,
        });
        let reply = slot
            .strategy
            .respond(opponent, &slot.view.moves)
            .map_err(tag)?;
        slot.view.moves.push(Move {
            round,
            player: Player::Alice,
            bx: reply.bx.clone(),
            note: reply.note.clone(),
        });
        let note = Annotation {
            component: Some(i),
            ..reply.note.unwrap_or_default()
        };
        Ok(Reply {
            bx: reply.bx,
            note: Some(note),
        })
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(Interleaved {
            slots: self
                .slots
                .iter()
                .map(|s| Slot {
                    strategy: s.strategy.fork(),
                    view: s.view.clone(),
                })
                .collect(),
            session: self.session.clone(),
        })
    }

    fn components(&self) -> Vec<ComponentReport> {
        self.slots
            .iter()
            .flat_map(|s| {
                let i = s.view.component;
                s.strategy.components().into_iter().map(move |mut c| {
                    c.label = format!("{i}:{}", c.label);
                    c
                })
            })
            .collect()
    }
}
