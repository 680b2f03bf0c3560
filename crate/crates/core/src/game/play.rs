use crate::error::{Error, Result};
use crate::game::{
    legal_move, Annotation, GameBox, GameParams, GameWeights, Player, Reply, SessionInit, Strategy,
};
use crate::rational::Q;

/// One accepted box. `round` is the index `k` of `B_k` / `A_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub round: usize,
    pub player: Player,
    pub bx: GameBox,
    pub note: Option<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub weights: GameWeights,
    pub params: GameParams,
    pub moves: Vec<Move>,
}

impl Transcript {
    /// The last box played; after a full run this is Alice's final box.
    pub fn outcome(&self) -> &GameBox {
        &self
            .moves
            .last()
            .expect("a transcript holds at least the opening")
            .bx
    }

    pub fn alice_boxes(&self) -> impl Iterator<Item = &Move> {
        self.moves.iter().filter(|m| m.player == Player::Alice)
    }

    /// Re-checks the opening time, alternation, round numbering, the time law
    /// and nesting of every move.
    pub fn validate(&self) -> Result<()> {
        self.params.validate(&self.weights)?;
        let first = self
            .moves
            .first()
            .ok_or_else(|| Error::InvalidParams("empty transcript".into()))?;
        if first.player != Player::Init
            || first.round != 1
            || first.bx.t != self.params.t1
            || first.bx.dim() != self.weights.dim()
        {
            return Err(Error::IllegalMove {
                player: Player::Bob,
                round: 1,
            });
        }
        for (i, pair) in self.moves.windows(2).enumerate() {
            let (prev, next) = (&pair[0], &pair[1]);
            let (player, round, step) = if i % 2 == 0 {
                (Player::Alice, prev.round, &self.params.a)
            } else {
                (Player::Bob, prev.round + 1, &self.params.b)
            };
            if next.player != player
                || next.round != round
                || next.bx.shape != first.bx.shape
                || !legal_move(&prev.bx, &next.bx, step)
            {
                return Err(Error::IllegalMove { player, round });
            }
        }
        Ok(())
    }
}

/// Plays `rounds` full rounds. Bob opens with `B_1` at `t1`; then
/// `A_1, B_2, A_2, …, A_K`. Every move is checked with [`legal_move`] before
/// it is accepted.
pub fn play(
    alice: &mut dyn Strategy,
    bob: &mut dyn Strategy,
    w: &GameWeights,
    params: &GameParams,
    rounds: usize,
) -> Result<Transcript> {
    params.validate(w)?;
    let opening = bob
        .open(w, params)
        .map_err(|e| e.in_round(Player::Bob, 1))?;
    if opening.t != params.t1 || opening.dim() != w.dim() {
        return Err(Error::IllegalMove {
            player: Player::Bob,
            round: 1,
        });
    }
    let shape = opening.shape.clone();
    let mut moves = vec![Move {
        round: 1,
        player: Player::Init,
        bx: opening,
        note: None,
    }];
    if rounds == 0 {
        return Ok(Transcript {
            weights: w.clone(),
            params: params.clone(),
            moves,
        });
    }

    let first_bob = moves[0].bx.clone();
    let init = |role| SessionInit {
        weights: w,
        params,
        role,
        first_bob: &first_bob,
    };
    alice
        .begin(&init(Player::Alice))
        .map_err(|e| e.in_round(Player::Alice, 1))?;
    bob.begin(&init(Player::Bob))
        .map_err(|e| e.in_round(Player::Bob, 1))?;

    for k in 1..=rounds {
        let reply = {
            let bob_box = &moves.last().unwrap().bx;
            alice
                .respond(bob_box, &moves)
                .map_err(|e| e.in_round(Player::Alice, k))?
        };
        accept(&mut moves, reply, Player::Alice, k, &params.a, &shape)?;
        if k == rounds {
            break;
        }
        let reply = {
            let alice_box = &moves.last().unwrap().bx;
            bob.respond(alice_box, &moves)
                .map_err(|e| e.in_round(Player::Bob, k + 1))?
        };
        accept(&mut moves, reply, Player::Bob, k + 1, &params.b, &shape)?;
    }
    Ok(Transcript {
        weights: w.clone(),
        params: params.clone(),
        moves,
    })
}

fn accept(
    moves: &mut Vec<Move>,
    reply: Reply,
    player: Player,
    round: usize,
    step: &Q,
    shape: &[Q],
) -> Result<()> {
    let parent = &moves.last().unwrap().bx;
    if reply.bx.shape != shape || !legal_move(parent, &reply.bx, step) {
        return Err(Error::IllegalMove { player, round });
    }
    moves.push(Move {
        round,
        player,
        bx: reply.bx,
        note: reply.note,
    });
    Ok(())
}
