use num_traits::Zero;

use crate::error::Result;
use crate::game::{
    ComponentReport, GameBox, GameWeights, Move, Player, Reply, SessionInit, Strategy,
};
use crate::rational::Q;

struct Factor {
    coords: Vec<usize>,
    strategy: Box<dyn Strategy>,
    weights: Option<GameWeights>,
    history: Vec<Move>,
}

impl Factor {
    fn new(coords: Vec<usize>, strategy: Box<dyn Strategy>) -> Self {
        Factor {
            coords,
            strategy,
            weights: None,
            history: Vec::new(),
        }
    }

    fn fork(&self) -> Self {
        Factor {
            coords: self.coords.clone(),
            strategy: self.strategy.fork(),
            weights: self.weights.clone(),
            history: self.history.clone(),
        }
    }

    fn respond(&mut self, opponent: &GameBox, round: usize) -> Result<Reply> {
        let w = self.weights.as_ref().expect("begin() precedes respond()");
        let projected = opponent.project(&self.coords, w);
        let player = if self.history.is_empty() {
            Player::Init
        } else {
            Player::Bob
        };
        self.history.push(Move {
            round,
            player,
            bx: projected.clone(),
            note: None,
        });
        let reply = self.strategy.respond(&projected, &self.history)?;
        self.history.push(Move {
            round,
            player: Player::Alice,
            bx: reply.bx.clone(),
            note: reply.note.clone(),
        });
        Ok(reply)
    }
}

/// Plays separate games on the coordinates `coords` and on their complement
/// and answers with the product of the two factor replies.
pub struct ProductStrategy {
    n: usize,
    inside: Factor,
    outside: Factor,
}

/// `inside` plays on the coordinates `coords` (increasing), `outside` on the
/// remaining ones.
pub fn product_strategy(
    n: usize,
    coords: &[usize],
    inside: Box<dyn Strategy>,
    outside: Box<dyn Strategy>,
) -> ProductStrategy {
    assert!(coords.windows(2).all(|p| p[0] < p[1]) && coords.last().is_none_or(|&c| c < n));
    let rest: Vec<usize> = (0..n).filter(|i| !coords.contains(i)).collect();
    ProductStrategy {
        n,
        inside: Factor::new(coords.to_vec(), inside),
        outside: Factor::new(rest, outside),
    }
}

impl ProductStrategy {
    /// The factor transcripts as `(inside, outside)` move lists.
    pub fn factor_histories(&self) -> (&[Move], &[Move]) {
        (&self.inside.history, &self.outside.history)
    }
}

impl Strategy for ProductStrategy {
    fn name(&self) -> String {
        format!(
            "product[{} x {}]",
            self.inside.strategy.name(),
            self.outside.strategy.name()
        )
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        for factor in [&mut self.inside, &mut self.outside] {
            if factor.coords.is_empty() {
                continue;
            }
            let w = init.weights.restrict(&factor.coords);
            let first_bob = init.first_bob.project(&factor.coords, &w);
            let sub = SessionInit {
                weights: &w,
                params: init.params,
                role: init.role,
                first_bob: &first_bob,
            };
            factor.strategy.begin(&sub)?;
            factor.weights = Some(w);
        }
        Ok(())
    }

    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply> {
        let round = history.last().map_or(1, |m| m.round);
        if self.outside.coords.is_empty() {
            return self.inside.respond(opponent, round);
        }
        if self.inside.coords.is_empty() {
            return self.outside.respond(opponent, round);
        }
        let a = self.inside.respond(opponent, round)?;
        let b = self.outside.respond(opponent, round)?;
        let bx = GameBox::combine(&self.inside.coords, &a.bx, &b.bx)?;
        Ok(Reply {
            bx,
            note: a.note.or(b.note),
        })
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(ProductStrategy {
            n: self.n,
            inside: self.inside.fork(),
            outside: self.outside.fork(),
        })
    }

    fn components(&self) -> Vec<ComponentReport> {
        let n = self.n;
        [&self.inside, &self.outside]
            .into_iter()
            .flat_map(|factor| {
                factor.strategy.components().into_iter().map(move |mut c| {
                    let mut weights = vec![Q::zero(); n];
                    for (&i, v) in factor.coords.iter().zip(&c.verify_weights) {
                        weights[i] = v.clone();
                    }
                    c.verify_weights = weights;
                    c.f = c.f.embed(&factor.coords, n);
                    c
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play, CenteredDummy, GameParams};
    use crate::rational::{q, qi};

    #[test]
    fn dummy_product_is_dummy_and_projects_to_factors() {
        let w = GameWeights::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        let params = GameParams::new(qi(6), qi(6), qi(6), &w).unwrap();
        let mut composite = product_strategy(
            3,
            &[0, 2],
            Box::new(CenteredDummy::new()),
            Box::new(CenteredDummy::new()),
        );
        let t = play(&mut composite, &mut CenteredDummy::new(), &w, &params, 3).unwrap();
        let plain = play(
            &mut CenteredDummy::new(),
            &mut CenteredDummy::new(),
            &w,
            &params,
            3,
        )
        .unwrap();
        assert_eq!(t, plain);

        let (inside, outside) = composite.factor_histories();
        let w_in = w.restrict(&[0, 2]);
        for (m, f) in t.moves.iter().zip(inside) {
            assert_eq!(m.bx.project(&[0, 2], &w_in), f.bx);
        }
        assert_eq!(inside.len(), t.moves.len());
        assert_eq!(outside.len(), t.moves.len());
    }
}
