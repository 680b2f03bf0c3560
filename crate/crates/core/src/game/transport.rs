use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{
    ComponentReport, GameBox, GameParams, GameWeights, Move, Player, Reply, SessionInit, Strategy,
};
use crate::geometry::AffineDiagonalMap;
use crate::rational::{cmp_pow2, format_rational, Q};

/// Least lattice time `s ≥ 0` with `2^{-(1+r_i)s} ≤ bound_i` for every `i`.
fn least_shift(w: &GameWeights, bounds: &[Q]) -> Result<Q> {
    let lattice = w.lattice_q();
    let mut s = Q::zero();
    for _ in 0..4096 {
        let ok = bounds
            .iter()
            .enumerate()
            .all(|(i, bound)| cmp_pow2(&-(w.exponent(i) * &s), bound).is_le());
        if ok {
            return Ok(s);
        }
        s += &lattice;
    }
    Err(Error::Budget(
        "no lattice shift found below 4096 lattice steps".into(),
    ))
}

fn shifted_params(params: &GameParams, s: &Q) -> Result<GameParams> {
    let two_s = Q::from_integer(BigInt::from(2)) * s;
    let b = &params.b - &two_s;
    if b <= params.a_star {
        return Err(Error::StepExhausted {
            remaining: format_rational(&b),
        });
    }
    Ok(GameParams {
        a: &params.a + &two_s,
        b,
        t1: params.t1.clone(),
        a_star: params.a_star.clone(),
    })
}

/// Shift sandwiching boxes of domain shape `shape` between unit-cube boxes:
/// `ψ(x, t+s) ⊆ ψ′(x, t)` and `ψ′(x, t+s) ⊆ ψ(x, t)`.
pub fn domain_shift(w: &GameWeights, shape: &[Q]) -> Result<Q> {
    let bounds: Vec<Q> = shape
        .iter()
        .map(|sigma| sigma.clone().min(sigma.recip()))
        .collect();
    least_shift(w, &bounds)
}

/// Shift making `f` and `f⁻¹` map time-`(t+s)` boxes into time-`t` boxes.
pub fn affine_shift(w: &GameWeights, f: &AffineDiagonalMap) -> Result<Q> {
    let bounds: Vec<Q> = f
        .diagonal
        .iter()
        .map(|d| d.abs().min(d.abs().recip()))
        .collect();
    least_shift(w, &bounds)
}

struct Inner {
    strategy: Box<dyn Strategy>,
    history: Vec<Move>,
    weights: Option<GameWeights>,
    step: Q,
}

impl Inner {
    fn begin(&mut self, init: &SessionInit<'_>, shift: &Q, first_bob: GameBox) -> Result<()> {
        let params = GameParams {
            a: &init.params.a - Q::from_integer(2.into()) * shift,
            b: &init.params.b + Q::from_integer(2.into()) * shift,
            t1: &init.params.t1 + shift,
            a_star: init.params.a_star.clone(),
        };
        let sub = SessionInit {
            weights: init.weights,
            params: &params,
            role: init.role,
            first_bob: &first_bob,
        };
        self.strategy.begin(&sub)?;
        self.weights = Some(init.weights.clone());
        self.step = init.params.a.clone();
        Ok(())
    }

    fn respond(&mut self, bob: GameBox, round: usize) -> Result<Reply> {
        let player = if self.history.is_empty() {
            Player::Init
        } else {
            Player::Bob
        };
        self.history.push(Move {
            round,
            player,
            bx: bob.clone(),
            note: None,
        });
        let reply = self.strategy.respond(&bob, &self.history)?;
        self.history.push(Move {
            round,
            player: Player::Alice,
            bx: reply.bx.clone(),
            note: reply.note.clone(),
        });
        Ok(reply)
    }

    fn fork(&self) -> Inner {
        Inner {
            strategy: self.strategy.fork(),
            history: self.history.clone(),
            weights: self.weights.clone(),
            step: self.step.clone(),
        }
    }
}

/// A unit-cube strategy replayed in the game whose domain has sidelengths
/// `shape`, with parameters `(a + 2s, b − 2s)`.
pub struct DomainTransport {
    inner: Inner,
    shape: Vec<Q>,
    shift: Q,
}

/// Wraps `s` (an `(a, b)` strategy for the unit-cube domain) for the domain
/// `shape`; returns the wrapper and the parameters of the new game.
pub fn transport_domain(
    s: Box<dyn Strategy>,
    shape: Vec<Q>,
    w: &GameWeights,
    params: &GameParams,
) -> Result<(DomainTransport, GameParams)> {
    let shift = domain_shift(w, &shape)?;
    let outer = shifted_params(params, &shift)?;
    let inner = Inner {
        strategy: s,
        history: Vec::new(),
        weights: None,
        step: Q::zero(),
    };
    Ok((
        DomainTransport {
            inner,
            shape,
            shift,
        },
        outer,
    ))
}

impl DomainTransport {
    pub fn shift(&self) -> &Q {
        &self.shift
    }

    fn unit_box(&self, outer: &GameBox) -> Result<GameBox> {
        let w = self.inner.weights.as_ref().unwrap();
        GameBox::exact(
            outer.center.clone(),
            &outer.t + &self.shift,
            w,
            vec![Q::one(); w.dim()],
        )
    }
}

impl Strategy for DomainTransport {
    fn name(&self) -> String {
        format!("domain[{}]", self.inner.strategy.name())
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        self.inner.weights = Some(init.weights.clone());
        let first = self.unit_box(init.first_bob)?;
        self.inner.begin(init, &self.shift, first)
    }

    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply> {
        let round = history.last().map_or(1, |m| m.round);
        let reply = self.inner.respond(self.unit_box(opponent)?, round)?;
        let w = self.inner.weights.as_ref().unwrap();
        let bx = GameBox::exact(
            reply.bx.center,
            &opponent.t + &self.inner.step,
            w,
            self.shape.clone(),
        )?;
        Ok(Reply {
            bx,
            note: reply.note,
        })
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(DomainTransport {
            inner: self.inner.fork(),
            shape: self.shape.clone(),
            shift: self.shift.clone(),
        })
    }

    fn components(&self) -> Vec<ComponentReport> {
        self.inner.strategy.components()
    }
}

/// A strategy for `S` replayed as a strategy for `f(S)`: Bob's boxes are
/// pulled back through `f`, answered, and pushed forward.
pub struct AffineTransport {
    inner: Inner,
    f: AffineDiagonalMap,
    shift: Q,
}

/// Wraps `s` for the image under the diagonal map `f` (dyadic diagonal);
/// returns the wrapper and the parameters of the new game.
pub fn transport_affine(
    s: Box<dyn Strategy>,
    f: AffineDiagonalMap,
    w: &GameWeights,
    params: &GameParams,
) -> Result<(AffineTransport, GameParams)> {
    f.require_dyadic()?;
    if f.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: f.dim(),
        });
    }
    let shift = affine_shift(w, &f)?;
    let outer = shifted_params(params, &shift)?;
    let inner = Inner {
        strategy: s,
        history: Vec::new(),
        weights: None,
        step: Q::zero(),
    };
    Ok((AffineTransport { inner, f, shift }, outer))
}

impl AffineTransport {
    pub fn shift(&self) -> &Q {
        &self.shift
    }

    pub fn pull_back(&self, outer: &GameBox) -> Result<GameBox> {
        let w = self.inner.weights.as_ref().unwrap();
        GameBox::exact(
            self.f.apply_inverse(&outer.center),
            &outer.t + &self.shift,
            w,
            outer.shape.clone(),
        )
    }

    pub fn push_forward(&self, inner: &GameBox, t: Q) -> Result<GameBox> {
        let w = self.inner.weights.as_ref().unwrap();
        GameBox::exact(self.f.apply(&inner.center), t, w, inner.shape.clone())
    }
}

impl Strategy for AffineTransport {
    fn name(&self) -> String {
        format!("affine[{}]", self.inner.strategy.name())
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        self.inner.weights = Some(init.weights.clone());
        let first = self.pull_back(init.first_bob)?;
        self.inner.begin(init, &self.shift, first)
    }

    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply> {
        let round = history.last().map_or(1, |m| m.round);
        let reply = self.inner.respond(self.pull_back(opponent)?, round)?;
        let bx = self.push_forward(&reply.bx, &opponent.t + &self.inner.step)?;
        Ok(Reply {
            bx,
            note: reply.note,
        })
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(AffineTransport {
            inner: self.inner.fork(),
            f: self.f.clone(),
            shift: self.shift.clone(),
        })
    }

    fn components(&self) -> Vec<ComponentReport> {
        self.inner
            .strategy
            .components()
            .into_iter()
            .map(|mut c| {
                let stretch = self
                    .f
                    .diagonal
                    .iter()
                    .zip(&c.verify_weights)
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(d, _)| d.abs())
                    .min()
                    .unwrap_or_else(Q::one);
                c.c_prime = c.c_prime.map(|c| c * stretch);
                c.f = self.f.compose(&c.f);
                c.label = format!("affine:{}", c.label);
                c
            })
            .collect()
    }
}

/// Parameters of the classic `(α, β)`-game in `ℝⁿ`: the scalar flow `2^{-t}`
/// on a domain of sidelength 2, so that the box at time `t` is the sup-norm
/// ball of radius `2^{-t}` and each move shrinks radii by `α` resp. `β`.
/// Only powers of two have exact times.
pub fn classic_adapter(alpha: &Q, beta: &Q, n: usize) -> Result<(GameWeights, GameParams)> {
    let w = GameWeights::scalar(n);
    let step = |x: &Q| -> Result<Q> {
        let off = || Error::OffLattice {
            t: format!("-log2({})", format_rational(x)),
            lattice: 1,
        };
        if !x.is_positive() || x >= &Q::one() || !x.numer().is_one() {
            return Err(off());
        }
        let d = x.denom();
        if d.magnitude().count_ones() != 1 {
            return Err(off());
        }
        Ok(Q::from_integer(BigInt::from(d.bits() - 1)))
    };
    let params = GameParams::new(step(alpha)?, step(beta)?, Q::one(), &w)?;
    Ok((w, params))
}
