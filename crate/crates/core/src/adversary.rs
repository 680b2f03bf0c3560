//! Bob adversaries for exercising Alice. The seeker pushes toward nearby
//! simple rationals, the most direct pressure on the avoidance strategy.
//! Each kind also plays legally as Alice.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameBox, GameParams, GameWeights, Move, Player, Reply, SessionInit, Strategy};
use crate::geometry::AffineDiagonalMap;
use crate::rational::{ceil, floor, half, nearest, RationalVector, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BobKind {
    Center,
    SeededRandom,
    RationalSeeker,
}

impl BobKind {
    pub const ALL: [BobKind; 3] = [
        BobKind::Center,
        BobKind::SeededRandom,
        BobKind::RationalSeeker,
    ];
}

impl fmt::Display for BobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BobKind::Center => "center",
            BobKind::SeededRandom => "seeded-random",
            BobKind::RationalSeeker => "rational-seeker",
        })
    }
}

impl FromStr for BobKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(BobKind::Center),
            "seeded-random" => Ok(BobKind::SeededRandom),
            "rational-seeker" => Ok(BobKind::RationalSeeker),
            other => Err(Error::InvalidParams(format!(
                "unknown Bob adversary {other:?}"
            ))),
        }
    }
}

/// Bob's randomness for round `k`: a ChaCha stream keyed by `(seed, k)`, so
/// a round's choice does not depend on how many draws earlier rounds made.
pub fn round_rng(seed: u64, round: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct Adversary {
    kind: BobKind,
    seed: u64,
    f: Option<AffineDiagonalMap>,
    shape: Option<Vec<Q>>,
    session: Option<(GameWeights, Q, Player)>,
}

impl Adversary {
    pub fn new(kind: BobKind, seed: u64) -> Self {
        Adversary {
            kind,
            seed,
            f: None,
            shape: None,
            session: None,
        }
    }

    /// The seeker aims at images `f(p/q)` instead of `p/q`.
    pub fn with_map(mut self, f: AffineDiagonalMap) -> Self {
        self.f = Some(f);
        self
    }

    /// Opening boxes use the domain with these sidelengths.
    pub fn with_domain(mut self, shape: Vec<Q>) -> Self {
        self.shape = Some(shape);
        self
    }

    pub fn kind(&self) -> BobKind {
        self.kind
    }

    fn map(&self, n: usize) -> AffineDiagonalMap {
        self.f
            .clone()
            .unwrap_or_else(|| AffineDiagonalMap::identity(n))
    }

    /// A uniformly random cell of the perfect tiling of `outer` by boxes with
    /// sidelengths `sides`.
    fn random_cell(
        &self,
        round: usize,
        outer_lo: &[Q],
        outer_sides: &[Q],
        sides: &[Q],
    ) -> RationalVector {
        let mut rng = round_rng(self.seed, round);
        let center = outer_lo
            .iter()
            .zip(outer_sides)
            .zip(sides)
            .map(|((lo, outer), side)| {
                let cells = (outer / side).to_integer();
                let j = if cells <= BigInt::one() {
                    BigInt::zero()
                } else {
                    rng.gen_bigint_range(&BigInt::zero(), &cells)
                };
                lo + (Q::from_integer(j) + half()) * side
            })
            .collect();
        RationalVector::new(center)
    }

    /// Point the seeker heads for, near the box `bx`.
    fn seek(&self, bx: &GameBox) -> RationalVector {
        let f = self.map(bx.dim());
        let pre_center = f.apply_inverse(&bx.center);
        let pre_radius: Vec<Q> = bx
            .sides
            .iter()
            .zip(&f.diagonal)
            .map(|(s, d)| s * Q::new(3.into(), 2.into()) / d.abs())
            .collect();
        if bx.dim() == 1 {
            let x = simplest_between(
                &(&pre_center[0] - &pre_radius[0]),
                &(&pre_center[0] + &pre_radius[0]),
            );
            return f.apply(&[x]);
        }
        for q in 1..=SEEK_DENOMINATORS {
            let qq = Q::from_integer(BigInt::from(q));
            let p: Vec<Q> = pre_center
                .iter()
                .map(|x| Q::new(nearest(&(x * &qq)), BigInt::from(q)))
                .collect();
            if p.iter()
                .zip(pre_center.iter())
                .zip(&pre_radius)
                .all(|((p, c), r)| (p - c).abs() <= *r)
            {
                return f.apply(&p);
            }
        }
        let x0 = simplest_between(
            &(&pre_center[0] - &pre_radius[0]),
            &(&pre_center[0] + &pre_radius[0]),
        );
        let q = Q::from_integer(x0.denom().clone());
        let mut p: Vec<Q> = pre_center
            .iter()
            .map(|x| Q::new(nearest(&(x * &q)), x0.denom().clone()))
            .collect();
        p[0] = x0;
        f.apply(&p)
    }
}

const SEEK_DENOMINATORS: u64 = 2048;

fn clamp(x: &RationalVector, lo: &[Q], hi: &[Q]) -> RationalVector {
    RationalVector::new(
        x.iter()
            .zip(lo)
            .zip(hi)
            .map(|((x, l), h)| x.clone().max(l.clone()).min(h.clone()))
            .collect(),
    )
}

/// The rational with least denominator in `[lo, hi]` (least absolute
/// numerator among those).
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let c = ceil(lo);
    if Q::from_integer(c.clone()) <= *hi {
        return Q::from_integer(c);
    }
    // lo and hi share the integer part n; recurse on the reciprocals of the
    // fractional parts
    let n = floor(lo);
    let nq = Q::from_integer(n);
    let (a, b) = (lo - &nq, hi - &nq);
    &nq + simplest_between(&b.recip(), &a.recip()).recip()
}

impl Strategy for Adversary {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        self.session = Some((init.weights.clone(), init.step().clone(), init.role));
        Ok(())
    }

    fn respond(&mut self, opponent: &GameBox, history: &[Move]) -> Result<Reply> {
        let (w, step, role) = self.session.as_ref().expect("begin() precedes respond()");
        let last = history.last().map_or(1, |m| m.round);
        let round = if *role == Player::Bob { last + 1 } else { last };
        let allowed = opponent.allowed_centers(step, w)?;
        let center = match self.kind {
            BobKind::Center => opponent.center.clone(),
            BobKind::SeededRandom => {
                let child = opponent.centered_child(step, w)?;
                let lo = opponent.cuboid().lo;
                self.random_cell(round, &lo, &opponent.sides, &child.sides)
            }
            BobKind::RationalSeeker => clamp(&self.seek(opponent), &allowed.lo, &allowed.hi),
        };
        Ok(opponent.child_at(center, step, w)?.into())
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn open(&mut self, w: &GameWeights, params: &GameParams) -> Result<GameBox> {
        w.require_lattice(&params.t1)?;
        let shape = self
            .shape
            .clone()
            .unwrap_or_else(|| vec![Q::one(); w.dim()]);
        let unit = GameBox::exact(
            RationalVector::splat(half(), w.dim()),
            Q::zero(),
            w,
            shape.clone(),
        )?;
        let at_t1 = unit.with_center(unit.center.clone(), params.t1.clone(), w)?;
        let center = match self.kind {
            BobKind::Center => unit.center.clone(),
            BobKind::SeededRandom => {
                self.random_cell(1, &unit.cuboid().lo, &unit.sides, &at_t1.sides)
            }
            BobKind::RationalSeeker => self.map(w.dim()).apply(&unit.center),
        };
        at_t1.with_center(center, params.t1.clone(), w)
    }
}
