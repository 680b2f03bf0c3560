//! Enumeration of rational points `p/q` whose image under a diagonal affine
//! map comes close to a box, for every `q` in a range.
//!
//! For each retained coordinate the admissible numerators form an open
//! interval `(qα − γ, qβ + γ)` once the per-coordinate threshold is relaxed to
//! `c/q`. Scaling by a common denominator `M` turns both ends into
//! `floor((q·A + K)/M)`, which is tracked incrementally in `i128` as `q`
//! advances (falling back to big integers for huge denominators). Candidates
//! that survive are then tested exactly against `c/q^{u/v}`.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::geometry::{AffineDiagonalMap, Cuboid};
use crate::rational::{lcm_denominators, nearest, Q};

pub(crate) const Q_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Hit {
    pub p: Vec<BigInt>,
    pub q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Every hit in lowest terms.
    AllReduced,
    /// Stop at the first hit (least `q`, then lexicographically least `p`).
    First,
}

trait Int: Integer + Clone + AddAssign + SubAssign {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Int for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128().filter(|v| v.unsigned_abs() < 1u128 << 100)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `floor((q·a + k)/m)` for consecutive `q`.
#[derive(Clone)]
struct FloorSeq<T> {
    quot: T,
    rem: T,
    dq: T,
    dr: T,
    m: T,
}

impl<T: Int> FloorSeq<T> {
    fn new(q0: u64, a: &BigInt, k: &BigInt, m: &BigInt) -> Option<Self> {
        let (quot, rem) = (BigInt::from(q0) * a + k).div_mod_floor(m);
        let (dq, dr) = a.div_mod_floor(m);
        Some(FloorSeq {
            quot: T::from_big(&quot)?,
            rem: T::from_big(&rem)?,
            dq: T::from_big(&dq)?,
            dr: T::from_big(&dr)?,
            m: T::from_big(m)?,
        })
    }

    fn advance(&mut self) {
        self.quot += self.dq.clone();
        self.rem += self.dr.clone();
        if self.rem >= self.m {
            self.rem -= self.m.clone();
            self.quot += T::one();
        }
    }
}

/// One retained coordinate of the scan.
#[derive(Debug, Clone)]
struct Axis {
    idx: usize,
    lo: Q,
    hi: Q,
    d: Q,
    s: Q,
    u: u32,
    v: u32,
    c_pow: Q,
    /// `(A, B, G, M)` with `α = A/M`, `β = B/M`, `γ = G/M`.
    bounds: (BigInt, BigInt, BigInt, BigInt),
}

impl Axis {
    /// Exact test `dist(f(p/q), [lo, hi])^v · q^u < c^v`.
    fn close(&self, p: &BigInt, q: &BigInt) -> bool {
        let (d, s) = (&self.d, &self.s);
        let image = Q::new(
            d.numer() * p * s.denom() + s.numer() * q * d.denom(),
            q * d.denom() * s.denom(),
        );
        let dist = if image < self.lo {
            &self.lo - image
        } else if image > self.hi {
            image - &self.hi
        } else {
            return true;
        };
        let lhs = dist.pow(self.v as i32) * Q::from_integer(q.pow(self.u));
        lhs < self.c_pow
    }
}

/// The closeness test `|y_i − f(p/q)_i| < c/q^{e_i}` for `y` in a box, over
/// the coordinates with a weight (`e_i = None` drops a coordinate).
#[derive(Debug, Clone)]
pub(crate) struct Target {
    axes: Vec<Axis>,
    /// Preimage of the box center, used for the numerators of dropped axes.
    pre_center: Vec<Q>,
}

impl Target {
    pub fn new(cuboid: &Cuboid, f: &AffineDiagonalMap, exps: &[Option<Q>], c: &Q) -> Target {
        assert_eq!(cuboid.dim(), f.dim());
        assert_eq!(cuboid.dim(), exps.len());
        let mut axes = Vec::new();
        for (idx, e) in exps.iter().enumerate() {
            let Some(e) = e else { continue };
            assert!(e >= &Q::one(), "exponents below 1 break the c/q relaxation");
            let (lo, hi) = (cuboid.lo[idx].clone(), cuboid.hi[idx].clone());
            let (d, s) = (f.diagonal[idx].clone(), f.translation[idx].clone());
            let (mut alpha, mut beta) = ((&lo - &s) / &d, (&hi - &s) / &d);
            if d.is_negative() {
                std::mem::swap(&mut alpha, &mut beta);
            }
            let gamma = c / d.abs();
            let m = lcm_denominators([&alpha, &beta, &gamma]);
            let scale = |x: &Q| (x * Q::from_integer(m.clone())).to_integer();
            let bounds = (scale(&alpha), scale(&beta), scale(&gamma), m.clone());
            let u = e.numer().to_u32().expect("exponent numerator fits u32");
            let v = e.denom().to_u32().expect("exponent denominator fits u32");
            axes.push(Axis {
                idx,
                lo,
                hi,
                d,
                s,
                u,
                v,
                c_pow: c.pow(v as i32),
                bounds,
            });
        }
        let center: Vec<Q> = cuboid
            .lo
            .iter()
            .zip(&cuboid.hi)
            .map(|(l, h)| (l + h) / Q::from_integer(2.into()))
            .collect();
        Target {
            axes,
            pre_center: f.apply_inverse(&center).0,
        }
    }

    /// Hits with `q_lo ≤ q ≤ q_hi`.
    pub fn scan(&self, q_lo: u64, q_hi: u64, mode: Mode) -> Result<Vec<Hit>> {
        let q_lo = q_lo.max(1);
        if q_hi < q_lo || self.axes.is_empty() {
            return Ok(Vec::new());
        }
        if q_hi > Q_LIMIT {
            return Err(Error::Budget(format!(
                "denominator bound {q_hi} exceeds 2^62"
            )));
        }
        match self.scan_with::<i128>(q_lo, q_hi, mode) {
            Some(hits) => Ok(hits),
            None => Ok(self
                .scan_with::<BigInt>(q_lo, q_hi, mode)
                .expect("big integers never overflow")),
        }
    }

    fn scan_with<T: Int>(&self, q_lo: u64, q_hi: u64, mode: Mode) -> Option<Vec<Hit>> {
        let mut seqs = Vec::with_capacity(self.axes.len());
        for axis in &self.axes {
            let (a, b, g, m) = &axis.bounds;
            let low = FloorSeq::<T>::new(q_lo, a, &-g, m)?;
            let high = FloorSeq::<T>::new(q_lo, b, &(g - 1), m)?;
            seqs.push((low, high));
        }
        let mut hits = Vec::new();
        for q in q_lo..=q_hi {
            if seqs.iter().all(|(low, high)| low.quot < high.quot) {
                let ranges: Vec<(BigInt, BigInt)> = seqs
                    .iter()
                    .map(|(low, high)| (low.quot.to_big() + 1, high.quot.to_big()))
                    .collect();
                self.candidates(q, &ranges, mode, &mut hits);
                if mode == Mode::First && !hits.is_empty() {
                    return Some(hits);
                }
            }
            for (low, high) in &mut seqs {
                low.advance();
                high.advance();
            }
        }
        Some(hits)
    }

    fn candidates(&self, q: u64, ranges: &[(BigInt, BigInt)], mode: Mode, hits: &mut Vec<Hit>) {
        let qb = BigInt::from(q);
        // per-axis survivors, then their cartesian product
        let mut survivors: Vec<Vec<BigInt>> = Vec::with_capacity(ranges.len());
        for (axis, (from, to)) in self.axes.iter().zip(ranges) {
            let mut ok = Vec::new();
            let mut p = from.clone();
            while &p <= to {
                if axis.close(&p, &qb) {
                    ok.push(p.clone());
                }
                p += 1;
            }
            if ok.is_empty() {
                return;
            }
            survivors.push(ok);
        }
        let mut pick = vec![0usize; survivors.len()];
        loop {
            let mut p: Vec<BigInt> = self
                .pre_center
                .iter()
                .map(|x| nearest(&(x * Q::from_integer(qb.clone()))))
                .collect();
            for (axis, (list, &j)) in self.axes.iter().zip(survivors.iter().zip(&pick)) {
                p[axis.idx] = list[j].clone();
            }
            let keep = match mode {
                Mode::First => true,
                Mode::AllReduced => self
                    .axes
                    .iter()
                    .fold(qb.clone(), |g, axis| g.gcd(&p[axis.idx]))
                    .is_one(),
            };
            if keep {
                hits.push(Hit { p, q });
                if mode == Mode::First {
                    return;
                }
            }
            // odometer over the survivor lists
            let mut i = pick.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < survivors[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
}
