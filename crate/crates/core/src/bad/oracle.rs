use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bad::scan::{Mode, Target};
use crate::error::Result;
use crate::game::GameWeights;
use crate::geometry::{AffineDiagonalMap, Cuboid};
use crate::rational::{nearest, pow2, to_f64, RationalVector, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The least-`q` rational point that comes too close.
    Violation {
        p: Vec<BigInt>,
        q: u64,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Exponents `1 + w_i` of the retained (positive-weight) coordinates.
pub(crate) fn verify_exponents(w_verify: &[Q]) -> Vec<Option<Q>> {
    w_verify
        .iter()
        .map(|w| w.is_positive().then(|| Q::one() + w))
        .collect()
}

/// Checks that every `y` in `cuboid` satisfies
/// `max_i |y_i − f(p/q)_i|·q^{1+w_i} ≥ c` for all `p` and all `1 ≤ q ≤ q_max`,
/// the maximum taken over coordinates with `w_i > 0`.
///
/// The set of `y` violating a given `p/q` is a product of intervals, so the
/// box passes exactly when no `p/q` has every retained coordinate closer than
/// its threshold to the box.
pub fn verify_box(
    cuboid: &Cuboid,
    c: &Q,
    q_max: u64,
    f: &AffineDiagonalMap,
    w_verify: &[Q],
) -> Result<Verdict> {
    let target = Target::new(cuboid, f, &verify_exponents(w_verify), c);
    let hits = target.scan(1, q_max, Mode::First)?;
    Ok(match hits.into_iter().next() {
        Some(hit) => Verdict::Violation { p: hit.p, q: hit.q },
        None => Verdict::Holds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BadnessScore {
    /// `min_{q ≤ Qmax} q·max_i |q x_i − p_i|^{1/w_i}` in floating point.
    pub estimate: f64,
    /// A dyadic `c` for which [`verify_box`] passes on the point `x`.
    pub certified: Q,
}

const BISECTION_STEPS: usize = 40;

pub fn badness_score(x: &RationalVector, q_max: u64, w_verify: &[Q]) -> Result<BadnessScore> {
    assert!(q_max >= 1);
    let retained: Vec<(usize, f64)> = w_verify
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive())
        .map(|(i, w)| (i, to_f64(w)))
        .collect();
    let fracs: Vec<FracDistance> = retained
        .iter()
        .map(|&(i, _)| FracDistance::new(&x[i]))
        .collect();
    let mut estimate = f64::INFINITY;
    for q in 1..=q_max {
        let worst = retained
            .iter()
            .zip(&fracs)
            .map(|(&(_, w), frac)| frac.at(q).powf(1.0 / w))
            .fold(0.0, f64::max);
        estimate = estimate.min(q as f64 * worst);
    }

    let point = Cuboid::point(x);
    let f = AffineDiagonalMap::identity(x.dim());
    let (mut lo, mut hi) = (Q::zero(), Q::one());
    if verify_box(&point, &hi, q_max, &f, w_verify)?.holds() {
        lo = hi.clone();
    } else {
        for step in 1..=BISECTION_STEPS {
            let mid = &lo + pow2(-(step as i64));
            if verify_box(&point, &mid, q_max, &f, w_verify)?.holds() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    debug_assert!(lo < hi || lo.is_one());
    Ok(BadnessScore {
        estimate,
        certified: lo,
    })
}

/// Distance from `q·x` to the nearest integer, exact in `i128` when `x` has
/// small numerator and denominator.
enum FracDistance {
    Small { n: i128, d: i128 },
    Float(f64),
}

impl FracDistance {
    fn new(x: &Q) -> Self {
        match (x.numer().to_i64(), x.denom().to_i64()) {
            (Some(n), Some(d)) if n.unsigned_abs() < 1 << 60 && d < 1 << 60 => {
                FracDistance::Small {
                    n: n as i128,
                    d: d as i128,
                }
            }
            _ => FracDistance::Float(to_f64(x)),
        }
    }

    fn at(&self, q: u64) -> f64 {
        match *self {
            FracDistance::Small { n, d } => {
                let r = (q as i128 * n).rem_euclid(d);
                r.min(d - r) as f64 / d as f64
            }
            FracDistance::Float(x) => {
                let y = q as f64 * x;
                (y - y.round()).abs()
            }
        }
    }
}

/// Least `q ∈ [q_min, n)` for which the nearest `p` satisfies
/// `max_i |q x_i − p_i|^{1/r_i} < 1/q`, tested exactly as
/// `|q x_i − p_i|^{v_i} q^{u_i} < 1` with `r_i = u_i/v_i`.
pub fn dirichlet_witness(
    x: &RationalVector,
    w: &GameWeights,
    q_min: u64,
    n: u64,
) -> Option<(u64, Vec<BigInt>)> {
    assert!(q_min >= 1 && n > q_min);
    let exps: Vec<(u32, i32)> = w
        .r()
        .iter()
        .map(|r| (r.numer().to_u32().unwrap(), r.denom().to_i32().unwrap()))
        .collect();
    (q_min..n).find_map(|q| {
        let qb = BigInt::from(q);
        let mut p = Vec::with_capacity(x.dim());
        for (xi, &(u, v)) in x.iter().zip(&exps) {
            let y = xi * Q::from_integer(qb.clone());
            let pi = nearest(&y);
            let delta = (y - Q::from_integer(pi.clone())).abs();
            if delta.pow(v) * Q::from_integer(qb.pow(u)) >= Q::one() {
                return None;
            }
            p.push(pi);
        }
        Some((q, p))
    })
}
