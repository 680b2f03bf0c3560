use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bad::scan::Q_LIMIT;
use crate::error::{Error, Result};
use crate::game::GameWeights;
use crate::geometry::AffineDiagonalMap;
use crate::rational::{cmp_pow2, floor_pow2, format_rational, half, pow2_q, Q};

/// Constants of the avoidance strategy for the flow with weights `w` and the
/// target `f(Bad)`.
///
/// When `w` sums to `Σ < 1` (a factor of a larger game) the strategy aims at
/// the weights `s` with `1 + s_i = κ(1 + r_i)`, `κ = (m+1)/(m+Σ)`, in the
/// virtual time `t/κ`. All constants are stated in real time, where every
/// exponent `(1+r_i)t` of a lattice time stays an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyParams {
    pub w: GameWeights,
    pub f: AffineDiagonalMap,
    pub j: Q,
    pub a: Q,
    pub b: Q,
    pub t1: Q,
    pub t0: Q,
    pub c_prime: Q,
    pub kappa: Q,
    pub margin: Q,
}

pub fn reparam_kappa(w: &GameWeights) -> Q {
    let m = Q::from_integer(BigInt::from(w.dim()));
    (&m + Q::one()) / (m + w.sum())
}

/// Target weights `s_i = κ(1 + r_i) − 1`.
pub fn target_weights(w: &GameWeights) -> Vec<Q> {
    let kappa = reparam_kappa(w);
    w.exponents()
        .iter()
        .map(|e| &kappa * e - Q::one())
        .collect()
}

/// Fails unless `a` is a lattice time with `a(1 + r_i) > 1` for every `i`.
pub fn check_alice_step(w: &GameWeights, a: &Q) -> Result<()> {
    let bound = w.exponents().iter().map(Q::recip).max().unwrap();
    if !w.on_lattice(a) || a <= &bound || a.is_zero() {
        return Err(Error::BadAliceStep {
            a: format_rational(a),
            bound: format_rational(&bound),
        });
    }
    Ok(())
}

fn factorial(m: usize) -> BigInt {
    (1..=m).map(BigInt::from).product()
}

/// `2^{m − t(m+Σr)} < J/m! · 2^{-g(m+Σr)}`: the doubled box around a box at
/// time `t` is small enough for the simplex lemma with `N = 2^{g/κ}`
/// (virtual units), `g` the real-time exponent of the denominator bound.
pub fn small_volume(w: &GameWeights, j: &Q, t: &Q, g: &Q) -> bool {
    let m = w.dim();
    let vol = w.volume_exponent();
    let exp = Q::from_integer(BigInt::from(m)) - t * &vol + g * &vol;
    let rhs = j / Q::from_integer(factorial(m));
    cmp_pow2(&exp, &rhs).is_lt()
}

/// Least positive lattice time `t0` with `2^{-t0(m+Σr)} < J/(2^m m!)`.
pub fn least_t0(w: &GameWeights, j: &Q) -> Q {
    let lattice = w.lattice_q();
    let mut t = lattice.clone();
    while !small_volume(w, j, &t, &Q::zero()) {
        t += &lattice;
    }
    t
}

/// Derives `t0` and `c′` for Bob's step `b` and opening time `t1`.
///
/// `c′` is `margin` times the least over `i` of
/// `(1/2 − 2^{-a(1+r_i)})·2^{-t1(1+r_i)}·2^{-(a+b)(1+r_i)}`, evaluated at the
/// actual opening time `t1 ≥ t0`.
pub fn derive_params(
    w: &GameWeights,
    f: &AffineDiagonalMap,
    a: &Q,
    b: &Q,
    t1: &Q,
    margin: &Q,
) -> Result<StrategyParams> {
    check_alice_step(w, a)?;
    w.require_lattice(b)?;
    w.require_lattice(t1)?;
    if f.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: f.dim(),
        });
    }
    if !margin.is_positive() || margin >= &Q::one() {
        return Err(Error::InvalidParams(format!(
            "margin {} not in (0, 1)",
            format_rational(margin)
        )));
    }
    let j = f.jacobian.clone();
    let t0 = least_t0(w, &j);
    if t1 < &t0 {
        return Err(Error::BadInitialTime {
            t1: format_rational(t1),
            t0: format_rational(&t0),
        });
    }
    let exact = |e: Q| pow2_q(&e).expect("lattice exponents are integers");
    let c_prime = w
        .exponents()
        .into_iter()
        .map(|e| (half() - exact(-(a * &e))) * exact(-(t1 * &e)) * exact(-((a + b) * &e)))
        .min()
        .unwrap()
        * margin;
    Ok(StrategyParams {
        w: w.clone(),
        f: f.clone(),
        j,
        a: a.clone(),
        b: b.clone(),
        t1: t1.clone(),
        t0,
        c_prime,
        kappa: reparam_kappa(w),
        margin: margin.clone(),
    })
}

impl StrategyParams {
    /// Target exponents `κ(1 + r_i) = 1 + s_i`.
    pub fn exponents(&self) -> Vec<Q> {
        self.w
            .exponents()
            .into_iter()
            .map(|e| &self.kappa * e)
            .collect()
    }

    pub fn target_weights(&self) -> Vec<Q> {
        target_weights(&self.w)
    }

    /// Real-time exponent `(k−1)(a+b)` of the denominator bound after round `k`.
    pub fn frontier_exponent(&self, k: usize) -> Q {
        Q::from_integer(BigInt::from(k.saturating_sub(1))) * (&self.a + &self.b)
    }

    /// Largest `q` certified once round `k` is played: `⌊2^{(k−1)(a+b)/κ}⌋`,
    /// or 0 after the vacuous first round.
    pub fn certified_q_max(&self, k: usize) -> Result<u64> {
        if k <= 1 {
            return Ok(0);
        }
        let bound = floor_pow2(&(self.frontier_exponent(k) / &self.kappa));
        bound
            .to_u64()
            .filter(|&q| q <= Q_LIMIT)
            .ok_or_else(|| Error::Budget(format!("round {k} needs denominators up to {bound}")))
    }

    /// Inclusive range of denominators newly certified in round `k`.
    pub fn round_range(&self, k: usize) -> Result<(u64, u64)> {
        let hi = self.certified_q_max(k)?;
        let lo = if k <= 1 {
            1
        } else {
            self.certified_q_max(k - 1)? + 1
        };
        Ok((lo, hi))
    }

    /// Per-axis width `ρ_i(B)·(1/2 − 2^{-a(1+r_i)})` Alice keeps between her
    /// box and the avoidance hyperplane.
    pub fn avoidance_widths(&self, sides: &[Q]) -> Vec<Q> {
        self.w
            .exponents()
            .iter()
            .zip(sides)
            .map(|(e, rho)| rho * (half() - pow2_q(&-(&self.a * e)).unwrap()))
            .collect()
    }
}
