use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, lcm_denominators, Q};

/// Weights `r_i` of the contraction family `Φ_t = diag(2^{-(1+r_i)t})`
/// together with the time lattice `Λ` on which every sidelength is dyadic.
///
/// Game weights proper are positive and sum to one. Restrictions to a
/// coordinate subset (factor games) keep positivity but not the sum, and the
/// scalar flow of the classic game has all weights zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameWeights {
    r: Vec<Q>,
    lattice: u64,
}

impl GameWeights {
    pub fn new(r: Vec<Q>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some(x) = r.iter().find(|x| !x.is_positive()) {
            return Err(Error::InvalidWeights(format!(
                "weight {} is not positive",
                format_rational(x)
            )));
        }
        let total: Q = r.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Self::unchecked(r)
    }

    /// Equal weights `(1/n, …, 1/n)`.
    pub fn equal(n: usize) -> Self {
        Self::new(vec![Q::new(BigInt::one(), BigInt::from(n)); n]).unwrap()
    }

    /// Weights all zero: the scalar contraction `2^{-t}·Id` of the classic game.
    pub fn scalar(n: usize) -> Self {
        Self::unchecked(vec![Q::zero(); n]).unwrap()
    }

    /// Any nonnegative weights, as met in factor games and the classic game.
    pub fn flow(r: Vec<Q>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some(x) = r.iter().find(|x| x.is_negative()) {
            return Err(Error::InvalidWeights(format!(
                "weight {} is negative",
                format_rational(x)
            )));
        }
        Self::unchecked(r)
    }

    fn unchecked(r: Vec<Q>) -> Result<Self> {
        let lattice = lcm_denominators(&r)
            .to_u64()
            .ok_or_else(|| Error::InvalidWeights("weight denominators too large".into()))?;
        Ok(GameWeights { r, lattice })
    }

    /// The factor flow on the coordinates `coords`.
    pub fn restrict(&self, coords: &[usize]) -> Self {
        Self::unchecked(coords.iter().map(|&i| self.r[i].clone()).collect()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[Q] {
        &self.r
    }

    /// `1 + r_i`, the contraction exponent of axis `i`.
    pub fn exponent(&self, i: usize) -> Q {
        Q::one() + &self.r[i]
    }

    pub fn exponents(&self) -> Vec<Q> {
        (0..self.dim()).map(|i| self.exponent(i)).collect()
    }

    pub fn lattice(&self) -> u64 {
        self.lattice
    }

    pub fn lattice_q(&self) -> Q {
        Q::from_integer(BigInt::from(self.lattice))
    }

    pub fn sum(&self) -> Q {
        self.r.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.sum().is_one() && self.r.iter().all(Signed::is_positive)
    }

    pub fn min_r(&self) -> Q {
        self.r.iter().min().cloned().unwrap()
    }

    /// `t` is a nonnegative integer multiple of `Λ`.
    pub fn on_lattice(&self, t: &Q) -> bool {
        !t.is_negative()
            && t.is_integer()
            && (t.to_integer() % BigInt::from(self.lattice)).is_zero()
    }

    pub fn require_lattice(&self, t: &Q) -> Result<()> {
        if self.on_lattice(t) {
            Ok(())
        } else {
            Err(Error::OffLattice {
                t: format_rational(t),
                lattice: self.lattice,
            })
        }
    }

    /// Volume exponent `Σ(1 + r_i)`: a box at time `t` has volume `2^{-t·Σ(1+r_i)}`.
    pub fn volume_exponent(&self) -> Q {
        Q::from_integer(BigInt::from(self.dim())) + self.sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn lattice_is_lcm_of_denominators() {
        let w = GameWeights::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        assert_eq!(w.lattice(), 6);
        assert!(w.on_lattice(&qi(12)));
        assert!(!w.on_lattice(&qi(4)));
        assert!(!w.on_lattice(&q(6, 5)));
        for i in 0..3 {
            assert!((w.exponent(i) * w.lattice_q()).is_integer());
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(GameWeights::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(GameWeights::new(vec![qi(1), qi(0)]).is_err());
        assert!(GameWeights::new(vec![]).is_err());
    }

    #[test]
    fn restriction_keeps_factor_weights() {
        let w = GameWeights::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        let f = w.restrict(&[0, 2]);
        assert_eq!(f.r(), &[q(1, 2), q(1, 6)]);
        assert!(!f.is_normalized());
        assert_eq!(f.lattice(), 6);
        assert_eq!(GameWeights::scalar(3).lattice(), 1);
    }
}
