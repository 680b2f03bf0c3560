use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::GameWeights;
use crate::geometry::Cuboid;
use crate::rational::{format_rational, half, pow2_q, RationalVector, Q};

/// The box `ψ(x, t) = Φ_t(D₀) + x` for an axis-aligned domain `D₀` with
/// sidelengths `shape` (the unit cube unless a domain transport is in play).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameBox {
    pub center: RationalVector,
    pub t: Q,
    pub sides: Vec<Q>,
    pub shape: Vec<Q>,
}

impl GameBox {
    /// A box at any time `t ≥ 0` for which every `(1+r_i)t` is an integer, so
    /// that the sidelengths are exact dyadic multiples of `shape`.
    pub fn exact(center: RationalVector, t: Q, w: &GameWeights, shape: Vec<Q>) -> Result<Self> {
        if center.dim() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                got: center.dim(),
            });
        }
        if shape.len() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                got: shape.len(),
            });
        }
        let off = || Error::OffLattice {
            t: format_rational(&t),
            lattice: w.lattice(),
        };
        if t.is_negative() {
            return Err(off());
        }
        let mut sides = Vec::with_capacity(w.dim());
        for (i, s) in shape.iter().enumerate() {
            let e = -(w.exponent(i) * &t);
            sides.push(pow2_q(&e).ok_or_else(off)? * s);
        }
        Ok(GameBox {
            center,
            t,
            sides,
            shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn cuboid(&self) -> Cuboid {
        Cuboid::centered(&self.center, &self.sides)
    }

    pub fn volume(&self) -> Q {
        self.sides.iter().product()
    }

    /// Sup-metric diameter: the longest side.
    pub fn diameter(&self) -> Q {
        self.sides.iter().max().cloned().unwrap()
    }

    pub fn contains(&self, inner: &GameBox) -> bool {
        self.cuboid().contains(&inner.cuboid())
    }

    pub fn with_center(&self, center: RationalVector, t: Q, w: &GameWeights) -> Result<GameBox> {
        GameBox::exact(center, t, w, self.shape.clone())
    }

    /// The box `step` later with the same center.
    pub fn centered_child(&self, step: &Q, w: &GameWeights) -> Result<GameBox> {
        self.with_center(self.center.clone(), &self.t + step, w)
    }

    pub fn child_at(&self, center: RationalVector, step: &Q, w: &GameWeights) -> Result<GameBox> {
        self.with_center(center, &self.t + step, w)
    }

    /// Centers `c` for which the box `step` later centered at `c` lies inside `self`.
    pub fn allowed_centers(&self, step: &Q, w: &GameWeights) -> Result<Cuboid> {
        let child = self.centered_child(step, w)?;
        let slack: Vec<Q> = self
            .sides
            .iter()
            .zip(&child.sides)
            .map(|(a, b)| a - b)
            .collect();
        if slack.iter().any(Signed::is_negative) {
            return Err(Error::InvalidParams("step does not shrink the box".into()));
        }
        Ok(Cuboid::centered(&self.center, &slack))
    }

    /// Projection onto the coordinates `coords`, as a box of the factor flow.
    pub fn project(&self, coords: &[usize], factor: &GameWeights) -> GameBox {
        GameBox {
            center: self.center.select(coords),
            t: self.t.clone(),
            sides: coords.iter().map(|&i| self.sides[i].clone()).collect(),
            shape: coords.iter().map(|&i| self.shape[i].clone()).collect(),
        }
        .debug_check(factor)
    }

    /// Reassembles a box from factor boxes on `coords` and on the complement.
    pub fn combine(coords: &[usize], inside: &GameBox, outside: &GameBox) -> Result<GameBox> {
        if inside.t != outside.t {
            return Err(Error::InvalidParams(
                "factor replies disagree on time".into(),
            ));
        }
        let n = inside.dim() + outside.dim();
        let mut center = Vec::with_capacity(n);
        let mut sides = Vec::with_capacity(n);
        let mut shape = Vec::with_capacity(n);
        let (mut a, mut b) = (0, 0);
        for i in 0..n {
            let (src, j) = if coords.contains(&i) {
                a += 1;
                (inside, a - 1)
            } else {
                b += 1;
                (outside, b - 1)
            };
            center.push(src.center[j].clone());
            sides.push(src.sides[j].clone());
            shape.push(src.shape[j].clone());
        }
        Ok(GameBox {
            center: RationalVector::new(center),
            t: inside.t.clone(),
            sides,
            shape,
        })
    }

    fn debug_check(self, w: &GameWeights) -> Self {
        debug_assert_eq!(self.dim(), w.dim());
        self
    }

    pub fn is_unit_domain(&self) -> bool {
        self.shape.iter().all(One::is_one)
    }

    /// Box time as `f64`, for diagnostics only.
    pub fn t_f64(&self) -> f64 {
        self.t.to_f64().unwrap_or(f64::NAN)
    }
}

/// `ψ(center, t)` with the unit-cube domain; `t` must be a lattice time.
pub fn box_of(center: RationalVector, t: &Q, w: &GameWeights) -> Result<GameBox> {
    w.require_lattice(t)?;
    GameBox::exact(center, t.clone(), w, vec![Q::one(); w.dim()])
}

/// The unit cube `[0,1]^n` as the formal time-zero reference box.
pub fn unit_cube(w: &GameWeights) -> GameBox {
    box_of(RationalVector::splat(half(), w.dim()), &Q::zero(), w).unwrap()
}

/// `child` is a legal reply to `parent` with time step `step`.
pub fn legal_move(parent: &GameBox, child: &GameBox, step: &Q) -> bool {
    child.dim() == parent.dim() && child.t == &parent.t + step && parent.contains(child)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow2, q, qi};

    fn w13() -> GameWeights {
        GameWeights::new(vec![q(1, 3), q(2, 3)]).unwrap()
    }

    #[test]
    fn box_of_sidelengths() {
        let b = box_of(RationalVector::splat(qi(0), 2), &qi(3), &w13()).unwrap();
        assert_eq!(b.sides, vec![pow2(-4), pow2(-5)]);
        assert_eq!(b.volume(), pow2(-9));
    }

    #[test]
    fn box_of_initial_reference_is_unit_cube() {
        let b = box_of(RationalVector::splat(q(1, 2), 2), &qi(0), &w13()).unwrap();
        assert_eq!(b.sides, vec![qi(1), qi(1)]);
        assert_eq!(unit_cube(&w13()), b);
    }

    #[test]
    fn box_of_rejects_off_lattice_time() {
        let err = box_of(RationalVector::splat(qi(0), 2), &qi(2), &w13()).unwrap_err();
        assert_eq!(
            err,
            Error::OffLattice {
                t: "2/1".into(),
                lattice: 3
            }
        );
    }

    #[test]
    fn legal_move_cases() {
        let w = w13();
        let parent = box_of(RationalVector::splat(q(1, 2), 2), &qi(3), &w).unwrap();
        let a = qi(3);
        let centered = parent.centered_child(&a, &w).unwrap();
        assert!(legal_move(&parent, &centered, &a));

        // push the child so it sticks out of the parent on axis 0
        let allowed = parent.allowed_centers(&a, &w).unwrap();
        let mut c = centered.center.clone();
        c.0[0] = &allowed.hi[0] + pow2(-40);
        let protruding = parent.child_at(c, &a, &w).unwrap();
        assert!(!legal_move(&parent, &protruding, &a));

        // correct containment, wrong step
        let later = parent.centered_child(&qi(6), &w).unwrap();
        assert!(!legal_move(&parent, &later, &a));
    }

    #[test]
    fn volume_and_diameter_laws() {
        let w = w13();
        for k in 0..6 {
            let t = qi(3 * k);
            let b = box_of(RationalVector::splat(qi(0), 2), &t, &w).unwrap();
            assert_eq!(b.volume(), pow2(-3 * 3 * k));
            // σ = 1 + min r = 4/3
            assert_eq!(b.diameter(), pow2(-4 * k));
        }
    }

    #[test]
    fn project_and_combine_round_trip() {
        let w = GameWeights::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        let b = box_of(
            RationalVector::from_ratios(&[(1, 3), (1, 5), (1, 7)]),
            &qi(6),
            &w,
        )
        .unwrap();
        let coords = [0, 2];
        let inside = b.project(&coords, &w.restrict(&coords));
        let outside = b.project(&[1], &w.restrict(&[1]));
        assert_eq!(GameBox::combine(&coords, &inside, &outside).unwrap(), b);
    }
}
