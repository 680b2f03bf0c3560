//! Exact affine geometry on axis-aligned boxes: hyperplanes, affine hulls,
//! extremal corners and sup-norm ball containment.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, is_dyadic, serde_q, RationalVector, Q};

/// A closed axis-aligned box `[lo_1, hi_1] × … × [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cuboid {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

impl Cuboid {
    pub fn new(lo: Vec<Q>, hi: Vec<Q>) -> Self {
        assert_eq!(lo.len(), hi.len());
        debug_assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        Cuboid { lo, hi }
    }

    pub fn point(x: &[Q]) -> Self {
        Cuboid {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    pub fn centered(center: &[Q], sides: &[Q]) -> Self {
        let lo = center
            .iter()
            .zip(sides)
            .map(|(c, s)| c - s / Q::from_integer(2.into()))
            .collect();
        let hi = center
            .iter()
            .zip(sides)
            .map(|(c, s)| c + s / Q::from_integer(2.into()))
            .collect();
        Cuboid { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains_point(&self, x: &[Q]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn contains(&self, inner: &Cuboid) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= inner.lo[i] && inner.hi[i] <= self.hi[i])
    }

    /// Volume of the intersection with `other` (zero when they only touch).
    pub fn overlap_volume(&self, other: &Cuboid) -> Q {
        let mut vol = Q::one();
        for i in 0..self.dim() {
            let lo = (&self.lo[i]).max(&other.lo[i]);
            let hi = (&self.hi[i]).min(&other.hi[i]);
            if hi <= lo {
                return Q::zero();
            }
            vol *= hi - lo;
        }
        vol
    }

    pub fn volume(&self) -> Q {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// Distance from `x` to `[lo_i, hi_i]` along axis `i`.
    pub fn axis_gap(&self, i: usize, x: &Q) -> Q {
        if x < &self.lo[i] {
            &self.lo[i] - x
        } else if x > &self.hi[i] {
            x - &self.hi[i]
        } else {
            Q::zero()
        }
    }

    pub fn select(&self, coords: &[usize]) -> Cuboid {
        Cuboid {
            lo: coords.iter().map(|&i| self.lo[i].clone()).collect(),
            hi: coords.iter().map(|&i| self.hi[i].clone()).collect(),
        }
    }
}

/// The hyperplane `{x : normal·x = offset}`, normalized so the first
/// nonzero normal entry is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneExact {
    pub normal: RationalVector,
    #[serde(with = "serde_q")]
    pub offset: Q,
}

impl HyperplaneExact {
    pub fn new(normal: Vec<Q>, offset: Q) -> Self {
        let lead = normal
            .iter()
            .find(|x| !x.is_zero())
            .cloned()
            .expect("hyperplane normal must be nonzero");
        let normal = normal.into_iter().map(|x| x / &lead).collect();
        HyperplaneExact {
            normal: RationalVector::new(normal),
            offset: offset / lead,
        }
    }

    /// `normal·x − offset`.
    pub fn eval(&self, x: &[Q]) -> Q {
        self.normal.dot(x) - &self.offset
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.eval(x).is_zero()
    }

    pub fn describe(&self) -> String {
        let terms: Vec<String> = self.normal.iter().map(format_rational).collect();
        format!(
            "[{}]·x = {}",
            terms.join(", "),
            format_rational(&self.offset)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineHull {
    /// The hull has dimension `dim < n`; `hyperplane` contains every point.
    Proper {
        dim: usize,
        hyperplane: HyperplaneExact,
    },
    FullDimensional,
}

/// Affine hull by exact Gaussian elimination on the difference vectors.
pub fn affine_hull(points: &[RationalVector]) -> Result<AffineHull> {
    let base = points
        .first()
        .ok_or_else(|| Error::InvalidParams("affine hull of an empty set".into()))?;
    let n = base.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    let mut rows: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();

    // Reduced row echelon form; `pivots[r]` is the pivot column of row r.
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let lead = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x /= &lead;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][col].is_zero() {
                let factor = rows[k][col].clone();
                let pivot_row = rows[r].clone();
                for (x, p) in rows[k].iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let dim = pivots.len();
    if dim == n {
        return Ok(AffineHull::FullDimensional);
    }
    // Null-space vector: first free column set to 1, pivots solved from RREF.
    let free = (0..n)
        .find(|c| !pivots.contains(c))
        .expect("rank < n leaves a free column");
    let mut normal = vec![Q::zero(); n];
    normal[free] = Q::one();
    for (row, &p) in pivots.iter().enumerate() {
        normal[p] = -rows[row][free].clone();
    }
    let offset = base.dot(&normal);
    Ok(AffineHull::Proper {
        dim,
        hyperplane: HyperplaneExact::new(normal, offset),
    })
}

/// Maximum of `|normal·x − offset|` over the box, with an attaining corner.
/// Ties go to the lexicographically smallest corner.
pub fn max_abs_affine_over_box(
    h: &HyperplaneExact,
    cuboid: &Cuboid,
) -> Result<(Q, RationalVector)> {
    if h.normal.dim() != cuboid.dim() {
        return Err(Error::DimensionMismatch {
            expected: cuboid.dim(),
            got: h.normal.dim(),
        });
    }
    let mut up = Vec::with_capacity(cuboid.dim());
    let mut down = Vec::with_capacity(cuboid.dim());
    for (i, n) in h.normal.iter().enumerate() {
        let (lo, hi) = (&cuboid.lo[i], &cuboid.hi[i]);
        match n.cmp(&Q::zero()) {
            Ordering::Greater => {
                up.push(hi.clone());
                down.push(lo.clone());
            }
            Ordering::Less => {
                up.push(lo.clone());
                down.push(hi.clone());
            }
            Ordering::Equal => {
                up.push(lo.clone());
                down.push(lo.clone());
            }
        }
    }
    let v_up = h.eval(&up).abs();
    let v_down = h.eval(&down).abs();
    let pick_up = match v_up.cmp(&v_down) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => up <= down,
    };
    Ok(if pick_up {
        (v_up, RationalVector::new(up))
    } else {
        (v_down, RationalVector::new(down))
    })
}

/// Minimum of `|normal·x − offset|` over the box (zero if the hyperplane
/// meets it).
pub fn min_abs_affine_over_box(h: &HyperplaneExact, cuboid: &Cuboid) -> Q {
    let (mut low, mut high) = (-h.offset.clone(), -h.offset.clone());
    for (i, n) in h.normal.iter().enumerate() {
        let (a, b) = (n * &cuboid.lo[i], n * &cuboid.hi[i]);
        if a <= b {
            low += a;
            high += b;
        } else {
            low += b;
            high += a;
        }
    }
    if low.is_positive() {
        low
    } else if high.is_negative() {
        -high
    } else {
        Q::zero()
    }
}

/// A closed ball in the sup metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: RationalVector,
    pub radius: Q,
}

impl Ball {
    pub fn new(center: RationalVector, radius: Q) -> Self {
        assert!(radius.is_positive(), "ball radius must be positive");
        Ball { center, radius }
    }

    fn cuboid(&self) -> Cuboid {
        Cuboid::new(
            self.center.iter().map(|c| c - &self.radius).collect(),
            self.center.iter().map(|c| c + &self.radius).collect(),
        )
    }
}

/// Returns `(schmidt, subset)`: Schmidt's containment `d(x′,x) + r′ ≤ r`
/// and plain set containment of the two sup-norm balls.
pub fn schmidt_contains(outer: &Ball, inner: &Ball) -> (bool, bool) {
    let dist = outer
        .center
        .iter()
        .zip(inner.center.iter())
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Q::zero);
    let schmidt = dist + &inner.radius <= outer.radius;
    let subset = outer.cuboid().contains(&inner.cuboid());
    (schmidt, subset)
}

/// `x ↦ diag(d)·x + translation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineDiagonalMap {
    #[serde(with = "serde_q::vec")]
    pub diagonal: Vec<Q>,
    pub translation: RationalVector,
    #[serde(with = "serde_q")]
    pub jacobian: Q,
}

impl AffineDiagonalMap {
    pub fn new(diagonal: Vec<Q>, translation: Vec<Q>) -> Result<Self> {
        if diagonal.len() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: diagonal.len(),
                got: translation.len(),
            });
        }
        if diagonal.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParams(
                "affine map has a zero diagonal entry".into(),
            ));
        }
        let jacobian = diagonal.iter().map(|d| d.abs()).product();
        Ok(AffineDiagonalMap {
            diagonal,
            translation: RationalVector::new(translation),
            jacobian,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Q::one(); n], vec![Q::zero(); n]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_identity(&self) -> bool {
        self.diagonal.iter().all(One::is_one) && self.translation.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, x: &[Q]) -> RationalVector {
        RationalVector::new(
            x.iter()
                .zip(&self.diagonal)
                .zip(self.translation.iter())
                .map(|((x, d), s)| x * d + s)
                .collect(),
        )
    }

    /// Image of the rational point `p/q`.
    pub fn apply_ratio(&self, p: &[BigInt], q: &BigInt) -> RationalVector {
        let x: Vec<Q> = p.iter().map(|p| Q::new(p.clone(), q.clone())).collect();
        self.apply(&x)
    }

    pub fn apply_inverse(&self, y: &[Q]) -> RationalVector {
        RationalVector::new(
            y.iter()
                .zip(&self.diagonal)
                .zip(self.translation.iter())
                .map(|((y, d), s)| (y - s) / d)
                .collect(),
        )
    }

    pub fn require_dyadic(&self) -> Result<()> {
        match self.diagonal.iter().find(|d| !is_dyadic(d)) {
            Some(d) => Err(Error::NonDyadic(format_rational(d))),
            None => Ok(()),
        }
    }

    pub fn select(&self, coords: &[usize]) -> AffineDiagonalMap {
        Self::new(
            coords.iter().map(|&i| self.diagonal[i].clone()).collect(),
            coords
                .iter()
                .map(|&i| self.translation[i].clone())
                .collect(),
        )
        .unwrap()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineDiagonalMap) -> AffineDiagonalMap {
        let translation = self.apply(&inner.translation);
        Self::new(
            self.diagonal
                .iter()
                .zip(&inner.diagonal)
                .map(|(a, b)| a * b)
                .collect(),
            translation.0,
        )
        .unwrap()
    }

    /// Embeds a map on the coordinates `coords` into `ℝⁿ`, identity elsewhere.
    pub fn embed(&self, coords: &[usize], n: usize) -> AffineDiagonalMap {
        let mut diagonal = vec![Q::one(); n];
        let mut translation = vec![Q::zero(); n];
        for (j, &i) in coords.iter().enumerate() {
            diagonal[i] = self.diagonal[j].clone();
            translation[i] = self.translation[j].clone();
        }
        Self::new(diagonal, translation).unwrap()
    }
}
