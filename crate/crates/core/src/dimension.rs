//! Tree-like families grown from strategy play, their densities of
//! children, and the resulting Hausdorff dimension lower bounds.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    box_of, legal_move, GameBox, GameParams, GameWeights, Move, Player, SessionInit, Strategy,
};
use crate::geometry::Cuboid;
use crate::rational::{cmp_pow2, format_rational, half, log2, RationalVector, Q};

/// Largest number of boxes [`pack_children`] or a tree level may hold.
pub const MAX_LEVEL_SIZE: usize = 1 << 18;

/// The perfect grid tiling of `parent` by translates of its shrink
/// `step_b` later, in lexicographic order of the grid index (axis 0 slowest).
pub fn pack_children(parent: &GameBox, step_b: &Q, w: &GameWeights) -> Result<Vec<GameBox>> {
    w.require_lattice(step_b)?;
    let child = parent.centered_child(step_b, w)?;
    let counts: Vec<usize> = parent
        .sides
        .iter()
        .zip(&child.sides)
        .map(|(p, c)| {
            let ratio = p / c;
            debug_assert!(ratio.is_integer());
            ratio.to_integer().to_usize().unwrap_or(usize::MAX)
        })
        .collect();
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&n| n <= MAX_LEVEL_SIZE);
    let total =
        total.ok_or_else(|| Error::Budget(format!("tiling with per-axis counts {counts:?}")))?;
    let lo = parent.cuboid().lo;
    let mut out = Vec::with_capacity(total);
    let mut index = vec![0usize; counts.len()];
    for _ in 0..total {
        let center = index
            .iter()
            .zip(&lo)
            .zip(&child.sides)
            .map(|((&j, lo), side)| lo + (Q::from_integer(BigInt::from(j)) + half()) * side)
            .collect();
        out.push(child.with_center(RationalVector::new(center), child.t.clone(), w)?);
        for axis in (0..counts.len()).rev() {
            index[axis] += 1;
            if index[axis] < counts[axis] {
                break;
            }
            index[axis] = 0;
        }
    }
    Ok(out)
}

/// Levels of boxes; level 0 is the single root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeLevels {
    pub levels: Vec<Vec<GameBox>>,
}

impl TreeLevels {
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Sup-metric diameter of each level: its largest box side.
    pub fn diameters(&self) -> Vec<Q> {
        self.levels
            .iter()
            .map(|l| {
                l.iter()
                    .map(GameBox::diameter)
                    .max()
                    .unwrap_or_else(Q::zero)
            })
            .collect()
    }
}

/// A path through the game tree ending at a leaf, with the Alice session
/// that played it.
pub struct Leaf {
    pub history: Vec<Move>,
    pub strategy: Box<dyn Strategy>,
}

impl fmt::Debug for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Leaf")
            .field("strategy", &self.strategy.name())
            .field("moves", &self.history.len())
            .finish()
    }
}

#[derive(Debug)]
pub struct StrategyTree {
    pub tree: TreeLevels,
    pub leaves: Vec<Leaf>,
}

/// Grows the tree of Alice's replies to every Bob option.
///
/// Bob opens with the centered unit cube at `t1` and level 0 is Alice's
/// reply. Level `k+1` holds, for each level-`k` box `A`, Alice's replies to
/// each cell of [`pack_children`]`(A, b)`, every branch continuing its own
/// forked session of `alice`.
pub fn grow_strategy_tree(
    alice: &dyn Strategy,
    w: &GameWeights,
    params: &GameParams,
    depth: usize,
) -> Result<StrategyTree> {
    params.validate(w)?;
    let opening = box_of(RationalVector::splat(half(), w.dim()), &params.t1, w)?;
    let mut root = alice.fork();
    root.begin(&SessionInit {
        weights: w,
        params,
        role: Player::Alice,
        first_bob: &opening,
    })?;
    let mut history = vec![Move {
        round: 1,
        player: Player::Init,
        bx: opening.clone(),
        note: None,
    }];
    let first = alice_reply(root.as_mut(), &opening, &mut history, &params.a, 1, "root")?;

    let mut levels = vec![vec![first]];
    let mut frontier = vec![(
        String::new(),
        Leaf {
            history,
            strategy: root,
        },
    )];
    for k in 1..=depth {
        let round = k + 1;
        let mut next_level = Vec::new();
        let mut next_frontier = Vec::new();
        for (path, node) in &frontier {
            let parent = &node.history.last().unwrap().bx;
            let options = pack_children(parent, &params.b, w)?;
            if next_level.len() + options.len() > MAX_LEVEL_SIZE {
                return Err(Error::Budget(format!(
                    "tree level {k} exceeds {MAX_LEVEL_SIZE} boxes"
                )));
            }
            for (j, option) in options.into_iter().enumerate() {
                let path = if path.is_empty() {
                    j.to_string()
                } else {
                    format!("{path}.{j}")
                };
                let mut strategy = node.strategy.fork();
                let mut history = node.history.clone();
                history.push(Move {
                    round,
                    player: Player::Bob,
                    bx: option.clone(),
                    note: None,
                });
                let reply = alice_reply(
                    strategy.as_mut(),
                    &option,
                    &mut history,
                    &params.a,
                    round,
                    &path,
                )?;
                next_level.push(reply);
                next_frontier.push((path, Leaf { history, strategy }));
            }
        }
        levels.push(next_level);
        frontier = next_frontier;
    }
    Ok(StrategyTree {
        tree: TreeLevels { levels },
        leaves: frontier.into_iter().map(|(_, l)| l).collect(),
    })
}

fn alice_reply(
    strategy: &mut dyn Strategy,
    bob: &GameBox,
    history: &mut Vec<Move>,
    step: &Q,
    round: usize,
    path: &str,
) -> Result<GameBox> {
    let at = |e: Error| Error::TreePath {
        path: path.to_string(),
        source: Box::new(e),
    };
    let reply = strategy
        .respond(bob, history)
        .map_err(|e| at(e.in_round(Player::Alice, round)))?;
    if reply.bx.shape != bob.shape || !legal_move(bob, &reply.bx, step) {
        return Err(at(Error::IllegalMove {
            player: Player::Alice,
            round,
        }));
    }
    history.push(Move {
        round,
        player: Player::Alice,
        bx: reply.bx.clone(),
        note: reply.note,
    });
    Ok(reply.bx)
}

pub fn build_strategy_tree(
    alice: &dyn Strategy,
    w: &GameWeights,
    params: &GameParams,
    depth: usize,
) -> Result<TreeLevels> {
    Ok(grow_strategy_tree(alice, w, params, depth)?.tree)
}

/// Volume decays as `2^{-δt}`; diameters are at most `C·2^{-σt}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureModel {
    #[serde(with = "crate::rational::serde_q")]
    pub delta: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub sigma: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
}

impl MeasureModel {
    /// Lebesgue measure under the flow of `w`: `δ = n + Σr`, `σ = 1 + min r`, `C = 1`.
    pub fn lebesgue(w: &GameWeights) -> Self {
        MeasureModel {
            delta: w.volume_exponent(),
            sigma: Q::one() + w.min_r(),
            c: Q::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    Box {
        level: usize,
        index: usize,
    },
    Pair {
        level: usize,
        first: usize,
        second: usize,
    },
    Level {
        level: usize,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Box { level, index } => write!(f, "box {index} at level {level}"),
            Witness::Pair {
                level,
                first,
                second,
            } => write!(f, "boxes {first} and {second} at level {level}"),
            Witness::Level { level } => write!(f, "level {level}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub witness: Option<Witness>,
}

impl ConditionCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub conditions: Vec<ConditionCheck>,
    pub diameters: Vec<Q>,
}

impl TreeReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(ConditionCheck::passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Boxes of one level sorted along axis 0, for overlap queries.
struct SweepIndex<'a> {
    cuboids: &'a [Cuboid],
    order: Vec<usize>,
    width: Q,
}

impl<'a> SweepIndex<'a> {
    fn new(cuboids: &'a [Cuboid]) -> Self {
        let mut order: Vec<usize> = (0..cuboids.len()).collect();
        order.sort_by(|&i, &j| cuboids[i].lo[0].cmp(&cuboids[j].lo[0]).then(i.cmp(&j)));
        let width = cuboids
            .iter()
            .map(|c| &c.hi[0] - &c.lo[0])
            .max()
            .unwrap_or_else(Q::zero);
        SweepIndex {
            cuboids,
            order,
            width,
        }
    }

    /// Indices of boxes whose axis-0 extent meets `[lo, hi]`.
    fn near<'b>(&'b self, c: &Cuboid) -> impl Iterator<Item = usize> + 'b {
        let from = &c.lo[0] - &self.width;
        let start = self
            .order
            .partition_point(|&i| self.cuboids[i].lo[0] < from);
        let end = self
            .order
            .partition_point(|&i| self.cuboids[i].lo[0] <= c.hi[0]);
        self.order[start..end].iter().copied()
    }
}

fn interiors_meet(a: &Cuboid, b: &Cuboid) -> bool {
    (0..a.dim())
        .all(|i| a.lo[i].clone().max(b.lo[i].clone()) < a.hi[i].clone().min(b.hi[i].clone()))
}

/// Checks TL0 (positive volume), TL1 (interior-disjoint within a level),
/// TL2 (every box lies in a box of the previous level), TL3 (every box has a
/// child) and STL (diameters strictly decrease and obey `d ≤ C·2^{-σt}`).
pub fn check_treelike(tree: &TreeLevels, model: &MeasureModel) -> TreeReport {
    let cuboids: Vec<Vec<Cuboid>> = tree
        .levels
        .iter()
        .map(|l| l.iter().map(GameBox::cuboid).collect())
        .collect();
    let indices: Vec<SweepIndex<'_>> = cuboids.iter().map(|l| SweepIndex::new(l)).collect();

    let tl0 = cuboids.iter().enumerate().find_map(|(level, l)| {
        l.iter()
            .position(|c| !c.volume().is_positive())
            .map(|index| Witness::Box { level, index })
    });

    let tl1 = cuboids.iter().enumerate().find_map(|(level, l)| {
        l.iter().enumerate().find_map(|(i, c)| {
            indices[level]
                .near(c)
                .find(|&j| j > i && interiors_meet(c, &l[j]))
                .map(|j| Witness::Pair {
                    level,
                    first: i,
                    second: j,
                })
        })
    });

    let tl2 = (1..cuboids.len()).find_map(|level| {
        cuboids[level].iter().enumerate().find_map(|(i, c)| {
            let inside = indices[level - 1]
                .near(c)
                .any(|p| cuboids[level - 1][p].contains(c));
            (!inside).then_some(Witness::Box { level, index: i })
        })
    });

    let tl3 = (1..cuboids.len()).find_map(|level| {
        cuboids[level - 1].iter().enumerate().find_map(|(i, p)| {
            let fertile = indices[level]
                .near(p)
                .any(|c| p.contains(&cuboids[level][c]));
            (!fertile).then_some(Witness::Box {
                level: level - 1,
                index: i,
            })
        })
    });

    let diameters = tree.diameters();
    let decreasing = diameters
        .windows(2)
        .position(|d| d[1] >= d[0])
        .map(|k| Witness::Level { level: k + 1 });
    let law = tree.levels.iter().enumerate().find_map(|(level, l)| {
        l.iter()
            .position(|b| {
                let d = b.diameter();
                d.is_positive() && cmp_pow2(&-(&model.sigma * &b.t), &(d / &model.c)).is_lt()
            })
            .map(|index| Witness::Box { level, index })
    });

    let check = |name, witness| ConditionCheck { name, witness };
    TreeReport {
        conditions: vec![
            check("TL0", tl0),
            check("TL1", tl1),
            check("TL2", tl2),
            check("TL3", tl3),
            check("STL", decreasing.or(law)),
        ],
        diameters,
    }
}

/// `min_B vol(B ∩ ⋃ level k+1)/vol(B)` over level-`k` boxes `B`, assuming
/// level `k+1` is interior-disjoint. `None` without a level `k+1`.
pub fn delta_k(tree: &TreeLevels, k: usize) -> Option<Q> {
    let parents: Vec<Cuboid> = tree.levels.get(k)?.iter().map(GameBox::cuboid).collect();
    let children: Vec<Cuboid> = tree
        .levels
        .get(k + 1)?
        .iter()
        .map(GameBox::cuboid)
        .collect();
    let index = SweepIndex::new(&children);
    parents
        .iter()
        .map(|p| {
            let covered: Q = index.near(p).map(|c| p.overlap_volume(&children[c])).sum();
            covered / p.volume()
        })
        .min()
}

/// Densities `Δ_0, …, Δ_{L−1}` and diameters `d_0, …, d_L` of a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProfile {
    pub deltas: Vec<Q>,
    pub diameters: Vec<Q>,
}

impl DensityProfile {
    pub fn of(tree: &TreeLevels) -> Self {
        let deltas = (0..tree.depth())
            .map(|k| delta_k(tree, k).unwrap())
            .collect();
        DensityProfile {
            deltas,
            diameters: tree.diameters(),
        }
    }

    /// Continues the profile to `depth` levels with the last density and the
    /// last diameter ratio held constant, as they are for strategy trees over
    /// perfect tilings.
    pub fn extend(&self, depth: usize) -> Self {
        let mut out = self.clone();
        let k = self.diameters.len();
        assert!(
            k >= 2 && !self.deltas.is_empty(),
            "extension needs two materialized levels"
        );
        let ratio = &self.diameters[k - 1] / &self.diameters[k - 2];
        let delta = self.deltas.last().unwrap().clone();
        while out.diameters.len() <= depth {
            let next = out.diameters.last().unwrap() * &ratio;
            out.diameters.push(next);
            out.deltas.push(delta.clone());
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.diameters.len() - 1
    }
}

/// `d_μ − Σ_{i<k} log Δ_i / log d_k` for `k = 1..=depth`.
pub fn urbanski_series(profile: &DensityProfile, d_mu: f64) -> Vec<f64> {
    let mut sum = 0.0;
    (1..=profile.depth())
        .map(|k| {
            sum += log2(&profile.deltas[k - 1]);
            d_mu - sum / log2(&profile.diameters[k])
        })
        .collect()
}

/// The finite-depth estimate at the deepest level.
pub fn urbanski_estimate(profile: &DensityProfile, d_mu: f64) -> f64 {
    *urbanski_series(profile, d_mu)
        .last()
        .expect("at least two levels")
}

/// Limit of the estimate when the last density and diameter ratio persist:
/// by Stolz–Cesàro the ratio of sums tends to the ratio of the last
/// increments, `log Δ_{k−1} / log(d_k/d_{k−1})`.
pub fn urbanski_extrapolated(profile: &DensityProfile, d_mu: f64) -> f64 {
    let k = profile.depth();
    assert!(k >= 1, "at least two levels");
    d_mu - log2(&profile.deltas[k - 1]) / log2(&(&profile.diameters[k] / &profile.diameters[k - 1]))
}

/// `d_μ + log₂c / (σ(a+b))`.
pub fn wd_bound(a: &Q, b: &Q, c: &Q, sigma: &Q, d_mu: f64) -> f64 {
    assert!(
        c.is_positive() && c <= &Q::one(),
        "density constant must lie in (0, 1]"
    );
    d_mu + log2(c) / (crate::rational::to_f64(sigma) * crate::rational::to_f64(&(a + b)))
}

/// Constants for a doubling measure with constant `K` and ratio `α`: `m` is
/// the integer with `α/6 < 3^{-m} ≤ α/2`, `c_small = K^{-m}`, `c = c_small/K²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FedererConstants {
    #[serde(with = "crate::rational::serde_q")]
    pub k: Q,
    pub m: u32,
    #[serde(with = "crate::rational::serde_q")]
    pub c_small: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
}

pub fn federer_constants(k: &Q, alpha: &Q) -> Result<FedererConstants> {
    if k < &Q::one() {
        return Err(Error::InvalidParams(format!(
            "doubling constant {} below 1",
            format_rational(k)
        )));
    }
    if !alpha.is_positive() || alpha >= &Q::one() {
        return Err(Error::InvalidParams(format!(
            "alpha {} not in (0, 1)",
            format_rational(alpha)
        )));
    }
    let three = Q::from_integer(BigInt::from(3));
    let target = alpha / Q::from_integer(BigInt::from(2));
    let mut m = 0u32;
    let mut power = Q::one();
    while power > target {
        m += 1;
        power /= &three;
    }
    let c_small = num_traits::pow(k.recip(), m as usize);
    let c = &c_small / (k * k);
    Ok(FedererConstants {
        k: k.clone(),
        m,
        c_small,
        c,
    })
}
