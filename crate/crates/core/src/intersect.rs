//! Lower-dimensional weighted targets `Bad(s) × ℝ^{n−k}` inside the game for
//! `r`, and strategies winning their intersections.
//!
//! On coordinates `I` the restricted flow has exponents `1 + r_i`, which are
//! proportional to `1 + s_i` for the embedded weights `s`. The avoidance
//! strategy on the restriction therefore already aims at `Bad(s)`; its
//! constants are kept in real time, so no common time lattice is needed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bad::{make_bad_strategy, reparam_kappa, verify_box, Verdict};
use crate::error::{Error, Result};
use crate::game::{
    interleave_strategies, product_strategy, CenteredDummy, ComponentReport, GameBox, GameWeights,
    Interleaved, Strategy,
};
use crate::geometry::AffineDiagonalMap;
use crate::rational::{format_rational, Q};

/// A nonempty coordinate subset, stored 0-based and increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetSpec(Vec<usize>);

impl SubsetSpec {
    pub fn new(mut coords: Vec<usize>, n: usize) -> Result<Self> {
        coords.sort_unstable();
        if coords.is_empty() {
            return Err(Error::InvalidParams("empty coordinate subset".into()));
        }
        if coords.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidParams(format!(
                "repeated coordinate in {coords:?}"
            )));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c + 1,
            });
        }
        Ok(SubsetSpec(coords))
    }

    pub fn full(n: usize) -> Self {
        SubsetSpec((0..n).collect())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_full(&self, n: usize) -> bool {
        self.0.len() == n
    }

    /// Parses 1-based coordinates such as `"1,3"`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|p| match p.trim().parse::<usize>() {
                Ok(c) if c >= 1 => Ok(c - 1),
                _ => Err(Error::Parse {
                    line: 0,
                    message: format!("bad coordinate {p:?} in subset {s:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords, n)
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.0.iter().map(|c| (c + 1).to_string()).collect();
        write!(f, "{{{}}}", one_based.join(","))
    }
}

/// Subsets separated by `;`, e.g. `"1;2;1,2"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetList(pub Vec<String>);

impl FromStr for SubsetList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(SubsetList(
            s.split(';')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedWeights {
    pub s: GameWeights,
    pub kappa: Q,
}

/// `κ = (k+1)/(k + Σ_{l∈I} r_l)`.
pub fn reparam_factor(w: &GameWeights, spec: &SubsetSpec) -> Q {
    reparam_kappa(&w.restrict(spec.coords()))
}

/// `s_i = (1 + (k+1)r_i − Σ_{l∈I} r_l)/(k + Σ_{l∈I} r_l)` for `i ∈ I`.
pub fn embed_weights(w: &GameWeights, spec: &SubsetSpec) -> Result<EmbeddedWeights> {
    let sub = w.restrict(spec.coords());
    let k = Q::from_integer(BigInt::from(spec.len()));
    let sum = sub.sum();
    let s: Vec<Q> = sub
        .r()
        .iter()
        .map(|r| (Q::one() + (&k + Q::one()) * r - &sum) / (&k + &sum))
        .collect();
    let kappa = reparam_kappa(&sub);
    for (si, ri) in s.iter().zip(sub.r()) {
        if Q::one() + si != &kappa * (Q::one() + ri) {
            return Err(Error::InvalidWeights(format!(
                "embedded weight {} breaks proportionality",
                format_rational(si)
            )));
        }
    }
    Ok(EmbeddedWeights {
        s: GameWeights::new(s)?,
        kappa,
    })
}

/// The avoidance strategy for `Bad(s)` on the coordinates of `spec`, times a
/// centered dummy on the rest; plain [`make_bad_strategy`] for the full set.
pub fn sub_bad_strategy(
    w: &GameWeights,
    spec: &SubsetSpec,
    a: &Q,
    margin: &Q,
) -> Result<Box<dyn Strategy>> {
    let n = w.dim();
    if spec.is_full(n) {
        return Ok(Box::new(make_bad_strategy(
            w,
            AffineDiagonalMap::identity(n),
            a.clone(),
            margin.clone(),
        )?));
    }
    let sub = w.restrict(spec.coords());
    let bad = make_bad_strategy(
        &sub,
        AffineDiagonalMap::identity(spec.len()),
        a.clone(),
        margin.clone(),
    )?;
    Ok(Box::new(product_strategy(
        n,
        spec.coords(),
        Box::new(bad),
        Box::new(CenteredDummy::new()),
    )))
}

/// Interleaves one component per subset, the full set first (added when
/// missing); the remaining subsets keep their given order.
pub fn intersection_strategy(
    w: &GameWeights,
    specs: &[SubsetSpec],
    a: &Q,
    margin: &Q,
) -> Result<Interleaved> {
    let n = w.dim();
    let mut ordered = vec![SubsetSpec::full(n)];
    ordered.extend(specs.iter().filter(|s| !s.is_full(n)).cloned());
    let components = ordered
        .iter()
        .map(|s| sub_bad_strategy(w, s, a, margin))
        .collect::<Result<Vec<_>>>()?;
    Ok(interleave_strategies(components))
}

/// The subsets that [`intersection_strategy`] assigns to components 1, 2, ….
pub fn component_subsets(n: usize, specs: &[SubsetSpec]) -> Vec<SubsetSpec> {
    let mut ordered = vec![SubsetSpec::full(n)];
    ordered.extend(specs.iter().filter(|s| !s.is_full(n)).cloned());
    ordered
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentVerdict {
    pub report: ComponentReport,
    /// `None` when the component never received `c′` (it has not moved past `t0`).
    pub holds: Option<bool>,
}

/// Checks `outcome` against every component's own claim.
pub fn verify_components(
    outcome: &GameBox,
    reports: &[ComponentReport],
) -> Result<Vec<ComponentVerdict>> {
    reports
        .iter()
        .map(|r| {
            let holds = match &r.c_prime {
                Some(c) => Some(
                    verify_box(&outcome.cuboid(), c, r.q_max, &r.f, &r.verify_weights)?
                        == Verdict::Holds,
                ),
                None => None,
            };
            Ok(ComponentVerdict {
                report: r.clone(),
                holds,
            })
        })
        .collect()
}
