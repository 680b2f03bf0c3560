//! The `verify` input: a JSON object such as
//!
//! ```json
//! {"point": ["1/3"], "weights": ["1"], "c": "1/100", "qmax": 3}
//! {"box": {"lo": ["0", "1/4"], "hi": ["1/8", "3/8"]}, "weights": ["1/2", "1/2"], "c": "1/64", "qmax": 16,
//!  "f": {"diagonal": ["3/2", "2"], "translation": ["1/4", "-1/3"]}}
//! ```
//!
//! All numbers except `qmax` are exact rational strings.

use std::path::Path;

use msg_core::geometry::{AffineDiagonalMap, Cuboid};
use msg_core::rational::{serde_q, Q};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxSpec {
    #[serde(with = "serde_q::vec")]
    lo: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    hi: Vec<Q>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    #[serde(with = "serde_q::vec")]
    diagonal: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    translation: Vec<Q>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    #[serde(default, with = "opt_vec")]
    point: Option<Vec<Q>>,
    #[serde(rename = "box")]
    bx: Option<BoxSpec>,
    #[serde(default, with = "opt_vec")]
    weights: Option<Vec<Q>>,
    #[serde(with = "serde_q")]
    c: Q,
    qmax: Option<u64>,
    f: Option<MapSpec>,
}

mod opt_vec {
    use msg_core::rational::{serde_q, Q};
    use serde::{Deserialize, Deserializer};

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "serde_q::vec")] Vec<Q>);

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Q>>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Debug)]
pub(crate) struct VerifyInput {
    pub cuboid: Cuboid,
    pub is_point: bool,
    pub weights: Option<Vec<Q>>,
    pub c: Q,
    pub qmax: Option<u64>,
    pub f: Option<AffineDiagonalMap>,
}

pub(crate) fn load(path: &Path) -> Result<VerifyInput, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawInput = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let (cuboid, is_point) = match (raw.point, raw.bx) {
        (Some(x), None) => (Cuboid::point(&x), true),
        (None, Some(b)) => {
            if b.lo.len() != b.hi.len() || b.lo.iter().zip(&b.hi).any(|(l, h)| l > h) {
                return Err(Failure::Config(
                    "box needs lo ≤ hi in every coordinate".into(),
                ));
            }
            (Cuboid::new(b.lo, b.hi), false)
        }
        _ => {
            return Err(Failure::Config(
                "give exactly one of \"point\" and \"box\"".into(),
            ))
        }
    };
    let f = raw
        .f
        .map(|m| AffineDiagonalMap::new(m.diagonal, m.translation))
        .transpose()?;
    Ok(VerifyInput {
        cuboid,
        is_point,
        weights: raw.weights,
        c: raw.c,
        qmax: raw.qmax,
        f,
    })
}
