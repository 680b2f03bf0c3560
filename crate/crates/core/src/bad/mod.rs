//! The hyperplane-avoidance strategy for weighted badly approximable
//! vectors and the exact oracles that check its outcomes.

mod oracle;
mod params;
mod scan;
mod strategy;

pub use oracle::{badness_score, dirichlet_witness, verify_box, BadnessScore, Verdict};
pub use params::{
    check_alice_step, derive_params, least_t0, reparam_kappa, small_volume, target_weights,
    StrategyParams,
};
pub use strategy::{
    alice_bad_move, avoidance_hyperplane, avoiding_reply, dangerous_rationals, make_bad_strategy,
    BadStrategy, DangerousRational, RoundCertificate,
};
