use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use msg_core::adversary::{Adversary, BobKind};
use msg_core::bad::{badness_score, make_bad_strategy, verify_box, BadStrategy};
use msg_core::game::{play, GameParams, GameWeights, Player, Strategy as _, Transcript};
use msg_core::geometry::{min_abs_affine_over_box, AffineDiagonalMap, Cuboid};
use msg_core::rational::{pow2, q, qi, RationalVector, Q};

fn run(r: Vec<Q>, a: i64, rounds: usize, kind: BobKind, seed: u64) -> (BadStrategy, Transcript) {
    let w = GameWeights::new(r).unwrap();
    let params = GameParams::new(qi(a), qi(a), qi(a), &w).unwrap();
    let mut alice =
        make_bad_strategy(&w, AffineDiagonalMap::identity(w.dim()), qi(a), q(1, 2)).unwrap();
    let t = play(
        &mut alice,
        &mut Adversary::new(kind, seed),
        &w,
        &params,
        rounds,
    )
    .unwrap();
    (alice, t)
}

/// Distance from `[lo, hi]` to the nearest multiple of `1/q`.
fn lattice_gap(lo: &Q, hi: &Q, q: u64) -> Q {
    let qq = Q::from_integer(BigInt::from(q));
    let below = (lo * &qq).floor() / &qq;
    let above = (lo * &qq).ceil() / &qq;
    if &above <= hi {
        return Q::zero();
    }
    (lo - below).min(above - hi)
}

/// Independent check of the badness inequality on a box: it holds for `q`
/// exactly when some axis keeps `gap_i · q^{1+w_i} ≥ c`, compared as
/// `gap^v · q^u ≥ c^v` for `1 + w_i = u/v`.
fn brute_force_holds(cuboid: &Cuboid, c: &Q, q_max: u64, weights: &[Q]) -> bool {
    (1..=q_max).all(|qd| {
        weights.iter().enumerate().any(|(i, w)| {
            let e = Q::one() + w;
            let (u, v) = (e.numer().to_u32().unwrap(), e.denom().to_u32().unwrap());
            let gap = lattice_gap(&cuboid.lo[i], &cuboid.hi[i], qd);
            let lhs = Pow::pow(&gap, v) * Q::from_integer(BigInt::from(qd).pow(u));
            lhs >= Pow::pow(c, v)
        })
    })
}

#[test]
fn opening_constant_matches_hand_value() {
    // r = 1, a = b = t1 = 1, margin 1/2: (1/2 − 1/4)·2^{-2}·2^{-4}·1/2
    let (alice, _) = run(vec![qi(1)], 1, 3, BobKind::Center, 0);
    assert_eq!(alice.components()[0].c_prime, Some(q(1, 512)));
    // r = (1/2, 1/2), a = b = t1 = 2: (1/2 − 1/8)·2^{-3}·2^{-6}·1/2
    let (alice, _) = run(vec![q(1, 2), q(1, 2)], 2, 2, BobKind::Center, 0);
    assert_eq!(alice.components()[0].c_prime, Some(q(3, 8192)));
}

#[test]
fn certified_ranges_tile_one_to_qmax() {
    for (r, a, rounds) in [
        (vec![qi(1)], 1, 10),
        (vec![q(1, 2), q(1, 2)], 2, 5),
        (vec![q(1, 3), q(2, 3)], 3, 4),
    ] {
        let (alice, _) = run(r, a, rounds, BobKind::SeededRandom, 5);
        let mut next = 1;
        for cert in alice.certificates() {
            if cert.q_hi < cert.q_lo {
                continue;
            }
            assert_eq!(cert.q_lo, next, "round {}", cert.round);
            next = cert.q_hi + 1;
        }
        let q_max = 1u64 << ((rounds as u64 - 1) * 2 * a as u64);
        assert_eq!(next - 1, q_max);
        assert_eq!(alice.components()[0].q_max, q_max);
    }
}

#[test]
fn replies_keep_their_distance_from_the_hyperplane() {
    let mut seen = 0;
    for kind in BobKind::ALL {
        for seed in 0..4 {
            let (alice, t) = run(vec![q(1, 2), q(1, 2)], 2, 5, kind, seed);
            let sp = alice.params().unwrap();
            for cert in alice.certificates() {
                let Some(h) = &cert.hyperplane else { continue };
                let bob = t
                    .moves
                    .iter()
                    .find(|m| m.player != Player::Alice && m.round == cert.round)
                    .unwrap();
                let reply = t
                    .moves
                    .iter()
                    .find(|m| m.player == Player::Alice && m.round == cert.round)
                    .unwrap();
                let need: Q = sp
                    .avoidance_widths(&bob.bx.sides)
                    .iter()
                    .zip(h.normal.iter())
                    .map(|(w, n)| w * n.abs())
                    .sum();
                assert!(
                    min_abs_affine_over_box(h, &reply.bx.cuboid()) >= need,
                    "{kind} seed {seed} round {}",
                    cert.round
                );
                seen += 1;
            }
            assert!(alice.certificates().iter().all(|c| c.verified));
        }
    }
    assert!(seen > 0, "no round needed a hyperplane");
}

#[test]
fn outcomes_pass_the_brute_force_oracle() {
    for (r, a, rounds) in [(vec![qi(1)], 1, 8), (vec![q(1, 2), q(1, 2)], 2, 4)] {
        for kind in BobKind::ALL {
            let (alice, t) = run(r.clone(), a, rounds, kind, 11);
            let report = &alice.components()[0];
            let c = report.c_prime.clone().unwrap();
            assert!(
                brute_force_holds(&t.outcome().cuboid(), &c, report.q_max, &r),
                "{kind}"
            );
        }
    }
}

#[test]
fn brute_force_oracle_catches_a_rational_box() {
    let bx = Cuboid::new(vec![q(1, 3) - q(1, 1000)], vec![q(1, 3) + q(1, 1000)]);
    assert!(!brute_force_holds(&bx, &q(1, 512), 3, &[qi(1)]));
    assert!(!verify_box(
        &bx,
        &q(1, 512),
        3,
        &AffineDiagonalMap::identity(1),
        &[qi(1)]
    )
    .unwrap()
    .holds());
}

fn small_box() -> impl Strategy<Value = Cuboid> {
    prop::collection::vec((0i64..256, 1i64..8), 1..=2).prop_map(|axes| {
        let lo: Vec<Q> = axes.iter().map(|&(l, _)| q(l, 256)).collect();
        let hi: Vec<Q> = axes.iter().map(|&(l, w)| q(l, 256) + q(w, 4096)).collect();
        Cuboid::new(lo, hi)
    })
}

fn verify_weights(n: usize) -> Vec<Q> {
    vec![q(1, n as i64); n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verify_box_is_monotone(bx in small_box(), c1 in 1i64..64, dc in 0i64..64, q1 in 1u64..40, dq in 0u64..40) {
        let n = bx.dim();
        let f = AffineDiagonalMap::identity(n);
        let w = verify_weights(n);
        let (small_c, big_c) = (q(c1, 4096), q(c1 + dc, 4096));
        let strong = verify_box(&bx, &big_c, q1 + dq, &f, &w).unwrap().holds();
        if strong {
            prop_assert!(verify_box(&bx, &small_c, q1, &f, &w).unwrap().holds());
            let half = Cuboid::new(bx.lo.clone(), bx.lo.iter().zip(&bx.hi).map(|(l, h)| (l + h) / qi(2)).collect());
            prop_assert!(verify_box(&half, &big_c, q1 + dq, &f, &w).unwrap().holds());
        }
        prop_assert_eq!(strong, brute_force_holds(&bx, &big_c, q1 + dq, &w));
    }

    #[test]
    fn badness_score_is_consistent(num in 1i64..10_000, q_max in 1u64..200) {
        let x = RationalVector::new(vec![q(num, 10_007)]);
        let w = [qi(1)];
        let score = badness_score(&x, q_max, &w).unwrap();
        let f = AffineDiagonalMap::identity(1);
        let point = Cuboid::point(&x);
        prop_assert!(verify_box(&point, &score.certified, q_max, &f, &w).unwrap().holds());
        if !score.certified.is_one() {
            let above = &score.certified + pow2(-40);
            prop_assert!(!verify_box(&point, &above, q_max, &f, &w).unwrap().holds());
        }
        // for a single weight-1 coordinate the estimate is min q·|qx − p|
        let brute = (1..=q_max)
            .map(|qd| {
                let y = (num as f64) * qd as f64 / 10_007.0;
                qd as f64 * (y - y.round()).abs()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!((score.estimate - brute).abs() < 1e-9);
        let certified = score.certified.to_f64().unwrap();
        prop_assert!(certified <= score.estimate + 1e-12 && score.estimate.min(1.0) < certified + 1e-11);
    }
}
