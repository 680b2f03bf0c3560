use num_bigint::BigInt;
use proptest::prelude::*;

use msg_core::error::Error;
use msg_core::game::Player;
use msg_core::rational::{q, Q};
use msg_core::ternary::{
    all_words, count_members, is_singleton, sym_alice, sym_contains, sym_cover_count, sym_play,
    RepeatSymBob, SeededSymBob, SymBall, SymBob, Tail, TernaryWord,
};

fn word() -> impl Strategy<Value = TernaryWord> {
    (prop::collection::vec(1u8..=2, 0..8), any::<bool>()).prop_map(|(digits, zero)| {
        if zero {
            let mut d = digits;
            d.push(0);
            TernaryWord::eventually_zero(&d).unwrap()
        } else {
            TernaryWord::new(
                digits
                    .into_iter()
                    .chain([1, 2, 1, 2, 1, 2, 1, 2, 1, 2])
                    .collect(),
                Tail::Unspecified,
            )
            .unwrap()
        }
    })
}

fn radius() -> impl Strategy<Value = Q> {
    (1i64..=27, 0u32..4).prop_map(|(n, j)| q(n, 27 * 3i64.pow(j)))
}

fn eventually_zero_word() -> impl Strategy<Value = TernaryWord> {
    prop::collection::vec(1u8..=2, 0..6).prop_map(|mut d| {
        d.push(0);
        TernaryWord::eventually_zero(&d).unwrap()
    })
}

proptest! {
    #[test]
    fn alice_reply_is_a_contained_singleton(center in word(), r in radius()) {
        let ball = SymBall::new(center, r.clone()).unwrap();
        let reply = sym_alice(&ball).unwrap();
        prop_assert_eq!(&reply.radius, &(r / Q::from_integer(BigInt::from(27))));
        prop_assert!(sym_contains(&ball, &reply).unwrap());
        prop_assert!(reply.center.contains_zero());
        prop_assert!(is_singleton(&reply));
    }

    #[test]
    fn metric_is_an_ultrametric(x in eventually_zero_word(), y in eventually_zero_word(), z in eventually_zero_word()) {
        let (xy, yz, xz) = (x.distance(&y).unwrap(), y.distance(&z).unwrap(), x.distance(&z).unwrap());
        prop_assert_eq!(xy.clone(), y.distance(&x).unwrap());
        prop_assert!(xz <= xy.clone().max(yz));
        prop_assert_eq!(xy == Q::from_integer(0.into()), x == y);
    }

    #[test]
    fn membership_counts_match_the_metric(center in eventually_zero_word(), r in radius(), extra in 1usize..3) {
        let ball = SymBall::new(center.clone(), r.clone()).unwrap();
        let len = ball.level + extra;
        // an eventually-zero word of length `len` is a member iff it is within r of the center
        let brute = all_words(len)
            .into_iter()
            .filter(|w| w.contains(&0))
            .filter(|w| TernaryWord::eventually_zero(w).unwrap().distance(&center).unwrap() < r)
            .count() as u64;
        let members_with_zero = count_members(&ball, len) - count_members_without_zero(&ball, len);
        prop_assert_eq!(members_with_zero, brute);
    }
}

fn count_members_without_zero(ball: &SymBall, len: usize) -> u64 {
    all_words(len)
        .into_iter()
        .filter(|w| !w.contains(&0) && ball.contains_prefix(w))
        .count() as u64
}

#[test]
fn absorbing_words_against_enumeration() {
    for len in 0..=8u32 {
        let brute = (0..3u64.pow(len))
            .filter(|&code| {
                let digits: Vec<u64> = (0..len).map(|i| code / 3u64.pow(i) % 3).collect();
                digits.windows(2).all(|p| p[0] != 0 || p[1] == 0)
            })
            .count() as u64;
        assert_eq!(all_words(len as usize).len() as u64, brute);
        assert_eq!(sym_cover_count(len), brute);
    }
}

#[test]
fn every_play_ends_in_a_word_with_zero() {
    for seed in 0..50 {
        for beta in [q(1, 2), q(1, 3), q(8, 9), q(1, 100)] {
            let report = sym_play(
                &mut SeededSymBob {
                    seed,
                    beta: beta.clone(),
                },
                &beta,
                6,
            )
            .unwrap();
            assert!(report.all_singletons(), "seed {seed}");
            assert!(report.outcome_has_zero(), "seed {seed}");
        }
    }
    let opening = SymBall::new(
        TernaryWord::new(vec![1; 12], Tail::Unspecified).unwrap(),
        q(5, 2),
    )
    .unwrap();
    let report = sym_play(
        &mut RepeatSymBob {
            opening,
            beta: q(1, 2),
        },
        &q(1, 2),
        4,
    )
    .unwrap();
    assert!(report.outcome_has_zero());
}

struct GreedyBob;

impl SymBob for GreedyBob {
    fn open(&mut self) -> SymBall {
        SymBall::new(TernaryWord::eventually_zero(&[1, 2, 0]).unwrap(), q(1, 3)).unwrap()
    }

    fn respond(&mut self, alice: &SymBall, _round: usize) -> SymBall {
        SymBall::new(alice.center.clone(), alice.radius.clone()).unwrap()
    }
}

#[test]
fn bob_must_shrink_by_beta() {
    match sym_play(&mut GreedyBob, &q(1, 2), 3) {
        Err(Error::IllegalMove {
            player: Player::Bob,
            round: 2,
        }) => {}
        other => panic!("expected Bob's round-2 move to be rejected, got {other:?}"),
    }
}
