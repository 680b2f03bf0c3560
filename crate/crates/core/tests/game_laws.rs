use num_bigint::BigInt;
use proptest::prelude::*;

use msg_core::adversary::{Adversary, BobKind};
use msg_core::game::{
    box_of, interleave_strategies, play, product_strategy, GameParams, GameWeights, Player,
    Strategy as AliceStrategy,
};
use msg_core::rational::{pow2_q, q, qi, RationalVector, Q};

fn weights() -> impl proptest::strategy::Strategy<Value = GameWeights> {
    prop::collection::vec(1i64..6, 1..=3).prop_map(|parts| {
        let total: i64 = parts.iter().sum();
        GameWeights::new(parts.iter().map(|&p| q(p, total)).collect()).unwrap()
    })
}

fn kind() -> impl proptest::strategy::Strategy<Value = BobKind> {
    prop::sample::select(BobKind::ALL.to_vec())
}

fn lattice_params(w: &GameWeights, a: i64, b: i64, t1: i64) -> GameParams {
    let l = w.lattice() as i64;
    GameParams::new(qi(a * l), qi(b * l), qi(t1 * l), w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn volume_and_diameter_laws(w in weights(), k in 0i64..6, c in prop::collection::vec(0i64..=8, 3)) {
        let t = qi(k * w.lattice() as i64);
        let center = RationalVector::new(c[..w.dim()].iter().map(|&x| q(x, 8)).collect());
        let bx = box_of(center, &t, &w).unwrap();
        let n = Q::from_integer(BigInt::from(w.dim()));
        prop_assert_eq!(bx.volume(), pow2_q(&-((n + Q::from_integer(1.into())) * &t)).unwrap());
        let sigma = Q::from_integer(1.into()) + w.min_r();
        prop_assert_eq!(bx.diameter(), pow2_q(&-(sigma * &t)).unwrap());
    }

    #[test]
    fn every_accepted_move_nests(
        w in weights(), alice_kind in kind(), bob_kind in kind(), seed in 0u64..1000,
        a in 1i64..3, b in 1i64..3, rounds in 0usize..6,
    ) {
        let params = lattice_params(&w, a, b, 1);
        let mut alice = Adversary::new(alice_kind, seed);
        let mut bob = Adversary::new(bob_kind, seed + 1);
        let t = play(&mut alice, &mut bob, &w, &params, rounds).unwrap();
        t.validate().unwrap();
        prop_assert_eq!(t.moves.len(), if rounds == 0 { 1 } else { 2 * rounds });
        for pair in t.moves.windows(2) {
            prop_assert!(pair[0].bx.contains(&pair[1].bx));
            let step = if pair[1].player == Player::Alice { &params.a } else { &params.b };
            prop_assert_eq!(&pair[1].bx.t, &(&pair[0].bx.t + step));
        }
    }

    #[test]
    fn product_projections_are_factor_transcripts(seed in 0u64..500, split in 0usize..3) {
        let w = GameWeights::new(vec![q(1, 2), q(1, 3), q(1, 6)]).unwrap();
        let params = lattice_params(&w, 1, 1, 1);
        let coords: Vec<usize> = match split { 0 => vec![0], 1 => vec![1, 2], _ => vec![0, 2] };
        let mut composite = product_strategy(
            3,
            &coords,
            Box::new(Adversary::new(BobKind::SeededRandom, seed)),
            Box::new(Adversary::new(BobKind::SeededRandom, seed + 7)),
        );
        let t = play(&mut composite, &mut Adversary::new(BobKind::SeededRandom, seed), &w, &params, 3).unwrap();
        let rest: Vec<usize> = (0..3).filter(|i| !coords.contains(i)).collect();
        let (inside, outside) = composite.factor_histories();
        prop_assert_eq!(inside.len(), t.moves.len());
        prop_assert_eq!(outside.len(), t.moves.len());
        for (m, (fi, fo)) in t.moves.iter().zip(inside.iter().zip(outside)) {
            prop_assert_eq!(&m.bx.project(&coords, &w.restrict(&coords)), &fi.bx);
            prop_assert_eq!(&m.bx.project(&rest, &w.restrict(&rest)), &fo.bx);
        }
    }

    #[test]
    fn interleaved_views_are_legal_games(m in 1usize..=4, rounds in 1usize..40, seed in 0u64..500) {
        let w = GameWeights::equal(2);
        let params = lattice_params(&w, 1, 1, 1);
        let parts: Vec<Box<dyn AliceStrategy>> = (0..m)
            .map(|i| Box::new(Adversary::new(BobKind::SeededRandom, seed * 10 + i as u64)) as Box<dyn AliceStrategy>)
            .collect();
        let mut alice = interleave_strategies(parts);
        let t = play(&mut alice, &mut Adversary::new(BobKind::SeededRandom, seed), &w, &params, rounds).unwrap();
        for view in alice.views() {
            let Some(sub) = view.transcript(&w) else { continue };
            let i = view.component as u32;
            let expected = Q::from_integer(BigInt::from(1u64 << i)) * (&params.a + &params.b) - &params.a;
            prop_assert_eq!(&sub.params.b, &expected);
            sub.validate().unwrap();
            prop_assert!(view.last_box().unwrap().contains(t.outcome()));
        }
    }
}

#[test]
fn moves_alternate_after_the_opening() {
    let w = GameWeights::equal(2);
    let params = lattice_params(&w, 1, 1, 1);
    let t = play(
        &mut Adversary::new(BobKind::Center, 0),
        &mut Adversary::new(BobKind::RationalSeeker, 0),
        &w,
        &params,
        3,
    )
    .unwrap();
    let players: Vec<Player> = t.moves.iter().map(|m| m.player).collect();
    use Player::*;
    assert_eq!(players, vec![Init, Alice, Bob, Alice, Bob, Alice]);
    let rounds: Vec<usize> = t.moves.iter().map(|m| m.round).collect();
    assert_eq!(rounds, vec![1, 1, 2, 2, 3, 3]);
}
