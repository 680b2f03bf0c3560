use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::bad::params::{
    check_alice_step, derive_params, least_t0, reparam_kappa, small_volume, target_weights,
    StrategyParams,
};
use crate::bad::scan::{Mode, Target};
use crate::error::{Error, Result};
use crate::game::{
    Annotation, ComponentReport, GameBox, GameWeights, Move, Reply, SessionInit, Strategy,
};
use crate::geometry::{
    affine_hull, max_abs_affine_over_box, min_abs_affine_over_box, AffineDiagonalMap, AffineHull,
    HyperplaneExact,
};
use crate::rational::{format_rational, RationalVector, Q};

/// A rational point `p/q` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DangerousRational {
    pub p: Vec<BigInt>,
    pub q: u64,
}

impl DangerousRational {
    pub fn point(&self) -> RationalVector {
        let q = BigInt::from(self.q);
        RationalVector::new(
            self.p
                .iter()
                .map(|p| Q::new(p.clone(), q.clone()))
                .collect(),
        )
    }
}

/// What Alice proved in one round: every point of her box keeps the badness
/// inequality for all denominators in `q_lo..=q_hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundCertificate {
    pub round: usize,
    pub q_lo: u64,
    pub q_hi: u64,
    pub dangers: Vec<DangerousRational>,
    pub hyperplane: Option<HyperplaneExact>,
    pub small_volume: bool,
    pub verified: bool,
}

fn exponents(sp: &StrategyParams) -> Vec<Option<Q>> {
    sp.exponents().into_iter().map(Some).collect()
}

/// Rationals `p/q` (lowest terms, `q_lo ≤ q ≤ q_hi`) for which some `y` in
/// the box has `|y_i − f(p/q)_i| < c′/q^{1+s_i}` on every axis.
pub fn dangerous_rationals(
    bx: &GameBox,
    q_lo: u64,
    q_hi: u64,
    sp: &StrategyParams,
) -> Result<Vec<DangerousRational>> {
    let target = Target::new(&bx.cuboid(), &sp.f, &exponents(sp), &sp.c_prime);
    let hits = target.scan(q_lo, q_hi, Mode::AllReduced)?;
    Ok(hits
        .into_iter()
        .map(|h| DangerousRational { p: h.p, q: h.q })
        .collect())
}

/// A hyperplane through the images `f(p/q)` of all dangers; `None` when
/// there are none.
pub fn avoidance_hyperplane(
    dangers: &[DangerousRational],
    f: &AffineDiagonalMap,
) -> Result<Option<HyperplaneExact>> {
    if dangers.is_empty() {
        return Ok(None);
    }
    let images: Vec<RationalVector> = dangers.iter().map(|d| f.apply(&d.point())).collect();
    match affine_hull(&images)? {
        AffineHull::Proper { hyperplane, .. } => Ok(Some(hyperplane)),
        AffineHull::FullDimensional => Err(Error::FullDimensional),
    }
}

/// The box one step `a` inside `b_k` whose center is the allowed center
/// farthest from `h`, or the concentric box without a hyperplane.
pub fn avoiding_reply(
    b_k: &GameBox,
    h: Option<&HyperplaneExact>,
    sp: &StrategyParams,
) -> Result<GameBox> {
    let center = match h {
        Some(h) => max_abs_affine_over_box(h, &b_k.allowed_centers(&sp.a, &sp.w)?)?.1,
        None => b_k.center.clone(),
    };
    b_k.child_at(center, &sp.a, &sp.w)
}

/// Alice's reply to `B_k`: the box one step `a` later, placed at the corner of
/// the allowed centers farthest from the hyperplane through the dangerous
/// rationals of round `k` (centered if there are none). The reply is then
/// checked exactly over the round's denominators.
pub fn alice_bad_move(
    b_k: &GameBox,
    sp: &StrategyParams,
    k: usize,
) -> Result<(GameBox, RoundCertificate)> {
    let fail = |detail: String| Error::CertificateFailure { round: k, detail };
    let (q_lo, q_hi) = sp.round_range(k)?;
    let small = small_volume(&sp.w, &sp.j, &b_k.t, &sp.frontier_exponent(k));
    if !small {
        return Err(fail(format!(
            "simplex-lemma volume bound fails at t = {}",
            format_rational(&b_k.t)
        )));
    }
    let dangers = dangerous_rationals(b_k, q_lo, q_hi, sp)?;
    let hyperplane = avoidance_hyperplane(&dangers, &sp.f)?;
    let reply = avoiding_reply(b_k, hyperplane.as_ref(), sp)?;

    if let Some(h) = &hyperplane {
        let need: Q = sp
            .avoidance_widths(&b_k.sides)
            .iter()
            .zip(h.normal.iter())
            .map(|(w, n)| w * n.abs())
            .sum();
        let gap = min_abs_affine_over_box(h, &reply.cuboid());
        if gap < need {
            return Err(fail(format!(
                "reply keeps {} from the hyperplane, needs {}",
                format_rational(&gap),
                format_rational(&need)
            )));
        }
    }
    let target = Target::new(&reply.cuboid(), &sp.f, &exponents(sp), &sp.c_prime);
    if let Some(hit) = target.scan(q_lo, q_hi, Mode::First)?.into_iter().next() {
        return Err(fail(format!(
            "p = {:?}, q = {} comes too close",
            hit.p, hit.q
        )));
    }
    let cert = RoundCertificate {
        round: k,
        q_lo,
        q_hi,
        dangers,
        hyperplane,
        small_volume: small,
        verified: true,
    };
    Ok((reply, cert))
}

/// The avoidance strategy for `f(Bad)`: waits with centered moves until Bob's
/// box reaches time `t0`, then answers every round with [`alice_bad_move`].
#[derive(Clone)]
pub struct BadStrategy {
    f: AffineDiagonalMap,
    a: Q,
    margin: Q,
    state: Option<SessionState>,
    certificates: Vec<RoundCertificate>,
}

#[derive(Clone)]
struct SessionState {
    w: GameWeights,
    b: Q,
    t0: Q,
    sp: Option<StrategyParams>,
    round: usize,
}

/// Validates `a` against the weights and builds the strategy.
pub fn make_bad_strategy(
    w: &GameWeights,
    f: AffineDiagonalMap,
    a: Q,
    margin: Q,
) -> Result<BadStrategy> {
    check_alice_step(w, &a)?;
    if f.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: f.dim(),
        });
    }
    if !margin.is_positive() || margin >= Q::one() {
        return Err(Error::InvalidParams(format!(
            "margin {} not in (0, 1)",
            format_rational(&margin)
        )));
    }
    Ok(BadStrategy {
        f,
        a,
        margin,
        state: None,
        certificates: Vec::new(),
    })
}

impl BadStrategy {
    pub fn certificates(&self) -> &[RoundCertificate] {
        &self.certificates
    }

    /// Parameters in force, once Bob's box has reached `t0`.
    pub fn params(&self) -> Option<&StrategyParams> {
        self.state.as_ref().and_then(|s| s.sp.as_ref())
    }

    fn start(&self, state: &SessionState, t1: &Q) -> Result<StrategyParams> {
        derive_params(&state.w, &self.f, &self.a, &state.b, t1, &self.margin)
    }
}

impl Strategy for BadStrategy {
    fn name(&self) -> String {
        "bad".into()
    }

    fn begin(&mut self, init: &SessionInit<'_>) -> Result<()> {
        let w = init.weights.clone();
        check_alice_step(&w, &self.a)?;
        if init.params.a != self.a {
            return Err(Error::InvalidParams(format!(
                "strategy built for a = {}, game has a = {}",
                format_rational(&self.a),
                format_rational(&init.params.a)
            )));
        }
        if !init.first_bob.is_unit_domain() {
            return Err(Error::InvalidParams(
                "the avoidance strategy plays on the unit-cube domain".into(),
            ));
        }
        let t0 = least_t0(&w, &self.f.jacobian);
        let mut state = SessionState {
            w,
            b: init.params.b.clone(),
            t0,
            sp: None,
            round: 0,
        };
        if init.first_bob.t >= state.t0 {
            state.sp = Some(self.start(&state, &init.first_bob.t)?);
        }
        self.state = Some(state);
        self.certificates.clear();
        Ok(())
    }

    fn respond(&mut self, opponent: &GameBox, _history: &[Move]) -> Result<Reply> {
        let state = self.state.as_mut().expect("begin() precedes respond()");
        if state.sp.is_none() {
            if opponent.t < state.t0 {
                return Ok(opponent.centered_child(&self.a, &state.w)?.into());
            }
            let sp = derive_params(
                &state.w,
                &self.f,
                &self.a,
                &state.b,
                &opponent.t,
                &self.margin,
            )?;
            state.sp = Some(sp);
        }
        state.round += 1;
        let result = alice_bad_move(opponent, state.sp.as_ref().unwrap(), state.round);
        let (bx, cert) = result?;
        let note = Annotation {
            danger_count: Some(cert.dangers.len()),
            hyperplane: cert.hyperplane.clone(),
            q_lo: Some(cert.q_lo),
            q_hi: Some(cert.q_hi),
            verified: Some(cert.verified),
            component: None,
        };
        self.certificates.push(cert);
        Ok(Reply {
            bx,
            note: Some(note),
        })
    }

    fn fork(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn components(&self) -> Vec<ComponentReport> {
        let Some(state) = &self.state else {
            return Vec::new();
        };
        let (c_prime, q_max) = match &state.sp {
            Some(sp) => (
                Some(sp.c_prime.clone()),
                sp.certified_q_max(state.round).unwrap_or(0),
            ),
            None => (None, 0),
        };
        let kappa = reparam_kappa(&state.w);
        vec![ComponentReport {
            label: "bad".into(),
            verify_weights: target_weights(&state.w),
            kappa,
            c_prime,
            q_max,
            f: self.f.clone(),
            rounds: state.round,
            certificates_ok: self.certificates.iter().all(|c| c.verified) && state.sp.is_some(),
        }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play, CenteredDummy, GameParams};
    use crate::rational::{q, qi};

    fn one_dim_params(c_prime: Q) -> StrategyParams {
        let w = GameWeights::new(vec![qi(1)]).unwrap();
        let mut sp = derive_params(
            &w,
            &AffineDiagonalMap::identity(1),
            &qi(1),
            &qi(1),
            &qi(1),
            &q(1, 2),
        )
        .unwrap();
        sp.c_prime = c_prime;
        sp
    }

    fn box_5_16(w: &GameWeights) -> GameBox {
        // [5/16, 7/16]: side 1/8 = 2^{-2t} at t = 3/2
        GameBox::exact(
            RationalVector::from_ratios(&[(3, 8)]),
            q(3, 2),
            w,
            vec![qi(1)],
        )
        .unwrap()
    }

    #[test]
    fn dangers_in_one_dimension() {
        let sp = one_dim_params(q(1, 64));
        let bx = box_5_16(&sp.w);
        let d = dangerous_rationals(&bx, 1, 3, &sp).unwrap();
        assert_eq!(
            d,
            vec![DangerousRational {
                p: vec![BigInt::from(1)],
                q: 3
            }]
        );

        let far = GameBox::exact(
            RationalVector::from_ratios(&[(1, 2)]),
            qi(4),
            &sp.w,
            vec![qi(1)],
        )
        .unwrap();
        assert!(dangerous_rationals(&far, 1, 1, &sp).unwrap().is_empty());

        let on_point = GameBox::exact(
            RationalVector::from_ratios(&[(2, 7)]),
            qi(10),
            &sp.w,
            vec![qi(1)],
        )
        .unwrap();
        let d = dangerous_rationals(&on_point, 7, 7, &one_dim_params(q(1, 1 << 40))).unwrap();
        assert_eq!(
            d,
            vec![DangerousRational {
                p: vec![BigInt::from(2)],
                q: 7
            }]
        );
    }

    #[test]
    fn hyperplane_cases() {
        let id = AffineDiagonalMap::identity(1);
        let third = DangerousRational {
            p: vec![BigInt::from(1)],
            q: 3,
        };
        let h = avoidance_hyperplane(&[third], &id).unwrap().unwrap();
        assert!(h.contains(&[q(1, 3)]));
        assert_eq!(avoidance_hyperplane(&[], &id).unwrap(), None);

        let planted: Vec<DangerousRational> = [(0, 0), (1, 0), (0, 1)]
            .iter()
            .map(|&(a, b)| DangerousRational {
                p: vec![BigInt::from(a), BigInt::from(b)],
                q: 1,
            })
            .collect();
        assert_eq!(
            avoidance_hyperplane(&planted, &AffineDiagonalMap::identity(2)),
            Err(Error::FullDimensional)
        );
    }

    #[test]
    fn corner_placement_in_one_dimension() {
        let sp = one_dim_params(q(1, 64));
        let bx = box_5_16(&sp.w);
        let dangers = dangerous_rationals(&bx, 1, 3, &sp).unwrap();
        let h = avoidance_hyperplane(&dangers, &sp.f).unwrap();
        let reply = avoiding_reply(&bx, h.as_ref(), &sp).unwrap();
        assert_eq!(reply.center, RationalVector::from_ratios(&[(27, 64)]));
        assert_eq!(reply.cuboid().lo, vec![q(13, 32)]);
        assert_eq!(reply.cuboid().hi, vec![q(7, 16)]);
        assert_eq!(reply.cuboid().axis_gap(0, &q(1, 3)), q(7, 96));
    }

    #[test]
    fn round_two_certificate_in_one_dimension() {
        // B_2 at t = 3 for t1 = a = b = 1; round 2 covers 1 ≤ q ≤ 4
        let sp = one_dim_params(q(1, 512));
        let bx = GameBox::exact(
            RationalVector::from_ratios(&[(21, 64)]),
            qi(3),
            &sp.w,
            vec![qi(1)],
        )
        .unwrap();
        let (reply, cert) = alice_bad_move(&bx, &sp, 2).unwrap();
        assert_eq!((cert.q_lo, cert.q_hi), (1, 4));
        assert_eq!(
            cert.dangers,
            vec![DangerousRational {
                p: vec![BigInt::from(1)],
                q: 3
            }]
        );
        // 1/3 sits near the top of B_2, so Alice escapes downward
        assert!(reply.cuboid().hi[0] < q(1, 3));
        assert!(cert.verified);
    }

    #[test]
    fn first_round_is_centered_and_empty() {
        let sp = one_dim_params(q(1, 64));
        let bx = box_5_16(&sp.w);
        let (reply, cert) = alice_bad_move(&bx, &sp, 1).unwrap();
        assert_eq!(reply.center, bx.center);
        assert!(cert.q_lo > cert.q_hi);
    }

    #[test]
    fn full_run_against_centered_bob() {
        let w = GameWeights::new(vec![qi(1)]).unwrap();
        let params = GameParams::new(qi(1), qi(1), qi(1), &w).unwrap();
        let mut alice =
            make_bad_strategy(&w, AffineDiagonalMap::identity(1), qi(1), q(1, 2)).unwrap();
        let t = play(&mut alice, &mut CenteredDummy::new(), &w, &params, 6).unwrap();
        assert_eq!(alice.certificates().len(), 6);
        assert!(alice.certificates().iter().all(|c| c.verified));
        let report = &alice.components()[0];
        assert_eq!(report.q_max, 1 << 10);
        let verdict = crate::bad::verify_box(
            &t.outcome().cuboid(),
            report.c_prime.as_ref().unwrap(),
            report.q_max,
            &report.f,
            &report.verify_weights,
        )
        .unwrap();
        assert!(verdict.holds());
    }

    #[test]
    fn waits_for_t0() {
        let w = GameWeights::equal(2);
        let f = AffineDiagonalMap::new(vec![q(1, 8), q(1, 8)], vec![qi(0), qi(0)]).unwrap();
        let params = GameParams::new(qi(2), qi(2), qi(2), &w).unwrap();
        let mut alice = make_bad_strategy(&w, f, qi(2), q(1, 2)).unwrap();
        play(&mut alice, &mut CenteredDummy::new(), &w, &params, 3).unwrap();
        // t0 = 4: B_1 at 2 is waited out, B_2 at 6 restarts the count
        assert_eq!(alice.certificates().len(), 2);
        assert_eq!(alice.params().unwrap().t1, qi(6));
    }

    #[test]
    fn off_lattice_step_is_rejected() {
        let w = GameWeights::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let err = make_bad_strategy(&w, AffineDiagonalMap::identity(2), qi(2), q(1, 2))
            .err()
            .unwrap();
        assert!(matches!(err, Error::BadAliceStep { .. }));
    }
}
