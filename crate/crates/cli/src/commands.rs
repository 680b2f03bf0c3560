use std::io::Write;

use msg_core::adversary::Adversary;
use msg_core::bad::{badness_score, derive_params, make_bad_strategy, verify_box, Verdict};
use msg_core::dimension::{
    check_treelike, grow_strategy_tree, urbanski_extrapolated, urbanski_series, wd_bound,
    DensityProfile, MeasureModel,
};
use msg_core::game::{play as play_game, CenteredDummy, GameParams, GameWeights, Strategy};
use msg_core::geometry::AffineDiagonalMap;
use msg_core::intersect::{
    component_subsets, embed_weights, intersection_strategy, verify_components, SubsetList,
    SubsetSpec,
};
use msg_core::rational::{format_rational, Q};
use msg_core::ternary::{sym_play, SeededSymBob};
use msg_core::transcript::{emit_transcript, replay_transcript};
use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::{
    sink, verify_input, Failure, GameArgs, IntersectArgs, MapArgs, Outcome, ParamsArgs, PlayArgs,
    ReplayArgs, TernaryArgs, TreeAlice, TreeArgs, VerifyArgs,
};

fn setup(g: &GameArgs) -> Result<(GameWeights, GameParams), Failure> {
    let w = GameWeights::new(g.weights.0.clone())?;
    let b = g.b.clone().unwrap_or_else(|| g.a.clone());
    let t1 = g.t1.clone().unwrap_or_else(|| g.a.clone());
    let params = GameParams::new(g.a.clone(), b, t1, &w)?;
    Ok((w, params))
}

fn affine_map(m: &MapArgs, n: usize) -> Result<AffineDiagonalMap, Failure> {
    let diagonal = m
        .f_diag
        .as_ref()
        .map_or_else(|| vec![Q::one(); n], |d| d.0.clone());
    let translation = m
        .f_shift
        .as_ref()
        .map_or_else(|| vec![Q::from_integer(0.into()); n], |s| s.0.clone());
    if diagonal.len() != n || translation.len() != n {
        return Err(Failure::Config(format!(
            "f needs {n} diagonal and {n} translation entries"
        )));
    }
    Ok(AffineDiagonalMap::new(diagonal, translation)?)
}

fn join(xs: &[Q]) -> String {
    xs.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn witness(p: &[BigInt], q: u64) -> String {
    p.iter()
        .map(|p| format!("{p}/{q}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn play(args: &PlayArgs) -> Outcome {
    let (w, params) = setup(&args.game)?;
    let f = affine_map(&args.map, w.dim())?;
    let mut alice =
        make_bad_strategy(&w, f.clone(), args.game.a.clone(), args.game.margin.clone())?;
    let mut bob = Adversary::new(args.run.bob, args.run.seed).with_map(f.clone());
    let t = play_game(&mut alice, &mut bob, &w, &params, args.run.rounds)?;
    let mut out = sink(args.run.out.as_ref())?;
    emit_transcript(&t, &mut out)?;
    out.flush()?;

    let report = &alice.components()[0];
    if !report.certificates_ok {
        return Err(Failure::Verification(
            "a round certificate did not verify".into(),
        ));
    }
    let Some(c) = &report.c_prime else {
        eprintln!(
            "{} rounds played; Bob never reached t0, nothing certified",
            args.run.rounds
        );
        return Ok(());
    };
    match verify_box(
        &t.outcome().cuboid(),
        c,
        report.q_max,
        &f,
        &report.verify_weights,
    )? {
        Verdict::Holds => {
            eprintln!(
                "{} rounds vs {}: outcome verified with c′ = {} for q ≤ {}",
                args.run.rounds,
                args.run.bob,
                format_rational(c),
                report.q_max
            );
            Ok(())
        }
        Verdict::Violation { p, q } => Err(Failure::Verification(format!(
            "outcome comes too close to {}",
            witness(&p, q)
        ))),
    }
}

pub(crate) fn verify(args: &VerifyArgs) -> Outcome {
    let input = verify_input::load(&args.input)?;
    let n = input.cuboid.dim();
    let weights = args
        .weights
        .as_ref()
        .map(|w| w.0.clone())
        .or(input.weights)
        .unwrap_or_else(|| {
            let share = Q::new(BigInt::one(), BigInt::from(n));
            vec![share; n]
        });
    if weights.len() != n || weights.iter().any(Signed::is_negative) {
        return Err(Failure::Config(format!("need {n} nonnegative weights")));
    }
    let qmax = args
        .qmax
        .or(input.qmax)
        .ok_or_else(|| Failure::Config("no qmax given".into()))?;
    let f = if args.map.f_diag.is_some() || args.map.f_shift.is_some() {
        affine_map(&args.map, n)?
    } else {
        input.f.unwrap_or_else(|| AffineDiagonalMap::identity(n))
    };
    match verify_box(&input.cuboid, &input.c, qmax, &f, &weights)? {
        Verdict::Holds => {
            println!("holds: c = {}, q ≤ {qmax}", format_rational(&input.c));
            if input.is_point && f.is_identity() {
                let score = badness_score(&input.cuboid.lo.clone().into(), qmax, &weights)?;
                println!(
                    "badness estimate {:.6e}, certified {}",
                    score.estimate,
                    format_rational(&score.certified)
                );
            }
            Ok(())
        }
        Verdict::Violation { p, q } => {
            println!("violation: witness {} (q = {q})", witness(&p, q));
            Err(Failure::Verification(format!(
                "badness inequality fails at q = {q}"
            )))
        }
    }
}

pub(crate) fn tree(args: &TreeArgs) -> Outcome {
    let (w, params) = setup(&args.game)?;
    let alice: Box<dyn Strategy> = match args.alice {
        TreeAlice::Bad => Box::new(make_bad_strategy(
            &w,
            AffineDiagonalMap::identity(w.dim()),
            args.game.a.clone(),
            args.game.margin.clone(),
        )?),
        TreeAlice::Dummy => Box::new(CenteredDummy::new()),
    };
    let grown = grow_strategy_tree(alice.as_ref(), &w, &params, args.depth)?;
    let tree = &grown.tree;
    let report = check_treelike(tree, &MeasureModel::lebesgue(&w));
    let profile = DensityProfile::of(tree);
    let d_mu = w.dim() as f64;
    let series = urbanski_series(&profile, d_mu);

    let mut out = sink(args.out.as_ref())?;
    writeln!(out, "k,count,d_k,delta_k,estimate")?;
    for (k, level) in tree.levels.iter().enumerate() {
        let delta = profile
            .deltas
            .get(k)
            .map(format_rational)
            .unwrap_or_default();
        let estimate = k
            .checked_sub(1)
            .map(|i| format!("{:.9}", series[i]))
            .unwrap_or_default();
        writeln!(
            out,
            "{k},{},{},{delta},{estimate}",
            level.len(),
            format_rational(&profile.diameters[k])
        )?;
    }
    out.flush()?;

    for c in &report.conditions {
        match &c.witness {
            None => eprintln!("{}: pass", c.name),
            Some(wit) => eprintln!("{}: FAIL at {wit}", c.name),
        }
    }
    if args.depth >= 1 {
        let limit = urbanski_extrapolated(&profile.extend(args.extend.max(args.depth)), d_mu);
        let density = profile.deltas.iter().min().unwrap();
        let sigma = Q::one() + w.min_r();
        let bound = wd_bound(&params.a, &params.b, density, &sigma, d_mu);
        eprintln!("extrapolated estimate {limit:.9}; lower bound {bound:.9}");
    }
    if !report.all_pass() {
        return Err(Failure::Verification(
            "the strategy tree is not tree-like".into(),
        ));
    }
    Ok(())
}

pub(crate) fn intersect(args: &IntersectArgs) -> Outcome {
    let (w, params) = setup(&args.game)?;
    let n = w.dim();
    let list: SubsetList = args.subsets.parse()?;
    let specs = list
        .0
        .iter()
        .map(|s| SubsetSpec::parse(s, n))
        .collect::<msg_core::Result<Vec<_>>>()?;
    let mut alice = intersection_strategy(&w, &specs, &args.game.a, &args.game.margin)?;
    let mut bob = Adversary::new(args.run.bob, args.run.seed);
    let t = play_game(&mut alice, &mut bob, &w, &params, args.run.rounds)?;
    if let Some(path) = &args.run.out {
        let mut out = sink(Some(path))?;
        emit_transcript(&t, &mut out)?;
        out.flush()?;
    }

    let reports = alice.components();
    let verdicts = verify_components(t.outcome(), &reports)?;
    println!("component,subset,s,kappa,c_prime,q_max,verified");
    let mut failed = Vec::new();
    for (i, (spec, v)) in component_subsets(n, &specs)
        .iter()
        .zip(&verdicts)
        .enumerate()
    {
        let embedded = embed_weights(&w, spec)?;
        let c = v
            .report
            .c_prime
            .as_ref()
            .map(format_rational)
            .unwrap_or_else(|| "-".into());
        let verified = match v.holds {
            Some(true) if v.report.certificates_ok => "yes",
            None => "n/a",
            _ => {
                failed.push(i + 1);
                "no"
            }
        };
        println!(
            "{},\"{spec}\",{},{},{c},{},{verified}",
            i + 1,
            join(embedded.s.r()),
            format_rational(&embedded.kappa),
            v.report.q_max
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "components {failed:?} failed verification"
        )))
    }
}

pub(crate) fn ternary_demo(args: &TernaryArgs) -> Outcome {
    if args.beta_exp == 0 {
        return Err(Failure::Config("beta exponent must be at least 1".into()));
    }
    let beta = Q::new(BigInt::one(), BigInt::from(3).pow(args.beta_exp));
    let report = sym_play(
        &mut SeededSymBob {
            seed: args.seed,
            beta: beta.clone(),
        },
        &beta,
        args.rounds,
    )?;
    for r in &report.rounds {
        println!(
            "round {}: bob {} r={} | alice {} r={} | singleton {}",
            r.round,
            r.bob.center,
            format_rational(&r.bob.radius),
            r.alice.center,
            format_rational(&r.alice.radius),
            if r.singleton { "yes" } else { "no" }
        );
    }
    println!("outcome {}", report.outcome);
    if !report.all_singletons() || !report.outcome_has_zero() {
        return Err(Failure::Verification(
            "Alice's ball is not a single sequence containing 0".into(),
        ));
    }
    Ok(())
}

pub(crate) fn params(args: &ParamsArgs) -> Outcome {
    let (w, params) = setup(&args.game)?;
    let f = affine_map(&args.map, w.dim())?;
    make_bad_strategy(&w, f.clone(), params.a.clone(), args.game.margin.clone())?;
    let sp = derive_params(&w, &f, &params.a, &params.b, &params.t1, &args.game.margin)?;
    println!("lattice: {}", format_rational(&w.lattice_q()));
    println!("a: {}", format_rational(&params.a));
    println!("b: {}", format_rational(&params.b));
    println!("t1: {}", format_rational(&params.t1));
    println!("kappa: {}", format_rational(&sp.kappa));
    println!("target weights: {}", join(&sp.target_weights()));
    println!("t0: {}", format_rational(&sp.t0));
    println!("c_prime: {}", format_rational(&sp.c_prime));
    println!(
        "q_max after {} rounds: {}",
        args.rounds,
        sp.certified_q_max(args.rounds)?
    );
    Ok(())
}

pub(crate) fn replay(args: &ReplayArgs) -> Outcome {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let t = replay_transcript(std::io::BufReader::new(file))?;
    let unverified: Vec<usize> = t
        .alice_boxes()
        .filter(|m| m.note.as_ref().and_then(|n| n.verified) == Some(false))
        .map(|m| m.round)
        .collect();
    println!(
        "{} moves legal, outcome at t = {}",
        t.moves.len(),
        format_rational(&t.outcome().t)
    );
    if !unverified.is_empty() {
        return Err(Failure::Verification(format!(
            "rounds {unverified:?} carry failed certificates"
        )));
    }
    Ok(())
}
