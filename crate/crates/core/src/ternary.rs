//! Schmidt's game on ternary sequences in which `0` is absorbing (a `0` is
//! only ever followed by `0`), with the metric `d(x, y) = 3^{-k}`, `k` the
//! first (1-based) position where `x` and `y` differ.
//!
//! Alice can force the outcome into the countable set of eventually-zero
//! sequences, although the whole space has dimension `log 2/log 3`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::adversary::round_rng;
use crate::error::{Error, Result};
use crate::game::Player;
use crate::rational::{format_rational, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    /// The word continues with zeros forever.
    Zeros,
    /// The word continues in some way not recorded.
    Unspecified,
}

/// A sequence given by an explicit prefix and its tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryWord {
    prefix: Vec<u8>,
    tail: Tail,
}

impl TernaryWord {
    pub fn new(prefix: Vec<u8>, tail: Tail) -> Result<Self> {
        if let Some(d) = prefix.iter().find(|&&d| d > 2) {
            return Err(Error::InvalidParams(format!("digit {d} is not ternary")));
        }
        if let Some(z) = prefix.iter().position(|&d| d == 0) {
            if prefix[z..].iter().any(|&d| d != 0) {
                return Err(Error::InvalidParams("a nonzero digit follows a 0".into()));
            }
            return Ok(TernaryWord {
                prefix: prefix[..z].to_vec(),
                tail: Tail::Zeros,
            });
        }
        Ok(TernaryWord { prefix, tail })
    }

    /// The word `digits` followed by zeros.
    pub fn eventually_zero(digits: &[u8]) -> Result<Self> {
        Self::new(digits.to_vec(), Tail::Zeros)
    }

    /// Digit at 1-based position `i`, if known.
    pub fn digit(&self, i: usize) -> Option<u8> {
        assert!(i >= 1);
        match self.prefix.get(i - 1) {
            Some(&d) => Some(d),
            None if self.tail == Tail::Zeros => Some(0),
            None => None,
        }
    }

    /// Whether the digit 0 occurs (the word lies in the countable set).
    pub fn contains_zero(&self) -> bool {
        self.tail == Tail::Zeros
    }

    /// First position where the words differ, `None` if they are equal;
    /// `Err` if that cannot be decided. Equal values name the same sequence,
    /// even with an unspecified tail.
    pub fn first_difference(&self, other: &TernaryWord) -> Result<Option<usize>> {
        if self == other {
            return Ok(None);
        }
        let known = self.prefix.len().max(other.prefix.len());
        for i in 1..=known + 1 {
            match (self.digit(i), other.digit(i)) {
                (Some(a), Some(b)) if a != b => return Ok(Some(i)),
                (Some(_), Some(_)) => {}
                _ => {
                    return Err(Error::InvalidParams(format!(
                        "words {self} and {other} undetermined at {i}"
                    )))
                }
            }
        }
        Ok(None)
    }

    pub fn distance(&self, other: &TernaryWord) -> Result<Q> {
        Ok(match self.first_difference(other)? {
            Some(k) => pow3(k).recip(),
            None => Q::zero(),
        })
    }

    /// The first `n` digits followed by zeros; `None` if some are unknown.
    pub fn truncate_to_zero(&self, n: usize) -> Option<TernaryWord> {
        let digits: Option<Vec<u8>> = (1..=n).map(|i| self.digit(i)).collect();
        TernaryWord::eventually_zero(&digits?).ok()
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.prefix {
            write!(f, "{d}")?;
        }
        f.write_str(match self.tail {
            Tail::Zeros => "0…",
            Tail::Unspecified => "…",
        })
    }
}

fn pow3(k: usize) -> Q {
    Q::from_integer(num_traits::pow(BigInt::from(3), k))
}

/// Open ball `{y : d(x, y) < r}`: for `3^{-(ℓ+1)} < r ≤ 3^{-ℓ}` these are
/// exactly the sequences agreeing with `x` in the first `ℓ` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymBall {
    pub center: TernaryWord,
    pub radius: Q,
    pub level: usize,
}

impl SymBall {
    pub fn new(center: TernaryWord, radius: Q) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidParams(format!(
                "radius {} is not positive",
                format_rational(&radius)
            )));
        }
        let level = level_of(&radius);
        Ok(SymBall {
            center,
            radius,
            level,
        })
    }

    /// Whether some sequence starting with `word` lies in the ball, decided
    /// from the metric: a first difference at `k` must have `3^{-k} < r`.
    pub fn contains_prefix(&self, word: &[u8]) -> bool {
        let k = word
            .iter()
            .enumerate()
            .find(|&(i, &d)| self.center.digit(i + 1) != Some(d))
            .map(|(i, _)| i + 1);
        k.is_none_or(|k| pow3(k).recip() < self.radius)
    }
}

/// `ℓ` with `3^{-(ℓ+1)} < r ≤ 3^{-ℓ}`, or 0 for `r > 1`.
pub fn level_of(r: &Q) -> usize {
    let mut level = 0;
    let mut p = Q::one();
    let third = Q::new(BigInt::one(), BigInt::from(3));
    while r <= &(&p * &third) {
        p *= &third;
        level += 1;
    }
    level
}

/// Schmidt containment `d(x′, x) + r′ ≤ r`.
pub fn sym_contains(outer: &SymBall, inner: &SymBall) -> Result<bool> {
    Ok(inner.center.distance(&outer.center)? + &inner.radius <= outer.radius)
}

/// Alice's contraction ratio.
pub fn sym_alpha() -> Q {
    Q::new(BigInt::one(), BigInt::from(27))
}

/// Alice's reply: the first `ℓ+1` digits of the center followed by zeros,
/// with radius `r/27`. For `r > 1` she just shrinks concentrically.
pub fn sym_alice(ball: &SymBall) -> Result<SymBall> {
    let radius = &ball.radius * sym_alpha();
    if ball.radius > Q::one() {
        return SymBall::new(ball.center.clone(), radius);
    }
    let z = ball
        .center
        .truncate_to_zero(ball.level + 1)
        .ok_or_else(|| {
            Error::InvalidParams(format!(
                "center {} unknown at digit {}",
                ball.center,
                ball.level + 1
            ))
        })?;
    SymBall::new(z, radius)
}

/// Number of absorbing words of length `len` in the ball, by depth-first
/// search over the prefix tree with pruning on the metric.
pub fn count_members(ball: &SymBall, len: usize) -> u64 {
    fn dfs(ball: &SymBall, word: &mut Vec<u8>, len: usize) -> u64 {
        if !ball.contains_prefix(word) {
            return 0;
        }
        if word.len() == len {
            return 1;
        }
        let digits: &[u8] = if word.last() == Some(&0) {
            &[0]
        } else {
            &[0, 1, 2]
        };
        let mut total = 0;
        for &d in digits {
            word.push(d);
            total += dfs(ball, word, len);
            word.pop();
        }
        total
    }
    dfs(ball, &mut Vec::new(), len)
}

/// The ball holds a single sequence: one extension survives one digit past
/// its level, so the level prefix contains an absorbing 0.
pub fn is_singleton(ball: &SymBall) -> bool {
    count_members(ball, ball.level + 1) == 1
}

/// Every absorbing word of length `len`, by plain enumeration of `{0,1,2}^len`.
pub fn all_words(len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for mut code in 0..3u64.pow(len as u32) {
        let word: Vec<u8> = (0..len)
            .map(|_| {
                let d = (code % 3) as u8;
                code /= 3;
                d
            })
            .collect();
        if TernaryWord::new(word.clone(), Tail::Unspecified).is_ok() {
            out.push(word);
        }
    }
    out
}

/// Number of level-`k` cylinders meeting the space: `2^{k+1} − 1`.
pub fn sym_cover_count(k: u32) -> u64 {
    assert!(k <= 40);
    (1u64 << (k + 1)) - 1
}

/// `log N_k / ((k+1) log 3)`, which tends to `log 2/log 3`.
pub fn sym_dimension_ratio(k: u32) -> f64 {
    (sym_cover_count(k) as f64).ln() / ((k + 1) as f64 * 3f64.ln())
}

pub trait SymBob {
    fn open(&mut self) -> SymBall;
    fn respond(&mut self, alice: &SymBall, round: usize) -> SymBall;
}

/// Opens at a random word and radius; afterwards proposes random perturbations
/// of Alice's center, keeping the center when a perturbation is illegal.
#[derive(Debug, Clone)]
pub struct SeededSymBob {
    pub seed: u64,
    pub beta: Q,
}

impl SeededSymBob {
    fn random_word(rng: &mut impl Rng, len: usize) -> TernaryWord {
        let stop = rng.gen_range(0..=len);
        let mut digits: Vec<u8> = (0..stop).map(|_| rng.gen_range(1..=2)).collect();
        if stop < len && rng.gen_bool(0.5) {
            digits.push(0);
            return TernaryWord::eventually_zero(&digits).unwrap();
        }
        digits.extend((stop..len).map(|_| rng.gen_range(1..=2u8)));
        TernaryWord::new(digits, Tail::Unspecified).unwrap()
    }
}

impl SymBob for SeededSymBob {
    fn open(&mut self) -> SymBall {
        let mut rng = round_rng(self.seed, 0);
        let radius = Q::new(
            BigInt::from(rng.gen_range(1..=27)),
            BigInt::from(27 * 3u32.pow(rng.gen_range(0..3))),
        );
        let level = level_of(&radius);
        SymBall::new(Self::random_word(&mut rng, level + 4), radius).unwrap()
    }

    fn respond(&mut self, alice: &SymBall, round: usize) -> SymBall {
        let mut rng = round_rng(self.seed, round);
        let radius = &alice.radius * &self.beta;
        let k = rng.gen_range(1..=alice.level + 5);
        let mut digits: Vec<u8> = (1..k).map(|i| alice.center.digit(i).unwrap()).collect();
        digits.push(rng.gen_range(0..=2));
        let candidate = TernaryWord::new(digits, Tail::Zeros)
            .ok()
            .map(|c| SymBall {
                level: level_of(&radius),
                center: c,
                radius: radius.clone(),
            })
            .filter(|b| sym_contains(alice, b).unwrap_or(false));
        candidate.unwrap_or_else(|| SymBall::new(alice.center.clone(), radius).unwrap())
    }
}

/// Replays Alice's ball with radius `β·r`.
#[derive(Debug, Clone)]
pub struct RepeatSymBob {
    pub opening: SymBall,
    pub beta: Q,
}

impl SymBob for RepeatSymBob {
    fn open(&mut self) -> SymBall {
        self.opening.clone()
    }

    fn respond(&mut self, alice: &SymBall, _round: usize) -> SymBall {
        SymBall::new(alice.center.clone(), &alice.radius * &self.beta).unwrap()
    }
}

#[derive(Debug, Clone)]
pub struct SymRound {
    pub round: usize,
    pub bob: SymBall,
    pub alice: SymBall,
    pub singleton: bool,
}

#[derive(Debug, Clone)]
pub struct SymReport {
    pub rounds: Vec<SymRound>,
    pub outcome: TernaryWord,
}

impl SymReport {
    pub fn all_singletons(&self) -> bool {
        self.rounds.iter().all(|r| r.singleton)
    }

    pub fn outcome_has_zero(&self) -> bool {
        self.outcome.contains_zero()
    }
}

/// Plays `rounds` rounds of the `(1/27, β)` game; every ball is checked for
/// Schmidt containment and Bob's radius must be exactly `β` times Alice's.
pub fn sym_play(bob: &mut dyn SymBob, beta: &Q, rounds: usize) -> Result<SymReport> {
    if !beta.is_positive() || beta >= &Q::one() {
        return Err(Error::InvalidParams(format!(
            "beta {} not in (0, 1)",
            format_rational(beta)
        )));
    }
    let mut bob_ball = bob.open();
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let alice = sym_alice(&bob_ball)?;
        if !sym_contains(&bob_ball, &alice)? {
            return Err(Error::IllegalMove {
                player: Player::Alice,
                round,
            });
        }
        let singleton = is_singleton(&alice);
        out.push(SymRound {
            round,
            bob: bob_ball,
            alice: alice.clone(),
            singleton,
        });
        if round == rounds {
            break;
        }
        let next = bob.respond(&alice, round + 1);
        let legal =
            next.radius == &alice.radius * beta && sym_contains(&alice, &next).unwrap_or(false);
        if !legal {
            return Err(Error::IllegalMove {
                player: Player::Bob,
                round: round + 1,
            });
        }
        bob_ball = next;
    }
    let outcome = out
        .last()
        .map(|r| r.alice.center.clone())
        .ok_or_else(|| Error::InvalidParams("no rounds".into()))?;
    Ok(SymReport {
        rounds: out,
        outcome,
    })
}
