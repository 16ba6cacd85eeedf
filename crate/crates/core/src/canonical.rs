//! Canonical sequences `B⁽⁰⁾ ⪰ B⁽⁵⁾ ⪰ B⁽⁶⁾ ⪰ … ⪰ B` and their closed forms
//! in terms of anti-plurigenera.
//!
//! The level-`n` fraction set is `S⁽⁰⁾ = {1/k : k ≥ 2}` for `n = 0` and
//! `S⁽⁰⁾ ∪ {b/r in lowest terms : 5 ≤ r ≤ n}` for `n ≥ 5`. Unpacking moves
//! every pair to the two neighbours of its slope in that set.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::basket::{Basket, OrbifoldPair};
use crate::error::DomainError;
use crate::rational::Rational;
use crate::riemann_roch::{delta, r_max};

/// A canonical level: 0 or at least 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u32);

impl Level {
    pub const ZERO: Level = Level(0);

    pub fn new(n: u32) -> Result<Self, DomainError> {
        if n == 0 || n >= 5 {
            Ok(Level(n))
        } else {
            Err(DomainError::UndefinedLevel(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The level just below: `n − 1`, except that 5 drops to 0.
    pub fn previous(self) -> Option<Level> {
        match self.0 {
            0 => None,
            5 => Some(Level(0)),
            n => Some(Level(n - 1)),
        }
    }

    /// Whether the reduced fraction `b/r` lies in `S⁽ⁿ⁾`.
    pub fn contains(self, b: u32, r: u32) -> bool {
        let g = b.gcd(&r);
        let (b, r) = (b / g, r / g);
        b == 1 || (self.0 >= 5 && r <= self.0)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of a fraction relative to `S⁽ⁿ⁾`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FareyPosition {
    Member,
    /// Adjacent points `lower < frac < upper` of `S⁽ⁿ⁾`.
    Between { upper: Rational, lower: Rational },
}

/// A fraction `q/p` as machine integers, numerator first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    q: u64,
    p: u64,
}

impl Frac {
    fn mediant(self, other: Frac) -> Frac {
        Frac {
            q: self.q + other.q,
            p: self.p + other.p,
        }
    }

    /// Sign of `self − (b/r)`.
    fn cmp_to(self, b: u64, r: u64) -> std::cmp::Ordering {
        (self.q * r).cmp(&(b * self.p))
    }
}

/// Neighbours of `b/r` in `S⁽ⁿ⁾` by Stern–Brocot descent. The set is closed
/// under taking Stern–Brocot ancestors inside `(0, 1/2]`, so the descent can
/// stop at the first mediant outside it.
fn neighbours(b: u64, r: u64, level: Level) -> Option<(Frac, Frac)> {
    use std::cmp::Ordering::*;
    let (mut lo, mut hi) = (Frac { q: 0, p: 1 }, Frac { q: 1, p: 1 });
    loop {
        let m = lo.mediant(hi);
        let in_set = 2 * m.q <= m.p && level.contains(m.q as u32, m.p as u32);
        match m.cmp_to(b, r) {
            Equal if in_set => return None,
            _ if !in_set => return Some((hi, lo)),
            Less => lo = m,
            Greater => hi = m,
            Equal => unreachable!(),
        }
    }
}

/// Neighbours of `frac ∈ (0, 1/2]` in `S⁽ⁿ⁾`.
pub fn farey_neighbors(frac: &Rational, level: Level) -> Result<FareyPosition, DomainError> {
    let out_of_range = || DomainError::FractionOutOfRange(frac.to_string());
    if !frac.is_positive() || *frac > Rational::new(1, 2) {
        return Err(out_of_range());
    }
    let b: u64 = frac.numer().try_into().map_err(|_| out_of_range())?;
    let r: u64 = frac.denom().try_into().map_err(|_| out_of_range())?;
    if r > u64::from(u32::MAX) {
        return Err(out_of_range());
    }
    Ok(match neighbours(b, r, level) {
        None => FareyPosition::Member,
        Some((upper, lower)) => FareyPosition::Between {
            upper: Rational::new(upper.q, upper.p),
            lower: Rational::new(lower.q, lower.p),
        },
    })
}

fn pair_of(f: Frac) -> OrbifoldPair {
    OrbifoldPair::new(f.q as u32, f.p as u32).expect("division points are pairs")
}

/// The level-`n` unpacking `𝔅⁽ⁿ⁾(B)`.
///
/// A non-coprime pair `(gb, gr)` is first split into `g` copies of `(b, r)`.
pub fn unpack(basket: &Basket, level: Level) -> Basket {
    let mut items: Vec<(OrbifoldPair, u32)> = Vec::new();
    for &(p, k) in basket.entries() {
        let g = p.b().gcd(&p.r());
        let (b, r) = (p.b() / g, p.r() / g);
        let k = k * g;
        match neighbours(u64::from(b), u64::from(r), level) {
            None => items.push((OrbifoldPair::new(b, r).expect("reduced pair"), k)),
            Some((upper, lower)) => {
                let (b, r) = (i64::from(b), i64::from(r));
                let n_lower = r * upper.q as i64 - b * upper.p as i64;
                let n_upper = -r * lower.q as i64 + b * lower.p as i64;
                debug_assert!(n_lower > 0 && n_upper > 0);
                items.push((pair_of(lower), k * n_lower as u32));
                items.push((pair_of(upper), k * n_upper as u32));
            }
        }
    }
    Basket::from_counts(items)
}

fn epsilon_unchecked(basket: &Basket, level: Level) -> u64 {
    let previous = level.previous().expect("level at least 5");
    let eps = delta(&unpack(basket, previous), level.get()) - delta(basket, level.get());
    assert!(
        eps.is_integer() && !eps.is_negative(),
        "prime packing count {eps} of {basket} at level {level} is not a non-negative integer"
    );
    eps.to_i64().expect("small") as u64
}

/// `ε_n(B) = Δⁿ(B⁽ⁿ⁻¹⁾) − Δⁿ(B)`, the number of prime packings between
/// consecutive levels.
pub fn epsilon_n(basket: &Basket, n: u32) -> Result<u64, DomainError> {
    if n < 5 {
        return Err(DomainError::OrderTooSmall { min: 5, got: n });
    }
    Ok(epsilon_unchecked(basket, Level(n)))
}

/// One step of a canonical sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalLevel {
    pub level: Level,
    pub basket: Basket,
    /// `ε_n`; absent at level 0.
    pub epsilon: Option<u64>,
}

/// `B⁽⁰⁾, B⁽⁵⁾, …` up to the level where the sequence reaches the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSequence {
    pub base: Basket,
    pub levels: Vec<CanonicalLevel>,
    /// Least listed level whose basket equals the base.
    pub stabilization_level: Level,
}

impl CanonicalSequence {
    pub fn new(base: &Basket) -> Self {
        let top = r_max(base).unwrap_or(0).max(5);
        let mut levels = vec![CanonicalLevel {
            level: Level::ZERO,
            basket: unpack(base, Level::ZERO),
            epsilon: None,
        }];
        for n in 5..=top {
            let level = Level(n);
            levels.push(CanonicalLevel {
                level,
                basket: unpack(base, level),
                epsilon: Some(epsilon_unchecked(base, level)),
            });
        }
        let stabilization_level = levels
            .iter()
            .find(|l| l.basket == *base)
            .map(|l| l.level)
            .expect("unpacking at level r_max is the identity");
        CanonicalSequence {
            base: base.clone(),
            levels,
            stabilization_level,
        }
    }

    /// `B⁽ⁿ⁾`, also past the last listed level.
    pub fn at(&self, level: Level) -> &Basket {
        self.levels
            .iter()
            .rev()
            .find(|l| l.level <= level)
            .map(|l| &l.basket)
            .expect("level 0 is always present")
    }
}

/// A closed-form multiplicity came out negative, so no basket has the
/// given anti-plurigenera.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasible {
    pub coefficient: &'static str,
    pub value: i64,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} < 0", self.coefficient, self.value)
    }
}

/// The multiplicities `n⁰₁,ᵣ` for `r ≥ 5`.
pub type Tail = BTreeMap<u32, u32>;

/// `σ₅ = Σ_{r≥5} n⁰₁,ᵣ`.
pub fn sigma5(tail: &Tail) -> i64 {
    tail.values().map(|&k| i64::from(k)).sum()
}

fn tail_count(tail: &Tail, r: u32) -> i64 {
    tail.get(&r).map_or(0, |&k| i64::from(k))
}

fn check(coefficient: &'static str, value: i64) -> Result<u32, Infeasible> {
    if value < 0 {
        Err(Infeasible { coefficient, value })
    } else {
        Ok(value as u32)
    }
}

fn tail_pairs(tail: &Tail) -> impl Iterator<Item = (OrbifoldPair, u32)> + '_ {
    tail.iter().map(|(&r, &k)| {
        assert!(r >= 5, "tail entries have r >= 5");
        (OrbifoldPair::new(1, r).expect("(1,r) is a pair"), k)
    })
}

/// `(n⁰₁,₂, n⁰₁,₃, n⁰₁,₄)` from `P̃₋₁ … P̃₋₄` and `σ₅`, unchecked.
pub fn b0_coefficients(p: &[i64; 4], sigma5: i64) -> [i64; 3] {
    let [p1, p2, p3, p4] = *p;
    [
        5 - 6 * p1 + 4 * p2 - p3,
        4 - 2 * p1 - 2 * p2 + 3 * p3 - p4,
        1 + 3 * p1 - p2 - 2 * p3 + p4 - sigma5,
    ]
}

/// `B⁽⁰⁾` from `P̃₋₁ … P̃₋₄` and the tail `{n⁰₁,ᵣ : r ≥ 5}`.
pub fn b0_from_plurigenera(p: &[i64; 4], tail: &Tail) -> Result<Basket, Infeasible> {
    let [n2, n3, n4] = b0_coefficients(p, sigma5(tail));
    let n2 = check("n0(1,2)", n2)?;
    let n3 = check("n0(1,3)", n3)?;
    let n4 = check("n0(1,4)", n4)?;
    let head = [(1, 2, n2), (1, 3, n3), (1, 4, n4)]
        .map(|(b, r, k)| (OrbifoldPair::new(b, r).expect("pair"), k));
    Ok(Basket::from_counts(head.into_iter().chain(tail_pairs(tail))))
}

/// `B⁽⁵⁾` from `P̃₋₁ … P̃₋₅` and the tail.
pub fn b5_from_plurigenera(p: &[i64; 5], tail: &Tail) -> Result<Basket, Infeasible> {
    let [p1, p2, p3, p4, p5] = *p;
    let s5 = sigma5(tail);
    let n12 = check("n5(1,2)", 3 - 6 * p1 + 3 * p2 - p3 + 2 * p4 - p5 + s5)?;
    let n25 = check("n5(2,5)", 2 + p2 - 2 * p4 + p5 - s5)?;
    let n13 = check("n5(1,3)", 2 - 2 * p1 - 3 * p2 + 3 * p3 + p4 - p5 + s5)?;
    let n14 = check("n5(1,4)", 1 + 3 * p1 - p2 - 2 * p3 + p4 - s5)?;
    let head = [(1, 2, n12), (2, 5, n25), (1, 3, n13), (1, 4, n14)]
        .map(|(b, r, k)| (OrbifoldPair::new(b, r).expect("pair"), k));
    Ok(Basket::from_counts(head.into_iter().chain(tail_pairs(tail))))
}

/// `ε₅ = 2 + P̃₋₂ − 2P̃₋₄ + P̃₋₅ − σ₅`.
pub fn eps5(p: &[i64; 5], tail: &Tail) -> i64 {
    2 + p[1] - 2 * p[3] + p[4] - sigma5(tail)
}

/// `ε = 2σ₅ − n⁰₁,₅`, which must be non-negative.
pub fn eps_tail(tail: &Tail) -> i64 {
    2 * sigma5(tail) - tail_count(tail, 5)
}

/// The `ε₆ = 0` identity `3P̃₋₁ + P̃₋₂ − P̃₋₃ − P̃₋₄ − P̃₋₅ + P̃₋₆ − ε = 0`.
pub fn eps6_identity(p: &[i64; 6], tail: &Tail) -> bool {
    3 * p[0] + p[1] - p[2] - p[3] - p[4] + p[5] - eps_tail(tail) == 0
}

/// `ε₇ = 1 + P̃₋₁ + P̃₋₂ − P̃₋₅ − P̃₋₆ + P̃₋₇ − 2σ₅ + 2n⁰₁,₅ + n⁰₁,₆`.
pub fn eps7(p: &[i64; 7], tail: &Tail) -> i64 {
    1 + p[0] + p[1] - p[4] - p[5] + p[6] - 2 * sigma5(tail)
        + 2 * tail_count(tail, 5)
        + tail_count(tail, 6)
}

/// `ε₈ = 2P̃₋₁ + P̃₋₂ + P̃₋₃ − P̃₋₄ − P̃₋₅ − P̃₋₇ + P̃₋₈ − 3σ₅ + 3n⁰₁,₅ + 2n⁰₁,₆ + n⁰₁,₇`.
pub fn eps8(p: &[i64; 8], tail: &Tail) -> i64 {
    2 * p[0] + p[1] + p[2] - p[3] - p[4] - p[6] + p[7] - 3 * sigma5(tail)
        + 3 * tail_count(tail, 5)
        + 2 * tail_count(tail, 6)
        + tail_count(tail, 7)
}

/// The tail `{n⁰₁,ᵣ : r ≥ 5}` of a level-0 basket.
pub fn tail_of(b0: &Basket) -> Tail {
    b0.entries()
        .iter()
        .filter(|(p, _)| p.r() >= 5)
        .map(|&(p, k)| (p.r(), k))
        .collect()
}
