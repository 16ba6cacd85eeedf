#![allow(dead_code)]

use std::collections::BTreeSet;
use std::num::NonZeroU64;
use std::str::FromStr;

use bigdecimal::{BigDecimal, Context, RoundingMode};
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;
use reid_basket::rational::{exceeds_sqrt, floor_add_sqrt};
use reid_basket::{
    gamma, geometric_filter, plurigenus_closed, r_max, sigma, sigma_prime, Basket,
    ClassificationConstraints, FixtureBody, FixtureSource, OrbifoldPair, Rational, WeightedBasket,
};

/// Cases for every randomized property.
pub const CASES: u32 = 10_000;

/// A pair `(b, r)` with `r ≤ max_r`, not necessarily coprime.
pub fn any_pair(max_r: u32) -> impl Strategy<Value = OrbifoldPair> {
    (2..=max_r).prop_flat_map(|r| (1..=r / 2).prop_map(move |b| OrbifoldPair::new(b, r).unwrap()))
}

/// A coprime pair with `r ≤ max_r`.
pub fn terminal_pair(max_r: u32) -> impl Strategy<Value = OrbifoldPair> {
    any_pair(max_r).prop_filter("coprime", |p| p.b().gcd(&p.r()) == 1)
}

pub fn terminal_basket(max_r: u32, max_len: usize) -> impl Strategy<Value = Basket> {
    prop::collection::vec(terminal_pair(max_r), 0..=max_len).prop_map(Basket::from_pairs)
}

pub fn any_basket(max_r: u32, max_len: usize) -> impl Strategy<Value = Basket> {
    prop::collection::vec(any_pair(max_r), 0..=max_len).prop_map(Basket::from_pairs)
}

pub fn basket(s: &str) -> Basket {
    s.parse().unwrap()
}

/// Every row-table basket with positive volume, with its table's `P̃₋₁`.
pub fn fixture_baskets() -> Vec<WeightedBasket> {
    let source = FixtureSource::Embedded;
    let mut out = Vec::new();
    for id in source.table_ids().unwrap() {
        if let FixtureBody::Rows(t) = source.load(id).unwrap().body {
            for row in t.rows {
                let w = WeightedBasket::new(row.basket, t.p1);
                if w.anti_volume().is_positive() {
                    out.push(w);
                }
            }
        }
    }
    out
}

pub fn decimal(r: &Rational) -> BigDecimal {
    BigDecimal::from_str(&r.numer().to_string()).unwrap()
        / BigDecimal::from_str(&r.denom().to_string()).unwrap()
}

pub fn digits50() -> Context {
    Context::new(NonZeroU64::new(50).unwrap(), RoundingMode::HalfEven)
}

/// `a + √x` to 50 significant digits.
pub fn decimal_add_sqrt(a: &Rational, x: &Rational) -> BigDecimal {
    decimal(a) + decimal(x).sqrt_with_context(&digits50()).unwrap()
}

pub fn to_i64(d: &BigDecimal) -> i64 {
    d.with_scale_round(0, RoundingMode::Floor).to_string().parse().unwrap()
}

/// Compares the exact `⌊a + √x⌋` with the decimal value; within `10⁻⁴⁰`
/// of an integer the decimal cannot decide, and either neighbour is accepted.
pub fn check_floor_add_sqrt(a: &Rational, x: &Rational) -> Result<(), String> {
    let exact: i64 = floor_add_sqrt(a, x).try_into().unwrap();
    let approx = decimal_add_sqrt(a, x);
    let nearest = approx.with_scale_round(0, RoundingMode::HalfEven);
    let tolerance = BigDecimal::from_str("1e-40").unwrap();
    let ok = if (&approx - &nearest).abs() < tolerance {
        let n = to_i64(&nearest);
        exact == n || exact == n - 1
    } else {
        exact == to_i64(&approx)
    };
    if ok {
        Ok(())
    } else {
        Err(format!("floor({a} + sqrt({x})): exact {exact}, decimal {approx}"))
    }
}

/// Compares `a > √x` with the decimal value, away from equality.
pub fn check_exceeds_sqrt(a: &Rational, x: &Rational) -> Result<(), String> {
    let diff = decimal(a) - decimal(x).sqrt_with_context(&digits50()).unwrap();
    let tolerance = BigDecimal::from_str("1e-40").unwrap();
    if diff.abs() < tolerance {
        return Ok(());
    }
    let decimal_says = diff.is_positive();
    if exceeds_sqrt(a, x) == decimal_says {
        Ok(())
    } else {
        Err(format!("{a} > sqrt({x}): exact {}, decimal {decimal_says}", !decimal_says))
    }
}

/// Independent check of one emitted weighted basket against the
/// constraints, through the closed form for `P̃₋ₘ`.
pub fn satisfies(c: &ClassificationConstraints, w: &WeightedBasket) -> bool {
    let b = w.basket();
    let k3 = Rational::from(2 * i64::from(w.p1())) + Rational::from(sigma(b) as i64)
        - sigma_prime(b)
        - Rational::from(6);
    if !c.k3.contains(&k3) || gamma(b).is_negative() || !b.is_terminal() {
        return false;
    }
    if let Some(range) = &c.rmax {
        if !r_max(b).is_ok_and(|r| range.contains(i64::from(r))) {
            return false;
        }
    }
    for (&m, range) in &c.plurigenera {
        if !range.contains_rational(&plurigenus_closed(b, &k3, m).unwrap()) {
            return false;
        }
    }
    geometric_filter(w, &c.filters).is_ok()
}

/// Every coprime basket with `Σr ≤ budget`.
pub fn all_coprime_baskets(budget: u32) -> Vec<Basket> {
    let pairs: Vec<OrbifoldPair> = (2..=budget)
        .flat_map(|r| (1..=r / 2).filter(move |b| b.gcd(&r) == 1).map(move |b| OrbifoldPair::new(b, r).unwrap()))
        .collect();
    fn go(pairs: &[OrbifoldPair], from: usize, left: u32, cur: &mut Vec<OrbifoldPair>, out: &mut Vec<Basket>) {
        out.push(Basket::from_pairs(cur.iter().copied()));
        for i in from..pairs.len() {
            if pairs[i].r() <= left {
                cur.push(pairs[i]);
                go(pairs, i, left - pairs[i].r(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&pairs, 0, budget, &mut Vec::new(), &mut out);
    out
}


/// Weighted baskets among all coprime baskets with `Σr ≤ budget`, for every
/// `P̃₋₁` the constraints allow, that pass [`satisfies`].
pub fn brute_force(c: &ClassificationConstraints, budget: u32) -> BTreeSet<(Basket, u32)> {
    let p1 = &c.plurigenera[&1];
    let mut out = BTreeSet::new();
    for b in all_coprime_baskets(budget) {
        for p1 in p1.lo..=p1.hi.expect("bounded p[1]") {
            let w = WeightedBasket::new(b.clone(), p1 as u32);
            if satisfies(c, &w) {
                out.insert((b.clone(), p1 as u32));
            }
        }
    }
    out
}
