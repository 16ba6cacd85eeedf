//! Basket invariants and Reid's orbifold Riemann–Roch for anti-plurigenera.

use num_integer::Integer;

use crate::basket::Basket;
use crate::error::DomainError;
use crate::rational::Rational;

/// `σ(B) = Σ bᵢ`.
pub fn sigma(basket: &Basket) -> u64 {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| u64::from(p.b()) * u64::from(k))
        .sum()
}

/// `σ′(B) = Σ bᵢ² / rᵢ`.
pub fn sigma_prime(basket: &Basket) -> Rational {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| {
            let b = i64::from(p.b());
            Rational::new(b * b * i64::from(k), i64::from(p.r()))
        })
        .sum()
}

/// `Δⁿ(B)`; the second summand uses the unreduced product `bᵢn`.
pub fn delta_n(basket: &Basket, n: u32) -> Result<Rational, DomainError> {
    if n < 2 {
        return Err(DomainError::OrderTooSmall { min: 2, got: n });
    }
    Ok(delta(basket, n))
}

pub(crate) fn delta(basket: &Basket, n: u32) -> Rational {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| {
            let r = i128::from(p.r());
            let bn = i128::from(p.b()) * i128::from(n);
            let res = bn.rem_euclid(r);
            let numer = res * (r - res) - bn * (r - bn);
            Rational::new(numer * i128::from(k), 2 * r)
        })
        .sum()
}

/// `γ(B) = Σ 1/rᵢ − Σ rᵢ + 24`.
pub fn gamma(basket: &Basket) -> Rational {
    let mut g = Rational::from(24);
    for &(p, k) in basket.entries() {
        let r = i64::from(p.r());
        let k = i64::from(k);
        g += Rational::new(k, r) - Rational::from(k * r);
    }
    g
}

/// `r_X = lcm(rᵢ)`, 1 for the empty basket.
pub fn r_index(basket: &Basket) -> u64 {
    basket
        .entries()
        .iter()
        .fold(1u64, |acc, (p, _)| acc.lcm(&u64::from(p.r())))
}

/// `r_max = max rᵢ`.
pub fn r_max(basket: &Basket) -> Result<u32, DomainError> {
    basket
        .entries()
        .last()
        .map(|(p, _)| p.r())
        .ok_or(DomainError::EmptyBasket)
}

/// `l(−n) = Σᵢ Σ_{j=1..n} ŕ(j bᵢ)(rᵢ − ŕ(j bᵢ)) / (2rᵢ)`.
pub fn l_term(basket: &Basket, n: u32) -> Rational {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| {
            let r = i128::from(p.r());
            let b = i128::from(p.b());
            let inner: i128 = (1..=i128::from(n))
                .map(|j| {
                    let res = (j * b).rem_euclid(r);
                    res * (r - res)
                })
                .sum();
            Rational::new(inner * i128::from(k), 2 * r)
        })
        .sum()
}

/// A basket together with `P̃₋₁`; fixes `−K³` and every `P̃₋ₘ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightedBasket {
    basket: Basket,
    p1: u32,
    volume: Rational,
}

impl WeightedBasket {
    pub fn new(basket: Basket, p1: u32) -> Self {
        let volume = Rational::from(2 * i64::from(p1) + sigma(&basket) as i64 - 6)
            - sigma_prime(&basket);
        WeightedBasket {
            basket,
            p1,
            volume,
        }
    }

    pub fn basket(&self) -> &Basket {
        &self.basket
    }

    pub fn p1(&self) -> u32 {
        self.p1
    }

    /// `−K³ = 2P̃₋₁ + σ − σ′ − 6`.
    pub fn anti_volume(&self) -> &Rational {
        &self.volume
    }

    pub fn into_basket(self) -> Basket {
        self.basket
    }
}

/// `−K³` of a weighted basket.
pub fn anti_volume(wb: &WeightedBasket) -> Rational {
    wb.anti_volume().clone()
}

/// `P̃₋₁ … P̃₋ₙ` from the difference recursion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Plurigenera {
    values: Vec<Rational>,
}

impl Plurigenera {
    /// Computes `P̃₋ₘ` for `1 ≤ m ≤ upto`.
    pub fn compute(wb: &WeightedBasket, upto: u32) -> Self {
        let mut values = Vec::with_capacity(upto as usize);
        if upto == 0 {
            return Plurigenera { values };
        }
        let s = Rational::from(sigma(wb.basket()));
        let slope = wb.anti_volume() + sigma_prime(wb.basket());
        let mut current = Rational::from(wb.p1());
        values.push(current.clone());
        for m in 1..upto {
            let next = i64::from(m) + 1;
            let step = Rational::new(next * next, 2) * &slope + Rational::from(2)
                - Rational::new(next, 2) * &s
                - delta(wb.basket(), m + 1);
            current += step;
            values.push(current.clone());
        }
        Plurigenera { values }
    }

    pub fn upto(&self) -> u32 {
        self.values.len() as u32
    }

    /// `P̃₋ₘ`; panics outside `1..=upto`.
    pub fn get(&self, m: u32) -> &Rational {
        &self.values[m as usize - 1]
    }

    /// `P̃₋ₘ` as an integer, `None` if it is not integral.
    pub fn integer(&self, m: u32) -> Option<i64> {
        self.get(m).to_i64()
    }

    /// Least `m` whose value is not an integer.
    pub fn first_non_integral(&self) -> Option<u32> {
        (1..=self.upto()).find(|&m| !self.get(m).is_integer())
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.values.iter().enumerate().map(|(i, v)| (i as u32 + 1, v))
    }

    /// Least `m` with `P̃₋ₘ ≥ threshold`.
    pub fn first_at_least(&self, threshold: i64) -> Option<u32> {
        self.iter().find(|(_, v)| **v >= threshold).map(|(m, _)| m)
    }
}

/// `P̃₋ₘ` with its integrality flag; non-integral values are a filter
/// signal, not an error.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Plurigenus {
    pub value: Rational,
}

impl Plurigenus {
    pub fn is_integral(&self) -> bool {
        self.value.is_integer()
    }
}

/// `P̃₋ₘ` of a weighted basket by the difference recursion.
pub fn plurigenus(wb: &WeightedBasket, m: u32) -> Result<Plurigenus, DomainError> {
    if m < 1 {
        return Err(DomainError::OrderTooSmall { min: 1, got: m });
    }
    let p = Plurigenera::compute(wb, m);
    Ok(Plurigenus {
        value: p.get(m).clone(),
    })
}

/// `P₋ₙ = n(n+1)(2n+1)(−K³)/12 + (2n+1) − l(−n)`.
pub fn plurigenus_closed(basket: &Basket, k3: &Rational, n: u32) -> Result<Rational, DomainError> {
    if n < 1 {
        return Err(DomainError::OrderTooSmall { min: 1, got: n });
    }
    let n = i64::from(n);
    Ok(Rational::new(n * (n + 1) * (2 * n + 1), 12) * k3 + Rational::from(2 * n + 1)
        - l_term(basket, n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn b(s: &str) -> Basket {
        s.parse().unwrap()
    }

    #[test]
    fn invariants_of_small_baskets() {
        let x66 = b("(1,2),(2,5),(1,3),(2,11)");
        assert_eq!(sigma(&x66), 6);
        assert_eq!(sigma_prime(&x66), ratio(659, 330));
        assert_eq!(gamma(&x66), ratio(1361, 330));
        assert_eq!(r_index(&x66), 330);
        assert_eq!(r_max(&x66), Ok(11));
        assert_eq!(r_index(&Basket::empty()), 1);
        assert_eq!(r_max(&Basket::empty()), Err(DomainError::EmptyBasket));
        assert_eq!(gamma(&Basket::empty()), Rational::from(24));
    }

    #[test]
    fn delta_anchors() {
        assert_eq!(delta_n(&b("(1,2)"), 3).unwrap(), Rational::from(1));
        assert_eq!(delta_n(&b("(1,2)"), 4).unwrap(), Rational::from(2));
        assert_eq!(delta_n(&b("(2,5)"), 5).unwrap(), Rational::from(5));
        assert!(delta_n(&b("(1,2)"), 1).is_err());
    }

    #[test]
    fn l_term_small() {
        assert_eq!(l_term(&b("(1,2)"), 1), ratio(1, 4));
        assert_eq!(l_term(&b("(1,2)"), 2), ratio(1, 4));
        assert_eq!(l_term(&Basket::empty(), 7), Rational::zero());
    }

    #[test]
    fn plurigenera_match_closed_form() {
        let wb = WeightedBasket::new(b("(1,2),(2,5),(1,3),(2,11)"), 1);
        assert_eq!(*wb.anti_volume(), ratio(1, 330));
        let p = Plurigenera::compute(&wb, 30);
        assert_eq!(p.integer(24), Some(16));
        for m in 1..=30 {
            let closed = plurigenus_closed(wb.basket(), wb.anti_volume(), m).unwrap();
            assert_eq!(*p.get(m), closed, "m = {m}");
        }
    }
}
