//! Orbifold pairs, baskets and the basket text grammar.
//!
//! ```text
//! basket := item ("," item)* | ""
//! item   := [mult "x"] "(" int "," int ")"
//! ```
//!
//! Whitespace around tokens is ignored. Baskets print in canonical order,
//! sorted by `(r, b)`, with repeated pairs folded into `kx(b,r)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::BasketError;
use crate::rational::Rational;

/// One basket entry `(b, r)`, a virtual quotient point of type `1/r(1,-1,b)`.
///
/// Ordered by `(r, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbifoldPair {
    r: u32,
    b: u32,
}

impl OrbifoldPair {
    pub fn new(b: u32, r: u32) -> Result<Self, BasketError> {
        if r < 2 || b == 0 || 2 * u64::from(b) > u64::from(r) {
            return Err(BasketError::InvalidPair {
                b: b.into(),
                r: r.into(),
            });
        }
        Ok(OrbifoldPair { r, b })
    }

    pub fn b(self) -> u32 {
        self.b
    }

    pub fn r(self) -> u32 {
        self.r
    }

    /// `gcd(b, r) = 1`. Packing can produce pairs that fail this.
    pub fn is_terminal(self) -> bool {
        self.b.gcd(&self.r) == 1
    }

    /// `b / r` as an exact rational.
    pub fn slope(self) -> Rational {
        Rational::new(self.b, self.r)
    }
}

impl PartialOrd for OrbifoldPair {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrbifoldPair {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.r, self.b).cmp(&(other.r, other.b))
    }
}

impl fmt::Display for OrbifoldPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.b, self.r)
    }
}

impl fmt::Debug for OrbifoldPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite multiset of orbifold pairs in canonical form.
///
/// Two baskets are equal exactly when their sorted multiplicity lists agree.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basket {
    entries: Vec<(OrbifoldPair, u32)>,
}

impl Basket {
    pub fn empty() -> Self {
        Basket::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = OrbifoldPair>>(pairs: I) -> Self {
        Basket::from_counts(pairs.into_iter().map(|p| (p, 1)))
    }

    /// Builds a basket from `(pair, multiplicity)` items; zero
    /// multiplicities are dropped and repeats merged.
    pub fn from_counts<I: IntoIterator<Item = (OrbifoldPair, u32)>>(items: I) -> Self {
        let mut map: BTreeMap<OrbifoldPair, u32> = BTreeMap::new();
        for (p, k) in items {
            if k > 0 {
                *map.entry(p).or_insert(0) += k;
            }
        }
        Basket {
            entries: map.into_iter().collect(),
        }
    }

    /// Distinct pairs with multiplicities, in canonical order.
    pub fn entries(&self) -> &[(OrbifoldPair, u32)] {
        &self.entries
    }

    /// Every pair repeated by its multiplicity, in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = OrbifoldPair> + '_ {
        self.entries
            .iter()
            .flat_map(|&(p, k)| std::iter::repeat(p).take(k as usize))
    }

    /// Number of pairs counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|&(_, k)| k as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn multiplicity(&self, pair: OrbifoldPair) -> u32 {
        self.entries
            .binary_search_by(|(p, _)| p.cmp(&pair))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Whether every pair is coprime.
    pub fn is_terminal(&self) -> bool {
        self.entries.iter().all(|(p, _)| p.is_terminal())
    }

    /// `Σ rᵢ`, which packing and unpacking both preserve.
    pub fn total_index(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(p, k)| u64::from(p.r) * u64::from(k))
            .sum()
    }

    /// Removes one copy of `pair`; returns false when absent.
    pub(crate) fn remove_one(&mut self, pair: OrbifoldPair) -> bool {
        match self.entries.binary_search_by(|(p, _)| p.cmp(&pair)) {
            Ok(i) => {
                if self.entries[i].1 == 1 {
                    self.entries.remove(i);
                } else {
                    self.entries[i].1 -= 1;
                }
                true
            }
            Err(_) => false,
        }
    }

    pub(crate) fn insert(&mut self, pair: OrbifoldPair, k: u32) {
        if k == 0 {
            return;
        }
        match self.entries.binary_search_by(|(p, _)| p.cmp(&pair)) {
            Ok(i) => self.entries[i].1 += k,
            Err(i) => self.entries.insert(i, (pair, k)),
        }
    }
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *k > 1 {
                write!(f, "{k}x")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Basket {
    type Err = BasketError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).basket()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn error(&self) -> BasketError {
        let token = match self.peek() {
            Some(c) => c.to_string(),
            None => "end of input".to_string(),
        };
        BasketError::Syntax {
            token,
            offset: self.pos,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), BasketError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn int(&mut self) -> Result<u32, BasketError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error());
        }
        let token = &self.src[start..self.pos];
        token.parse().map_err(|_| BasketError::Overflow {
            token: token.to_string(),
            offset: start,
        })
    }

    fn item(&mut self) -> Result<(OrbifoldPair, u32), BasketError> {
        self.skip_ws();
        let start = self.pos;
        let mult = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let k = self.int()?;
            self.skip_ws();
            if !matches!(self.peek(), Some('x') | Some('X') | Some('×')) {
                return Err(self.error());
            }
            self.pos += self.peek().map_or(1, char::len_utf8);
            if k == 0 {
                return Err(BasketError::ZeroMultiplicity { offset: start });
            }
            k
        } else {
            1
        };
        self.expect('(')?;
        let b = self.int()?;
        self.expect(',')?;
        let r = self.int()?;
        self.expect(')')?;
        Ok((OrbifoldPair::new(b, r)?, mult))
    }

    fn basket(&mut self) -> Result<Basket, BasketError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            return Ok(Basket::empty());
        }
        let mut items = vec![self.item()?];
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(',') => {
                    self.pos += 1;
                    items.push(self.item()?);
                }
                Some(_) => return Err(self.error()),
            }
        }
        Ok(Basket::from_counts(items))
    }
}

/// Shorthand used in tests and examples: `pair(b, r)` panics on invalid input.
pub fn pair(b: u32, r: u32) -> OrbifoldPair {
    OrbifoldPair::new(b, r).expect("valid orbifold pair")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let b: Basket = "2x(1,2), (2,5) ,(1,3)".parse().unwrap();
        assert_eq!(b.to_string(), "2x(1,2),(1,3),(2,5)");
        assert_eq!(b.len(), 4);
        let e: Basket = "  ".parse().unwrap();
        assert!(e.is_empty());
        assert_eq!(e.to_string(), "");
    }

    #[test]
    fn canonical_equality() {
        let a: Basket = "(1,3),(1,2),(1,2)".parse().unwrap();
        let b: Basket = "2x(1,2),(1,3)".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            "(3,5)".parse::<Basket>(),
            Err(BasketError::InvalidPair { b: 3, r: 5 })
        ));
        assert!(matches!(
            "0x(1,2)".parse::<Basket>(),
            Err(BasketError::ZeroMultiplicity { .. })
        ));
        match "(1,2);(1,3)".parse::<Basket>() {
            Err(BasketError::Syntax { token, offset }) => {
                assert_eq!(token, ";");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!("(1,2),".parse::<Basket>().is_err());
        assert!("(1,1)".parse::<Basket>().is_err());
    }

    #[test]
    fn generalized_pairs_are_representable() {
        let b: Basket = "(2,4)".parse().unwrap();
        assert!(!b.is_terminal());
    }
}
