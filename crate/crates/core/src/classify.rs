//! Classification of weighted baskets under anti-plurigenus constraints.
//!
//! Candidates `B⁽⁰⁾` come from the closed forms in `P̃₋₁ … P̃₋₄` and a tail of
//! `(1, r)` pairs with `r ≥ 5`; every basket with those anti-plurigenera is a
//! packing of its `B⁽⁰⁾`. `γ ≥ 0` bounds both the tail and the packing
//! search and is always imposed; the configurable filters only act on the
//! emitted baskets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::basket::{Basket, OrbifoldPair};
use crate::canonical::{b0_coefficients, b0_from_plurigenera, tail_of, unpack, Level, Tail};
use crate::error::{ClassifyError, ConstraintError};
use crate::filter::{geometric_filter, FilterConfig};
use crate::packing::{closure, ClosureOptions, PruneClause, DEFAULT_STATE_LIMIT};
use crate::par::Execution;
use crate::rational::Rational;
use crate::riemann_roch::{gamma, r_index, r_max, sigma, Plurigenera, WeightedBasket};

/// An integer range `lo..=hi`; `hi = None` is unbounded above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub lo: i64,
    pub hi: Option<i64>,
}

impl IntRange {
    pub fn exact(v: i64) -> Self {
        IntRange { lo: v, hi: Some(v) }
    }

    pub fn between(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi: Some(hi) }
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.lo && self.hi.map_or(true, |h| v <= h)
    }

    pub fn contains_rational(&self, v: &Rational) -> bool {
        v.is_integer() && v.to_i64().is_some_and(|x| self.contains(x))
    }

    fn intersect(&self, lo: i64, hi: i64) -> (i64, i64) {
        (self.lo.max(lo), self.hi.map_or(hi, |h| h.min(hi)))
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) if h == self.lo => write!(f, "{h}"),
            Some(h) => write!(f, "{}..{h}", self.lo),
            None => write!(f, "{}..", self.lo),
        }
    }
}

impl FromStr for IntRange {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstraintError::Malformed(s.to_string());
        let num = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        match s.split_once("..") {
            Some((lo, hi)) => {
                let lo = num(lo)?;
                let hi = if hi.trim().is_empty() {
                    None
                } else {
                    Some(num(hi)?)
                };
                Ok(IntRange { lo, hi })
            }
            None => Ok(IntRange::exact(num(s)?)),
        }
    }
}

/// One end of a rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rational,
    pub closed: bool,
}

/// A rational interval with optional, open or closed ends.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Option<Endpoint>,
    pub hi: Option<Endpoint>,
}

impl RationalInterval {
    pub fn contains(&self, v: &Rational) -> bool {
        let above = self.lo.as_ref().map_or(true, |e| {
            if e.closed {
                *v >= e.value
            } else {
                *v > e.value
            }
        });
        let below = self.hi.as_ref().map_or(true, |e| {
            if e.closed {
                *v <= e.value
            } else {
                *v < e.value
            }
        });
        above && below
    }

    pub fn is_unbounded(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, lo) = match &self.lo {
            Some(e) => (if e.closed { "[" } else { "(" }, e.value.to_string()),
            None => ("(", String::new()),
        };
        let (close, hi) = match &self.hi {
            Some(e) => (if e.closed { "]" } else { ")" }, e.value.to_string()),
            None => (")", String::new()),
        };
        write!(f, "{open}{lo},{hi}{close}")
    }
}

impl FromStr for RationalInterval {
    type Err = ConstraintError;

    /// `(a,b)`, `[a,b]`, mixed brackets, empty ends for no bound, or a single value.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstraintError::Malformed(s.to_string());
        let t = s.trim();
        let first = t.chars().next().ok_or_else(bad)?;
        if first != '(' && first != '[' {
            let v: Rational = t.parse().map_err(|_| bad())?;
            let e = Endpoint {
                value: v,
                closed: true,
            };
            return Ok(RationalInterval {
                lo: Some(e.clone()),
                hi: Some(e),
            });
        }
        let last = t.chars().last().ok_or_else(bad)?;
        if !matches!(last, ')' | ']') || t.len() < 3 {
            return Err(bad());
        }
        let (a, b) = t[1..t.len() - 1].split_once(',').ok_or_else(bad)?;
        let end = |x: &str, closed: bool| -> Result<Option<Endpoint>, ConstraintError> {
            if x.trim().is_empty() {
                Ok(None)
            } else {
                Ok(Some(Endpoint {
                    value: x.parse().map_err(|_| bad())?,
                    closed,
                }))
            }
        };
        Ok(RationalInterval {
            lo: end(a, first == '[')?,
            hi: end(b, last == ']')?,
        })
    }
}

/// A condition on `r_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexConstraint {
    Exact(u64),
    AtMost(u64),
    /// `r_X` divides the value.
    DivisorOf(u64),
}

impl IndexConstraint {
    pub fn admits(&self, rx: u64) -> bool {
        match *self {
            IndexConstraint::Exact(v) => rx == v,
            IndexConstraint::AtMost(v) => rx <= v,
            IndexConstraint::DivisorOf(v) => v % rx == 0,
        }
    }
}

impl fmt::Display for IndexConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexConstraint::Exact(v) => write!(f, "{v}"),
            IndexConstraint::AtMost(v) => write!(f, "<={v}"),
            IndexConstraint::DivisorOf(v) => write!(f, "|{v}"),
        }
    }
}

impl FromStr for IndexConstraint {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstraintError::Malformed(s.to_string());
        let t = s.trim();
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
        if let Some(rest) = t.strip_prefix("<=") {
            Ok(IndexConstraint::AtMost(num(rest)?))
        } else if let Some(rest) = t.strip_prefix('|') {
            Ok(IndexConstraint::DivisorOf(num(rest)?))
        } else {
            Ok(IndexConstraint::Exact(num(t)?))
        }
    }
}

/// Constraints of a classification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationConstraints {
    /// `P̃₋ₘ` ranges keyed by `m`.
    pub plurigenera: BTreeMap<u32, IntRange>,
    /// Range of `σ₅` of the level-0 basket.
    pub sigma5: Option<IntRange>,
    pub k3: RationalInterval,
    pub rmax: Option<IntRange>,
    pub rindex: Vec<IndexConstraint>,
    /// Checks applied to every emitted basket.
    pub filters: FilterConfig,
    /// Emit only baskets of coprime pairs.
    pub coprime_only: bool,
    /// Cap on visited baskets per packing closure.
    pub state_limit: usize,
}

impl Default for ClassificationConstraints {
    fn default() -> Self {
        ClassificationConstraints {
            plurigenera: BTreeMap::new(),
            sigma5: None,
            k3: RationalInterval::default(),
            rmax: None,
            rindex: Vec::new(),
            filters: FilterConfig::default(),
            coprime_only: true,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }
}

/// `γ ≥ 0` forces at most 16 level-0 entries, hence `P̃₋₁ ≤ 8`.
const P1_CEILING: i64 = 8;
/// `γ ≥ 0` forces `r ≤ 24` for every entry.
const R_CEILING: u32 = 24;

impl ClassificationConstraints {
    pub fn is_empty(&self) -> bool {
        self.plurigenera.is_empty()
            && self.sigma5.is_none()
            && self.k3.is_unbounded()
            && self.rmax.is_none()
            && self.rindex.is_empty()
    }

    /// Sets `p[m]` to a fixed value.
    pub fn fix(mut self, m: u32, value: i64) -> Self {
        self.plurigenera.insert(m, IntRange::exact(value));
        self
    }

    /// Whether a weighted basket meets every constraint.
    pub fn admits(&self, wb: &WeightedBasket) -> bool {
        let b = wb.basket();
        if self.coprime_only && !b.is_terminal() {
            return false;
        }
        if !self.k3.contains(wb.anti_volume()) {
            return false;
        }
        if let Some(range) = &self.rmax {
            match r_max(b) {
                Ok(r) if range.contains(i64::from(r)) => {}
                _ => return false,
            }
        }
        let rx = r_index(b);
        if !self.rindex.iter().all(|c| c.admits(rx)) {
            return false;
        }
        if let Some(range) = &self.sigma5 {
            let s5: u32 = tail_of(&unpack(b, Level::ZERO)).values().sum();
            if !range.contains(i64::from(s5)) {
                return false;
            }
        }
        let top = self.plurigenera.keys().max().copied().unwrap_or(0);
        if top > 0 {
            let p = Plurigenera::compute(wb, top);
            for (&m, range) in &self.plurigenera {
                if !range.contains_rational(p.get(m)) {
                    return false;
                }
            }
        }
        geometric_filter(wb, &self.filters).is_ok()
    }

    fn range(&self, m: u32) -> Option<&IntRange> {
        self.plurigenera.get(&m)
    }

    fn prune_clauses(&self, p1: u32) -> Vec<PruneClause> {
        let mut clauses = vec![PruneClause::GammaAtLeast(Rational::zero())];
        if let Some(e) = &self.k3.hi {
            clauses.push(PruneClause::K3AtMost {
                p1,
                bound: e.value.clone(),
            });
        }
        if let Some(hi) = self.rmax.as_ref().and_then(|r| r.hi) {
            clauses.push(PruneClause::RmaxAtMost(hi.max(0) as u32));
        }
        for (&m, range) in &self.plurigenera {
            if let (true, Some(hi)) = (m >= 2, range.hi) {
                clauses.push(PruneClause::PlurigenusAtMost { m, p1, bound: hi });
            }
        }
        clauses
    }
}

impl fmt::Display for ClassificationConstraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .plurigenera
            .iter()
            .map(|(m, r)| format!("p[{m}]={r}"))
            .collect();
        if let Some(s) = &self.sigma5 {
            parts.push(format!("sigma5={s}"));
        }
        if !self.k3.is_unbounded() {
            parts.push(format!("k3={}", self.k3));
        }
        if let Some(r) = &self.rmax {
            parts.push(format!("rmax={r}"));
        }
        for c in &self.rindex {
            parts.push(format!("rindex={c}"));
        }
        if self.filters == FilterConfig::none() {
            parts.push("filters=none".into());
        }
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for ClassificationConstraints {
    type Err = ConstraintError;

    /// Whitespace separated `key=value` tokens; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = ClassificationConstraints::default();
        let tokens = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        for token in tokens {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| ConstraintError::Malformed(token.to_string()))?;
            if let Some(m) = key.strip_prefix("p[").and_then(|r| r.strip_suffix(']')) {
                let m: u32 = m
                    .parse()
                    .ok()
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| ConstraintError::Malformed(token.to_string()))?;
                if c.plurigenera.insert(m, value.parse()?).is_some() {
                    return Err(ConstraintError::Conflict(key.to_string()));
                }
                continue;
            }
            let once = |present: bool| {
                if present {
                    Err(ConstraintError::Conflict(key.to_string()))
                } else {
                    Ok(())
                }
            };
            match key {
                "sigma5" => {
                    once(c.sigma5.is_some())?;
                    c.sigma5 = Some(value.parse()?);
                }
                "k3" => {
                    once(!c.k3.is_unbounded())?;
                    c.k3 = value.parse()?;
                }
                "rmax" => {
                    once(c.rmax.is_some())?;
                    c.rmax = Some(value.parse()?);
                }
                "rindex" => c.rindex.push(value.parse()?),
                "filters" => {
                    c.filters = match value {
                        "default" => FilterConfig::default(),
                        "none" => FilterConfig::none(),
                        other => return Err(ConstraintError::UnknownFilter(other.to_string())),
                    }
                }
                "coprime" => {
                    c.coprime_only = match value {
                        "yes" | "true" => true,
                        "no" | "false" => false,
                        _ => return Err(ConstraintError::Malformed(token.to_string())),
                    }
                }
                other => return Err(ConstraintError::UnknownKey(other.to_string())),
            }
        }
        Ok(c)
    }
}

/// A level-0 candidate with the anti-plurigenera that produced it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct B0Candidate {
    pub p1: u32,
    /// `P̃₋₁ … P̃₋₄`.
    pub plurigenera: [i64; 4],
    pub basket: Basket,
}

impl B0Candidate {
    /// `(n⁰₁,₂, n⁰₁,₃, n⁰₁,₄, σ₅)`.
    pub fn signature(&self) -> (u32, u32, u32, u32) {
        let count = |r| {
            self.basket
                .multiplicity(OrbifoldPair::new(1, r).expect("pair"))
        };
        let s5 = tail_of(&self.basket).values().sum();
        (count(2), count(3), count(4), s5)
    }
}

/// Multisets of `r ≥ 5` of the given size whose total `γ` cost fits.
fn tails(size: u32, budget: &Rational, r_limit: u32) -> Vec<Tail> {
    fn go(
        size: u32,
        from: u32,
        r_limit: u32,
        budget: &Rational,
        current: &mut Tail,
        out: &mut Vec<Tail>,
    ) {
        if size == 0 {
            out.push(current.clone());
            return;
        }
        for r in from..=r_limit {
            let cost = Rational::new(i64::from(r) * i64::from(r) - 1, i64::from(r));
            // The remaining entries cost at least as much as this one.
            if cost.clone() * Rational::from(size) > *budget {
                break;
            }
            *current.entry(r).or_insert(0) += 1;
            go(size - 1, r, r_limit, &(budget - &cost), current, out);
            let k = current.get_mut(&r).expect("just inserted");
            *k -= 1;
            if *k == 0 {
                current.remove(&r);
            }
        }
    }
    let mut out = Vec::new();
    if !budget.is_negative() {
        go(size, 5, r_limit, budget, &mut Tail::new(), &mut out);
    }
    out
}

fn bounded(range: Option<&IntRange>, lo: i64, hi: i64) -> (i64, i64) {
    match range {
        Some(r) => r.intersect(lo, hi),
        None => (lo, hi),
    }
}

/// All level-0 baskets with `γ ≥ 0` whose anti-plurigenera meet the
/// constraints on `P̃₋₁ … P̃₋₄` and `σ₅`, sorted.
pub fn enumerate_b0(c: &ClassificationConstraints) -> Result<Vec<B0Candidate>, ConstraintError> {
    if c.is_empty() {
        return Err(ConstraintError::Unbounded("empty constraint set"));
    }
    let r_limit = c
        .rmax
        .as_ref()
        .and_then(|r| r.hi)
        .map_or(R_CEILING, |h| h.clamp(0, i64::from(R_CEILING)) as u32);
    let mut out = BTreeSet::new();
    let (p1_lo, p1_hi) = bounded(c.range(1), 0, P1_CEILING);
    for p1 in p1_lo..=p1_hi {
        // σ = 10 − 5P̃₋₁ + P̃₋₂ and 0 ≤ σ ≤ 16.
        let (p2_lo, p2_hi) = bounded(c.range(2), 5 * p1 - 10, 5 * p1 + 6);
        for p2 in p2_lo..=p2_hi {
            // n⁰₁,₂ ≥ 0 and n⁰₁,₃ + n⁰₁,₄ + σ₅ ≥ 0 bound P̃₋₃.
            let (p3_lo, p3_hi) = bounded(c.range(3), 3 * p2 - p1 - 5, 5 - 6 * p1 + 4 * p2);
            for p3 in p3_lo..=p3_hi {
                let (p4_lo, p4_hi) =
                    bounded(c.range(4), 2 * p3 + p2 - 1 - 3 * p1, 4 - 2 * p1 - 2 * p2 + 3 * p3);
                for p4 in p4_lo..=p4_hi {
                    let p = [p1, p2, p3, p4];
                    let [n2, n3, n4_plus] = b0_coefficients(&p, 0);
                    if n2 < 0 || n3 < 0 || n4_plus < 0 {
                        continue;
                    }
                    let (s_lo, s_hi) = bounded(c.sigma5.as_ref(), 0, n4_plus);
                    let head = Basket::from_counts(
                        [(2, n2), (3, n3)]
                            .into_iter()
                            .map(|(r, k)| (OrbifoldPair::new(1, r).expect("pair"), k as u32)),
                    );
                    for s5 in s_lo.max(0)..=s_hi {
                        let n4 = n4_plus - s5;
                        let mut with4 = head.clone();
                        with4.insert(OrbifoldPair::new(1, 4).expect("pair"), n4 as u32);
                        let budget = gamma(&with4);
                        for tail in tails(s5 as u32, &budget, r_limit) {
                            let basket = b0_from_plurigenera(&p, &tail)
                                .expect("coefficients checked non-negative");
                            debug_assert_eq!(sigma(&basket) as i64, 10 - 5 * p1 + p2);
                            out.insert(B0Candidate {
                                p1: p1 as u32,
                                plurigenera: p,
                                basket,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Settings of a classification run.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    pub execution: Execution,
}

/// Every weighted basket meeting the constraints, sorted by basket then `P̃₋₁`.
pub fn classify(
    c: &ClassificationConstraints,
    options: ClassifyOptions,
) -> Result<Vec<WeightedBasket>, ClassifyError> {
    let candidates = enumerate_b0(c)?;
    let per_candidate = options.execution.map(&candidates, |cand| {
        let prune = c.prune_clauses(cand.p1);
        let opts = ClosureOptions {
            prune,
            coprime_only: c.coprime_only,
            state_limit: c.state_limit,
            execution: Execution::Sequential,
        };
        closure(&cand.basket, &opts).map(|found| {
            found
                .into_iter()
                .map(|b| WeightedBasket::new(b, cand.p1))
                .filter(|wb| c.admits(wb))
                .collect::<Vec<_>>()
        })
    });
    let mut out: BTreeMap<(Basket, u32), WeightedBasket> = BTreeMap::new();
    for result in per_candidate {
        for wb in result? {
            out.insert((wb.basket().clone(), wb.p1()), wb);
        }
    }
    Ok(out.into_values().collect())
}

/// Allowed multiplicities of pairs with a given index `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSlot {
    pub r: u32,
    pub count: IntRange,
}

impl FromStr for IndexSlot {
    type Err = ConstraintError;

    /// `r:count`, e.g. `2:0..1` or `5:1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstraintError::Malformed(s.to_string());
        let (r, count) = s.split_once(':').ok_or_else(bad)?;
        let r: u32 = r.trim().parse().map_err(|_| bad())?;
        let count: IntRange = count.parse()?;
        if r < 2 || count.lo < 0 || count.hi.is_none() {
            return Err(bad());
        }
        Ok(IndexSlot { r, count })
    }
}

/// Multisets of `size` coprime pairs of index `r`.
fn slot_fillings(r: u32, size: u32) -> Vec<Vec<OrbifoldPair>> {
    let choices: Vec<OrbifoldPair> = (1..=r / 2)
        .filter(|b| b.gcd(&r) == 1)
        .map(|b| OrbifoldPair::new(b, r).expect("pair"))
        .collect();
    let mut out = Vec::new();
    fn go(
        choices: &[OrbifoldPair],
        from: usize,
        size: u32,
        cur: &mut Vec<OrbifoldPair>,
        out: &mut Vec<Vec<OrbifoldPair>>,
    ) {
        if size == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..choices.len() {
            cur.push(choices[i]);
            go(choices, i, size - 1, cur, out);
            cur.pop();
        }
    }
    go(&choices, 0, size, &mut Vec::new(), &mut out);
    out
}

/// Every coprime basket whose indices fill the slots and whose `r_X`
/// equals `lcm_target`, kept when `keep` accepts it; sorted.
pub fn enumerate_index_profiles<F>(lcm_target: u64, slots: &[IndexSlot], keep: F) -> Vec<Basket>
where
    F: Fn(&Basket) -> bool,
{
    let mut partial: Vec<Vec<OrbifoldPair>> = vec![Vec::new()];
    for slot in slots {
        let hi = slot.count.hi.expect("slots are bounded");
        let mut next = Vec::new();
        for size in slot.count.lo.max(0)..=hi {
            for filling in slot_fillings(slot.r, size as u32) {
                for base in &partial {
                    let mut v = base.clone();
                    v.extend_from_slice(&filling);
                    next.push(v);
                }
            }
        }
        partial = next;
    }
    let set: BTreeSet<Basket> = partial
        .into_iter()
        .map(Basket::from_pairs)
        .filter(|b| r_index(b) == lcm_target && keep(b))
        .collect();
    set.into_iter().collect()
}
