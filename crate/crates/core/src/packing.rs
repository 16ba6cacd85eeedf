//! The packing partial order on baskets.
//!
//! A packing replaces two entries `(b₁,r₁), (b₂,r₂)` by `(b₁+b₂, r₁+r₂)`.
//! Every packing lowers the entry count by one, so the closure of a basket
//! is explored level by level and each level is deduplicated on its own.

use std::collections::HashSet;

use crate::basket::{Basket, OrbifoldPair};
use crate::error::{DomainError, Truncated};
use crate::par::Execution;
use crate::rational::Rational;
use crate::riemann_roch::{gamma, r_max, sigma, sigma_prime, Plurigenera, WeightedBasket};

/// Default cap on visited baskets in a closure search.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

/// One packing `left + right → result`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PackingStep {
    pub left: OrbifoldPair,
    pub right: OrbifoldPair,
    pub result: OrbifoldPair,
    pub prime: bool,
}

impl PackingStep {
    pub fn new(left: OrbifoldPair, right: OrbifoldPair) -> Self {
        let result = OrbifoldPair::new(left.b() + right.b(), left.r() + right.r())
            .expect("a merge of two pairs is a pair");
        PackingStep {
            left,
            right,
            result,
            prime: is_prime_packing(left, right),
        }
    }
}

/// `|b₁r₂ − b₂r₁| = 1`.
pub fn is_prime_packing(p: OrbifoldPair, q: OrbifoldPair) -> bool {
    let det = i64::from(p.b()) * i64::from(q.r()) - i64::from(q.b()) * i64::from(p.r());
    det.abs() == 1
}

/// Packs the entries at multiset positions `i` and `j`, where positions
/// follow [`Basket::pairs`].
pub fn pack_once(basket: &Basket, i: usize, j: usize) -> Result<Basket, DomainError> {
    let len = basket.len();
    for index in [i, j] {
        if index >= len {
            return Err(DomainError::IndexOutOfRange { index, len });
        }
    }
    if i == j {
        return Err(DomainError::SameEntry);
    }
    let p = basket.pairs().nth(i).expect("index checked");
    let q = basket.pairs().nth(j).expect("index checked");
    Ok(apply(basket, &PackingStep::new(p, q)))
}

fn apply(basket: &Basket, step: &PackingStep) -> Basket {
    let mut out = basket.clone();
    let removed = out.remove_one(step.left) && out.remove_one(step.right);
    debug_assert!(removed);
    out.insert(step.result, 1);
    out
}

/// Every distinct single packing of `basket`, one per unordered pair of
/// entry types.
pub fn single_packings(basket: &Basket) -> Vec<(PackingStep, Basket)> {
    let entries = basket.entries();
    let mut out = Vec::new();
    for (x, &(p, kp)) in entries.iter().enumerate() {
        if kp >= 2 {
            let step = PackingStep::new(p, p);
            out.push((step, apply(basket, &step)));
        }
        for &(q, _) in &entries[x + 1..] {
            let step = PackingStep::new(p, q);
            out.push((step, apply(basket, &step)));
        }
    }
    out
}

/// A closure constraint that, once violated, stays violated under further
/// packing, so the search may cut the branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneClause {
    /// `γ ≥ bound`; γ never increases under packing.
    GammaAtLeast(Rational),
    /// `−K³ ≤ bound` at the given `P̃₋₁`; the volume never decreases.
    K3AtMost { p1: u32, bound: Rational },
    /// `r_max ≤ bound`; r_max never decreases.
    RmaxAtMost(u32),
    /// `P̃₋ₘ ≤ bound` for `m ≥ 2`; these never decrease.
    PlurigenusAtMost { m: u32, p1: u32, bound: i64 },
}

impl PruneClause {
    pub fn holds(&self, basket: &Basket) -> bool {
        match self {
            PruneClause::GammaAtLeast(c) => gamma(basket) >= *c,
            PruneClause::K3AtMost { p1, bound } => {
                WeightedBasket::new(basket.clone(), *p1).anti_volume() <= bound
            }
            PruneClause::RmaxAtMost(c) => r_max(basket).map_or(true, |r| r <= *c),
            PruneClause::PlurigenusAtMost { m, p1, bound } => {
                let wb = WeightedBasket::new(basket.clone(), *p1);
                *Plurigenera::compute(&wb, *m).get(*m) <= *bound
            }
        }
    }
}

/// Search settings for [`closure`].
#[derive(Clone, Debug)]
pub struct ClosureOptions {
    pub prune: Vec<PruneClause>,
    /// Emit only baskets whose pairs are all coprime.
    pub coprime_only: bool,
    pub state_limit: usize,
    pub execution: Execution,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            prune: Vec::new(),
            coprime_only: false,
            state_limit: DEFAULT_STATE_LIMIT,
            execution: Execution::default(),
        }
    }
}

impl ClosureOptions {
    pub fn with_prune(prune: Vec<PruneClause>) -> Self {
        ClosureOptions {
            prune,
            ..ClosureOptions::default()
        }
    }
}

/// All baskets `B′` with `basket ⪰ B′` that satisfy every prune clause,
/// canonically sorted. The starting basket is included when it passes.
pub fn closure(basket: &Basket, options: &ClosureOptions) -> Result<Vec<Basket>, Truncated> {
    let keep = |b: &Basket| options.prune.iter().all(|c| c.holds(b));
    let mut all = search(basket, &keep, options.state_limit, options.execution)?;
    if options.coprime_only {
        all.retain(Basket::is_terminal);
    }
    Ok(all)
}

fn search<F>(
    root: &Basket,
    keep: &F,
    limit: usize,
    execution: Execution,
) -> Result<Vec<Basket>, Truncated>
where
    F: Fn(&Basket) -> bool + Sync,
{
    if !keep(root) {
        return Ok(Vec::new());
    }
    let mut found = vec![root.clone()];
    let mut frontier = vec![root.clone()];
    while !frontier.is_empty() {
        let children = execution.map(&frontier, |b| {
            single_packings(b)
                .into_iter()
                .map(|(_, child)| child)
                .collect::<Vec<_>>()
        });
        let mut level: HashSet<Basket> = HashSet::new();
        for child in children.into_iter().flatten() {
            if level.contains(&child) {
                continue;
            }
            level.insert(child);
            if found.len() + level.len() > limit {
                return Err(Truncated {
                    visited: found.len() + level.len(),
                    limit,
                });
            }
        }
        let candidates: Vec<Basket> = level.into_iter().collect();
        let passed = execution.map(&candidates, |b| keep(b));
        frontier = candidates
            .into_iter()
            .zip(passed)
            .filter_map(|(b, ok)| ok.then_some(b))
            .collect();
        found.extend(frontier.iter().cloned());
    }
    found.sort();
    Ok(found)
}

/// `basket ⪰ target`: target is reachable by finitely many packings.
pub fn dominates(basket: &Basket, target: &Basket) -> bool {
    if sigma(basket) != sigma(target)
        || basket.total_index() != target.total_index()
        || basket.len() < target.len()
    {
        return false;
    }
    let target_sigma_prime = sigma_prime(target);
    if sigma_prime(basket) < target_sigma_prime {
        return false;
    }
    let target_rmax = r_max(target).unwrap_or(0);
    let target_len = target.len();
    // σ′ and r_max are monotone along packings, so they bound the search.
    let keep = |b: &Basket| {
        b.len() >= target_len
            && sigma_prime(b) >= target_sigma_prime
            && r_max(b).unwrap_or(0) <= target_rmax
    };
    match search(basket, &keep, usize::MAX, Execution::Sequential) {
        Ok(all) => all.binary_search(target).is_ok(),
        Err(_) => unreachable!("unbounded search cannot truncate"),
    }
}
