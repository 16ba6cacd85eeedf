//! Numeric birationality criteria for anti-pluricanonical maps and the
//! per-basket pipeline computing `(n₁, m₀, n₂)`.
//!
//! Geometric hypotheses (Picard number, pencil structure, lower bounds on
//! `N₀`) cannot be checked numerically; they travel with each result as
//! assumption labels.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::basket::Basket;
use crate::filter::{geometric_filter, FilterCheck, FilterConfig};
use crate::rational::{ceil_sqrt, exceeds_sqrt, floor_add_sqrt, floor_sqrt, Rational};
use crate::riemann_roch::{r_index, r_max, Plurigenera, WeightedBasket};

fn big_to_i64(n: BigInt) -> i64 {
    n.to_i64().expect("bound fits in i64")
}

/// `λ(M) = M` for `M ≤ 3`, else `max{3, M/r_X, 2⌊√(M/2)⌋, M/⌈√(M/2)⌉}`.
pub fn lambda_of(big_m: u64, rx: u64) -> Rational {
    assert!(big_m >= 1 && rx >= 1, "M and r_X are positive");
    if big_m <= 3 {
        return Rational::from(big_m);
    }
    let half = Rational::new(big_m, 2u64);
    let lo = floor_sqrt(&half);
    let hi = ceil_sqrt(&half);
    Rational::from(3)
        .max(Rational::new(big_m, rx))
        .max(Rational::from(lo * 2))
        .max(Rational::new(big_m, hi))
}

/// `θ(M, N) = min{M/N, max{3, M/r_X, 2N}}`.
pub fn theta(big_m: u64, rx: u64, n: u64) -> Rational {
    assert!(n >= 1, "N is positive");
    let inner = Rational::from(3)
        .max(Rational::new(big_m, rx))
        .max(Rational::from(2 * n));
    Rational::new(big_m, n).min(inner)
}

/// `max_N θ(M, N)`; only `N ≤ M` can matter since `θ(M, N) ≤ M/N < 1`
/// beyond.
pub fn theta_max(big_m: u64, rx: u64) -> Rational {
    (1..=big_m.max(1))
        .map(|n| theta(big_m, rx, n))
        .max()
        .expect("non-empty range")
}

/// Volume data shared by every criterion: `−K³`, `r_X`, `M = r_X·(−K³)`,
/// `λ(M)` and `r_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeData {
    pub k3: Rational,
    pub rx: u64,
    pub big_m: u64,
    pub lambda: Rational,
    pub rmax: u32,
}

impl VolumeData {
    /// `None` unless `−K³ > 0` and the basket is non-empty.
    pub fn of(wb: &WeightedBasket) -> Option<Self> {
        let k3 = wb.anti_volume().clone();
        if !k3.is_positive() {
            return None;
        }
        let rmax = r_max(wb.basket()).ok()?;
        let rx = r_index(wb.basket());
        let m = &k3 * Rational::from(rx);
        assert!(m.is_integer(), "r_X(-K^3) is an integer");
        let big_m = m.to_i64().expect("small") as u64;
        Some(VolumeData {
            lambda: lambda_of(big_m, rx),
            k3,
            rx,
            big_m,
            rmax,
        })
    }
}

/// `P₋ₘ > λ(M)·m + 1`: `|−mK|` is not composed with a pencil, assuming the
/// Picard number hypothesis of the criterion.
pub fn not_pencil_by_plurigenus(wb: &WeightedBasket, m: u32) -> bool {
    let Some(data) = VolumeData::of(wb) else {
        return false;
    };
    let p = Plurigenera::compute(wb, m);
    exceeds_lambda_line(p.get(m), &data.lambda, m)
}

fn exceeds_lambda_line(p: &Rational, lambda: &Rational, m: u32) -> bool {
    *p > lambda * Rational::from(m) + Rational::one()
}

/// Why the Riemann–Roch lower bound does not apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotApplicable {
    /// `n < t`.
    BelowT,
    /// `3n < r_max·t`.
    BelowRmaxT,
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotApplicable::BelowT => write!(f, "bound not applicable: n < t"),
            NotApplicable::BelowRmaxT => write!(f, "bound not applicable: 3n < r_max t"),
        }
    }
}

impl std::error::Error for NotApplicable {}

/// `n(n+1)(2n+1)(−K³)/12 + 1 − 2n/t`, a lower bound for `P₋ₙ` when `n ≥ t`
/// and `3n ≥ r_max·t`.
pub fn rr_lower_bound(
    k3: &Rational,
    rmax: u32,
    n: u32,
    t: &Rational,
) -> Result<Rational, NotApplicable> {
    let n_r = Rational::from(n);
    if n_r < *t {
        return Err(NotApplicable::BelowT);
    }
    if Rational::from(3 * u64::from(n)) < Rational::from(rmax) * t {
        return Err(NotApplicable::BelowRmaxT);
    }
    let n = i64::from(n);
    Ok(Rational::new(n * (n + 1) * (2 * n + 1), 12) * k3 + Rational::one()
        - Rational::from(2 * n) / t)
}

/// An upper bound for `λ(M)/(−K³)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaBound {
    /// A rational value, e.g. the exact `λ/(−K³)`.
    Value(Rational),
    /// `max{1, 3/(−K³), √(2r_X/(−K³))}`.
    Estimate,
    /// `r_X`, from `λ ≤ M`.
    Index,
}

/// Least `m` with `m ≥ t`, `3m ≥ r_max·t` and
/// `m + 3/4 > √(12/(t·(−K³)) + 6·Λ + 1/16)` where `Λ ≥ λ/(−K³)`.
pub fn not_pencil_threshold(
    k3: &Rational,
    rx: u64,
    rmax: u32,
    t: &Rational,
    lambda_bound: &LambdaBound,
) -> u64 {
    assert!(k3.is_positive() && t.is_positive(), "-K^3 and t are positive");
    let base = Rational::from(12) / (t * k3) + Rational::new(1, 16);
    let start = t
        .ceil()
        .max((Rational::from(rmax) * t / Rational::from(3)).ceil())
        .max(BigInt::from(1));
    let mut m = big_to_i64(start);
    loop {
        if threshold_holds(m, k3, rx, &base, lambda_bound) {
            return m as u64;
        }
        m += 1;
    }
}

/// `(m + 3/4)² > base + 6Λ`, exactly.
fn threshold_holds(m: i64, k3: &Rational, rx: u64, base: &Rational, bound: &LambdaBound) -> bool {
    let lhs = Rational::from(m) + Rational::new(3, 4);
    let lhs_sq = &lhs * &lhs;
    let six = Rational::from(6);
    match bound {
        LambdaBound::Value(v) => lhs_sq > base + six * v,
        LambdaBound::Index => lhs_sq > base + six * Rational::from(rx),
        LambdaBound::Estimate => {
            // x > 6·max{R, √C}  ⇔  x > 6R and x > 6√C.
            let rational_part = Rational::one().max(Rational::from(3) / k3);
            let x = &lhs_sq - base;
            let radicand = Rational::from(36) * Rational::from(2 * rx) / k3;
            x > six * rational_part && exceeds_sqrt(&x, &radicand)
        }
    }
}

/// The three cases of the `n₂` bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundCase {
    One,
    Two,
    Three,
}

impl BoundCase {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(BoundCase::One),
            2 => Some(BoundCase::Two),
            3 => Some(BoundCase::Three),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            BoundCase::One => 1,
            BoundCase::Two => 2,
            BoundCase::Three => 3,
        }
    }

    pub const ALL: [BoundCase; 3] = [BoundCase::One, BoundCase::Two, BoundCase::Three];
}

impl fmt::Display for BoundCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.number())
    }
}

/// Inputs of the `n₂` bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionInputs {
    pub rx: u64,
    pub rmax: u32,
    /// Least `m` with `P₋ₘ ≥ 2`.
    pub m0: u32,
    /// An `m ≥ m₀` whose system is not composed with a pencil.
    pub m1: u32,
    /// `μ₀`, or a witness `μ′₀ ≥ μ₀`.
    pub mu0: Rational,
    /// Least `m` with `P₋ₘ ≥ 1`.
    pub nu0: u32,
    /// `N₀`, when a lower bound is assumed.
    pub n0: Option<u64>,
}

impl CriterionInputs {
    /// `a(m₀)`: 6 if `m₀ ≥ 2`, else 1.
    pub fn a_m0(&self) -> i64 {
        if self.m0 >= 2 {
            6
        } else {
            1
        }
    }
}

/// The `n₂` bound of the chosen case.
pub fn birational_bound_b(inputs: &CriterionInputs, case: BoundCase) -> i64 {
    let m0 = i64::from(inputs.m0);
    let m1 = i64::from(inputs.m1);
    let rmax = i64::from(inputs.rmax);
    let nu0 = i64::from(inputs.nu0);
    let mu = &inputs.mu0;
    let first = m0 + m1 + inputs.a_m0();
    let floor_mu = big_to_i64(mu.floor());
    match case {
        BoundCase::One => first.max(big_to_i64((Rational::from(3) * mu).floor()) + 3 * m1),
        BoundCase::Two => {
            let five_thirds = Rational::new(5, 3);
            let second = big_to_i64((&five_thirds * mu + five_thirds * Rational::from(m1)).floor());
            first.max(second).max(floor_mu + m1 + 2 * rmax)
        }
        BoundCase::Three => first.max(floor_mu + m1 + 2 * nu0 * rmax),
    }
}

/// `max{m₀ + a(m₀), ⌈μ′₀⌉ + 4ν₀r_max − 1, ⌊μ′₀ + √(8r_X/N₀)⌋}`; `None`
/// without an `N₀`.
pub fn birational_bound_b2(inputs: &CriterionInputs) -> Option<i64> {
    let n0 = inputs.n0?;
    assert!(n0 >= 1, "N0 is positive");
    let mu = &inputs.mu0;
    let first = i64::from(inputs.m0) + inputs.a_m0();
    let second = big_to_i64(mu.ceil()) + 4 * i64::from(inputs.nu0) * i64::from(inputs.rmax) - 1;
    let third = big_to_i64(floor_add_sqrt(mu, &Rational::new(8 * inputs.rx, n0)));
    Some(first.max(second).max(third))
}

/// Where a `μ′₀` witness comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MuSource {
    /// `μ′₀ = m₀`, always available.
    Unconditional,
    /// `m₀/(P₋ₘ₀ − 1)`, if `|−m₀K|` is composed with a pencil.
    Pencil,
    /// `k/(P₋ₖ − 1)`, if `|−kK|` and `|−m₀K|` are composed with the same pencil.
    SamePencil { k: u32 },
    /// Supplied by the caller.
    Given,
}

impl fmt::Display for MuSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuSource::Unconditional => write!(f, "mu0 = m0"),
            MuSource::Pencil => write!(f, "mu0 = m0/(P[-m0]-1), |-m0K| a pencil"),
            MuSource::SamePencil { k } => {
                write!(f, "mu0 = {k}/(P[-{k}]-1), |-{k}K| and |-m0K| the same pencil")
            }
            MuSource::Given => write!(f, "mu0 given"),
        }
    }
}

/// A `μ′₀` witness with the assumption it needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuCandidate {
    pub value: Rational,
    pub source: MuSource,
}

/// `m₀`, then `m₀/(P₋ₘ₀ − 1)`, then every `k/(P₋ₖ − 1)` with
/// `m₀ < k ≤ horizon` that improves on all earlier values.
pub fn mu0_candidates(wb: &WeightedBasket, m0: u32, horizon: u32) -> Vec<MuCandidate> {
    let p = Plurigenera::compute(wb, horizon.max(m0));
    let pm0 = p.get(m0);
    assert!(*pm0 >= 2, "P[-m0] >= 2");
    let mut out = vec![
        MuCandidate {
            value: Rational::from(m0),
            source: MuSource::Unconditional,
        },
        MuCandidate {
            value: Rational::from(m0) / (pm0 - Rational::one()),
            source: MuSource::Pencil,
        },
    ];
    let mut best = out[1].value.clone();
    for k in m0 + 1..=horizon {
        let pk = p.get(k);
        if *pk < 2 {
            continue;
        }
        let value = Rational::from(k) / (pk - Rational::one());
        if value < best {
            best = value.clone();
            out.push(MuCandidate {
                value,
                source: MuSource::SamePencil { k },
            });
        }
    }
    out
}

/// How `n₁` is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N1Policy {
    /// The inequality must hold for `count` consecutive values starting at `n₁`.
    Window(u32),
    /// One value suffices (`P₋₁ > 0` propagates it to all larger `m`).
    Single,
}

impl fmt::Display for N1Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            N1Policy::Window(n) => write!(f, "window{n}"),
            N1Policy::Single => write!(f, "single"),
        }
    }
}

/// The certificate used on the same-pencil leaf of a split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SameLeaf {
    /// The `b` bound of this case with `m₁ = n₁` and `μ₀ = k/(P₋ₖ − 1)`.
    Case(BoundCase),
    /// The `b2` bound with `μ′₀ = k/(P₋ₖ − 1)` and this `N₀`.
    B2 { n0: u64 },
}

/// Split on whether `|−kK|` and `|−m₀K|` are composed with the same pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Split {
    pub k: u32,
    /// Case used with `m₁ = k`, `μ₀ = m₀` when the pencils differ.
    pub not_same: BoundCase,
    pub same: SameLeaf,
}

/// An extra `b2` certificate under an assumed `N₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Spec {
    pub n0: u64,
    pub mu: Option<Rational>,
}

/// Branch choices for [`table_pipeline`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPolicy {
    pub n1: N1Policy,
    pub case: BoundCase,
    /// The case used for rows marked as taking the other branch.
    pub alt_case: Option<BoundCase>,
    pub split: Option<Split>,
    pub b2: Option<B2Spec>,
    /// Largest `m` searched for `n₁`, `m₀`, `ν₀`.
    pub horizon: u32,
    /// Checked before anything else; `None` skips the filter.
    pub filter: Option<FilterConfig>,
}

impl BranchPolicy {
    /// The usual choice: six consecutive values and case 2 when `P₋₁ = 0`,
    /// a single value and case 3 otherwise.
    pub fn for_p1(p1: u32) -> Self {
        let (n1, case) = if p1 == 0 {
            (N1Policy::Window(6), BoundCase::Two)
        } else {
            (N1Policy::Single, BoundCase::Three)
        };
        BranchPolicy {
            n1,
            case,
            alt_case: None,
            split: None,
            b2: None,
            horizon: 200,
            filter: Some(FilterConfig::default()),
        }
    }
}

/// Which bound produced a branch value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionUsed {
    B(BoundCase),
    B2,
}

impl fmt::Display for CriterionUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionUsed::B(case) => write!(f, "{case}"),
            CriterionUsed::B2 => write!(f, "b2"),
        }
    }
}

/// One `n₂` certificate and the assumption it rests on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    pub assumption: String,
    pub criterion: CriterionUsed,
    pub m1: u32,
    pub mu0: Rational,
    pub mu_source: MuSource,
    pub n0: Option<u64>,
    pub n2: i64,
}

/// Why the pipeline produced no report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineError {
    Rejected(FilterCheck),
    NonPositiveVolume,
    /// No `n₁`, `m₀` or `ν₀` within the horizon.
    BeyondHorizon { what: &'static str, horizon: u32 },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Rejected(check) => write!(f, "rejected by filter: {check}"),
            PipelineError::NonPositiveVolume => write!(f, "-K^3 <= 0"),
            PipelineError::BeyondHorizon { what, horizon } => {
                write!(f, "no {what} up to m = {horizon}")
            }
        }
    }
}

impl std::error::Error for PipelineError {}

/// Per-basket output of [`table_pipeline`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirationalityReport {
    pub basket: Basket,
    pub p1: u32,
    pub volume: VolumeData,
    pub n1: u32,
    pub n1_policy: N1Policy,
    pub m0: u32,
    pub nu0: u32,
    pub mu_candidates: Vec<MuCandidate>,
    /// The branch tree: the unconditional certificate, then split leaves.
    pub branches: Vec<Branch>,
    /// Other certificates kept for audit; not part of the headline.
    pub alternatives: Vec<Branch>,
    /// Worst case over the assumption leaves, each leaf taking its best
    /// certificate; without a split this is the unconditional value.
    pub headline_n2: i64,
}

impl BirationalityReport {
    /// The unconditional certificate.
    pub fn primary(&self) -> &Branch {
        &self.branches[0]
    }

    /// A certificate with the given criterion, among branches and alternatives.
    pub fn bound_for(&self, criterion: CriterionUsed) -> Option<i64> {
        self.branches
            .iter()
            .chain(&self.alternatives)
            .find(|b| b.criterion == criterion && b.mu_source == MuSource::Unconditional)
            .map(|b| b.n2)
    }

    /// Columns `B −K³ M λ n₁ m₀ r_max n₂`, tab separated, then one indented
    /// line per branch.
    pub fn to_text(&self) -> String {
        let v = &self.volume;
        let mut s = format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            self.basket, v.k3, v.big_m, v.lambda, self.n1, self.m0, v.rmax, self.headline_n2
        );
        for (label, list) in [("branch", &self.branches), ("alternative", &self.alternatives)] {
            for b in list {
                let _ = writeln!(
                    s,
                    "  {label} {}: {} m1={} mu0={} n2={} [{}; {}]",
                    b.name,
                    b.criterion,
                    b.m1,
                    b.mu0,
                    b.n2,
                    b.assumption,
                    b.mu_source
                );
            }
        }
        s
    }

    /// One `key=value` record per branch and alternative, tab separated.
    pub fn to_records(&self) -> String {
        let v = &self.volume;
        let mut s = String::new();
        for (kind, list) in [("branch", &self.branches), ("alternative", &self.alternatives)] {
            for b in list {
                let _ = writeln!(
                    s,
                    "basket={}\tp1={}\tk3={}\tM={}\tlambda={}\tn1={}\tm0={}\tnu0={}\trmax={}\trx={}\tkind={kind}\tname={}\tcriterion={}\tm1={}\tmu0={}\tn0={}\tn2={}\theadline_n2={}",
                    self.basket,
                    self.p1,
                    v.k3,
                    v.big_m,
                    v.lambda,
                    self.n1,
                    self.m0,
                    self.nu0,
                    v.rmax,
                    v.rx,
                    b.name,
                    b.criterion,
                    b.m1,
                    b.mu0,
                    b.n0.map_or_else(|| "-".to_string(), |n| n.to_string()),
                    b.n2,
                    self.headline_n2
                );
            }
        }
        s
    }
}

/// Least `n` certified by the policy.
pub fn find_n1(p: &Plurigenera, lambda: &Rational, policy: N1Policy) -> Option<u32> {
    let width = match policy {
        N1Policy::Window(w) => w.max(1),
        N1Policy::Single => 1,
    };
    let last = p.upto().checked_sub(width - 1)?;
    (1..=last).find(|&m| (m..m + width).all(|n| exceeds_lambda_line(p.get(n), lambda, n)))
}

/// Runs the criteria on one weighted basket.
pub fn table_pipeline(
    wb: &WeightedBasket,
    policy: &BranchPolicy,
) -> Result<BirationalityReport, PipelineError> {
    if let Some(filter) = &policy.filter {
        geometric_filter(wb, filter).map_err(PipelineError::Rejected)?;
    }
    let volume = VolumeData::of(wb).ok_or(PipelineError::NonPositiveVolume)?;
    let horizon = policy.horizon;
    let extra = match policy.n1 {
        N1Policy::Window(w) => w,
        N1Policy::Single => 0,
    };
    let p = Plurigenera::compute(wb, horizon + extra);
    let beyond = |what| PipelineError::BeyondHorizon { what, horizon };
    let n1 = find_n1(&p, &volume.lambda, policy.n1)
        .filter(|&n| n <= horizon)
        .ok_or(beyond("n1"))?;
    let m0 = p.first_at_least(2).ok_or(beyond("m0"))?;
    let nu0 = p.first_at_least(1).ok_or(beyond("nu0"))?;
    let inputs = |m1: u32, mu0: Rational, n0: Option<u64>| CriterionInputs {
        rx: volume.rx,
        rmax: volume.rmax,
        m0,
        m1,
        mu0,
        nu0,
        n0,
    };
    let case_branch = |name: &str, assumption: &str, case: BoundCase, m1, mu: MuCandidate| {
        let n2 = birational_bound_b(&inputs(m1, mu.value.clone(), None), case);
        Branch {
            name: name.to_string(),
            assumption: assumption.to_string(),
            criterion: CriterionUsed::B(case),
            m1,
            mu0: mu.value,
            mu_source: mu.source,
            n0: None,
            n2,
        }
    };
    let b2_branch = |name: &str, assumption: String, n0: u64, mu: MuCandidate| {
        let n2 = birational_bound_b2(&inputs(n1, mu.value.clone(), Some(n0))).expect("n0 given");
        Branch {
            name: name.to_string(),
            assumption,
            criterion: CriterionUsed::B2,
            m1: n1,
            mu0: mu.value,
            mu_source: mu.source,
            n0: Some(n0),
            n2,
        }
    };
    let unconditional = || MuCandidate {
        value: Rational::from(m0),
        source: MuSource::Unconditional,
    };

    let primary = case_branch(
        "primary",
        "|-n1K| not composed with a pencil",
        policy.case,
        n1,
        unconditional(),
    );
    let mut headline = primary.n2;
    let mut branches = vec![primary];

    if let Some(split) = policy.split {
        let k = split.k;
        let pk = if k <= p.upto() {
            p.get(k).clone()
        } else {
            Plurigenera::compute(wb, k).get(k).clone()
        };
        let same_mu = MuCandidate {
            value: Rational::from(k) / (&pk - Rational::one()),
            source: MuSource::SamePencil { k },
        };
        let not_same = case_branch(
            "not-same-pencil",
            &format!("|-{k}K| and |-{m0}K| not composed with the same pencil"),
            split.not_same,
            k,
            unconditional(),
        );
        let same_assumption = format!("|-{k}K| and |-{m0}K| composed with the same pencil");
        let same = match split.same {
            SameLeaf::Case(case) => case_branch("same-pencil", &same_assumption, case, n1, same_mu),
            SameLeaf::B2 { n0 } => b2_branch(
                "same-pencil",
                format!("{same_assumption}; N0 >= {n0}"),
                n0,
                same_mu,
            ),
        };
        headline = headline
            .min(not_same.n2)
            .max(headline.min(same.n2));
        branches.push(not_same);
        branches.push(same);
    }

    let mut alternatives: Vec<Branch> = BoundCase::ALL
        .into_iter()
        .filter(|&c| c != policy.case)
        .map(|c| {
            case_branch(
                &format!("case{}", c.number()),
                "|-n1K| not composed with a pencil",
                c,
                n1,
                unconditional(),
            )
        })
        .collect();
    if let Some(spec) = &policy.b2 {
        let mu = match &spec.mu {
            Some(v) => MuCandidate {
                value: v.clone(),
                source: MuSource::Given,
            },
            None => unconditional(),
        };
        alternatives.push(b2_branch("b2", format!("N0 >= {}", spec.n0), spec.n0, mu));
    }

    Ok(BirationalityReport {
        basket: wb.basket().clone(),
        p1: wb.p1(),
        mu_candidates: mu0_candidates(wb, m0, horizon),
        volume,
        n1,
        n1_policy: policy.n1,
        m0,
        nu0,
        branches,
        alternatives,
        headline_n2: headline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn wb(s: &str, p1: u32) -> WeightedBasket {
        WeightedBasket::new(s.parse().unwrap(), p1)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_of(1, 330), Rational::from(1));
        assert_eq!(lambda_of(83, 840), Rational::from(12));
        assert_eq!(lambda_of(47, 840), ratio(47, 5));
        assert_eq!(lambda_of(17, 210), ratio(17, 3));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(1, 330, 1), Rational::from(1));
        assert_eq!(theta(8, 40, 2), Rational::from(4));
    }

    #[test]
    fn rr_bound_examples() {
        assert_eq!(
            rr_lower_bound(&ratio(1, 30), 24, 18, &ratio(18, 8)),
            Ok(ratio(403, 20))
        );
        let v = rr_lower_bound(&ratio(3, 25), 13, 10, &ratio(30, 13)).unwrap();
        assert!(v > Rational::from(15));
        assert_eq!(
            rr_lower_bound(&ratio(1, 30), 24, 2, &ratio(18, 8)),
            Err(NotApplicable::BelowT)
        );
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(
            not_pencil_threshold(&ratio(1, 165), 165, 24, &ratio(37, 8), &LambdaBound::Index),
            37
        );
        assert_eq!(
            not_pencil_threshold(&ratio(1, 30), 660, 24, &ratio(35, 8), &LambdaBound::Value(199.into())),
            35
        );
        assert_eq!(
            not_pencil_threshold(&ratio(47, 840), 840, 8, &Rational::from(12), &LambdaBound::Value(174.into())),
            32
        );
    }

    #[test]
    fn bounds_examples() {
        let t18 = CriterionInputs {
            rx: 60,
            rmax: 5,
            m0: 8,
            m1: 20,
            mu0: 8.into(),
            nu0: 3,
            n0: None,
        };
        assert_eq!(birational_bound_b(&t18, BoundCase::Two), 46);
        let t17 = CriterionInputs {
            rx: 840,
            rmax: 8,
            m0: 5,
            m1: 27,
            mu0: 5.into(),
            nu0: 1,
            n0: None,
        };
        assert_eq!(birational_bound_b(&t17, BoundCase::Three), 48);
        let p8 = CriterionInputs {
            rx: 660,
            rmax: 11,
            m0: 8,
            m1: 8,
            mu0: ratio(1, 2),
            nu0: 1,
            n0: Some(2),
        };
        assert_eq!(birational_bound_b2(&p8), Some(51));
    }

    #[test]
    fn x66_split() {
        let mut policy = BranchPolicy::for_p1(1);
        policy.split = Some(Split {
            k: 24,
            not_same: BoundCase::Three,
            same: SameLeaf::B2 { n0: 1 },
        });
        let r = table_pipeline(&wb("(1,2),(2,5),(1,3),(2,11)", 1), &policy).unwrap();
        assert_eq!((r.n1, r.m0, r.nu0), (37, 5, 1));
        assert_eq!(r.primary().n2, 64);
        assert_eq!(r.branches[1].n2, 51);
        assert_eq!(r.branches[2].mu0, ratio(24, 15));
        assert_eq!(r.branches[2].n2, 52);
        assert_eq!(r.headline_n2, 52);
    }

    #[test]
    fn mu_candidates_start_with_m0() {
        let w = wb("(1,2),(2,5),(2,7),(1,9)", 1);
        let c = mu0_candidates(&w, 7, 18);
        assert_eq!(c[0].value, Rational::from(7));
        assert!(c
            .iter()
            .any(|m| m.value == ratio(18, 21) && m.source == MuSource::SamePencil { k: 18 }));
    }
}
