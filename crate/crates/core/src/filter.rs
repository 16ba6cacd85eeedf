//! Numerical constraints satisfied by the weighted basket of any terminal
//! weak Q-Fano 3-fold.

use std::fmt;

use crate::riemann_roch::{gamma, r_index, r_max, sigma, Plurigenera, WeightedBasket};
use crate::rational::{ratio, Rational};

/// Which checks [`geometric_filter`] applies. Every check is independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterConfig {
    /// `−K³ > 0`, equivalently `σ′ < 2P̃₋₁ + σ − 6`.
    pub volume_positive: bool,
    /// `−K³ ≥ bound`.
    pub volume_floor: Option<Rational>,
    /// `P̃₋ₘ > 0` for `m ≥ from`, up to the horizon.
    pub positive_from: Option<u32>,
    /// `P̃₋₈ ≥ 2`.
    pub p8_at_least_two: bool,
    /// `r_X ≤ 660`, or `r_X = 840` with `r_max = 8`.
    pub index_bound: bool,
    /// `r_max ≤ bound`.
    pub rmax_bound: Option<u32>,
    /// `γ ≥ 0`.
    pub gamma_nonnegative: bool,
    /// `P̃₋ₘ₋ₙ ≥ P̃₋ₘ + P̃₋ₙ − 1` whenever both are positive and `m + n ≤ horizon`.
    pub superadditivity: bool,
    /// `σ = 10 − 5P̃₋₁ + P̃₋₂`.
    pub sigma_identity: bool,
    /// `P̃₋ₘ ∈ ℤ` up to the horizon.
    pub integrality: bool,
    pub horizon: u32,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            volume_positive: true,
            volume_floor: Some(ratio(1, 330)),
            positive_from: Some(6),
            p8_at_least_two: true,
            index_bound: true,
            rmax_bound: Some(24),
            gamma_nonnegative: true,
            superadditivity: true,
            sigma_identity: true,
            integrality: true,
            horizon: 24,
        }
    }
}

impl FilterConfig {
    /// No checks at all.
    pub fn none() -> Self {
        FilterConfig {
            volume_positive: false,
            volume_floor: None,
            positive_from: None,
            p8_at_least_two: false,
            index_bound: false,
            rmax_bound: None,
            gamma_nonnegative: false,
            superadditivity: false,
            sigma_identity: false,
            integrality: false,
            horizon: 24,
        }
    }

    fn needs_plurigenera(&self) -> bool {
        self.positive_from.is_some()
            || self.p8_at_least_two
            || self.superadditivity
            || self.sigma_identity
            || self.integrality
    }
}

/// The first check a weighted basket failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterCheck {
    VolumePositive,
    VolumeFloor,
    GammaNonnegative,
    RmaxBound,
    IndexBound,
    Integrality { m: u32 },
    SigmaIdentity,
    Positivity { m: u32 },
    P8AtLeastTwo,
    Superadditivity { m: u32, n: u32 },
}

impl fmt::Display for FilterCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterCheck::VolumePositive => write!(f, "-K^3 > 0"),
            FilterCheck::VolumeFloor => write!(f, "-K^3 lower bound"),
            FilterCheck::GammaNonnegative => write!(f, "gamma >= 0"),
            FilterCheck::RmaxBound => write!(f, "r_max bound"),
            FilterCheck::IndexBound => write!(f, "r_X <= 660 or r_X = 840 with r_max = 8"),
            FilterCheck::Integrality { m } => write!(f, "P[-{m}] integral"),
            FilterCheck::SigmaIdentity => write!(f, "sigma = 10 - 5 P[-1] + P[-2]"),
            FilterCheck::Positivity { m } => write!(f, "P[-{m}] > 0"),
            FilterCheck::P8AtLeastTwo => write!(f, "P[-8] >= 2"),
            FilterCheck::Superadditivity { m, n } => {
                write!(f, "P[-{}] >= P[-{m}] + P[-{n}] - 1", m + n)
            }
        }
    }
}

/// Applies the selected checks, cheapest first, and names the first failure.
pub fn geometric_filter(wb: &WeightedBasket, config: &FilterConfig) -> Result<(), FilterCheck> {
    let basket = wb.basket();
    let k3 = wb.anti_volume();
    if config.volume_positive && !k3.is_positive() {
        return Err(FilterCheck::VolumePositive);
    }
    if let Some(floor) = &config.volume_floor {
        if k3 < floor {
            return Err(FilterCheck::VolumeFloor);
        }
    }
    if config.gamma_nonnegative && gamma(basket).is_negative() {
        return Err(FilterCheck::GammaNonnegative);
    }
    if let (Some(bound), Ok(rmax)) = (config.rmax_bound, r_max(basket)) {
        if rmax > bound {
            return Err(FilterCheck::RmaxBound);
        }
    }
    if config.index_bound {
        let rx = r_index(basket);
        let ok = rx <= 660 || (rx == 840 && r_max(basket) == Ok(8));
        if !ok {
            return Err(FilterCheck::IndexBound);
        }
    }
    if !config.needs_plurigenera() {
        return Ok(());
    }
    let horizon = config.horizon.max(8);
    let p = Plurigenera::compute(wb, horizon);
    check_plurigenera(wb, &p, config)
}

/// The plurigenus-based checks, on precomputed values.
pub(crate) fn check_plurigenera(
    wb: &WeightedBasket,
    p: &Plurigenera,
    config: &FilterConfig,
) -> Result<(), FilterCheck> {
    let horizon = config.horizon.min(p.upto());
    if config.integrality {
        if let Some(m) = (1..=horizon).find(|&m| !p.get(m).is_integer()) {
            return Err(FilterCheck::Integrality { m });
        }
    }
    if config.sigma_identity && p.upto() >= 2 {
        let lhs = Rational::from(10) - Rational::from(5 * i64::from(wb.p1())) + p.get(2);
        if lhs != Rational::from(sigma(wb.basket())) {
            return Err(FilterCheck::SigmaIdentity);
        }
    }
    if let Some(from) = config.positive_from {
        if let Some(m) = (from..=horizon).find(|&m| !p.get(m).is_positive()) {
            return Err(FilterCheck::Positivity { m });
        }
    }
    if config.p8_at_least_two && p.upto() >= 8 && *p.get(8) < 2 {
        return Err(FilterCheck::P8AtLeastTwo);
    }
    if config.superadditivity {
        for m in 1..horizon {
            if !p.get(m).is_positive() {
                continue;
            }
            for n in m..=horizon - m {
                if !p.get(n).is_positive() {
                    continue;
                }
                if *p.get(m + n) < p.get(m) + p.get(n) - Rational::one() {
                    return Err(FilterCheck::Superadditivity { m, n });
                }
            }
        }
    }
    Ok(())
}
