//! Exact enumeration over carrier tables.
//!
//! Every dataset is a split `(r0, r1)` of carriers between controls and cases
//! for fixed group sizes. Datasets are organised in rows by carrier total
//! `t = r0 + r1`; within a row `r1` runs over `max(0, t - m0)..=min(m1, t)`.
//! Sums are always taken in ascending `(t, r1)` order so results do not
//! depend on how work is split across threads.

mod alternative;
mod pvalue;
mod rejection;
mod strat;
mod window;

use std::fmt;
use std::str::FromStr;

pub use alternative::{power, solve_alternative, AlternativeModel};
pub use pvalue::{au_pvalue, perm_pvalue};
pub use rejection::t1er;
pub use strat::{
    strat_au_pvalue, strat_au_pvalue_capped, strat_perm_pvalue, strat_perm_pvalue_capped,
    StratifiedCounts, DEFAULT_JOINT_CAP,
};
pub use window::{window_fitted, window_null, EnumerationWindow};

use crate::error::{Error, Result};
use crate::stats::{Counts2x2, FirthState, Statistic};

/// Default per-tail truncation mass.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Relative slack when comparing an enumerated statistic with the observed
/// one; values equal in exact arithmetic count as at least as extreme.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn extreme_threshold(observed: f64) -> f64 {
    observed.abs() * (1.0 - TIE_TOLERANCE)
}

/// How a p-value is obtained for a given statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Chi-square(1) reference distribution (exact conditional for Fisher).
    Standard,
    /// Conditional on the carrier total (hypergeometric null).
    Permutation,
    /// Approximate unconditional: fitted independent binomials.
    Au,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Standard, Method::Permutation, Method::Au];

    pub fn name(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Permutation => "perm",
            Method::Au => "au",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" => Ok(Method::Standard),
            "perm" | "permutation" => Ok(Method::Permutation),
            "au" => Ok(Method::Au),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// Independent-binomial null: every subject carries the variant with
/// probability `emac / (m0 + m1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullModel {
    m0: usize,
    m1: usize,
    emac: f64,
}

impl NullModel {
    pub fn new(m0: usize, m1: usize, emac: f64) -> Result<Self> {
        let total = m0 + m1;
        if total == 0 {
            return Err(Error::domain("null model has no subjects"));
        }
        if !(emac >= 0.0 && emac <= total as f64) {
            return Err(Error::domain(format!(
                "expected carrier count {emac} outside [0, {total}]"
            )));
        }
        Ok(NullModel { m0, m1, emac })
    }

    /// Null model at a given minor allele frequency, counting carriers of at
    /// least one copy.
    pub fn from_maf(m0: usize, m1: usize, maf: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&maf) {
            return Err(Error::domain(format!("allele frequency {maf} outside [0, 1]")));
        }
        let carrier = 1.0 - (1.0 - maf) * (1.0 - maf);
        Self::new(m0, m1, (m0 + m1) as f64 * carrier)
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn emac(&self) -> f64 {
        self.emac
    }

    pub fn carrier_prob(&self) -> f64 {
        (self.emac / (self.m0 + self.m1) as f64).clamp(0.0, 1.0)
    }
}

/// `r1` range of the row with carrier total `t`.
pub(crate) fn row_bounds(m0: usize, m1: usize, t: usize) -> (usize, usize) {
    (t.saturating_sub(m0), m1.min(t))
}

/// Statistics for every dataset in row `t`, in ascending `r1`. Firth fits in
/// a row warm-start from their left neighbour, beginning from a cold start.
pub(crate) fn row_statistics(stat: Statistic, m0: usize, m1: usize, t: usize) -> Vec<f64> {
    let (lo, hi) = row_bounds(m0, m1, t);
    let mut state = FirthState::default();
    (lo..=hi)
        .map(|r1| {
            let d = Counts2x2 { m0, m1, r0: t - r1, r1 };
            stat.evaluate_warm(&d, &mut state)
        })
        .collect()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("significance level {alpha} outside (0, 1]")))
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::domain(format!("truncation mass {epsilon} outside [0, 1)")))
    }
}
