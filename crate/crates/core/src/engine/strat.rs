//! Stratified permutation and AU tests. Each stratum contributes its own
//! reference distribution; the joint statistic is the sum of per-stratum
//! statistics and joint probabilities are products across strata.

use crate::error::{Error, Result};
use crate::stats::{Counts2x2, TestKind};

use super::extreme_threshold;
use super::pvalue::{au_reference, permutation_reference, Reference};

/// Default limit on the number of joint datasets enumerated.
pub const DEFAULT_JOINT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedCounts {
    strata: Vec<Counts2x2>,
}

impl StratifiedCounts {
    pub fn new(strata: Vec<Counts2x2>) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::domain("stratified data needs at least one stratum"));
        }
        Ok(StratifiedCounts { strata })
    }

    pub fn strata(&self) -> &[Counts2x2] {
        &self.strata
    }

    pub fn carriers(&self) -> usize {
        self.strata.iter().map(Counts2x2::carriers).sum()
    }

    /// Strata sorted by their counts, so that floating-point sums do not
    /// depend on the order strata were supplied in.
    fn canonical_order(&self) -> Vec<&Counts2x2> {
        let mut sorted: Vec<&Counts2x2> = self.strata.iter().collect();
        sorted.sort_by_key(|d| (d.m0, d.m1, d.r0, d.r1));
        sorted
    }
}

fn joint_pvalue(references: &[Reference], cap: u64) -> Result<f64> {
    let required = references
        .iter()
        .fold(1u128, |acc, r| acc.saturating_mul(r.items.len() as u128));
    if required > cap as u128 {
        return Err(Error::ResourceLimit { required, cap });
    }
    let observed = references.iter().fold(0.0, |acc, r| acc + r.observed);
    let threshold = extreme_threshold(observed);

    struct Tally {
        total: f64,
        included: u128,
    }

    fn visit(refs: &[Reference], stat: f64, prob: f64, threshold: f64, tally: &mut Tally) {
        match refs.split_first() {
            None => {
                if stat.abs() >= threshold {
                    tally.total += prob;
                    tally.included += 1;
                }
            }
            Some((first, rest)) => {
                for &(s, p) in &first.items {
                    visit(rest, stat + s, prob * p, threshold, tally);
                }
            }
        }
    }

    let mut tally = Tally { total: 0.0, included: 0 };
    visit(references, 0.0, 1.0, threshold, &mut tally);
    if tally.included == required && references.iter().all(|r| r.complete) {
        Ok(1.0)
    } else {
        Ok(tally.total.min(1.0))
    }
}

/// Stratified permutation p-value with the default joint-enumeration cap.
pub fn strat_perm_pvalue(kind: TestKind, data: &StratifiedCounts) -> Result<f64> {
    strat_perm_pvalue_capped(kind, data, DEFAULT_JOINT_CAP)
}

pub fn strat_perm_pvalue_capped(kind: TestKind, data: &StratifiedCounts, cap: u64) -> Result<f64> {
    let stat = kind.require_statistic()?;
    let refs: Vec<Reference> = data
        .canonical_order()
        .into_iter()
        .map(|d| permutation_reference(stat, d))
        .collect();
    joint_pvalue(&refs, cap)
}

/// Stratified AU p-value; each stratum is truncated to its own fitted window.
pub fn strat_au_pvalue(kind: TestKind, data: &StratifiedCounts, epsilon: f64) -> Result<f64> {
    strat_au_pvalue_capped(kind, data, epsilon, DEFAULT_JOINT_CAP)
}

pub fn strat_au_pvalue_capped(
    kind: TestKind,
    data: &StratifiedCounts,
    epsilon: f64,
    cap: u64,
) -> Result<f64> {
    let stat = kind.require_statistic()?;
    let refs = data
        .canonical_order()
        .into_iter()
        .map(|d| au_reference(stat, d, epsilon))
        .collect::<Result<Vec<_>>>()?;
    joint_pvalue(&refs, cap)
}
