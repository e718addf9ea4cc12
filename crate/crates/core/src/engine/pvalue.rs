use crate::dist::{ln_binom_pmf_unchecked, ln_hypergeom_unchecked};
use crate::error::Result;
use crate::stats::{Counts2x2, Statistic, TestKind};

use super::{check_epsilon, extreme_threshold, row_bounds, row_statistics, window_fitted};

/// Enumerated datasets of one table: `(statistic, probability)` pairs in
/// canonical order, plus the observed statistic. `complete` marks a
/// reference whose probabilities sum to one exactly (no truncation), so a
/// p-value covering every item is exactly 1.
pub(crate) struct Reference {
    pub items: Vec<(f64, f64)>,
    pub observed: f64,
    pub complete: bool,
}

impl Reference {
    fn single_point() -> Self {
        Reference {
            items: vec![(0.0, 1.0)],
            observed: 0.0,
            complete: true,
        }
    }

    pub fn pvalue(&self) -> f64 {
        tail_sum(&self.items, self.observed, self.complete)
    }
}

/// Probability of items at least as extreme as `observed`.
pub(crate) fn tail_sum(items: &[(f64, f64)], observed: f64, complete: bool) -> f64 {
    let threshold = extreme_threshold(observed);
    let mut included = 0;
    let total = items
        .iter()
        .filter(|(s, _)| s.abs() >= threshold)
        .fold(0.0, |acc, (_, p)| {
            included += 1;
            acc + p
        });
    if complete && included == items.len() {
        1.0
    } else {
        total.min(1.0)
    }
}

/// Datasets sharing the observed carrier total, weighted by the
/// hypergeometric distribution.
pub(crate) fn permutation_reference(stat: Statistic, d: &Counts2x2) -> Reference {
    if d.m0 == 0 || d.m1 == 0 {
        return Reference::single_point();
    }
    let t = d.carriers();
    let (lo, _) = row_bounds(d.m0, d.m1, t);
    let stats = row_statistics(stat, d.m0, d.m1, t);
    let observed = stats[d.r1 - lo];
    let items = stats
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, ln_hypergeom_unchecked(d.m0, d.m1, t, lo + i).exp()))
        .collect();
    Reference { items, observed, complete: true }
}

/// All datasets whose carrier total lies in the fitted window, weighted by
/// independent binomials at the pooled carrier proportion.
pub(crate) fn au_reference(stat: Statistic, d: &Counts2x2, epsilon: f64) -> Result<Reference> {
    check_epsilon(epsilon)?;
    if d.m0 == 0 || d.m1 == 0 {
        return Ok(Reference::single_point());
    }
    let (m0, m1) = (d.m0, d.m1);
    let n = d.total();
    let t = d.carriers();
    let p_hat = t as f64 / n as f64;
    let window = window_fitted(n, t, epsilon)?;
    let control_pmf: Vec<f64> = (0..=m0.min(window.t_max))
        .map(|k| ln_binom_pmf_unchecked(m0, p_hat, k).exp())
        .collect();
    let case_pmf: Vec<f64> = (0..=m1.min(window.t_max))
        .map(|k| ln_binom_pmf_unchecked(m1, p_hat, k).exp())
        .collect();

    let mut items = Vec::new();
    let mut observed = 0.0;
    for row in window.t_min..=window.t_max {
        let (lo, _) = row_bounds(m0, m1, row);
        let stats = row_statistics(stat, m0, m1, row);
        if row == t {
            observed = stats[d.r1 - lo];
        }
        for (i, s) in stats.into_iter().enumerate() {
            let r1 = lo + i;
            items.push((s, control_pmf[row - r1] * case_pmf[r1]));
        }
    }
    let complete = window.t_min == 0 && window.t_max == n;
    Ok(Reference { items, observed, complete })
}

/// Permutation p-value: conditional on the carrier total, the probability of
/// a statistic at least as extreme as observed.
pub fn perm_pvalue(kind: TestKind, data: &Counts2x2) -> Result<f64> {
    let stat = kind.require_statistic()?;
    Ok(permutation_reference(stat, data).pvalue())
}

/// Approximate unconditional p-value, truncated to carrier totals between
/// the lower and upper `epsilon` tails of the fitted total.
pub fn au_pvalue(kind: TestKind, data: &Counts2x2, epsilon: f64) -> Result<f64> {
    let stat = kind.require_statistic()?;
    Ok(au_reference(stat, data, epsilon)?.pvalue())
}
