//! Probability of rejection under a product-binomial data model, summed over
//! every dataset whose carrier total lies at or below a cut-off.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dist::{
    chisq1_sf_unchecked, ln_binom_pmf_unchecked, ln_hypergeom_unchecked, upper_tail_cut,
    BinomParams,
};
use crate::error::{Error, Result};
use crate::stats::{fisher_pvalue, Counts2x2, Statistic, TestKind};

use super::pvalue::tail_sum;
use super::{
    check_alpha, check_epsilon, extreme_threshold, row_bounds, row_statistics, window_fitted,
    window_null, Method, NullModel,
};

/// Data-generating distribution: independent `Binom(m0, p0)` and
/// `Binom(m1, p1)` carrier counts, truncated to totals `<= t_max`.
pub(crate) struct DataModel {
    pub m0: usize,
    pub m1: usize,
    pub control_pmf: Vec<f64>,
    pub case_pmf: Vec<f64>,
    pub t_max: usize,
}

impl DataModel {
    pub fn new(m0: usize, m1: usize, p0: f64, p1: f64, t_max: usize) -> Result<Self> {
        let controls = BinomParams::new(m0, p0)?;
        let cases = BinomParams::new(m1, p1)?;
        Ok(DataModel {
            m0,
            m1,
            control_pmf: controls.pmf_table(t_max),
            case_pmf: cases.pmf_table(t_max),
            t_max: t_max.min(m0 + m1),
        })
    }
}

/// Statistics for every dataset with carrier total `<= cap`.
struct StatGrid {
    rows: Vec<Vec<f64>>,
}

impl StatGrid {
    fn build(stat: Statistic, m0: usize, m1: usize, cap: usize) -> Self {
        let rows = (0..=cap.min(m0 + m1))
            .into_par_iter()
            .map(|t| row_statistics(stat, m0, m1, t))
            .collect();
        StatGrid { rows }
    }
}

/// Unconditional reference distribution fitted at carrier total `t`, sorted
/// so that tail probabilities are prefix sums.
struct SortedTail {
    stats: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SortedTail {
    fn build(grid: &StatGrid, m0: usize, m1: usize, t: usize, epsilon: f64) -> Result<Self> {
        let n = m0 + m1;
        let p_hat = t as f64 / n as f64;
        let window = window_fitted(n, t, epsilon)?;
        let mut entries = Vec::new();
        for row in window.t_min..=window.t_max {
            let (lo, _) = row_bounds(m0, m1, row);
            for (i, &s) in grid.rows[row].iter().enumerate() {
                let r1 = lo + i;
                let prob = (ln_binom_pmf_unchecked(m0, p_hat, row - r1)
                    + ln_binom_pmf_unchecked(m1, p_hat, r1))
                .exp();
                entries.push((s.abs(), prob));
            }
        }
        entries.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut running = 0.0;
        let cumulative = entries
            .iter()
            .map(|&(_, p)| {
                running += p;
                running
            })
            .collect();
        Ok(SortedTail {
            stats: entries.into_iter().map(|(s, _)| s).collect(),
            cumulative,
        })
    }

    fn pvalue(&self, observed: f64) -> f64 {
        let threshold = extreme_threshold(observed);
        let count = self
            .stats
            .partition_point(|s| s.partial_cmp(&threshold) != Some(Ordering::Less));
        if count == 0 {
            0.0
        } else {
            self.cumulative[count - 1].min(1.0)
        }
    }
}

/// p-values of every dataset in row `t`, ascending `r1`.
fn row_pvalues(
    method: Method,
    grid: Option<&StatGrid>,
    m0: usize,
    m1: usize,
    t: usize,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let (lo, hi) = row_bounds(m0, m1, t);
    if m0 == 0 || m1 == 0 {
        return Ok(vec![1.0; hi - lo + 1]);
    }
    let Some(grid) = grid else {
        // Fisher's exact test is the only kind without a statistic.
        return Ok((lo..=hi)
            .map(|r1| fisher_pvalue(&Counts2x2 { m0, m1, r0: t - r1, r1 }))
            .collect());
    };
    let stats = &grid.rows[t];
    match method {
        Method::Standard => Ok(stats.iter().map(|&s| chisq1_sf_unchecked(s)).collect()),
        Method::Permutation => {
            let items: Vec<(f64, f64)> = (lo..=hi)
                .zip(stats)
                .map(|(r1, &s)| (s, ln_hypergeom_unchecked(m0, m1, t, r1).exp()))
                .collect();
            Ok(stats
                .iter()
                .map(|&observed| tail_sum(&items, observed, true))
                .collect())
        }
        Method::Au => {
            let tail = SortedTail::build(grid, m0, m1, t, epsilon)?;
            Ok(stats.iter().map(|&s| tail.pvalue(s)).collect())
        }
    }
}

/// Total probability of datasets with p-value `<= alpha`.
pub(crate) fn rejection_mass(
    kind: TestKind,
    method: Method,
    data: &DataModel,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_epsilon(epsilon)?;
    let (m0, m1) = (data.m0, data.m1);
    let stat = match (kind.statistic(), method) {
        (None, Method::Standard) => None,
        (None, _) => return Err(Error::UnsupportedKind(kind)),
        (Some(stat), _) => Some(stat),
    };
    let cap = match method {
        // The fitted window grows with the observed total.
        Method::Au if data.t_max > 0 => window_fitted(m0 + m1, data.t_max, epsilon)?.t_max,
        _ => data.t_max,
    };
    let grid = stat.map(|s| StatGrid::build(s, m0, m1, cap));

    let per_row: Vec<f64> = (0..=data.t_max)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let pvalues = row_pvalues(method, grid.as_ref(), m0, m1, t, epsilon)?;
            let (lo, _) = row_bounds(m0, m1, t);
            Ok(pvalues
                .iter()
                .enumerate()
                .filter(|(_, &p)| p <= alpha)
                .fold(0.0, |acc, (i, _)| {
                    let r1 = lo + i;
                    acc + data.control_pmf[t - r1] * data.case_pmf[r1]
                }))
        })
        .collect::<Result<_>>()?;
    Ok(per_row.iter().fold(0.0, |acc, x| acc + x))
}

/// Type I error rate at nominal level `alpha`: null probability of every
/// dataset the test declares significant, omitting carrier totals in the
/// upper `epsilon` tail.
pub fn t1er(
    kind: TestKind,
    method: Method,
    model: &NullModel,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    let window = window_null(model, epsilon)?;
    let p = model.carrier_prob();
    let data = DataModel::new(model.m0(), model.m1(), p, p, window.t_max)?;
    rejection_mass(kind, method, &data, alpha, epsilon)
}

/// Upper cut-off for a product of binomials, bounded by the binomial at the
/// larger carrier probability.
pub(crate) fn product_upper_cut(m0: usize, m1: usize, p0: f64, p1: f64, epsilon: f64) -> Result<usize> {
    upper_tail_cut(BinomParams::new(m0 + m1, p0.max(p1))?, epsilon)
}
