use crate::error::{Error, Result};
use crate::stats::TestKind;

use super::rejection::{product_upper_cut, rejection_mass, DataModel};
use super::{check_epsilon, Method};

/// Carrier probabilities under an association with a given population odds
/// ratio, constrained so the expected number of carriers stays `emac`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternativeModel {
    pub m0: usize,
    pub m1: usize,
    pub emac: f64,
    pub odds_ratio: f64,
    /// Carrier probability among controls.
    pub p0: f64,
    /// Carrier probability among cases.
    pub p1: f64,
}

fn case_prob(p0: f64, odds_ratio: f64) -> f64 {
    let odds = odds_ratio * p0 / (1.0 - p0);
    odds / (1.0 + odds)
}

/// Solves `m0 p0 + m1 p1 = emac` with `odds(p1) = odds_ratio * odds(p0)` by
/// bisection on `p0`.
pub fn solve_alternative(m0: usize, m1: usize, emac: f64, odds_ratio: f64) -> Result<AlternativeModel> {
    let total = (m0 + m1) as f64;
    if !(odds_ratio > 0.0 && odds_ratio.is_finite()) {
        return Err(Error::domain(format!("odds ratio {odds_ratio} must be positive")));
    }
    if !(emac > 0.0 && emac < total) {
        return Err(Error::domain(format!(
            "expected carrier count {emac} outside (0, {total})"
        )));
    }
    let model = |p0: f64, p1: f64| AlternativeModel {
        m0,
        m1,
        emac,
        odds_ratio,
        p0,
        p1,
    };
    if odds_ratio == 1.0 {
        let p = emac / total;
        return Ok(model(p, p));
    }

    let expected = |p0: f64| m0 as f64 * p0 + m1 as f64 * case_prob(p0, odds_ratio);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if expected(mid) < emac {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p0 = if (expected(lo) - emac).abs() <= (expected(hi) - emac).abs() {
        lo
    } else {
        hi
    };
    let p1 = case_prob(p0, odds_ratio);
    if !(p0 > 0.0 && p0 < 1.0 && p1 > 0.0 && p1 < 1.0) || (expected(p0) - emac).abs() > 1e-8 {
        return Err(Error::domain(format!(
            "no carrier probabilities in (0, 1) give {emac} expected carriers at odds ratio {odds_ratio}"
        )));
    }
    Ok(model(p0, p1))
}

/// Probability that the test rejects at level `alpha` when carriers follow
/// the alternative model.
pub fn power(
    kind: TestKind,
    method: Method,
    alt: &AlternativeModel,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let t_max = product_upper_cut(alt.m0, alt.m1, alt.p0, alt.p1, epsilon)?;
    let data = DataModel::new(alt.m0, alt.m1, alt.p0, alt.p1, t_max)?;
    rejection_mass(kind, method, &data, alpha, epsilon)
}
