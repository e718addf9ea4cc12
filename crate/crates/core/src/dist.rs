//! Probability kernels used by the enumeration engine.
//!
//! Individual probabilities are evaluated on the log scale and exponentiated
//! before summation. Binomial terms use the saddle-point form (Stirling error
//! plus deviance) so that `log C(n, k) p^k q^(n-k)` keeps close to full
//! relative precision even where `log C(n, k)` is tens of thousands and the
//! result is near zero.

use std::f64::consts::PI;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// A probability stored as its natural logarithm. `-inf` is probability zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return Err(Error::domain(format!("log probability {value} outside [-inf, 0]")));
        }
        Ok(LogProb(value))
    }

    /// Wraps a value known to be a log probability; rounding may leave it a
    /// hair above zero, so it is clamped.
    pub(crate) fn clamped(value: f64) -> Self {
        LogProb(value.min(0.0))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomParams {
    n: usize,
    p: f64,
}

impl BinomParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("binomial probability {p} outside [0, 1]")));
        }
        Ok(BinomParams { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Smallest value with positive probability.
    pub fn support_min(&self) -> usize {
        if self.p == 1.0 {
            self.n
        } else {
            0
        }
    }

    /// Largest value with positive probability.
    pub fn support_max(&self) -> usize {
        if self.p == 0.0 {
            0
        } else {
            self.n
        }
    }

    /// Probabilities of `0..=upto`, clipped to `n`.
    pub fn pmf_table(&self, upto: usize) -> Vec<f64> {
        (0..=upto.min(self.n))
            .map(|k| ln_binom_pmf_unchecked(self.n, self.p, k).exp())
            .collect()
    }
}

/// Stirling-series error `ln n! - (n + 1/2) ln n + n - ln sqrt(2 pi)`.
fn stirling_error(n: usize) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    let x = n as f64;
    if n <= 15 {
        let ln_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
        return ln_fact - (x + 0.5) * x.ln() + x - 0.5 * (2.0 * PI).ln();
    }
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term `x ln(x / mean) + mean - x`, series-expanded when `x` is
/// close to `mean` to avoid cancellation.
fn deviance(x: f64, mean: f64) -> f64 {
    if (x - mean).abs() < 0.1 * (x + mean) {
        let mut v = (x - mean) / (x + mean);
        let mut s = (x - mean) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / mean).ln() + mean - x
    }
}

pub(crate) fn ln_binom_pmf_unchecked(n: usize, p: f64, k: usize) -> f64 {
    debug_assert!(k <= n);
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let q = 1.0 - p;
    let nf = n as f64;
    if k == 0 {
        return nf * (-p).ln_1p();
    }
    if k == n {
        return nf * p.ln();
    }
    let kf = k as f64;
    let rest = nf - kf;
    let lc = stirling_error(n)
        - stirling_error(k)
        - stirling_error(n - k)
        - deviance(kf, nf * p)
        - deviance(rest, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).min(0.0)
}

/// Log of the binomial probability of `k` successes.
pub fn log_binom_pmf(params: BinomParams, k: usize) -> Result<LogProb> {
    if k > params.n {
        return Err(Error::domain(format!("k = {k} exceeds n = {}", params.n)));
    }
    Ok(LogProb::clamped(ln_binom_pmf_unchecked(params.n, params.p, k)))
}

/// Log-probability that `r1p` of the `t` carriers fall among the `m1` cases
/// when `t` carriers are spread over `m0 + m1` subjects at random.
pub fn log_hypergeom_pmf(m0: usize, m1: usize, t: usize, r1p: usize) -> Result<LogProb> {
    let total = m0 + m1;
    if t > total {
        return Err(Error::domain(format!("t = {t} exceeds m0 + m1 = {total}")));
    }
    let lo = t.saturating_sub(m0);
    let hi = m1.min(t);
    if r1p < lo || r1p > hi {
        return Err(Error::domain(format!(
            "r1' = {r1p} outside hypergeometric support [{lo}, {hi}]"
        )));
    }
    Ok(LogProb::clamped(ln_hypergeom_unchecked(m0, m1, t, r1p)))
}

pub(crate) fn ln_hypergeom_unchecked(m0: usize, m1: usize, t: usize, r1p: usize) -> f64 {
    let total = m0 + m1;
    if total == 0 {
        return 0.0;
    }
    // C(t, x) C(N - t, m1 - x) / C(N, m1), rewritten as a ratio of binomial
    // probabilities at p = m1 / N so each factor is well conditioned.
    let p = m1 as f64 / total as f64;
    ln_binom_pmf_unchecked(t, p, r1p) + ln_binom_pmf_unchecked(total - t, p, m1 - r1p)
        - ln_binom_pmf_unchecked(total, p, m1)
}

/// Smallest `k` whose cumulative probability reaches `q`.
pub fn binom_quantile(params: BinomParams, q: f64) -> Result<usize> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1]")));
    }
    if q == 1.0 {
        return Ok(params.support_max());
    }
    let mut cdf = 0.0;
    for k in 0..=params.n {
        cdf += ln_binom_pmf_unchecked(params.n, params.p, k).exp();
        if cdf >= q {
            return Ok(k);
        }
    }
    // Accumulated rounding kept the sum just under q.
    Ok(params.support_max())
}

/// Upper truncation point: the smallest support value `u` with
/// `P(X >= u) <= epsilon`. Everything above `u` carries at most `epsilon`.
pub fn upper_tail_cut(params: BinomParams, epsilon: f64) -> Result<usize> {
    if epsilon == 0.0 {
        return Ok(params.support_max());
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("tail mass {epsilon} outside [0, 1)")));
    }
    let q = binom_quantile(params, 1.0 - epsilon)?;
    Ok((q + 1).min(params.support_max()))
}

/// Lower truncation point: the largest `l` with `P(X <= l) <= epsilon`, or
/// the support minimum when no such value exists.
pub fn lower_tail_cut(params: BinomParams, epsilon: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain(format!("tail mass {epsilon} outside [0, 1)")));
    }
    let floor = params.support_min();
    if epsilon == 0.0 {
        return Ok(floor);
    }
    let mut cdf = 0.0;
    let mut cut = None;
    for k in 0..=params.n {
        cdf += ln_binom_pmf_unchecked(params.n, params.p, k).exp();
        if cdf > epsilon {
            break;
        }
        cut = Some(k);
    }
    Ok(cut.map_or(floor, |k| k.max(floor)))
}

/// Survival function of the chi-square distribution with one degree of freedom.
pub fn chisq1_sf(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("chi-square statistic {x} is negative")));
    }
    Ok(chisq1_sf_unchecked(x))
}

pub(crate) fn chisq1_sf_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        libm::erfc((0.5 * x).sqrt()).clamp(0.0, 1.0)
    }
}

/// Inverse of the regularized incomplete beta function by bisection.
pub fn beta_quantile(a: f64, b: f64, q: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("beta shape parameters ({a}, {b}) must be positive")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // Absolute width 1e-10, tightened relative to the bracket so that tiny
    // quantiles (extreme order statistics) keep their leading digits.
    while hi - lo > 1e-10_f64.min(1e-10 * hi) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
