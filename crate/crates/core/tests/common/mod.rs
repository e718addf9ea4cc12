//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here reuses the library's probability kernels, statistics or
//! enumeration: binomial and hypergeometric probabilities come from Pascal
//! recurrences (sums of positive terms, so relative error stays within a few
//! hundred ulps for N <= 400), statistics from textbook formulas, and every
//! sum runs over the complete, untruncated sample space.

#![allow(dead_code)]

use raretest::dist::chisq1_sf;
use raretest::{Counts2x2, TestKind};

pub const TIE: f64 = 1e-12;

/// `Binom(n, p)` probabilities by repeated convolution with `(q + p x)`.
pub fn binom_pmf(n: usize, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    let mut v = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; v.len() + 1];
        for (k, &x) in v.iter().enumerate() {
            next[k] += x * q;
            next[k + 1] += x * p;
        }
        v = next;
    }
    v
}

/// Binomial coefficients `C(n, k)` for `n <= max` as doubles.
pub struct Pascal {
    rows: Vec<Vec<f64>>,
}

impl Pascal {
    pub fn new(max: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
        for n in 1..=max {
            let prev = &rows[n - 1];
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        Pascal { rows }
    }

    pub fn choose(&self, n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            self.rows[n][k]
        }
    }

    /// Probability that `x` of `t` carriers are cases.
    pub fn hypergeom(&self, m0: usize, m1: usize, t: usize, x: usize) -> f64 {
        let n = m0 + m1;
        self.choose(t, x) * self.choose(n - t, m1 - x) / self.choose(n, m1)
    }
}

fn balanced(d: &Counts2x2) -> bool {
    d.r1 * d.m0 == d.r0 * d.m1
}

/// Pearson chi-square without continuity correction.
pub fn score(d: &Counts2x2) -> f64 {
    let (m0, m1, r0, r1) = (d.m0 as f64, d.m1 as f64, d.r0 as f64, d.r1 as f64);
    let n = m0 + m1;
    let t = r0 + r1;
    if d.m0 == 0 || d.m1 == 0 || t == 0.0 || t == n {
        return 0.0;
    }
    let diff = r1 * (m0 - r0) - r0 * (m1 - r1);
    n * diff * diff / (m0 * m1 * t * (n - t))
}

/// Deviance difference between the two-group and pooled binomial models.
pub fn lrt(d: &Counts2x2) -> f64 {
    let t = d.r0 + d.r1;
    let n = d.m0 + d.m1;
    if d.m0 == 0 || d.m1 == 0 || t == 0 || t == n || balanced(d) {
        return 0.0;
    }
    let loglik = |y: usize, size: usize| {
        let (y, size) = (y as f64, size as f64);
        let p = y / size;
        let a = if y > 0.0 { y * p.ln() } else { 0.0 };
        let b = if y < size { (size - y) * (1.0 - p).ln() } else { 0.0 };
        a + b
    };
    // Carrier status as the outcome, case status as the group.
    let full = loglik(d.r0, d.m0) + loglik(d.r1, d.m1);
    let pooled = loglik(t, n);
    (2.0 * (full - pooled)).max(0.0)
}

pub fn statistic(kind: TestKind, d: &Counts2x2) -> f64 {
    match kind {
        TestKind::Score => score(d),
        TestKind::Lrt => lrt(d),
        other => panic!("no reference statistic for {other}"),
    }
}

fn at_least(s: f64, observed: f64) -> bool {
    s.abs() >= observed.abs() * (1.0 - TIE)
}

pub fn perm_pvalue(kind: TestKind, d: &Counts2x2, pascal: &Pascal) -> f64 {
    let t = d.r0 + d.r1;
    let observed = statistic(kind, d);
    let mut p = 0.0;
    for x in t.saturating_sub(d.m0)..=t.min(d.m1) {
        let other = Counts2x2 { r0: t - x, r1: x, ..*d };
        if at_least(statistic(kind, &other), observed) {
            p += pascal.hypergeom(d.m0, d.m1, t, x);
        }
    }
    p.min(1.0)
}

/// Untruncated unconditional p-value at the pooled carrier proportion.
pub fn au_pvalue(kind: TestKind, d: &Counts2x2) -> f64 {
    let n = d.m0 + d.m1;
    let p_hat = (d.r0 + d.r1) as f64 / n as f64;
    let f0 = binom_pmf(d.m0, p_hat);
    let f1 = binom_pmf(d.m1, p_hat);
    let observed = statistic(kind, d);
    let mut p = 0.0;
    for r0 in 0..=d.m0 {
        for r1 in 0..=d.m1 {
            if at_least(statistic(kind, &Counts2x2 { r0, r1, ..*d }), observed) {
                p += f0[r0] * f1[r1];
            }
        }
    }
    p.min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Way {
    Standard,
    Permutation,
    Au,
}

/// Probability that the test rejects at `alpha` when carriers are
/// `Binom(m0, p0)` and `Binom(m1, p1)`, summed over every dataset.
pub fn rejection(kind: TestKind, way: Way, m0: usize, m1: usize, p0: f64, p1: f64, alpha: f64) -> f64 {
    let pascal = Pascal::new(m0 + m1);
    let f0 = binom_pmf(m0, p0);
    let f1 = binom_pmf(m1, p1);
    let mut total = 0.0;
    for r0 in 0..=m0 {
        for r1 in 0..=m1 {
            let d = Counts2x2 { m0, m1, r0, r1 };
            let p = match way {
                Way::Standard => chisq1_sf(statistic(kind, &d)).unwrap(),
                Way::Permutation => perm_pvalue(kind, &d, &pascal),
                Way::Au => au_pvalue(kind, &d),
            };
            if p <= alpha {
                total += f0[r0] * f1[r1];
            }
        }
    }
    total
}

/// `ln det` of the two-column logistic information at `beta`.
fn penalty(groups: &[(f64, f64); 2], beta: [f64; 2]) -> f64 {
    let w: Vec<f64> = [beta[0], beta[0] + beta[1]]
        .iter()
        .zip(groups)
        .map(|(&eta, &(n, _))| {
            let pi = 1.0 / (1.0 + (-eta).exp());
            n * pi * (1.0 - pi)
        })
        .collect();
    // X'WX with rows (1, 0) and (1, 1)
    let (i00, i01, i11) = (w[0] + w[1], w[1], w[1]);
    0.5 * (i00 * i11 - i01 * i01).ln()
}

/// Jeffreys-penalized log-likelihood of the carrier-status logistic model,
/// written directly from binomial log-likelihoods.
pub fn penalized_loglik(d: &Counts2x2, beta: [f64; 2]) -> f64 {
    // (size, cases) for non-carriers then carriers
    let groups = [
        ((d.m0 - d.r0 + d.m1 - d.r1) as f64, (d.m1 - d.r1) as f64),
        ((d.r0 + d.r1) as f64, d.r1 as f64),
    ];
    let mut l = 0.0;
    let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
    for (&eta, &(n, y)) in [beta[0], beta[0] + beta[1]].iter().zip(&groups) {
        // ln pi and ln(1 - pi)
        l += y * -softplus(-eta) + (n - y) * -softplus(eta);
    }
    l + penalty(&groups, beta)
}

/// Maximises a function on a square by repeatedly zooming a grid onto its
/// best point.
pub fn grid_maximise(f: impl Fn([f64; 2]) -> f64, bound: f64) -> ([f64; 2], f64) {
    const POINTS: usize = 41;
    let (mut lo, mut hi) = ([-bound; 2], [bound; 2]);
    let mut best = ([0.0; 2], f64::NEG_INFINITY);
    while hi[0] - lo[0] > 1e-9 {
        let step = [(hi[0] - lo[0]) / (POINTS - 1) as f64, (hi[1] - lo[1]) / (POINTS - 1) as f64];
        for i in 0..POINTS {
            for j in 0..POINTS {
                let x = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]];
                let v = f(x);
                if v > best.1 {
                    best = (x, v);
                }
            }
        }
        lo = [best.0[0] - 2.0 * step[0], best.0[1] - 2.0 * step[1]];
        hi = [best.0[0] + 2.0 * step[0], best.0[1] + 2.0 * step[1]];
    }
    best
}

/// Golden-section maximum of a unimodal function on `[lo, hi]`.
pub fn golden_maximise(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-12 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Slope of the +0.5-cell-corrected log odds ratio.
pub fn half_cell_log_or(d: &Counts2x2) -> f64 {
    let (a, b) = (d.r1 as f64 + 0.5, (d.m1 - d.r1) as f64 + 0.5);
    let (c, e) = (d.r0 as f64 + 0.5, (d.m0 - d.r0) as f64 + 0.5);
    (a / c).ln() - (b / e).ln()
}
