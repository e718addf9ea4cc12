//! Jeffreys-penalized logistic regression of case status on carrier status.
//!
//! The 2x2 table collapses to two covariate groups: non-carriers (`x = 0`)
//! and carriers (`x = 1`), each a binomial count of cases. The penalized
//! log-likelihood is `l(beta) + 1/2 log det I(beta)` with `I` the Fisher
//! information of the two-column design. The likelihood-ratio statistic
//! compares the unrestricted maximum with the maximum over `beta1 = 0`,
//! both under the same (two-column) penalty.

use log::warn;

use super::Counts2x2;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 50;
const GRADIENT_TOLERANCE: f64 = 1e-10;
const MAX_STEP: f64 = 5.0;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirthFit {
    /// Intercept.
    pub beta0: f64,
    /// Log odds ratio for carriers. Zero for the restricted fit.
    pub beta1: f64,
    pub penalized_loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Starting points carried from one fit to the next when many nearby
/// tables are fitted in sequence.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirthState {
    full: Option<[f64; 2]>,
    restricted: Option<f64>,
}

struct Groups {
    size: [f64; 2],
    cases: [f64; 2],
}

impl Groups {
    fn new(d: &Counts2x2) -> Self {
        Groups {
            size: [(d.m0 - d.r0 + d.m1 - d.r1) as f64, (d.r0 + d.r1) as f64],
            cases: [(d.m1 - d.r1) as f64, d.r1 as f64],
        }
    }

    fn is_singular(&self) -> bool {
        self.size[0] == 0.0 || self.size[1] == 0.0
    }

    fn default_intercept(&self) -> f64 {
        let n = self.size[0] + self.size[1];
        let y = self.cases[0] + self.cases[1];
        ((y + 0.5) / (n - y + 0.5)).ln()
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

struct Evaluation {
    penalized_loglik: f64,
    /// Gradient with respect to (beta0, beta1).
    gradient: [f64; 2],
    /// Negative second derivative with respect to each linear predictor,
    /// `(n_g + 1) pi_g (1 - pi_g)`; the Hessian in `beta` is
    /// `-[[c0 + c1, c1], [c1, c1]]`.
    curvature: [f64; 2],
}

fn evaluate(groups: &Groups, beta: [f64; 2]) -> Evaluation {
    let eta = [beta[0], beta[0] + beta[1]];
    let mut pl = 0.0;
    let mut per_group = [0.0; 2];
    let mut curvature = [0.0; 2];
    for g in 0..2 {
        let (n, y) = (groups.size[g], groups.cases[g]);
        let pi = logistic(eta[g]);
        // ln(pi (1 - pi)) = -softplus(eta) - softplus(-eta)
        let ln_var = -softplus(eta[g]) - softplus(-eta[g]);
        pl += y * eta[g] - n * softplus(eta[g]) + 0.5 * (n.ln() + ln_var);
        // Saturated design: every group has leverage 1, so the penalty adds
        // 1/2 (1 - 2 pi) to the score of its linear predictor.
        per_group[g] = y + 0.5 - (n + 1.0) * pi;
        curvature[g] = (n + 1.0) * pi * (1.0 - pi);
    }
    Evaluation {
        penalized_loglik: pl,
        gradient: [per_group[0] + per_group[1], per_group[1]],
        curvature,
    }
}

fn accepts(candidate: f64, current: f64) -> bool {
    candidate.is_finite() && candidate >= current - 1e-12 * (1.0 + current.abs())
}

fn newton(groups: &Groups, start: [f64; 2], restricted: bool) -> FirthFit {
    let mut beta = start;
    if restricted {
        beta[1] = 0.0;
    }
    let mut current = evaluate(groups, beta);
    let mut iterations = 0;
    loop {
        let gradient_norm = if restricted {
            current.gradient[0].abs()
        } else {
            current.gradient[0].abs().max(current.gradient[1].abs())
        };
        if gradient_norm <= GRADIENT_TOLERANCE {
            return FirthFit {
                beta0: beta[0],
                beta1: beta[1],
                penalized_loglik: current.penalized_loglik,
                iterations,
                converged: true,
            };
        }
        if iterations == MAX_ITERATIONS {
            break;
        }
        iterations += 1;

        let [c0, c1] = current.curvature;
        let [u0, u1] = current.gradient;
        let mut step = if restricted {
            [u0 / (c0 + c1), 0.0]
        } else {
            // H^-1 = -[[1/c0, -1/c0], [-1/c0, 1/c0 + 1/c1]]
            let shared = (u0 - u1) / c0;
            [shared, u1 / c1 - shared]
        };
        let largest = step[0].abs().max(step[1].abs());
        if !largest.is_finite() {
            break;
        }
        if largest > MAX_STEP {
            let scale = MAX_STEP / largest;
            step = [step[0] * scale, step[1] * scale];
        }

        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = [beta[0] + step[0], beta[1] + step[1]];
            let next = evaluate(groups, trial);
            if accepts(next.penalized_loglik, current.penalized_loglik) {
                beta = trial;
                current = next;
                accepted = true;
                break;
            }
            step = [0.5 * step[0], 0.5 * step[1]];
        }
        if !accepted {
            break;
        }
    }
    FirthFit {
        beta0: beta[0],
        beta1: beta[1],
        penalized_loglik: current.penalized_loglik,
        iterations,
        converged: false,
    }
}

/// Fits the penalized model, either with a free carrier slope or with the
/// slope held at zero (`null_model`).
pub fn fit_firth(data: &Counts2x2, null_model: bool) -> Result<FirthFit> {
    let groups = Groups::new(data);
    if groups.is_singular() {
        return Err(Error::SingularDesign);
    }
    let fit = newton(&groups, [groups.default_intercept(), 0.0], null_model);
    if fit.converged {
        Ok(fit)
    } else {
        Err(Error::FirthNotConverged(Box::new(fit)))
    }
}

/// Penalized likelihood-ratio statistic. Caller guarantees a non-degenerate
/// table.
pub(super) fn penalized_lr(data: &Counts2x2, state: &mut FirthState) -> f64 {
    let groups = Groups::new(data);
    let intercept = groups.default_intercept();
    let full = newton(&groups, state.full.unwrap_or([intercept, 0.0]), false);
    let restricted = newton(&groups, [state.restricted.unwrap_or(intercept), 0.0], true);
    if !(full.converged && restricted.converged) {
        warn!("penalized fit did not converge for {data:?}; using last iterate");
    }
    if full.converged {
        state.full = Some([full.beta0, full.beta1]);
    }
    if restricted.converged {
        state.restricted = Some(restricted.beta0);
    }
    (2.0 * (full.penalized_loglik - restricted.penalized_loglik)).max(0.0)
}
