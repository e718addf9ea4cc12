use crate::dist::{lower_tail_cut, upper_tail_cut, BinomParams};
use crate::error::Result;

use super::{check_epsilon, NullModel};

/// Inclusive range of carrier totals that are enumerated. Totals outside it
/// carry at most `epsilon` probability per truncated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationWindow {
    pub t_min: usize,
    pub t_max: usize,
    pub epsilon: f64,
}

impl EnumerationWindow {
    pub fn contains(&self, t: usize) -> bool {
        (self.t_min..=self.t_max).contains(&t)
    }

    pub fn len(&self) -> usize {
        self.t_max - self.t_min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Upper-tail window on the null carrier total `Binom(m0 + m1, p)`.
/// `epsilon = 0` keeps every total.
pub fn window_null(model: &NullModel, epsilon: f64) -> Result<EnumerationWindow> {
    check_epsilon(epsilon)?;
    let total = BinomParams::new(model.m0() + model.m1(), model.carrier_prob())?;
    Ok(EnumerationWindow {
        t_min: 0,
        t_max: upper_tail_cut(total, epsilon)?,
        epsilon,
    })
}

/// Two-sided window on `Binom(n, t / n)`, the carrier total fitted to an
/// observed table with `t` carriers among `n` subjects.
pub fn window_fitted(n: usize, t: usize, epsilon: f64) -> Result<EnumerationWindow> {
    check_epsilon(epsilon)?;
    let fitted = BinomParams::new(n, if n == 0 { 0.0 } else { t as f64 / n as f64 })?;
    Ok(EnumerationWindow {
        t_min: lower_tail_cut(fitted, epsilon)?,
        t_max: upper_tail_cut(fitted, epsilon)?,
        epsilon,
    })
}
