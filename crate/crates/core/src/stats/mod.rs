//! Test statistics and standard p-values for a single 2x2 carrier table.

mod firth;
mod fisher;

use std::fmt;
use std::str::FromStr;

pub use firth::{fit_firth, FirthFit, FirthState};
pub use fisher::fisher_pvalue;

use crate::dist::chisq1_sf_unchecked;
use crate::error::{Error, Result};

/// Carrier counts for one variant: `m0` controls and `m1` cases, of whom
/// `r0` and `r1` carry the minor allele.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Counts2x2 {
    pub m0: usize,
    pub m1: usize,
    pub r0: usize,
    pub r1: usize,
}

impl Counts2x2 {
    pub fn new(m0: usize, m1: usize, r0: usize, r1: usize) -> Result<Self> {
        if r0 > m0 || r1 > m1 {
            return Err(Error::domain(format!(
                "carrier counts ({r0}, {r1}) exceed group sizes ({m0}, {m1})"
            )));
        }
        if m0 + m1 == 0 {
            return Err(Error::domain("table has no subjects"));
        }
        Ok(Counts2x2 { m0, m1, r0, r1 })
    }

    pub fn total(&self) -> usize {
        self.m0 + self.m1
    }

    pub fn carriers(&self) -> usize {
        self.r0 + self.r1
    }

    /// Same margins, different carrier split.
    pub fn with_carriers(&self, r0: usize, r1: usize) -> Self {
        Counts2x2 { r0, r1, ..*self }
    }

    /// True when one of the margins is empty, so no statistic carries
    /// information about association.
    pub(crate) fn is_degenerate(&self) -> bool {
        let t = self.carriers();
        self.m0 == 0 || self.m1 == 0 || t == 0 || t == self.total()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Score,
    Wald,
    WaldRegularized,
    Lrt,
    Firth,
    FisherExact,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::Score,
        TestKind::Wald,
        TestKind::WaldRegularized,
        TestKind::Lrt,
        TestKind::Firth,
        TestKind::FisherExact,
    ];

    /// The chi-square-scale statistic behind this kind, if it has one.
    pub fn statistic(self) -> Option<Statistic> {
        match self {
            TestKind::Score => Some(Statistic::Score),
            TestKind::Wald => Some(Statistic::Wald),
            TestKind::WaldRegularized => Some(Statistic::WaldRegularized),
            TestKind::Lrt => Some(Statistic::Lrt),
            TestKind::Firth => Some(Statistic::Firth),
            TestKind::FisherExact => None,
        }
    }

    pub(crate) fn require_statistic(self) -> Result<Statistic> {
        self.statistic().ok_or(Error::UnsupportedKind(self))
    }

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Score => "score",
            TestKind::Wald => "wald",
            TestKind::WaldRegularized => "wald-reg",
            TestKind::Lrt => "lrt",
            TestKind::Firth => "firth",
            TestKind::FisherExact => "fisher",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "score" => Ok(TestKind::Score),
            "wald" => Ok(TestKind::Wald),
            "wald-reg" | "wald_reg" | "waldregularized" => Ok(TestKind::WaldRegularized),
            "lrt" => Ok(TestKind::Lrt),
            "firth" => Ok(TestKind::Firth),
            "fisher" | "fisherexact" => Ok(TestKind::FisherExact),
            other => Err(Error::Parse(format!("unknown test kind '{other}'"))),
        }
    }
}

/// Statistics on the chi-square(1) scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    Score,
    Wald,
    WaldRegularized,
    Lrt,
    Firth,
}

impl Statistic {
    /// Evaluates the statistic. Tables with an empty margin give 0.
    pub fn evaluate(self, data: &Counts2x2) -> f64 {
        if data.is_degenerate() {
            return 0.0;
        }
        match self {
            Statistic::Score => score(data),
            Statistic::Wald => wald(data, false),
            Statistic::WaldRegularized => wald(data, true),
            Statistic::Lrt => likelihood_ratio(data),
            Statistic::Firth => firth::penalized_lr(data, &mut FirthState::default()),
        }
    }

    /// Like [`Statistic::evaluate`], but Firth fits start from the estimates
    /// kept in `state` and leave their own estimates behind.
    pub fn evaluate_warm(self, data: &Counts2x2, state: &mut FirthState) -> f64 {
        match self {
            Statistic::Firth if !data.is_degenerate() => firth::penalized_lr(data, state),
            _ => self.evaluate(data),
        }
    }
}

fn score(d: &Counts2x2) -> f64 {
    let (m0, m1, r0, r1) = (d.m0 as f64, d.m1 as f64, d.r0 as f64, d.r1 as f64);
    let n = m0 + m1;
    let t = r0 + r1;
    let diff = r1 * (m0 - r0) - r0 * (m1 - r1);
    n * diff * diff / (m0 * m1 * t * (n - t))
}

fn wald(d: &Counts2x2, regularize: bool) -> f64 {
    let mut cells = [
        d.r0 as f64,
        d.r1 as f64,
        (d.m0 - d.r0) as f64,
        (d.m1 - d.r1) as f64,
    ];
    if cells.contains(&0.0) {
        if !regularize {
            return 0.0;
        }
        cells.iter_mut().for_each(|c| *c += 0.5);
    }
    let [c0, c1, n0, n1] = cells;
    let log_or = c1.ln() + n0.ln() - c0.ln() - n1.ln();
    let var = 1.0 / c0 + 1.0 / c1 + 1.0 / n0 + 1.0 / n1;
    log_or * log_or / var
}

fn likelihood_ratio(d: &Counts2x2) -> f64 {
    let n = d.total() as f64;
    let t = d.carriers() as f64;
    let (m0, m1) = (d.m0 as f64, d.m1 as f64);
    let term = |obs: usize, expected: f64| {
        if obs == 0 {
            0.0
        } else {
            let o = obs as f64;
            o * (o / expected).ln()
        }
    };
    let g = term(d.r1, m1 * t / n)
        + term(d.m1 - d.r1, m1 * (n - t) / n)
        + term(d.r0, m0 * t / n)
        + term(d.m0 - d.r0, m0 * (n - t) / n);
    (2.0 * g).max(0.0)
}

/// Evaluates a chi-square-scale statistic; Fisher's test has none.
pub fn compute_statistic(kind: TestKind, data: &Counts2x2) -> Result<f64> {
    Ok(kind.require_statistic()?.evaluate(data))
}

/// Asymptotic chi-square(1) p-value, or the exact conditional p-value for
/// Fisher's test.
pub fn standard_pvalue(kind: TestKind, data: &Counts2x2) -> f64 {
    match kind.statistic() {
        Some(stat) => chisq1_sf_unchecked(stat.evaluate(data)),
        None => fisher_pvalue(data),
    }
}
