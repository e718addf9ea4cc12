use crate::dist::beta_quantile;
use crate::error::{Error, Result};

/// One point of a QQ plot on the `-log10` scale. Rank 1 is the smallest
/// p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqRow {
    pub rank: usize,
    pub expected_neglog10: f64,
    pub observed_neglog10: f64,
    /// Pointwise 95% band for the `rank`-th order statistic of uniforms.
    pub lower95: f64,
    pub upper95: f64,
    /// Observed minus expected: the 45-degree rotated plot.
    pub rotated_observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QqData {
    pub rows: Vec<QqRow>,
    /// Number of zero p-values replaced by the smallest positive double.
    pub clamped: usize,
}

/// Ordered observed p-values against uniform order statistics, with
/// beta-distribution bands.
pub fn qq_data(pvalues: &[f64]) -> Result<QqData> {
    let smallest = f64::from_bits(1);
    let mut clamped = 0;
    let mut sorted = pvalues
        .iter()
        .map(|&p| {
            if p.is_nan() || !(0.0..=1.0).contains(&p) {
                Err(Error::domain(format!("p-value {p} outside (0, 1]")))
            } else if p == 0.0 {
                clamped += 1;
                Ok(smallest)
            } else {
                Ok(p)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    sorted.sort_by(f64::total_cmp);

    let n = sorted.len();
    let rows = sorted
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let rank = i + 1;
            let (a, b) = (rank as f64, (n + 1 - rank) as f64);
            let expected = -(rank as f64 / (n + 1) as f64).log10();
            let observed = -p.log10();
            Ok(QqRow {
                rank,
                expected_neglog10: expected,
                observed_neglog10: observed,
                lower95: -beta_quantile(a, b, 0.975)?.log10(),
                upper95: -beta_quantile(a, b, 0.025)?.log10(),
                rotated_observed: observed - expected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QqData { rows, clamped })
}
