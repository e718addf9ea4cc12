use super::Counts2x2;
use crate::dist::ln_hypergeom_unchecked;

/// Relative slack on the observed table's probability so that tables tied
/// with it in exact arithmetic are not lost to rounding.
const TIE_FACTOR: f64 = 1.0 + 1e-7;

/// Two-sided Fisher exact p-value: total conditional probability of tables
/// no more likely than the observed one.
pub fn fisher_pvalue(data: &Counts2x2) -> f64 {
    let (m0, m1) = (data.m0, data.m1);
    let t = data.carriers();
    let lo = t.saturating_sub(m0);
    let hi = m1.min(t);
    let observed = ln_hypergeom_unchecked(m0, m1, t, data.r1);
    let cutoff = observed + TIE_FACTOR.ln();
    let p: f64 = (lo..=hi)
        .map(|x| ln_hypergeom_unchecked(m0, m1, t, x))
        .filter(|&lp| lp <= cutoff)
        .map(f64::exp)
        .sum();
    p.min(1.0)
}
