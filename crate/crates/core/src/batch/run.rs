use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use super::VariantRecord;
use crate::engine::{au_pvalue, perm_pvalue, strat_au_pvalue, strat_perm_pvalue, Method, StratifiedCounts};
use crate::error::Error;
use crate::stats::{standard_pvalue, Counts2x2, TestKind};

#[derive(Debug, Clone, PartialEq)]
pub enum VariantData {
    Single(Counts2x2),
    Stratified(StratifiedCounts),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub id: String,
    pub data: VariantData,
}

/// Collects rows into variants in order of first appearance. A lone row
/// without a stratum is an unstratified variant; anything else becomes a
/// stratified variant with strata in input order.
pub fn group_variants(records: &[VariantRecord]) -> Vec<Variant> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&VariantRecord>> = HashMap::new();
    for record in records {
        groups
            .entry(&record.variant_id)
            .or_insert_with(|| {
                order.push(&record.variant_id);
                Vec::new()
            })
            .push(record);
    }
    order
        .into_iter()
        .map(|id| {
            let rows = &groups[id];
            let data = match rows.as_slice() {
                [only] if only.stratum_id.is_none() => VariantData::Single(only.counts),
                _ => VariantData::Stratified(
                    StratifiedCounts::new(rows.iter().map(|r| r.counts).collect())
                        .expect("group has at least one row"),
                ),
            };
            Variant { id: id.to_string(), data }
        })
        .collect()
}

/// Why a result cell holds no p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellError {
    ResourceLimit,
    Unsupported,
    Failed,
}

impl CellError {
    pub fn code(self) -> &'static str {
        match self {
            CellError::ResourceLimit => "resource_limit",
            CellError::Unsupported => "unsupported",
            CellError::Failed => "failed",
        }
    }
}

impl From<Error> for CellError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => CellError::ResourceLimit,
            Error::UnsupportedKind(_) => CellError::Unsupported,
            _ => CellError::Failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub variant_id: String,
    pub cells: Vec<Result<f64, CellError>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchTable {
    pub columns: Vec<(TestKind, Method)>,
    pub rows: Vec<BatchRow>,
}

impl BatchTable {
    pub fn column_name(kind: TestKind, method: Method) -> String {
        format!("{kind}_{method}")
    }

    /// Tab-separated output, p-values with 17 significant digits.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "variant_id")?;
        for &(kind, method) in &self.columns {
            write!(out, "\t{}", Self::column_name(kind, method))?;
        }
        writeln!(out)?;
        for row in &self.rows {
            write!(out, "{}", row.variant_id)?;
            for cell in &row.cells {
                match cell {
                    Ok(p) => write!(out, "\t{p:.16e}")?,
                    Err(e) => write!(out, "\tERR:{}", e.code())?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn test_variant(data: &VariantData, kind: TestKind, method: Method, epsilon: f64) -> Result<f64, CellError> {
    let p = match (data, method) {
        (VariantData::Single(d), Method::Standard) => Ok(standard_pvalue(kind, d)),
        (VariantData::Single(d), Method::Permutation) => perm_pvalue(kind, d),
        (VariantData::Single(d), Method::Au) => au_pvalue(kind, d, epsilon),
        (VariantData::Stratified(_), Method::Standard) => return Err(CellError::Unsupported),
        (VariantData::Stratified(s), Method::Permutation) => strat_perm_pvalue(kind, s),
        (VariantData::Stratified(s), Method::Au) => strat_au_pvalue(kind, s, epsilon),
    };
    p.map_err(CellError::from)
}

/// Runs every requested test on every variant. Rows follow input order and
/// do not depend on the number of worker threads.
pub fn run_batch(records: &[VariantRecord], tests: &[(TestKind, Method)], epsilon: f64) -> BatchTable {
    let variants = group_variants(records);
    let rows = variants
        .par_iter()
        .map(|v| BatchRow {
            variant_id: v.id.clone(),
            cells: tests
                .iter()
                .map(|&(kind, method)| test_variant(&v.data, kind, method, epsilon))
                .collect(),
        })
        .collect();
    BatchTable {
        columns: tests.to_vec(),
        rows,
    }
}
