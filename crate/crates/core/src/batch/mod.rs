//! Variant-level batch analysis: ingestion, quality control, per-variant
//! testing and QQ summaries.

mod io;
mod qc;
mod qq;
mod run;

pub use io::{read_pvalue_column, read_variants, write_qq_tsv, MalformedRow, InputRow};
pub use qc::{apply_qc, DropReason, Dropped, QcOutcome, QcPolicy};
pub use qq::{qq_data, QqData, QqRow};
pub use run::{group_variants, run_batch, BatchRow, BatchTable, CellError, Variant, VariantData};

use crate::stats::Counts2x2;

/// One input row: a variant's counts, optionally restricted to one stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRecord {
    pub variant_id: String,
    pub counts: Counts2x2,
    pub call_rate: f64,
    pub stratum_id: Option<String>,
}

impl VariantRecord {
    pub fn new(variant_id: impl Into<String>, counts: Counts2x2) -> Self {
        VariantRecord {
            variant_id: variant_id.into(),
            counts,
            call_rate: 1.0,
            stratum_id: None,
        }
    }
}
