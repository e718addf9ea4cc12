use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{InputRow, VariantRecord};
use crate::error::{Error, Result};

/// Filters applied before testing. Bounds are inclusive on the keep side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcPolicy {
    pub min_mac: usize,
    pub max_mac: usize,
    pub min_call_rate: f64,
}

impl Default for QcPolicy {
    fn default() -> Self {
        QcPolicy {
            min_mac: 5,
            max_mac: 100,
            min_call_rate: 0.85,
        }
    }
}

impl QcPolicy {
    pub fn new(min_mac: usize, max_mac: usize, min_call_rate: f64) -> Result<Self> {
        if min_mac > max_mac {
            return Err(Error::domain(format!(
                "minimum carrier count {min_mac} exceeds maximum {max_mac}"
            )));
        }
        if !(0.0..=1.0).contains(&min_call_rate) {
            return Err(Error::domain(format!("call rate threshold {min_call_rate} outside [0, 1]")));
        }
        Ok(QcPolicy {
            min_mac,
            max_mac,
            min_call_rate,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DropReason {
    Malformed,
    DuplicateStratum,
    MacBelowMin,
    MacAboveMax,
    CallRateBelowMin,
}

impl DropReason {
    pub fn code(self) -> &'static str {
        match self {
            DropReason::Malformed => "malformed",
            DropReason::DuplicateStratum => "duplicate_stratum",
            DropReason::MacBelowMin => "mac_below_min",
            DropReason::MacAboveMax => "mac_above_max",
            DropReason::CallRateBelowMin => "call_rate_below_min",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dropped {
    /// Input line, when the row came from a file.
    pub line: Option<u64>,
    pub variant_id: Option<String>,
    pub reason: DropReason,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QcOutcome {
    pub kept: Vec<VariantRecord>,
    pub dropped: Vec<Dropped>,
}

/// Applies carrier-count and call-rate filters. Rows of a stratified variant
/// are judged together: carrier counts are summed over strata and the
/// lowest stratum call rate is used. Input order is preserved.
pub fn apply_qc(rows: &[InputRow], policy: &QcPolicy) -> QcOutcome {
    let mut outcome = QcOutcome::default();
    let mut seen = HashSet::new();
    let mut valid = Vec::new();
    for row in rows {
        match row {
            Err(bad) => outcome.dropped.push(Dropped {
                line: Some(bad.line),
                variant_id: bad.variant_id.clone(),
                reason: DropReason::Malformed,
                detail: bad.message.clone(),
            }),
            Ok(record) => {
                if seen.insert((record.variant_id.clone(), record.stratum_id.clone())) {
                    valid.push(record);
                } else {
                    outcome.dropped.push(Dropped {
                        line: None,
                        variant_id: Some(record.variant_id.clone()),
                        reason: DropReason::DuplicateStratum,
                        detail: format!("stratum {:?} repeated", record.stratum_id),
                    });
                }
            }
        }
    }

    let mut carriers: HashMap<&str, usize> = HashMap::new();
    let mut call_rate: HashMap<&str, f64> = HashMap::new();
    for record in &valid {
        *carriers.entry(&record.variant_id).or_default() += record.counts.carriers();
        let rate = call_rate.entry(&record.variant_id).or_insert(1.0);
        *rate = rate.min(record.call_rate);
    }

    for record in valid {
        let mac = carriers[record.variant_id.as_str()];
        let rate = call_rate[record.variant_id.as_str()];
        let verdict = if mac < policy.min_mac {
            Some((DropReason::MacBelowMin, format!("{mac} carriers")))
        } else if mac > policy.max_mac {
            Some((DropReason::MacAboveMax, format!("{mac} carriers")))
        } else if rate < policy.min_call_rate {
            Some((DropReason::CallRateBelowMin, format!("call rate {rate}")))
        } else {
            None
        };
        match verdict {
            None => outcome.kept.push(record.clone()),
            Some((reason, detail)) => outcome.dropped.push(Dropped {
                line: None,
                variant_id: Some(record.variant_id.clone()),
                reason,
                detail,
            }),
        }
    }
    outcome
}
