use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord};

use super::{QqData, VariantRecord};
use crate::error::{Error, Result};
use crate::stats::Counts2x2;

/// A data line that could not be turned into a [`VariantRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct MalformedRow {
    pub line: u64,
    pub variant_id: Option<String>,
    pub message: String,
}

pub type InputRow = std::result::Result<VariantRecord, MalformedRow>;

struct Columns {
    variant_id: usize,
    m0: usize,
    m1: usize,
    r0: usize,
    r1: usize,
    call_rate: Option<usize>,
    stratum_id: Option<usize>,
}

impl Columns {
    fn locate(header: &StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let require = |name: &str| {
            find(name).ok_or_else(|| Error::Parse(format!("input header lacks column '{name}'")))
        };
        Ok(Columns {
            variant_id: require("variant_id")?,
            m0: require("m0")?,
            m1: require("m1")?,
            r0: require("r0")?,
            r1: require("r1")?,
            call_rate: find("call_rate"),
            stratum_id: find("stratum_id"),
        })
    }

    fn parse(&self, record: &StringRecord) -> std::result::Result<VariantRecord, String> {
        let field = |i: usize| {
            record
                .get(i)
                .map(str::trim)
                .ok_or_else(|| format!("missing field {}", i + 1))
        };
        let count = |i: usize, name: &str| {
            field(i)?
                .parse::<usize>()
                .map_err(|_| format!("{name} is not a non-negative integer"))
        };
        let variant_id = field(self.variant_id)?.to_string();
        if variant_id.is_empty() {
            return Err("empty variant_id".into());
        }
        let counts = Counts2x2::new(
            count(self.m0, "m0")?,
            count(self.m1, "m1")?,
            count(self.r0, "r0")?,
            count(self.r1, "r1")?,
        )
        .map_err(|e| e.to_string())?;
        let call_rate = match self.call_rate.map(field).transpose()? {
            None | Some("") => 1.0,
            Some(s) => match s.parse::<f64>() {
                Ok(v) if (0.0..=1.0).contains(&v) => v,
                _ => return Err(format!("call_rate '{s}' is not in [0, 1]")),
            },
        };
        let stratum_id = match self.stratum_id.map(field).transpose()? {
            None | Some("") => None,
            Some(s) => Some(s.to_string()),
        };
        Ok(VariantRecord {
            variant_id,
            counts,
            call_rate,
            stratum_id,
        })
    }
}

/// Reads tab-separated variant counts. Lines starting with `#` are comments.
/// Only a missing header column is fatal; bad data lines come back as
/// [`MalformedRow`]s in input order.
pub fn read_variants<R: Read>(reader: R) -> Result<Vec<InputRow>> {
    let mut csv = ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| Error::Parse(format!("cannot read header: {e}")))?
        .clone();
    let columns = Columns::locate(&header)?;

    let mut rows = Vec::new();
    for result in csv.records() {
        match result {
            Ok(record) => {
                let line = record.position().map_or(0, |p| p.line());
                rows.push(columns.parse(&record).map_err(|message| MalformedRow {
                    line,
                    variant_id: record
                        .get(columns.variant_id)
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty()),
                    message,
                }));
            }
            Err(e) => rows.push(Err(MalformedRow {
                line: e.position().map_or(0, |p| p.line()),
                variant_id: None,
                message: e.to_string(),
            })),
        }
    }
    Ok(rows)
}

/// Extracts one p-value column from a batch result table, skipping error
/// cells.
pub fn read_pvalue_column<R: Read>(reader: R, column: Option<&str>) -> Result<Vec<f64>> {
    let mut csv = ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| Error::Parse(format!("cannot read header: {e}")))?
        .clone();
    let index = match column {
        Some(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("no column named '{name}'")))?,
        // a bare list of p-values, or the first result column
        None if header.len() == 1 => 0,
        None => 1,
    };
    let mut values = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let cell = record.get(index).unwrap_or("").trim();
        if cell.starts_with("ERR") || cell.is_empty() {
            continue;
        }
        values.push(
            cell.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{cell}' is not a number")))?,
        );
    }
    Ok(values)
}

pub fn write_qq_tsv<W: Write>(qq: &QqData, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "rank\texpected_neglog10\tobserved_neglog10\tlower95\tupper95\trotated_observed"
    )?;
    for row in &qq.rows {
        writeln!(
            out,
            "{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
            row.rank,
            row.expected_neglog10,
            row.observed_neglog10,
            row.lower95,
            row.upper95,
            row.rotated_observed
        )?;
    }
    Ok(())
}
