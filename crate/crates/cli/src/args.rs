use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use raretest::{Method, TestKind, DEFAULT_EPSILON};

#[derive(Debug, Parser)]
#[command(
    name = "raretest",
    version,
    about = "Exact permutation and approximate-unconditional tests for rare variants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Tail mass dropped at each truncation point (0 = full enumeration).
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Nominal significance level.
    #[arg(long, global = true, default_value_t = 5e-8)]
    pub alpha: f64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Write results here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Allow the approximate-unconditional Firth test, which refits the
    /// penalized model for every enumerated dataset.
    #[arg(long, global = true)]
    pub allow_slow: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p-values for a single 2x2 carrier table.
    Test(TestArgs),
    /// Type I error rate against expected minor allele count.
    T1er(T1erArgs),
    /// Power against expected minor allele count and odds ratio.
    Power(PowerArgs),
    /// Quality control and testing of a variant table.
    Batch(BatchArgs),
    /// QQ plot data from a column of p-values.
    Qq(QqArgs),
    /// Time windowed against full enumeration.
    Bench,
}

#[derive(Debug, Args)]
pub struct Groups {
    /// Number of controls.
    #[arg(long)]
    pub m0: usize,
    /// Number of cases.
    #[arg(long)]
    pub m1: usize,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub groups: Groups,
    /// Carriers among controls.
    #[arg(long)]
    pub r0: usize,
    /// Carriers among cases.
    #[arg(long)]
    pub r1: usize,
    /// Test statistic; repeat for several. Default: all.
    #[arg(long = "kind", value_parser = parse_kind)]
    pub kinds: Vec<TestKind>,
    /// p-value method; repeat for several. Default: all.
    #[arg(long = "method", value_parser = parse_method)]
    pub methods: Vec<Method>,
}

#[derive(Debug, Args)]
pub struct T1erArgs {
    #[command(flatten)]
    pub groups: Groups,
    /// Expected carrier counts: comma list of values or `lo:hi[:step]` ranges.
    #[arg(long)]
    pub emac: String,
    #[arg(long, value_parser = parse_kind, default_value = "lrt")]
    pub kind: TestKind,
    #[arg(long, value_parser = parse_method, default_value = "standard")]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub groups: Groups,
    /// Expected carrier counts: comma list of values or `lo:hi[:step]` ranges.
    #[arg(long)]
    pub emac: String,
    /// Odds ratios, same syntax as `--emac`.
    #[arg(long)]
    pub odds_ratio: String,
    #[arg(long, value_parser = parse_kind, default_value = "lrt")]
    pub kind: TestKind,
    #[arg(long, value_parser = parse_method, default_value = "standard")]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Tab-separated variant table (`-` for standard input).
    #[arg(long)]
    pub input: PathBuf,
    /// Statistics to run. Default: lrt and firth.
    #[arg(long = "kind", value_parser = parse_kind)]
    pub kinds: Vec<TestKind>,
    /// Methods to run for every statistic. Default: standard, perm and au.
    #[arg(long = "method", value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 5)]
    pub min_mac: usize,
    #[arg(long, default_value_t = 100)]
    pub max_mac: usize,
    #[arg(long, default_value_t = 0.85)]
    pub min_call_rate: f64,
    /// Skip quality control; malformed rows are still dropped.
    #[arg(long)]
    pub no_qc: bool,
    /// Write rows removed by quality control here.
    #[arg(long)]
    pub dropped: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QqArgs {
    /// Tab-separated table of p-values, such as `batch` output (`-` for
    /// standard input).
    #[arg(long)]
    pub input: PathBuf,
    /// Column to read. Default: the first column after `variant_id`.
    #[arg(long)]
    pub column: Option<String>,
}

fn parse_kind(s: &str) -> Result<TestKind, String> {
    s.parse().map_err(|e: raretest::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: raretest::Error| e.to_string())
}

/// Parses `1,2,5` or `10:100:10` style lists; a range without a step
/// advances by one.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{s}' is not a number"))
        };
        match fields.as_slice() {
            [v] => values.push(number(v)?),
            [lo, hi] | [lo, hi, _] => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                let step = match fields.get(2) {
                    Some(s) => number(s)?,
                    None => 1.0,
                };
                if step <= 0.0 {
                    return Err(format!("step in '{part}' must be positive"));
                }
                if hi < lo {
                    return Err(format!("range '{part}' is empty"));
                }
                // Index-based so that long ranges do not accumulate rounding.
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                values.extend((0..=count).map(|i| lo + i as f64 * step));
            }
            _ => return Err(format!("cannot parse '{part}'")),
        }
    }
    if values.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(values)
}
