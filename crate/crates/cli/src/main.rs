mod args;
mod bench;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use raretest::batch::{
    apply_qc, qq_data, DropReason, read_pvalue_column, read_variants, run_batch, write_qq_tsv, BatchTable,
    QcOutcome, QcPolicy,
};
use raretest::engine::{au_pvalue, perm_pvalue, power, solve_alternative, t1er};
use raretest::stats::standard_pvalue;
use raretest::{Counts2x2, Error, Method, NullModel, TestKind};

use args::{parse_grid, BatchArgs, Cli, Command, PowerArgs, QqArgs, T1erArgs, TestArgs};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Resource(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("raretest: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let mut out = open_output(cli.output.as_deref())?;
    match &cli.command {
        Command::Test(a) => cmd_test(cli, a, &mut out)?,
        Command::T1er(a) => cmd_t1er(cli, a, &mut out)?,
        Command::Power(a) => cmd_power(cli, a, &mut out)?,
        Command::Batch(a) => cmd_batch(cli, a, &mut out)?,
        Command::Qq(a) => cmd_qq(a, &mut out)?,
        Command::Bench => bench::run(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_input(path: &Path) -> Result<Box<dyn Read>, Failure> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    Ok(Box::new(io::BufReader::new(file)))
}

fn check_slow(cli: &Cli, kind: TestKind, method: Method) -> Outcome {
    if kind == TestKind::Firth && method == Method::Au && !cli.allow_slow {
        return Err(Failure::Usage(
            "the approximate-unconditional Firth test refits the model for every \
             enumerated dataset; pass --allow-slow to run it"
                .into(),
        ));
    }
    Ok(())
}

fn format_p(p: f64) -> String {
    format!("{p:.16e}")
}

/// Error token written in place of a value.
fn error_token(e: &Error) -> &'static str {
    match e {
        Error::InputDomain(_) => "ERR:input_domain",
        Error::UnsupportedKind(_) => "ERR:unsupported",
        Error::ResourceLimit { .. } => "ERR:resource_limit",
        _ => "ERR:failed",
    }
}

/// Every requested (kind, method) pair. When either list was left at its
/// default, pairs that cannot run are skipped instead of rejected.
fn test_pairs(
    cli: &Cli,
    kinds: &[TestKind],
    methods: &[Method],
) -> Result<Vec<(TestKind, Method)>, Failure> {
    let explicit = !kinds.is_empty() && !methods.is_empty();
    let kinds = if kinds.is_empty() { &TestKind::ALL[..] } else { kinds };
    let methods = if methods.is_empty() { &Method::ALL[..] } else { methods };
    let mut pairs = Vec::new();
    for &kind in kinds {
        for &method in methods {
            let supported = kind.statistic().is_some() || method == Method::Standard;
            let permitted = check_slow(cli, kind, method);
            match (supported, permitted) {
                (true, Ok(())) => pairs.push((kind, method)),
                _ if !explicit => {}
                (false, _) => {
                    return Err(Failure::Usage(format!(
                        "{kind} has no {method} version; use --method standard"
                    )))
                }
                (true, Err(e)) => return Err(e),
            }
        }
    }
    Ok(pairs)
}

fn cmd_test(cli: &Cli, a: &TestArgs, out: &mut dyn Write) -> Outcome {
    let data = Counts2x2::new(a.groups.m0, a.groups.m1, a.r0, a.r1)?;
    let pairs = test_pairs(cli, &a.kinds, &a.methods)?;
    writeln!(out, "kind\tmethod\tpvalue")?;
    for (kind, method) in pairs {
        let p = match method {
            Method::Standard => standard_pvalue(kind, &data),
            Method::Permutation => perm_pvalue(kind, &data)?,
            Method::Au => au_pvalue(kind, &data, cli.epsilon)?,
        };
        writeln!(out, "{kind}\t{method}\t{}", format_p(p))?;
    }
    Ok(())
}

fn grid(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    parse_grid(text).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn cmd_t1er(cli: &Cli, a: &T1erArgs, out: &mut dyn Write) -> Outcome {
    check_slow(cli, a.kind, a.method)?;
    let emacs = grid(&a.emac, "emac")?;
    writeln!(out, "emac\tt1er")?;
    for emac in emacs {
        let model = NullModel::new(a.groups.m0, a.groups.m1, emac)?;
        let rate = t1er(a.kind, a.method, &model, cli.alpha, cli.epsilon)?;
        writeln!(out, "{emac}\t{}", format_p(rate))?;
    }
    Ok(())
}

fn cmd_power(cli: &Cli, a: &PowerArgs, out: &mut dyn Write) -> Outcome {
    check_slow(cli, a.kind, a.method)?;
    let emacs = grid(&a.emac, "emac")?;
    let ratios = grid(&a.odds_ratio, "odds-ratio")?;
    writeln!(out, "emac\todds_ratio\tpower")?;
    for &emac in &emacs {
        for &ratio in &ratios {
            let value = solve_alternative(a.groups.m0, a.groups.m1, emac, ratio)
                .and_then(|alt| power(a.kind, a.method, &alt, cli.alpha, cli.epsilon));
            match value {
                Ok(p) => writeln!(out, "{emac}\t{ratio}\t{}", format_p(p))?,
                Err(e) => {
                    log::warn!("emac {emac}, odds ratio {ratio}: {e}");
                    writeln!(out, "{emac}\t{ratio}\t{}", error_token(&e))?
                }
            }
        }
    }
    Ok(())
}

fn write_dropped(path: &Path, qc: &QcOutcome) -> Outcome {
    let mut w = BufWriter::new(
        File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
    );
    writeln!(w, "line\tvariant_id\treason\tdetail")?;
    for d in &qc.dropped {
        let line = d.line.map(|l| l.to_string()).unwrap_or_default();
        let id = d.variant_id.as_deref().unwrap_or("");
        writeln!(w, "{line}\t{id}\t{}\t{}", d.reason, d.detail)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_batch(cli: &Cli, a: &BatchArgs, out: &mut dyn Write) -> Outcome {
    let kinds = if a.kinds.is_empty() {
        vec![TestKind::Lrt, TestKind::Firth]
    } else {
        a.kinds.clone()
    };
    let pairs = test_pairs(cli, &kinds, &a.methods)?;
    let rows = read_variants(open_input(&a.input)?)?;
    let policy = if a.no_qc {
        QcPolicy::new(0, usize::MAX, 0.0)?
    } else {
        QcPolicy::new(a.min_mac, a.max_mac, a.min_call_rate)
            .map_err(|e| Failure::Usage(e.to_string()))?
    };
    let qc = apply_qc(&rows, &policy);
    log::info!("{} rows kept, {} dropped", qc.kept.len(), qc.dropped.len());
    for d in qc.dropped.iter().filter(|d| d.reason == DropReason::Malformed) {
        log::warn!("line {:?}: {}", d.line, d.detail);
    }
    if let Some(path) = &a.dropped {
        write_dropped(path, &qc)?;
    }
    let table: BatchTable = run_batch(&qc.kept, &pairs, cli.epsilon);
    table.write_tsv(out)?;
    Ok(())
}

fn cmd_qq(a: &QqArgs, out: &mut dyn Write) -> Outcome {
    let pvalues = read_pvalue_column(open_input(&a.input)?, a.column.as_deref())?;
    let qq = qq_data(&pvalues)?;
    if qq.clamped > 0 {
        log::warn!("{} zero p-values clamped to the smallest positive double", qq.clamped);
    }
    write_qq_tsv(&qq, out)?;
    Ok(())
}
