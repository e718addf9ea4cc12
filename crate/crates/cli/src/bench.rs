//! Windowed against full enumeration on two fixed workloads. Both paths run
//! on one thread so the ratio reflects the work skipped, not core count.

use std::io::Write;
use std::time::{Duration, Instant};

use raretest::engine::{au_pvalue, t1er};
use raretest::{Counts2x2, Method, NullModel, TestKind, DEFAULT_EPSILON};

use crate::Failure;

pub struct Timing {
    pub name: &'static str,
    pub windowed: Duration,
    pub full: Duration,
    pub windowed_value: f64,
    pub full_value: f64,
}

/// Best of repeated runs, stopping after `budget` or 200 runs.
fn time_best<F: FnMut() -> raretest::Result<f64>>(
    mut f: F,
    budget: Duration,
) -> raretest::Result<(Duration, f64)> {
    let started = Instant::now();
    let mut best = Duration::MAX;
    let mut value = 0.0;
    for _ in 0..200 {
        let t = Instant::now();
        value = f()?;
        best = best.min(t.elapsed());
        if started.elapsed() > budget {
            break;
        }
    }
    Ok((best, value))
}

fn measure(
    name: &'static str,
    f: impl Fn(f64) -> raretest::Result<f64>,
) -> raretest::Result<Timing> {
    let (windowed, windowed_value) =
        time_best(|| f(DEFAULT_EPSILON), Duration::from_millis(500))?;
    let (full, full_value) = time_best(|| f(0.0), Duration::ZERO)?;
    Ok(Timing { name, windowed, full, windowed_value, full_value })
}

pub fn timings() -> raretest::Result<Vec<Timing>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| raretest::Error::Parse(e.to_string()))?;
    pool.install(|| {
        let model = NullModel::new(500, 500, 15.0)?;
        let data = Counts2x2::new(5000, 5000, 10, 50)?;
        Ok(vec![
            measure("t1er score standard (500, 500, emac 15, alpha 5e-8)", |eps| {
                t1er(TestKind::Score, Method::Standard, &model, 5e-8, eps)
            })?,
            measure("au_pvalue score (5000, 5000, 10, 50)", |eps| {
                au_pvalue(TestKind::Score, &data, eps)
            })?,
        ])
    })
}

pub fn run(out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(
        out,
        "case\twindowed_seconds\tfull_seconds\tspeedup\twindowed_value\tfull_value\tabs_difference"
    )?;
    for t in timings()? {
        writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{:.1}\t{:.16e}\t{:.16e}\t{:.3e}",
            t.name,
            t.windowed.as_secs_f64(),
            t.full.as_secs_f64(),
            t.full.as_secs_f64() / t.windowed.as_secs_f64(),
            t.windowed_value,
            t.full_value,
            (t.windowed_value - t.full_value).abs()
        )?;
    }
    Ok(())
}
