//! Quality and scaling measurements, emitted as CSV.

use std::io::{self, Write};

use fse_conceal_core::evalkit::{gen_pattern, psnr, PatternSpec};
use fse_conceal_core::fse::FseParams;
use fse_conceal_core::imagebuf::Image;

use crate::pipeline::{conceal, ConcealError, Order};

pub const CSV_HEADER: &str = "order,block_size,threads,psnr_db,seconds,speedup";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub order: Order,
    pub block_size: usize,
    pub threads: usize,
    pub psnr_db: f64,
    pub seconds: f64,
    /// seconds at threads = 1 over seconds at this thread count.
    pub speedup: f64,
}

/// Thread counts to run: deduplicated, with 1 first as the baseline.
fn thread_plan(thread_counts: &[usize]) -> Vec<usize> {
    let mut plan = vec![1];
    for &t in thread_counts {
        if t >= 1 && !plan.contains(&t) {
            plan.push(t);
        }
    }
    plan
}

/// Runs every (order, block size, thread count) configuration sequentially.
/// Line scan is sequential and only measured at one thread.
pub fn bench(
    img: &Image,
    spec: &PatternSpec,
    params: &FseParams,
    orders: &[Order],
    block_sizes: &[usize],
    thread_counts: &[usize],
) -> Result<Vec<BenchRow>, ConcealError> {
    let mask = gen_pattern(spec, img.width(), img.height());
    let plan = thread_plan(thread_counts);
    let mut rows = Vec::new();
    for &order in orders {
        for &block_size in block_sizes {
            let params = FseParams { block_size, ..*params };
            let threads: &[usize] = match order {
                Order::LineScan => &plan[..1],
                Order::Optimized => &plan,
            };
            let mut baseline = None;
            for &t in threads {
                let out = conceal(img, &mask, &params, order, t)?;
                let seconds = out.report.wall_time.as_secs_f64();
                let base = *baseline.get_or_insert(seconds);
                let speedup = if t == 1 { 1.0 } else { base / seconds };
                let psnr_db = psnr(img, &out.image, &mask).unwrap_or(f64::NAN);
                rows.push(BenchRow {
                    order,
                    block_size,
                    threads: t,
                    psnr_db,
                    seconds,
                    speedup,
                });
            }
        }
    }
    Ok(rows)
}

fn fmt_float(v: f64, precision: usize) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.precision$}")
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.order,
            r.block_size,
            r.threads,
            fmt_float(r.psnr_db, 4),
            fmt_float(r.seconds, 6),
            fmt_float(r.speedup, 4)
        )?;
    }
    Ok(())
}
