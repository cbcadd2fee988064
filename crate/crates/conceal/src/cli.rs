//! `conceal` command line front end.
//!
//! Exit status: 0 on success, 2 on flag errors, 1 on I/O failures or when
//! some losses could not be concealed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{ArgGroup, CommandFactory, Parser, ValueEnum};
use fse_conceal_core::evalkit::{gen_pattern, psnr, PatternKind, PatternSpec};
use fse_conceal_core::fse::FseParams;
use fse_conceal_core::grid::build_grid;
use fse_conceal_core::imagebuf::{Image, LossMask};
use fse_conceal_core::scheduler::batch_map;

use crate::bench::{bench, write_csv};
use crate::io::{read_image, read_mask, write_image};
use crate::pipeline::{conceal, ConcealReport, Order};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Isolated,
    Consecutive,
    Mixed,
}

impl From<PatternArg> for PatternKind {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Isolated => PatternKind::Isolated,
            PatternArg::Consecutive => PatternKind::Consecutive,
            PatternArg::Mixed => PatternKind::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Linescan,
    Optimized,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Linescan => Order::LineScan,
            OrderArg::Optimized => Order::Optimized,
        }
    }
}

/// Conceal lost regions of a grayscale PGM image by frequency selective
/// extrapolation.
#[derive(Debug, Parser)]
#[command(name = "conceal", version)]
#[command(group(ArgGroup::new("loss").required(true).args(["mask", "pattern"])))]
pub struct RunConfig {
    /// Input image (binary PGM, maxval 255).
    #[arg(long)]
    pub input: PathBuf,
    /// Loss mask PGM: 0 marks lost samples.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Synthesize a loss pattern; the input is then the ground truth.
    #[arg(long, value_enum)]
    pub pattern: Option<PatternArg>,
    #[arg(long, default_value_t = 16)]
    pub loss_size: usize,
    #[arg(long, default_value_t = 64)]
    pub pitch: usize,
    /// Block size; a comma list is accepted with --bench.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub block_size: Vec<usize>,
    /// Processing order; a comma list is accepted with --bench.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "optimized")]
    pub order: Vec<OrderArg>,
    /// Worker threads; a comma list is accepted with --bench.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    pub d: usize,
    #[arg(long, default_value_t = 0.8)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    /// Reconstructed image (binary PGM).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Benchmark CSV destination (default: stdout). Requires --bench.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Print the batch number of every block.
    #[arg(long)]
    pub trace_batches: bool,
    /// Measure every order/block-size/thread combination.
    #[arg(long)]
    pub bench: bool,
}

impl RunConfig {
    fn params(&self, block_size: usize) -> FseParams {
        FseParams {
            d: self.d,
            rho: self.rho,
            delta: self.delta,
            gamma: self.gamma,
            iterations: self.iterations,
            block_size,
        }
    }

    fn pattern_spec(&self) -> Option<PatternSpec> {
        self.pattern.map(|p| PatternSpec {
            kind: p.into(),
            loss_size: self.loss_size,
            pitch: self.pitch,
        })
    }

    /// Checks constraints clap cannot express.
    fn validate(&self) -> Result<(), String> {
        if let Some(spec) = self.pattern_spec() {
            if !spec.is_valid() {
                return Err("--pitch must exceed --loss-size and --loss-size must be positive".into());
            }
        }
        if self.block_size.contains(&0) {
            return Err("--block-size must be positive".into());
        }
        if self.threads.contains(&0) {
            return Err("--threads must be positive".into());
        }
        for &bs in &self.block_size {
            self.params(bs).validate().map_err(|e| e.to_string())?;
        }
        if self.bench {
            if self.pattern.is_none() {
                return Err("--bench needs --pattern for ground-truth PSNR".into());
            }
            return Ok(());
        }
        if self.csv.is_some() {
            return Err("--csv requires --bench".into());
        }
        if self.block_size.len() != 1 || self.order.len() != 1 || self.threads.len() != 1 {
            return Err("lists for --block-size, --order and --threads require --bench".into());
        }
        if self.output.is_none() {
            return Err("--output is required".into());
        }
        if self.order[0] == OrderArg::Linescan && self.threads[0] != 1 {
            return Err("line-scan order is sequential; --threads must be 1".into());
        }
        Ok(())
    }
}

fn usage_error(err: &mut dyn Write, msg: &str) -> i32 {
    let _ = writeln!(err, "error: {msg}\n");
    let _ = writeln!(err, "{}", RunConfig::command().render_usage());
    2
}

/// Whitespace-separated batch numbers, one line per block row.
pub fn format_trace(cols: usize, map: &[i64]) -> String {
    let width = map.iter().map(|v| v.to_string().len()).max().unwrap_or(1);
    let mut s = String::new();
    for row in map.chunks(cols) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

fn summary(report: &ConcealReport) -> String {
    format!(
        "order={} block_size={} threads={} batches={} blocks={} unconcealable={} seconds={:.3}",
        report.order,
        report.block_size,
        report.threads,
        report.batches,
        report.blocks_processed,
        report.unconcealable,
        report.wall_time.as_secs_f64()
    )
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    if !rendered.contains("Usage:") {
                        let _ = writeln!(err, "\n{}", RunConfig::command().render_usage());
                    }
                    2
                }
            };
        }
    };
    if let Err(msg) = cfg.validate() {
        return usage_error(err, &msg);
    }
    match execute(&cfg, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn load_inputs(cfg: &RunConfig) -> Result<(Image, LossMask, bool), String> {
    let image = read_image(&cfg.input).map_err(|e| e.to_string())?;
    match (&cfg.mask, cfg.pattern_spec()) {
        (Some(path), _) => {
            let mask = read_mask(path).map_err(|e| e.to_string())?;
            if !mask.matches(&image) {
                return Err(format!(
                    "mask is {}x{} but image is {}x{}",
                    mask.width(),
                    mask.height(),
                    image.width(),
                    image.height()
                ));
            }
            Ok((image, mask, false))
        }
        (None, Some(spec)) => {
            let mask = gen_pattern(&spec, image.width(), image.height());
            Ok((image, mask, true))
        }
        (None, None) => unreachable!("clap enforces --mask or --pattern"),
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, String> {
    let (image, mask, ground_truth) = load_inputs(cfg)?;

    if cfg.bench {
        let spec = cfg.pattern_spec().expect("clap enforces --pattern with --bench");
        let orders: Vec<Order> = cfg.order.iter().map(|&o| o.into()).collect();
        let rows = bench(
            &image,
            &spec,
            &cfg.params(cfg.block_size[0]),
            &orders,
            &cfg.block_size,
            &cfg.threads,
        )
        .map_err(|e| e.to_string())?;
        match &cfg.csv {
            Some(path) => {
                let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
                let mut w = BufWriter::new(file);
                write_csv(&mut w, &rows)
                    .and_then(|_| w.flush())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            None => write_csv(&mut *out, &rows).map_err(|e| e.to_string())?,
        }
        return Ok(0);
    }

    let params = cfg.params(cfg.block_size[0]);
    let order: Order = cfg.order[0].into();
    let result = conceal(&image, &mask, &params, order, cfg.threads[0]).map_err(|e| e.to_string())?;
    let output = cfg.output.as_ref().expect("validated");
    write_image(output, &result.image).map_err(|e| e.to_string())?;

    if cfg.trace_batches {
        let grid = build_grid(image.width(), image.height(), params.block_size).map_err(|e| e.to_string())?;
        let map = batch_map(&grid, &result.report.schedule);
        let _ = write!(out, "{}", format_trace(grid.cols(), &map));
    }
    if ground_truth {
        match psnr(&image, &result.image, &mask) {
            Ok(db) => {
                let _ = writeln!(out, "PSNR: {db:.2} dB");
            }
            Err(e) => {
                let _ = writeln!(out, "PSNR: {e}");
            }
        }
    }
    let _ = writeln!(out, "{}", summary(&result.report));
    if result.report.unconcealable > 0 {
        return Err(format!(
            "{} block(s) had no known or reconstructed support and were left lost",
            result.report.unconcealable
        ));
    }
    Ok(0)
}
