//! End-to-end concealment in line-scan or neighbor-count order.
//!
//! In the optimized order every batch is extrapolated against the image and
//! mask as they were when the batch started. Members of a batch never see
//! each other's output, so the result does not depend on how the batch is
//! split across workers.

use std::fmt;
use std::time::{Duration, Instant};

use fse_conceal_core::fse::{extrapolate_block, FseError, FseParams};
use fse_conceal_core::grid::{build_grid, extract_window, BlockGrid, GridError};
use fse_conceal_core::imagebuf::{Image, LossMask, SampleState};
use fse_conceal_core::scheduler::{commit_batch, init_counts, select_batch, Batch};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    LineScan,
    Optimized,
}

impl Order {
    pub fn name(self) -> &'static str {
        match self {
            Order::LineScan => "linescan",
            Order::Optimized => "optimized",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum ConcealError {
    #[error("image and mask dimensions differ")]
    SizeMismatch,
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("line-scan order is sequential; threads must be 1, got {0}")]
    SequentialOrder(usize),
    #[error(transparent)]
    Params(#[from] FseError),
    #[error("{0}")]
    Grid(GridError),
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone)]
pub struct ConcealReport {
    pub order: Order,
    pub block_size: usize,
    /// Scheduled rounds, excluding retry sweeps.
    pub batches: usize,
    /// Blocks that held losses in the input mask.
    pub blocks_processed: usize,
    /// Blocks whose windows never got a weighted sample.
    pub unconcealable: usize,
    pub retry_rounds: usize,
    pub wall_time: Duration,
    pub threads: usize,
    /// Processing order; singleton batches for line scan.
    pub schedule: Vec<Batch>,
}

#[derive(Debug, Clone)]
pub struct Concealment {
    pub image: Image,
    pub mask: LossMask,
    pub report: ConcealReport,
}

/// Image index and value of every sample written for one block.
type BlockOutput = Vec<(usize, f64)>;

fn extrapolate(
    grid: &BlockGrid,
    image: &Image,
    mask: &LossMask,
    b: usize,
    params: &FseParams,
) -> Result<BlockOutput, FseError> {
    let win = extract_window(grid, image, mask, b, params.d).expect("block index and sizes checked");
    let values = extrapolate_block(&win, params)?;
    let (ox, oy) = win.origin;
    let width = image.width();
    Ok(win
        .lost_in_block()
        .zip(values)
        .map(|((m, n), v)| ((oy + m) * width + ox + n, v))
        .collect())
}

fn write_block(image: &mut Image, mask: &mut LossMask, out: &BlockOutput) {
    let width = image.width();
    for &(i, v) in out {
        image.data_mut()[i] = v;
        mask.set(i % width, i / width, SampleState::Reconstructed);
    }
}

struct Run<'a> {
    grid: BlockGrid,
    params: &'a FseParams,
    pool: rayon::ThreadPool,
    image: Image,
    mask: LossMask,
}

impl Run<'_> {
    /// Extrapolates `blocks` against the current state and writes the
    /// results afterwards; returns the blocks that were degenerate.
    fn snapshot_batch(&mut self, blocks: &[usize]) -> Vec<usize> {
        let (grid, params, image, mask) = (&self.grid, self.params, &self.image, &self.mask);
        let results: Vec<Result<BlockOutput, FseError>> = self.pool.install(|| {
            blocks
                .par_iter()
                .map(|&b| extrapolate(grid, image, mask, b, params))
                .collect()
        });
        let mut degenerate = Vec::new();
        for (&b, result) in blocks.iter().zip(results) {
            match result {
                Ok(out) => write_block(&mut self.image, &mut self.mask, &out),
                Err(_) => degenerate.push(b),
            }
        }
        degenerate
    }

    /// Row-major, each block seeing everything written before it.
    fn sequential(&mut self, blocks: &[usize]) -> Vec<usize> {
        let mut degenerate = Vec::new();
        for &b in blocks {
            match extrapolate(&self.grid, &self.image, &self.mask, b, self.params) {
                Ok(out) => write_block(&mut self.image, &mut self.mask, &out),
                Err(_) => degenerate.push(b),
            }
        }
        degenerate
    }
}

/// Conceals every Lost sample of `img` that some block window can model.
pub fn conceal(
    img: &Image,
    mask: &LossMask,
    params: &FseParams,
    order: Order,
    threads: usize,
) -> Result<Concealment, ConcealError> {
    if !mask.matches(img) {
        return Err(ConcealError::SizeMismatch);
    }
    if threads == 0 {
        return Err(ConcealError::ZeroThreads);
    }
    if order == Order::LineScan && threads != 1 {
        return Err(ConcealError::SequentialOrder(threads));
    }
    params.validate()?;
    let grid = build_grid(img.width(), img.height(), params.block_size).map_err(ConcealError::Grid)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;

    let start = Instant::now();
    let mut run = Run {
        grid,
        params,
        pool,
        image: img.clone(),
        mask: mask.clone(),
    };
    let mut schedule = Vec::new();
    let mut pending_retry = Vec::new();

    match order {
        Order::LineScan => {
            let lossy: Vec<usize> = (0..grid.len()).filter(|&b| grid.block_has_loss(mask, b)).collect();
            for &b in &lossy {
                pending_retry.extend(run.sequential(&[b]));
                schedule.push(Batch { blocks: vec![b] });
            }
        }
        Order::Optimized => {
            let mut counts = init_counts(&grid, mask);
            while let Ok(batch) = select_batch(&counts, &grid) {
                pending_retry.extend(run.snapshot_batch(&batch.blocks));
                commit_batch(&mut counts, &grid, &batch).expect("selected blocks are pending");
                schedule.push(batch);
            }
        }
    }

    // Blocks that were degenerate may have gained reconstructed neighbors.
    pending_retry.sort_unstable();
    let max_rounds = grid.rows().max(grid.cols());
    let mut retry_rounds = 0;
    while !pending_retry.is_empty() && retry_rounds < max_rounds {
        let before = pending_retry.len();
        pending_retry = match order {
            Order::LineScan => run.sequential(&pending_retry),
            Order::Optimized => run.snapshot_batch(&pending_retry),
        };
        retry_rounds += 1;
        if pending_retry.len() == before {
            break;
        }
    }

    let wall_time = start.elapsed();
    let report = ConcealReport {
        order,
        block_size: params.block_size,
        batches: schedule.len(),
        blocks_processed: schedule.iter().map(|b| b.blocks.len()).sum(),
        unconcealable: pending_retry.len(),
        retry_rounds,
        wall_time,
        threads,
        schedule,
    };
    Ok(Concealment {
        image: run.image,
        mask: run.mask,
        report,
    })
}
