//! Neighbor-count block ordering.
//!
//! Each pending block carries N(b), the number of neighbors that still hold
//! unextrapolated losses, topped up on the image rim so that every block
//! starts from the same 8-neighbor scale. Batches take the blocks with the
//! smallest non-negative count, skipping any block adjacent to one already
//! chosen, so a batch can be extrapolated in parallel.

use alloc::vec::Vec;
use core::fmt;

use crate::grid::BlockGrid;
use crate::imagebuf::LossMask;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    /// No block is pending.
    EmptySchedule,
    /// A committed block was not pending.
    NotPending(usize),
    SizeMismatch,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::EmptySchedule => f.write_str("no block left to schedule"),
            ScheduleError::NotPending(b) => write!(f, "block {b} is not pending"),
            ScheduleError::SizeMismatch => f.write_str("count map does not match the grid"),
        }
    }
}

impl core::error::Error for ScheduleError {}

/// Per-block N(b); negative means nothing (left) to extrapolate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMap {
    pub n: Vec<i32>,
}

impl CountMap {
    pub fn is_pending(&self, b: usize) -> bool {
        self.n[b] >= 0
    }

    pub fn pending(&self) -> usize {
        self.n.iter().filter(|&&v| v >= 0).count()
    }
}

/// Blocks extrapolated together; pairwise non-adjacent, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Batch {
    pub blocks: Vec<usize>,
}

pub fn init_counts(grid: &BlockGrid, mask: &LossMask) -> CountMap {
    let lossy: Vec<bool> = (0..grid.len()).map(|b| grid.block_has_loss(mask, b)).collect();
    let mut n = alloc::vec![0i32; grid.len()];
    for b in 0..grid.len() {
        if lossy[b] {
            grid.for_each_neighbor(b, |nb| n[nb] += 1);
        }
        n[b] += grid.rim_bonus(b);
    }
    for (count, &l) in n.iter_mut().zip(&lossy) {
        if !l {
            *count = -1;
        }
    }
    CountMap { n }
}

/// Picks the next batch. The minimum is taken over pending blocks only.
pub fn select_batch(counts: &CountMap, grid: &BlockGrid) -> Result<Batch, ScheduleError> {
    if counts.n.len() != grid.len() {
        return Err(ScheduleError::SizeMismatch);
    }
    let n_min = counts
        .n
        .iter()
        .copied()
        .filter(|&v| v >= 0)
        .min()
        .ok_or(ScheduleError::EmptySchedule)?;
    let mut taken = alloc::vec![false; grid.len()];
    let mut blocks = Vec::new();
    for b in 0..grid.len() {
        if counts.n[b] != n_min {
            continue;
        }
        let mut free = true;
        grid.for_each_neighbor(b, |nb| free &= !taken[nb]);
        if free {
            taken[b] = true;
            blocks.push(b);
        }
    }
    Ok(Batch { blocks })
}

/// Marks the batch finished and decrements its neighbors.
pub fn commit_batch(counts: &mut CountMap, grid: &BlockGrid, batch: &Batch) -> Result<(), ScheduleError> {
    if counts.n.len() != grid.len() {
        return Err(ScheduleError::SizeMismatch);
    }
    if let Some(&b) = batch.blocks.iter().find(|&&b| b >= grid.len() || counts.n[b] < 0) {
        return Err(ScheduleError::NotPending(b));
    }
    for &b in &batch.blocks {
        counts.n[b] = -1;
        grid.for_each_neighbor(b, |nb| counts.n[nb] -= 1);
    }
    Ok(())
}

/// Full processing order for `mask`.
pub fn schedule_all(grid: &BlockGrid, mask: &LossMask) -> Vec<Batch> {
    let mut counts = init_counts(grid, mask);
    let mut out = Vec::new();
    while let Ok(batch) = select_batch(&counts, grid) {
        commit_batch(&mut counts, grid, &batch).expect("selected blocks are pending");
        out.push(batch);
    }
    out
}

/// Batch number (1-based) per block, -1 for blocks never scheduled.
pub fn batch_map(grid: &BlockGrid, batches: &[Batch]) -> Vec<i64> {
    let mut map = alloc::vec![-1i64; grid.len()];
    for (i, batch) in batches.iter().enumerate() {
        for &b in &batch.blocks {
            map[b] = i as i64 + 1;
        }
    }
    map
}
