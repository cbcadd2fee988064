//! Block-based image error concealment with Frequency Selective Extrapolation.
//!
//! This crate holds the allocation-only algorithmic core: sample planes and
//! binary PGM coding, the block grid with its area classification, the FSE
//! model generator, the neighbor-count block scheduler, and the evaluation
//! primitives (loss patterns and PSNR). Threading, timing and file access
//! live in the `fse-conceal` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod evalkit;
pub mod fse;
pub mod grid;
pub mod imagebuf;
pub mod scheduler;

pub use crate::evalkit::{gen_pattern, psnr, PatternKind, PatternSpec, PsnrError};
pub use crate::fse::{
    dft_basis, extrapolate_block, generate_model, weight, FseError, FseParams, Model, Selection, Solver,
};
pub use crate::grid::{
    build_grid, classify_window, extract_window, AreaClass, BlockGrid, BlockRect, GridError, Window,
};
pub use crate::imagebuf::{
    load_mask_pgm, load_pgm, quantize, save_mask_pgm, save_pgm, HeaderField, Image, ImageError, LossMask, PgmError,
    SampleState,
};
pub use crate::scheduler::{
    batch_map, commit_batch, init_counts, schedule_all, select_batch, Batch, CountMap, ScheduleError,
};
