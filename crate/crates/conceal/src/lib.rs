//! Parallel block-based error concealment on top of `fse-conceal-core`:
//! the concealment pipeline, file access, the benchmark harness and the
//! `conceal` command line front end.

pub mod bench;
pub mod cli;
pub mod io;
pub mod pipeline;

pub use crate::bench::{bench, write_csv, BenchRow, CSV_HEADER};
pub use crate::pipeline::{conceal, ConcealError, ConcealReport, Concealment, Order};
pub use fse_conceal_core as core;
