//! Synthetic loss patterns and PSNR over concealed regions.

use alloc::vec::Vec;
use core::fmt;

use crate::imagebuf::{Image, LossMask, SampleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    /// Square losses on a lattice.
    Isolated,
    /// Full-length horizontal and vertical stripes.
    Consecutive,
    /// Stripes on a coarse lattice with squares between them.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternSpec {
    pub kind: PatternKind,
    /// Square edge / stripe width.
    pub loss_size: usize,
    /// Lattice spacing.
    pub pitch: usize,
}

impl PatternSpec {
    pub fn new(kind: PatternKind) -> Self {
        PatternSpec {
            kind,
            loss_size: 16,
            pitch: 64,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.loss_size >= 1 && self.pitch > self.loss_size
    }
}

/// Whether coordinate `t` falls inside a lattice cell of width `size`
/// starting at `offset + i·pitch`.
#[inline]
fn on_lattice(t: usize, offset: usize, pitch: usize, size: usize) -> bool {
    t >= offset && (t - offset) % pitch < size
}

/// Generates a loss mask. Cells are centered in each `pitch` period, so an
/// image of exactly one period holds one square or one stripe pair.
///
/// Mixed places stripes every second period and squares centered between
/// stripes, offset by half a period.
///
/// # Panics
///
/// If `spec` is not valid or a dimension is zero.
pub fn gen_pattern(spec: &PatternSpec, w: usize, h: usize) -> LossMask {
    assert!(spec.is_valid(), "pattern needs loss_size >= 1 and pitch > loss_size");
    let size = spec.loss_size;
    let pitch = spec.pitch;
    let offset = (pitch - size) / 2;
    let lost = |x: usize, y: usize| -> bool {
        match spec.kind {
            PatternKind::Isolated => on_lattice(x, offset, pitch, size) && on_lattice(y, offset, pitch, size),
            PatternKind::Consecutive => on_lattice(x, offset, pitch, size) || on_lattice(y, offset, pitch, size),
            PatternKind::Mixed => {
                let stripe = on_lattice(x, offset, 2 * pitch, size) || on_lattice(y, offset, 2 * pitch, size);
                let sq_offset = offset + pitch / 2;
                let square = on_lattice(x, sq_offset, pitch, size) && on_lattice(y, sq_offset, pitch, size);
                stripe || square
            }
        }
    };
    let mut state = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            state.push(if lost(x, y) {
                SampleState::Lost
            } else {
                SampleState::Known
            });
        }
    }
    LossMask::new(w, h, state).expect("dimensions checked by LossMask")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsnrError {
    EmptyRegion,
    SizeMismatch,
}

impl fmt::Display for PsnrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsnrError::EmptyRegion => f.write_str("PSNR is undefined over an empty region"),
            PsnrError::SizeMismatch => f.write_str("images and region differ in size"),
        }
    }
}

impl core::error::Error for PsnrError {}

/// PSNR with peak 255 over the samples of `region` that are not Known.
/// Identical planes give `f64::INFINITY`.
pub fn psnr(orig: &Image, recon: &Image, region: &LossMask) -> Result<f64, PsnrError> {
    if orig.width() != recon.width() || orig.height() != recon.height() || !region.matches(orig) {
        return Err(PsnrError::SizeMismatch);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((a, b), s) in orig.data().iter().zip(recon.data()).zip(region.states()) {
        if *s != SampleState::Known {
            let e = a - b;
            sum += e * e;
            count += 1;
        }
    }
    if count == 0 {
        return Err(PsnrError::EmptyRegion);
    }
    let mse = sum / count as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(255.0 * 255.0 / mse))
}
