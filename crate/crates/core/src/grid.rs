//! Block partition of the image and classification of extrapolation areas.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::imagebuf::{Image, LossMask, SampleState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    ZeroDimension,
    BlockOutOfRange { index: usize, count: usize },
    MaskMismatch,
    InvalidWindow(&'static str),
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::ZeroDimension => f.write_str("image and block dimensions must be positive"),
            GridError::BlockOutOfRange { index, count } => {
                write!(f, "block index {index} out of range for {count} blocks")
            }
            GridError::MaskMismatch => f.write_str("mask dimensions do not match the grid"),
            GridError::InvalidWindow(why) => write!(f, "invalid window: {why}"),
        }
    }
}

impl core::error::Error for GridError {}

/// Axis-aligned sample rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BlockRect {
    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

/// Partition of an image into `block_size` squares; the last column and row
/// of blocks are cut short when the size does not divide the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    block_size: usize,
    cols: usize,
    rows: usize,
    image_w: usize,
    image_h: usize,
}

pub fn build_grid(image_w: usize, image_h: usize, block_size: usize) -> Result<BlockGrid, GridError> {
    if image_w == 0 || image_h == 0 || block_size == 0 {
        return Err(GridError::ZeroDimension);
    }
    Ok(BlockGrid {
        block_size,
        cols: image_w.div_ceil(block_size),
        rows: image_h.div_ceil(block_size),
        image_w,
        image_h,
    })
}

impl BlockGrid {
    pub fn block_size(&self) -> usize {
        self.block_size
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn len(&self) -> usize {
        self.cols * self.rows
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn image_width(&self) -> usize {
        self.image_w
    }
    pub fn image_height(&self) -> usize {
        self.image_h
    }

    fn check(&self, b: usize) -> Result<(), GridError> {
        if b >= self.len() {
            return Err(GridError::BlockOutOfRange {
                index: b,
                count: self.len(),
            });
        }
        Ok(())
    }

    /// (col, row) of block `b`.
    #[inline]
    pub fn position(&self, b: usize) -> (usize, usize) {
        (b % self.cols, b / self.cols)
    }

    pub fn block_rect(&self, b: usize) -> Result<BlockRect, GridError> {
        self.check(b)?;
        let (c, r) = self.position(b);
        let x = c * self.block_size;
        let y = r * self.block_size;
        Ok(BlockRect {
            x,
            y,
            w: self.block_size.min(self.image_w - x),
            h: self.block_size.min(self.image_h - y),
        })
    }

    /// 8-connected neighbors of `b` in row-major order.
    pub fn neighbors(&self, b: usize) -> Result<Vec<usize>, GridError> {
        self.check(b)?;
        let mut out = Vec::with_capacity(8);
        self.for_each_neighbor(b, |n| out.push(n));
        Ok(out)
    }

    /// Unchecked variant of [`BlockGrid::neighbors`] for hot loops.
    #[inline]
    pub(crate) fn for_each_neighbor(&self, b: usize, mut f: impl FnMut(usize)) {
        let (c, r) = self.position(b);
        let r0 = r.saturating_sub(1);
        let r1 = (r + 1).min(self.rows - 1);
        let c0 = c.saturating_sub(1);
        let c1 = (c + 1).min(self.cols - 1);
        for rr in r0..=r1 {
            for cc in c0..=c1 {
                if rr != r || cc != c {
                    f(rr * self.cols + cc);
                }
            }
        }
    }

    fn edge_contacts(&self, b: usize) -> (bool, bool) {
        let (c, r) = self.position(b);
        (c == 0 || c + 1 == self.cols, r == 0 || r + 1 == self.rows)
    }

    /// Touches exactly one of {left/right, top/bottom} image borders.
    pub fn is_margin(&self, b: usize) -> bool {
        let (h, v) = self.edge_contacts(b);
        h ^ v
    }

    /// Touches both a left/right and a top/bottom image border.
    pub fn is_corner(&self, b: usize) -> bool {
        let (h, v) = self.edge_contacts(b);
        h && v
    }

    /// Count compensation for blocks on the image rim.
    pub fn rim_bonus(&self, b: usize) -> i32 {
        if self.is_corner(b) {
            5
        } else if self.is_margin(b) {
            3
        } else {
            0
        }
    }

    /// Whether any sample of block `b` is still Lost.
    pub fn block_has_loss(&self, mask: &LossMask, b: usize) -> bool {
        let Ok(rect) = self.block_rect(b) else {
            return false;
        };
        (rect.y..rect.y + rect.h).any(|y| {
            let row = &mask.states()[y * mask.width()..][rect.x..rect.x + rect.w];
            row.contains(&SampleState::Lost)
        })
    }

    fn check_mask(&self, mask: &LossMask) -> Result<(), GridError> {
        if mask.width() != self.image_w || mask.height() != self.image_h {
            return Err(GridError::MaskMismatch);
        }
        Ok(())
    }
}

/// Area class of one sample of an extrapolation window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AreaClass {
    /// Support: originally known.
    A,
    /// Lost, inside the block being extrapolated.
    Bi,
    /// Lost, outside the block.
    Bo,
    /// Filled by an earlier extrapolation.
    R,
}

/// Extrapolation area around one block: the block dilated by `d` samples,
/// clipped to the image.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    /// Top-left image coordinate (x, y) of the window.
    pub origin: (usize, usize),
    /// Height M.
    pub rows: usize,
    /// Width N.
    pub cols: usize,
    /// The block, in window coordinates.
    pub block: BlockRect,
    pub class: Vec<AreaClass>,
    /// Zero where the class is Bi or Bo.
    pub values: Vec<f64>,
}

impl Window {
    /// Builds a window from raw parts, verifying the class layout against the
    /// block rectangle.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        block: BlockRect,
        class: Vec<AreaClass>,
        mut values: Vec<f64>,
    ) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::ZeroDimension);
        }
        if class.len() != rows * cols || values.len() != rows * cols {
            return Err(GridError::InvalidWindow("plane length mismatch"));
        }
        if block.x + block.w > cols || block.y + block.h > rows {
            return Err(GridError::InvalidWindow("block outside window"));
        }
        for (i, c) in class.iter().enumerate() {
            let inside = block.contains(i % cols, i / cols);
            match c {
                AreaClass::Bi if !inside => return Err(GridError::InvalidWindow("Bi sample outside block")),
                AreaClass::Bo if inside => return Err(GridError::InvalidWindow("Bo sample inside block")),
                AreaClass::Bi | AreaClass::Bo => values[i] = 0.0,
                _ => {}
            }
        }
        Ok(Window {
            origin: (0, 0),
            rows,
            cols,
            block,
            class,
            values,
        })
    }

    /// Copies A and R intensities from `image`; lost samples stay zero.
    pub fn load_values(&mut self, image: &Image) {
        let (ox, oy) = self.origin;
        for m in 0..self.rows {
            for n in 0..self.cols {
                let i = m * self.cols + n;
                self.values[i] = match self.class[i] {
                    AreaClass::A | AreaClass::R => image.get(ox + n, oy + m),
                    AreaClass::Bi | AreaClass::Bo => 0.0,
                };
            }
        }
    }

    /// Window coordinates (m, n) of every Bi sample, row-major.
    pub fn lost_in_block(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.class
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == AreaClass::Bi)
            .map(|(i, _)| (i / self.cols, i % self.cols))
    }
}

/// Classifies the window of block `b` against `mask`. Values are left zero;
/// see [`Window::load_values`].
pub fn classify_window(grid: &BlockGrid, mask: &LossMask, b: usize, d: usize) -> Result<Window, GridError> {
    grid.check_mask(mask)?;
    let rect = grid.block_rect(b)?;
    let x0 = rect.x.saturating_sub(d);
    let y0 = rect.y.saturating_sub(d);
    let x1 = (rect.x + rect.w + d).min(grid.image_w);
    let y1 = (rect.y + rect.h + d).min(grid.image_h);
    let (rows, cols) = (y1 - y0, x1 - x0);
    let block = BlockRect {
        x: rect.x - x0,
        y: rect.y - y0,
        w: rect.w,
        h: rect.h,
    };
    let mut class = Vec::with_capacity(rows * cols);
    for y in y0..y1 {
        for x in x0..x1 {
            class.push(match mask.get(x, y) {
                SampleState::Known => AreaClass::A,
                SampleState::Reconstructed => AreaClass::R,
                SampleState::Lost if rect.contains(x, y) => AreaClass::Bi,
                SampleState::Lost => AreaClass::Bo,
            });
        }
    }
    Ok(Window {
        origin: (x0, y0),
        rows,
        cols,
        block,
        class,
        values: vec![0.0; rows * cols],
    })
}

/// [`classify_window`] followed by [`Window::load_values`].
pub fn extract_window(
    grid: &BlockGrid,
    image: &Image,
    mask: &LossMask,
    b: usize,
    d: usize,
) -> Result<Window, GridError> {
    if !mask.matches(image) {
        return Err(GridError::MaskMismatch);
    }
    let mut win = classify_window(grid, mask, b, d)?;
    win.load_values(image);
    Ok(win)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_dimensions() {
        let g = build_grid(512, 512, 16).unwrap();
        assert_eq!((g.cols(), g.rows()), (32, 32));
        let g = build_grid(10, 10, 4).unwrap();
        assert_eq!((g.cols(), g.rows()), (3, 3));
        assert_eq!(g.block_rect(8).unwrap(), BlockRect { x: 8, y: 8, w: 2, h: 2 });
        let g = build_grid(4, 4, 4).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(build_grid(0, 4, 4).unwrap_err(), GridError::ZeroDimension);
        assert_eq!(build_grid(4, 4, 0).unwrap_err(), GridError::ZeroDimension);
    }

    #[test]
    fn neighbor_counts() {
        let g = build_grid(3, 3, 1).unwrap();
        assert_eq!(g.neighbors(4).unwrap(), vec![0, 1, 2, 3, 5, 6, 7, 8]);
        assert_eq!(g.neighbors(0).unwrap(), vec![1, 3, 4]);
        assert_eq!(g.neighbors(1).unwrap().len(), 5);
        let single = build_grid(5, 5, 8).unwrap();
        assert!(single.neighbors(0).unwrap().is_empty());
        assert!(matches!(
            g.neighbors(9),
            Err(GridError::BlockOutOfRange { index: 9, count: 9 })
        ));
    }

    #[test]
    fn rim_bonus_tops_up_to_eight() {
        for (cols, rows) in [(3, 3), (4, 7), (16, 5)] {
            let g = build_grid(cols, rows, 1).unwrap();
            for b in 0..g.len() {
                assert_eq!(g.neighbors(b).unwrap().len() as i32 + g.rim_bonus(b), 8);
            }
        }
    }

    #[test]
    fn single_block_is_corner() {
        let g = build_grid(4, 4, 4).unwrap();
        assert!(g.is_corner(0));
        assert_eq!(g.rim_bonus(0), 5);
    }

    #[test]
    fn all_known_window_is_support() {
        let g = build_grid(64, 64, 16).unwrap();
        let mask = LossMask::all_known(64, 64).unwrap();
        let w = classify_window(&g, &mask, 5, 16).unwrap();
        assert!(w.class.iter().all(|&c| c == AreaClass::A));
        assert_eq!(w.lost_in_block().count(), 0);
    }

    #[test]
    fn interior_lost_block_window() {
        let g = build_grid(64, 64, 16).unwrap();
        let mut mask = LossMask::all_known(64, 64).unwrap();
        for y in 16..32 {
            for x in 16..32 {
                mask.set(x, y, SampleState::Lost);
            }
        }
        let b = 4 + 1;
        let w = classify_window(&g, &mask, b, 16).unwrap();
        assert_eq!((w.rows, w.cols), (48, 48));
        assert_eq!(w.origin, (0, 0));
        assert_eq!(w.class.iter().filter(|&&c| c == AreaClass::Bi).count(), 256);
        assert_eq!(w.class.iter().filter(|&&c| c == AreaClass::Bo).count(), 0);
    }

    #[test]
    fn reconstructed_stripe_is_r() {
        let g = build_grid(32, 32, 8).unwrap();
        let mut mask = LossMask::all_known(32, 32).unwrap();
        for x in 0..32 {
            mask.set(x, 4, SampleState::Reconstructed);
            mask.set(x, 12, SampleState::Lost);
        }
        let w = classify_window(&g, &mask, 5, 4).unwrap();
        // block 5 = col 1, row 1 -> samples 8..16; window rows 4..20
        assert_eq!(w.origin, (4, 4));
        assert!(w.class[..w.cols].iter().all(|&c| c == AreaClass::R));
        let bi = w.class.iter().filter(|&&c| c == AreaClass::Bi).count();
        let bo = w.class.iter().filter(|&&c| c == AreaClass::Bo).count();
        assert_eq!((bi, bo), (8, 8));
    }

    #[test]
    fn clipped_window_at_corner() {
        let g = build_grid(40, 40, 16).unwrap();
        let mask = LossMask::all_known(40, 40).unwrap();
        let w = classify_window(&g, &mask, 0, 16).unwrap();
        assert_eq!((w.rows, w.cols), (32, 32));
        assert_eq!(
            w.block,
            BlockRect {
                x: 0,
                y: 0,
                w: 16,
                h: 16
            }
        );
        let w = classify_window(&g, &mask, 8, 16).unwrap();
        // ragged block 40-32 = 8 wide, window starts at 16
        assert_eq!(w.origin, (16, 16));
        assert_eq!((w.rows, w.cols), (24, 24));
        assert_eq!(
            w.block,
            BlockRect {
                x: 16,
                y: 16,
                w: 8,
                h: 8
            }
        );
    }

    #[test]
    fn from_parts_rejects_misplaced_classes() {
        let block = BlockRect { x: 1, y: 1, w: 1, h: 1 };
        let mut class = vec![AreaClass::A; 9];
        class[0] = AreaClass::Bi;
        assert!(Window::from_parts(3, 3, block, class, vec![0.0; 9]).is_err());
    }

    fn arb_mask(w: usize, h: usize) -> impl Strategy<Value = LossMask> {
        proptest::collection::vec(0u8..3, w * h).prop_map(move |v| {
            let s = v
                .into_iter()
                .map(|x| match x {
                    0 => SampleState::Known,
                    1 => SampleState::Lost,
                    _ => SampleState::Reconstructed,
                })
                .collect();
            LossMask::new(w, h, s).unwrap()
        })
    }

    proptest! {
        #[test]
        fn window_classes_follow_mask(mask in arb_mask(13, 11), bs in 1usize..6, d in 0usize..5, pick in any::<usize>()) {
            let g = build_grid(13, 11, bs).unwrap();
            let b = pick % g.len();
            let rect = g.block_rect(b).unwrap();
            let w = classify_window(&g, &mask, b, d).unwrap();
            prop_assert!(w.rows <= bs + 2 * d && w.cols <= bs + 2 * d);
            prop_assert_eq!(w.class.len(), w.rows * w.cols);
            for m in 0..w.rows {
                for n in 0..w.cols {
                    let (x, y) = (w.origin.0 + n, w.origin.1 + m);
                    let c = w.class[m * w.cols + n];
                    let expect = match mask.get(x, y) {
                        SampleState::Known => AreaClass::A,
                        SampleState::Reconstructed => AreaClass::R,
                        SampleState::Lost if rect.contains(x, y) => AreaClass::Bi,
                        SampleState::Lost => AreaClass::Bo,
                    };
                    prop_assert_eq!(c, expect);
                }
            }
        }

        #[test]
        fn neighbors_symmetric(cols in 1usize..9, rows in 1usize..9) {
            let g = build_grid(cols, rows, 1).unwrap();
            for a in 0..g.len() {
                for b in g.neighbors(a).unwrap() {
                    prop_assert!(g.neighbors(b).unwrap().contains(&a));
                }
            }
        }
    }
}
