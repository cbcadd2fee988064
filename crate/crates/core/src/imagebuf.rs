//! Sample planes, loss masks and binary PGM (P5) coding.
//!
//! Samples are kept as `f64` so model synthesis is never truncated; the
//! 8-bit quantization happens only in [`save_pgm`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors constructing an [`Image`] or [`LossMask`] from raw parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageError {
    ZeroDimension,
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::ZeroDimension => f.write_str("image dimensions must be at least 1x1"),
            ImageError::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
        }
    }
}

impl core::error::Error for ImageError {}

/// Single-channel, row-major sample plane with a top-left origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        check_dims(width, height, data.len())?;
        Ok(Image { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Image::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }
}

/// Per-sample concealment state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleState {
    Known,
    Lost,
    /// Written by an earlier extrapolation step.
    Reconstructed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossMask {
    width: usize,
    height: usize,
    state: Vec<SampleState>,
}

impl LossMask {
    pub fn new(width: usize, height: usize, state: Vec<SampleState>) -> Result<Self, ImageError> {
        check_dims(width, height, state.len())?;
        Ok(LossMask { width, height, state })
    }

    pub fn all_known(width: usize, height: usize) -> Result<Self, ImageError> {
        LossMask::new(width, height, vec![SampleState::Known; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn states(&self) -> &[SampleState] {
        &self.state
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> SampleState {
        self.state[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, state: SampleState) {
        self.state[y * self.width + x] = state;
    }

    pub fn lost_count(&self) -> usize {
        self.state.iter().filter(|&&s| s == SampleState::Lost).count()
    }

    pub fn matches(&self, image: &Image) -> bool {
        self.width == image.width && self.height == image.height
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroDimension);
    }
    let expected = width * height;
    if len != expected {
        return Err(ImageError::LengthMismatch { expected, found: len });
    }
    Ok(())
}

/// Header field of a PGM stream, used to point at what was malformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeaderField {
    Magic,
    Width,
    Height,
    Maxval,
}

impl fmt::Display for HeaderField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeaderField::Magic => "magic",
            HeaderField::Width => "width",
            HeaderField::Height => "height",
            HeaderField::Maxval => "maxval",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgmError {
    /// The named header field is missing or not a valid token.
    Malformed(HeaderField),
    UnsupportedMaxval(u32),
    Truncated {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgmError::Malformed(field) => write!(f, "malformed PGM header field `{field}`"),
            PgmError::UnsupportedMaxval(v) => {
                write!(f, "PGM header field `maxval` is {v}, only 255 is supported")
            }
            PgmError::Truncated { expected, found } => {
                write!(f, "truncated PGM payload: expected {expected} samples, found {found}")
            }
        }
    }
}

impl core::error::Error for PgmError {}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: HeaderField) -> Result<u32, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::Malformed(field));
        }
        // Token must end at whitespace (or a comment).
        match self.bytes.get(self.pos) {
            None => {}
            Some(c) if c.is_ascii_whitespace() || *c == b'#' => {}
            _ => return Err(PgmError::Malformed(field)),
        }
        core::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or(PgmError::Malformed(field))
    }
}

fn parse_p5(bytes: &[u8]) -> Result<(usize, usize, &[u8]), PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::Malformed(HeaderField::Magic));
    }
    if !bytes.get(2).is_some_and(|c| c.is_ascii_whitespace() || *c == b'#') {
        return Err(PgmError::Malformed(HeaderField::Magic));
    }
    let mut rd = HeaderReader { bytes, pos: 2 };
    let width = rd.number(HeaderField::Width)? as usize;
    let height = rd.number(HeaderField::Height)? as usize;
    if width == 0 {
        return Err(PgmError::Malformed(HeaderField::Width));
    }
    if height == 0 {
        return Err(PgmError::Malformed(HeaderField::Height));
    }
    let maxval = rd.number(HeaderField::Maxval)?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates maxval from the raster.
    if !bytes.get(rd.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::Malformed(HeaderField::Maxval));
    }
    let payload = &bytes[rd.pos + 1..];
    let expected = width * height;
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    Ok((width, height, &payload[..expected]))
}

/// Decodes a binary PGM with maxval 255.
pub fn load_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let (width, height, raster) = parse_p5(bytes)?;
    let data = raster.iter().map(|&b| f64::from(b)).collect();
    Ok(Image { width, height, data })
}

/// Decodes a PGM loss mask: 0 is Lost, anything else Known.
pub fn load_mask_pgm(bytes: &[u8]) -> Result<LossMask, PgmError> {
    let (width, height, raster) = parse_p5(bytes)?;
    let state = raster
        .iter()
        .map(|&b| if b == 0 { SampleState::Lost } else { SampleState::Known })
        .collect();
    Ok(LossMask { width, height, state })
}

/// Clamps to [0, 255] and rounds half away from zero.
#[inline]
pub fn quantize(sample: f64) -> u8 {
    if sample.is_nan() {
        return 0;
    }
    libm::round(sample.clamp(0.0, 255.0)) as u8
}

fn encode_p5(width: usize, height: usize, raster: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(width * height + 20);
    out.extend_from_slice(b"P5\n");
    push_decimal(&mut out, width);
    out.push(b' ');
    push_decimal(&mut out, height);
    out.extend_from_slice(b"\n255\n");
    out.extend(raster);
    out
}

fn push_decimal(out: &mut Vec<u8>, mut v: usize) {
    let mut digits = [0u8; 20];
    let mut n = 0;
    loop {
        digits[n] = b'0' + (v % 10) as u8;
        n += 1;
        v /= 10;
        if v == 0 {
            break;
        }
    }
    out.extend(digits[..n].iter().rev());
}

pub fn save_pgm(img: &Image) -> Vec<u8> {
    encode_p5(img.width, img.height, img.data.iter().map(|&s| quantize(s)))
}

/// Encodes a mask with the [`load_mask_pgm`] convention; Reconstructed
/// samples are written as 128 so they reload as Known.
pub fn save_mask_pgm(mask: &LossMask) -> Vec<u8> {
    encode_p5(
        mask.width,
        mask.height,
        mask.state.iter().map(|s| match s {
            SampleState::Lost => 0,
            SampleState::Reconstructed => 128,
            SampleState::Known => 255,
        }),
    )
}
