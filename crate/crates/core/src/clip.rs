//! Video clips and per-frame coverage grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Number of interleaved color channels in every clip.
pub const CHANNELS: usize = 3;

/// A `frames × height × width × 3` block of 8-bit intensities, stored
/// frame-major, row-major, channel-interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<u8>,
    /// Informational only; never used in computation.
    pub frame_rate: f32,
}

impl Clip {
    pub const DEFAULT_FRAME_RATE: f32 = 25.0;

    pub fn zeros(frames: usize, height: usize, width: usize) -> Result<Self> {
        Self::filled(frames, height, width, 0)
    }

    pub fn filled(frames: usize, height: usize, width: usize, value: u8) -> Result<Self> {
        check_dims(frames, height, width)?;
        Ok(Self {
            frames,
            height,
            width,
            data: vec![value; frames * height * width * CHANNELS],
            frame_rate: Self::DEFAULT_FRAME_RATE,
        })
    }

    pub fn from_data(frames: usize, height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(frames, height, width)?;
        let expected = frames * height * width * CHANNELS;
        if data.len() != expected {
            return Err(Error::input(alloc::format!(
                "clip payload has {} bytes, expected {expected}",
                data.len()
            )));
        }
        Ok(Self {
            frames,
            height,
            width,
            data,
            frame_rate: Self::DEFAULT_FRAME_RATE,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(frames, height, width)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.frames, self.height, self.width)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn frame_len(&self) -> usize {
        self.height * self.width * CHANNELS
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let n = self.frame_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [u8] {
        let n = self.frame_len();
        &mut self.data[t * n..(t + 1) * n]
    }

    #[inline]
    pub fn index(&self, t: usize, y: usize, x: usize) -> usize {
        ((t * self.height + y) * self.width + x) * CHANNELS
    }

    #[inline]
    pub fn pixel(&self, t: usize, y: usize, x: usize) -> [u8; 3] {
        let i = self.index(t, y, x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, t: usize, y: usize, x: usize, rgb: [u8; 3]) {
        let i = self.index(t, y, x);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

fn check_dims(frames: usize, height: usize, width: usize) -> Result<()> {
    if frames == 0 || height == 0 || width == 0 {
        return Err(Error::input(alloc::format!(
            "clip dimensions must be positive, got {frames}x{height}x{width}"
        )));
    }
    Ok(())
}

/// Per-pixel coverage in `[0, 1]` for every frame of a clip.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGrid {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl CoverageGrid {
    pub fn empty(frames: usize, height: usize, width: usize) -> Self {
        Self {
            frames,
            height,
            width,
            data: vec![0.0; frames * height * width],
        }
    }

    pub fn from_data(frames: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != frames * height * width {
            return Err(Error::input("coverage payload length mismatch"));
        }
        if data.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::input("coverage values must lie in [0, 1]"));
        }
        Ok(Self {
            frames,
            height,
            width,
            data,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.frames, self.height, self.width)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, t: usize, y: usize, x: usize) -> f32 {
        self.data[(t * self.height + y) * self.width + x]
    }

    #[inline]
    pub(crate) fn set(&mut self, t: usize, y: usize, x: usize, v: f32) {
        self.data[(t * self.height + y) * self.width + x] = v;
    }

    /// Accumulate coverage `m` at one pixel as `1 - (1 - u)(1 - m)`.
    #[inline]
    pub fn accumulate(&mut self, t: usize, y: usize, x: usize, m: f32) {
        let i = (t * self.height + y) * self.width + x;
        let u = self.data[i];
        self.data[i] = 1.0 - (1.0 - u) * (1.0 - m);
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn covered_count(&self) -> usize {
        self.data.iter().filter(|&&v| v > 0.0).count()
    }
}
