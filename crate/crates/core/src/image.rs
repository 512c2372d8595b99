//! Grayscale processing image.
//!
//! Samples are kept as `f64` throughout the pipeline. Rounding to 8-bit only
//! happens when an image is stored (see [`Image::to_bytes`]).

use crate::error::{Error, Result};

/// Nominal peak sample value of 8-bit luma.
pub const PEAK: f64 = 255.0;

/// Row-major luma image with real-valued samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidGeometry(format!(
                "{} samples for a {width}x{height} image",
                samples.len()
            )));
        }
        Ok(Self { width, height, samples })
    }

    /// Image filled with a single value.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.samples[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    pub fn same_dimensions(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn ensure_same_dimensions(&self, other: &Image) -> Result<()> {
        if self.same_dimensions(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            })
        }
    }

    /// Clamps every sample to `[0, 255]` without rounding.
    pub fn clamped(mut self) -> Self {
        for s in &mut self.samples {
            *s = s.clamp(0.0, PEAK);
        }
        self
    }

    /// Storage quantization: round half away from zero, then clamp.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.samples.iter().map(|&s| quantize_sample(s)).collect()
    }

    /// The image after a storage round-trip.
    pub fn quantized(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            samples: self.to_bytes().into_iter().map(f64::from).collect(),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                (lo.min(s), hi.max(s))
            })
    }
}

/// Maps a real sample to its stored 8-bit value.
#[inline]
pub fn quantize_sample(s: f64) -> u8 {
    if s.is_nan() {
        return 0;
    }
    // f64::round is half-away-from-zero
    s.round().clamp(0.0, PEAK) as u8
}
