//! Block transform coding simulator.
//!
//! The image is cut into `L x L` blocks, each block is transformed with an
//! orthonormal 2-D DCT-II (`C = T b Tᵗ`), every coefficient is quantized with
//! one uniform midtread step `Δ`, and the decoder reconstructs
//! `b̃ = Tᵗ Q(C) T`. There is no entropy coding; only the distortion matters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

/// Transform block size and quantization step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodecConfig {
    block_size: usize,
    delta: f64,
}

impl CodecConfig {
    pub const DEFAULT_BLOCK_SIZE: usize = 8;

    pub fn new(block_size: usize, delta: f64) -> Result<Self> {
        if block_size < 2 {
            return Err(Error::InvalidConfig(format!("block size {block_size} < 2")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "quantization step {delta} must be positive"
            )));
        }
        Ok(Self { block_size, delta })
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_BLOCK_SIZE, delta)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `L x L` transform coefficients, row-major (`[k * L + l]`, `k` vertical frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBlock {
    size: usize,
    coefficients: Vec<f64>,
}

impl CoefficientBlock {
    pub fn new(size: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != size * size {
            return Err(Error::NonSquareBlock {
                expected: size,
                rows: coefficients.len() / size.max(1),
                cols: size,
            });
        }
        Ok(Self { size, coefficients })
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            coefficients: vec![0.0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.coefficients[k * self.size + l]
    }

    pub fn dc(&self) -> f64 {
        self.coefficients[0]
    }
}

/// Orthonormal separable 2-D DCT-II of a fixed size.
#[derive(Debug, Clone)]
pub struct Dct2d {
    size: usize,
    /// `basis[k * L + n] = c_k cos(π (2n + 1) k / 2L)`
    basis: Vec<f64>,
}

impl Dct2d {
    pub fn new(size: usize) -> Self {
        assert!(size > 0);
        let l = size as f64;
        let mut basis = Vec::with_capacity(size * size);
        for k in 0..size {
            let scale = if k == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() };
            for n in 0..size {
                basis.push(scale * (PI * (2 * n + 1) as f64 * k as f64 / (2.0 * l)).cos());
            }
        }
        Self { size, basis }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `T b Tᵗ` on a row-major block.
    pub fn forward(&self, block: &[f64]) -> CoefficientBlock {
        let n = self.size;
        assert_eq!(block.len(), n * n);
        let t = &self.basis;
        // tmp = T b
        let mut tmp = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += t[k * n + i] * block[i * n + j];
                }
                tmp[k * n + j] = acc;
            }
        }
        // out = tmp Tᵗ
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += tmp[k * n + j] * t[l * n + j];
                }
                out[k * n + l] = acc;
            }
        }
        CoefficientBlock {
            size: n,
            coefficients: out,
        }
    }

    /// `Tᵗ C T`, returned row-major.
    pub fn inverse(&self, coeffs: &CoefficientBlock) -> Vec<f64> {
        let n = self.size;
        assert_eq!(coeffs.size, n);
        let (t, c) = (&self.basis, &coeffs.coefficients);
        // tmp = Tᵗ C
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += t[k * n + i] * c[k * n + l];
                }
                tmp[i * n + l] = acc;
            }
        }
        // out = tmp T
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += tmp[i * n + l] * t[l * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        out
    }
}

fn flatten_square(block: &[Vec<f64>]) -> Result<(usize, Vec<f64>)> {
    let n = block.len();
    if let Some(row) = block.iter().find(|r| r.len() != n) {
        return Err(Error::NonSquareBlock {
            expected: n,
            rows: n,
            cols: row.len(),
        });
    }
    if n == 0 {
        return Err(Error::NonSquareBlock {
            expected: 0,
            rows: 0,
            cols: 0,
        });
    }
    Ok((n, block.concat()))
}

/// Orthonormal 2-D DCT-II of a square block given as rows.
pub fn dct2(block: &[Vec<f64>]) -> Result<CoefficientBlock> {
    let (n, flat) = flatten_square(block)?;
    Ok(Dct2d::new(n).forward(&flat))
}

/// Inverse of [`dct2`].
pub fn idct2(coeffs: &CoefficientBlock) -> Vec<Vec<f64>> {
    let n = coeffs.size;
    Dct2d::new(n).inverse(coeffs).chunks(n).map(<[f64]>::to_vec).collect()
}

/// Uniform midtread quantizer, `Δ · round(c / Δ)` with ties away from zero.
#[inline]
pub fn quantize_value(c: f64, delta: f64) -> f64 {
    delta * (c / delta).round()
}

pub fn quantize(coeffs: &CoefficientBlock, delta: f64) -> CoefficientBlock {
    CoefficientBlock {
        size: coeffs.size,
        coefficients: coeffs.coefficients.iter().map(|&c| quantize_value(c, delta)).collect(),
    }
}

/// Quantized coefficients for every block of an image, in block raster order.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    width: usize,
    height: usize,
    config: CodecConfig,
    blocks: Vec<CoefficientBlock>,
}

impl EncodedImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn config(&self) -> CodecConfig {
        self.config
    }

    pub fn blocks(&self) -> &[CoefficientBlock] {
        &self.blocks
    }

    pub fn blocks_x(&self) -> usize {
        self.width / self.config.block_size
    }

    pub fn blocks_y(&self) -> usize {
        self.height / self.config.block_size
    }

    /// Reconstructs the image from the quantized coefficients, clamped to
    /// `[0, 255]` but not rounded.
    pub fn decode(&self) -> Image {
        let dct = Dct2d::new(self.config.block_size);
        let mut out = Image::filled(self.width, self.height, 0.0).expect("validated dimensions");
        for (i, block) in self.blocks.iter().enumerate() {
            let (bx, by) = (i % self.blocks_x(), i / self.blocks_x());
            put_block(&mut out, self.config.block_size, bx, by, &dct.inverse(block));
        }
        out.clamped()
    }
}

pub(crate) fn check_block_grid(img: &Image, block: usize) -> Result<()> {
    if !img.width().is_multiple_of(block) || !img.height().is_multiple_of(block) {
        return Err(Error::NotDivisible {
            block,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

pub(crate) fn take_block(img: &Image, size: usize, bx: usize, by: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(size * size);
    for y in by * size..(by + 1) * size {
        out.extend_from_slice(&img.row(y)[bx * size..(bx + 1) * size]);
    }
    out
}

pub(crate) fn put_block(img: &mut Image, size: usize, bx: usize, by: usize, block: &[f64]) {
    for (dy, row) in block.chunks(size).enumerate() {
        for (dx, &v) in row.iter().enumerate() {
            img.set(bx * size + dx, by * size + dy, v);
        }
    }
}

/// Forward transform of every block, without quantization.
pub fn transform_blocks(img: &Image, block_size: usize) -> Result<Vec<CoefficientBlock>> {
    check_block_grid(img, block_size)?;
    let dct = Dct2d::new(block_size);
    let (nx, ny) = (img.width() / block_size, img.height() / block_size);
    Ok((0..nx * ny)
        .map(|i| dct.forward(&take_block(img, block_size, i % nx, i / nx)))
        .collect())
}

/// Transforms and quantizes every block.
pub fn encode(img: &Image, cfg: CodecConfig) -> Result<EncodedImage> {
    let blocks = transform_blocks(img, cfg.block_size)?
        .iter()
        .map(|b| quantize(b, cfg.delta))
        .collect();
    Ok(EncodedImage {
        width: img.width(),
        height: img.height(),
        config: cfg,
        blocks,
    })
}

/// Full simulated coding round trip.
pub fn encode_decode(img: &Image, cfg: CodecConfig) -> Result<Image> {
    Ok(encode(img, cfg)?.decode())
}
