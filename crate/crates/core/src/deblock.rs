//! Post-decoding deblocking: spatial low-pass filtering and POCS.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{check_block_grid, put_block, take_block, Dct2d, EncodedImage};
use crate::error::{Error, Result};
use crate::image::Image;

/// Square smoothing kernel with non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct LowPassConfig {
    size: usize,
    kernel: Vec<f64>,
}

impl LowPassConfig {
    pub fn new(size: usize, kernel: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("kernel size {size} must be odd")));
        }
        if kernel.len() != size * size {
            return Err(Error::InvalidConfig(format!(
                "{} weights for a {size}x{size} kernel",
                kernel.len()
            )));
        }
        if kernel.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::InvalidConfig("kernel weights must be non-negative".into()));
        }
        let sum: f64 = kernel.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("kernel weights sum to {sum}, not 1")));
        }
        Ok(Self { size, kernel })
    }

    /// Uniform `size x size` averaging kernel.
    pub fn uniform(size: usize) -> Result<Self> {
        let n = size * size;
        Self::new(size, vec![1.0 / n as f64; n])
    }

    /// Sampled isotropic Gaussian, normalized.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidConfig(format!("sigma {sigma} must be positive")));
        }
        let r = (size / 2) as f64;
        let mut kernel = Vec::with_capacity(size * size);
        for y in 0..size {
            for x in 0..size {
                let (dx, dy) = (x as f64 - r, y as f64 - r);
                kernel.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
            }
        }
        let sum: f64 = kernel.iter().sum();
        kernel.iter_mut().for_each(|w| *w /= sum);
        Self::new(size, kernel)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }
}

/// Symmetric (half-sample) mirror of index `i` into `0..n`: `... 1 0 | 0 1 ... n-1 | n-1 n-2 ...`.
#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Weighted neighbourhood sum with mirror padding; output clamped to `[0, 255]`.
pub fn lowpass(img: &Image, cfg: &LowPassConfig) -> Image {
    let (w, h) = (img.width(), img.height());
    let r = (cfg.size / 2) as isize;
    let cols: Vec<Vec<usize>> = (0..w as isize)
        .map(|x| (-r..=r).map(|d| mirror_index(x + d, w)).collect())
        .collect();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        let rows: Vec<&[f64]> = (-r..=r).map(|d| img.row(mirror_index(y + d, h))).collect();
        for xs in &cols {
            let mut acc = 0.0;
            let mut k = cfg.kernel.iter();
            for row in &rows {
                for &x in xs {
                    acc += k.next().unwrap() * row[x];
                }
            }
            out.push(acc.clamp(0.0, 255.0));
        }
    }
    Image::new(w, h, out).expect("same dimensions")
}

/// Clamps `c` into the quantization cell `[q - Δ/2, q + Δ/2]`.
#[inline]
pub fn clamp_to_cell(c: f64, q: f64, delta: f64) -> f64 {
    c.clamp(q - delta / 2.0, q + delta / 2.0)
}

/// Projects `img` onto the quantization constraint set defined by `encoded`:
/// every block DCT coefficient is pulled back into its quantization cell.
pub fn project_qcs(img: &Image, encoded: &EncodedImage) -> Result<Image> {
    let cfg = encoded.config();
    let size = cfg.block_size();
    check_block_grid(img, size)?;
    if img.width() != encoded.width() || img.height() != encoded.height() {
        return Err(Error::BlockGridMismatch);
    }
    let dct = Dct2d::new(size);
    let nx = encoded.blocks_x();
    let mut out = img.clone();
    for (i, q) in encoded.blocks().iter().enumerate() {
        let (bx, by) = (i % nx, i / nx);
        let c = dct.forward(&take_block(img, size, bx, by));
        let projected = crate::codec::CoefficientBlock::new(
            size,
            c.coefficients()
                .iter()
                .zip(q.coefficients())
                .map(|(&c, &q)| clamp_to_cell(c, q, cfg.delta()))
                .collect(),
        )?;
        put_block(&mut out, size, bx, by, &dct.inverse(&projected));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PocsConfig {
    iterations: usize,
    smoothing: LowPassConfig,
}

impl PocsConfig {
    pub const DEFAULT_ITERATIONS: usize = 5;

    pub fn new(iterations: usize, smoothing: LowPassConfig) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidConfig("POCS needs at least one iteration".into()));
        }
        Ok(Self { iterations, smoothing })
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn smoothing(&self) -> &LowPassConfig {
        &self.smoothing
    }
}

impl Default for PocsConfig {
    fn default() -> Self {
        Self::new(Self::DEFAULT_ITERATIONS, LowPassConfig::uniform(3).unwrap()).unwrap()
    }
}

/// Alternating smoothing / quantization-constraint projection.
pub fn pocs(img: &Image, cfg: &PocsConfig, encoded: &EncodedImage) -> Result<Image> {
    pocs_observed(img, cfg, encoded, |_, _| {})
}

/// [`pocs`] calling `observe(iteration, image)` after each completed iteration
/// (1-based), before the final range clamp.
pub fn pocs_observed(
    img: &Image,
    cfg: &PocsConfig,
    encoded: &EncodedImage,
    mut observe: impl FnMut(usize, &Image),
) -> Result<Image> {
    let mut current = img.clone();
    for it in 1..=cfg.iterations {
        current = project_qcs(&lowpass(&current, &cfg.smoothing), encoded)?;
        observe(it, &current);
    }
    // Clamping to [0, 255] can push coefficients back out of their cells, so
    // alternate the two projections until the clamped image is in both sets.
    for _ in 0..MAX_RANGE_ROUNDS {
        current = current.clamped();
        if constraint_excess(&current, encoded)? <= RANGE_TOLERANCE {
            break;
        }
        current = project_qcs(&current, encoded)?;
    }
    Ok(current.clamped())
}

const MAX_RANGE_ROUNDS: usize = 10_000;
const RANGE_TOLERANCE: f64 = 1e-9;

/// Largest distance by which any DCT coefficient of `img` lies outside its
/// quantization cell; zero when every constraint holds.
pub fn constraint_excess(img: &Image, encoded: &EncodedImage) -> Result<f64> {
    let cfg = encoded.config();
    let size = cfg.block_size();
    check_block_grid(img, size)?;
    if img.width() != encoded.width() || img.height() != encoded.height() {
        return Err(Error::BlockGridMismatch);
    }
    let dct = Dct2d::new(size);
    let nx = encoded.blocks_x();
    let mut worst = 0.0f64;
    for (i, q) in encoded.blocks().iter().enumerate() {
        let c = dct.forward(&take_block(img, size, i % nx, i / nx));
        for (&c, &q) in c.coefficients().iter().zip(q.coefficients()) {
            worst = worst.max((c - q).abs() - cfg.delta() / 2.0);
        }
    }
    Ok(worst)
}

/// Deblocking method applied to a decoded image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    None,
    Lowpass3,
    Lowpass7,
    Pocs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::None, Method::Lowpass3, Method::Lowpass7, Method::Pocs];

    pub fn name(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Lowpass3 => "lowpass3",
            Method::Lowpass7 => "lowpass7",
            Method::Pocs => "pocs",
        }
    }

    pub fn apply(self, decoded: &Image, encoded: &EncodedImage, pocs_cfg: &PocsConfig) -> Result<Image> {
        match self {
            Method::None => Ok(decoded.clone()),
            Method::Lowpass3 => Ok(lowpass(decoded, &LowPassConfig::uniform(3)?)),
            Method::Lowpass7 => Ok(lowpass(decoded, &LowPassConfig::uniform(7)?)),
            Method::Pocs => pocs(decoded, pocs_cfg, encoded),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown deblocking method {s:?}")))
    }
}
