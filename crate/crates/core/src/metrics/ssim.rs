//! Mean SSIM over all full Gaussian-weighted windows (unit stride, no padding).
//!
//! The 2-D window is the outer product of a normalized 1-D Gaussian, so the
//! local statistics are computed with two separable passes over the five
//! moment fields `x, y, x², y², xy`.

use crate::error::{Error, Result};
use crate::image::{Image, PEAK};

#[derive(Debug, Clone, PartialEq)]
pub struct SsimConfig {
    window: Vec<f64>,
    sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SsimConfig {
    pub fn new(window_size: usize, sigma: f64) -> Result<Self> {
        if window_size == 0 || sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "SSIM window {window_size} / sigma {sigma} must be positive"
            )));
        }
        let c2 = (0.03 * PEAK).powi(2);
        Ok(Self {
            window: gaussian_1d(window_size, sigma),
            sigma,
            c1: (0.01 * PEAK).powi(2),
            c2,
            c3: c2 / 2.0,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// 1-D factor of the separable window.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c3 > 0.0) {
            return Err(Error::InvalidConfig("SSIM constants must be positive".into()));
        }
        Ok(())
    }

    /// Whether the three-term product reduces to the usual two-factor form.
    fn collapses(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0 && self.gamma == 1.0 && self.c3 == self.c2 / 2.0
    }
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self::new(11, 1.5).expect("valid defaults")
    }
}

fn gaussian_1d(size: usize, sigma: f64) -> Vec<f64> {
    let centre = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - centre;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Valid-mode separable filtering of a `w x h` field.
fn filter_valid(field: &[f64], w: usize, h: usize, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let (ow, oh) = (w - n + 1, h - n + 1);
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &field[y * w..(y + 1) * w];
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, &gk) in g.iter().enumerate() {
                acc += gk * row[x + k];
            }
            horiz[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for (k, &gk) in g.iter().enumerate() {
            let src = &horiz[(y + k) * ow..(y + k + 1) * ow];
            for (o, &s) in out[y * ow..(y + 1) * ow].iter_mut().zip(src) {
                *o += gk * s;
            }
        }
    }
    out
}

/// Local SSIM from window statistics.
#[inline]
pub fn local_ssim(mu_x: f64, mu_y: f64, var_x: f64, var_y: f64, cov: f64, cfg: &SsimConfig) -> f64 {
    if cfg.collapses() {
        ((2.0 * mu_x * mu_y + cfg.c1) * (2.0 * cov + cfg.c2))
            / ((mu_x * mu_x + mu_y * mu_y + cfg.c1) * (var_x + var_y + cfg.c2))
    } else {
        let (sx, sy) = (var_x.max(0.0).sqrt(), var_y.max(0.0).sqrt());
        let l = (2.0 * mu_x * mu_y + cfg.c1) / (mu_x * mu_x + mu_y * mu_y + cfg.c1);
        let c = (2.0 * sx * sy + cfg.c2) / (var_x + var_y + cfg.c2);
        let s = (cov + cfg.c3) / (sx * sy + cfg.c3);
        l.powf(cfg.alpha) * c.powf(cfg.beta) * s.powf(cfg.gamma)
    }
}

/// Per-window SSIM values, row-major over the `(w - n + 1) x (h - n + 1)` valid grid.
pub fn ssim_map(reference: &Image, test: &Image, cfg: &SsimConfig) -> Result<Vec<f64>> {
    reference.ensure_same_dimensions(test)?;
    cfg.validate()?;
    let (w, h, n) = (reference.width(), reference.height(), cfg.window_size());
    if w < n || h < n {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            window: n,
        });
    }
    let (x, y) = (reference.samples(), test.samples());
    let g = cfg.window();
    let field = |f: &dyn Fn(usize) -> f64| filter_valid(&(0..w * h).map(f).collect::<Vec<_>>(), w, h, g);
    let mu_x = field(&|i| x[i]);
    let mu_y = field(&|i| y[i]);
    let e_xx = field(&|i| x[i] * x[i]);
    let e_yy = field(&|i| y[i] * y[i]);
    let e_xy = field(&|i| x[i] * y[i]);
    Ok((0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            local_ssim(mx, my, e_xx[i] - mx * mx, e_yy[i] - my * my, e_xy[i] - mx * my, cfg)
        })
        .collect())
}

/// Mean SSIM over all full windows.
pub fn ssim(reference: &Image, test: &Image, cfg: &SsimConfig) -> Result<f64> {
    let map = ssim_map(reference, test, cfg)?;
    Ok(map.iter().sum::<f64>() / map.len() as f64)
}
