//! Blocking effect factor and PSNR-B.
//!
//! `D_B` is the mean squared difference over neighbouring pairs that straddle
//! a block edge (horizontal and vertical pairs in every mode). `D_B^C` is the
//! mean over pairs that do not, and depends on the pair mode:
//!
//! * [`PairMode::Hv`]: horizontal + vertical non-boundary pairs (original PSNR-B),
//! * [`PairMode::Diagonal`]: same-block down-right + down-left diagonal pairs,
//! * [`PairMode::Combined`]: all four non-boundary sets over `2 (N_HBC + N_VBC)`.
//!
//! `BEF = η (D_B - D_B^C)` with `η = log2 B / log2 min(N_H, N_V)` when
//! `D_B > D_B^C` and `0` otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BlockGeometry;
use crate::image::Image;

use super::{mse, psnr_from_mse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    Hv,
    Diagonal,
    Combined,
}

impl PairMode {
    pub const ALL: [PairMode; 3] = [PairMode::Hv, PairMode::Diagonal, PairMode::Combined];

    pub fn name(self) -> &'static str {
        match self {
            PairMode::Hv => "hv",
            PairMode::Diagonal => "diagonal",
            PairMode::Combined => "combined",
        }
    }
}

impl fmt::Display for PairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pair mode {s:?}")))
    }
}

/// Which pair counts normalize the diagonal sums in [`PairMode::Diagonal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalCounts {
    /// True sizes of the same-block diagonal sets.
    #[default]
    Enumerated,
    /// `N_RBC = N_HBC`, `N_LBC = N_VBC`: the axial non-boundary counts
    /// reused as diagonal denominators.
    Axial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BefConfig {
    block_sizes: Vec<usize>,
    pub pair_mode: PairMode,
    pub counts: DiagonalCounts,
}

impl BefConfig {
    pub fn new(block_sizes: Vec<usize>, pair_mode: PairMode) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidConfig("at least one BEF block size is required".into()));
        }
        if let Some(b) = block_sizes.iter().find(|&&b| b < 2) {
            return Err(Error::InvalidConfig(format!("BEF block size {b} < 2")));
        }
        Ok(Self {
            block_sizes,
            pair_mode,
            counts: DiagonalCounts::Enumerated,
        })
    }

    pub fn single(block: usize, pair_mode: PairMode) -> Result<Self> {
        Self::new(vec![block], pair_mode)
    }

    pub fn with_counts(mut self, counts: DiagonalCounts) -> Self {
        self.counts = counts;
        self
    }

    pub fn with_mode(&self, pair_mode: PairMode) -> Self {
        Self {
            pair_mode,
            ..self.clone()
        }
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Geometries for every configured block size on a `width x height` image.
    pub fn geometries(&self, width: usize, height: usize) -> Result<Vec<BlockGeometry>> {
        self.block_sizes
            .iter()
            .map(|&b| BlockGeometry::new(width, height, b))
            .collect()
    }
}

/// `K = 1` with `B = 8`, matching the default transform size.
impl Default for BefConfig {
    fn default() -> Self {
        Self::single(8, PairMode::Hv).expect("valid default")
    }
}

/// Mean boundary / non-boundary squared differences for one block size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryDifferences {
    pub d_b: f64,
    pub d_bc: f64,
}

/// Raw squared-difference sums per pair class.
#[derive(Debug, Default, Clone, Copy)]
struct PairSums {
    h_b: f64,
    h_bc: f64,
    v_b: f64,
    v_bc: f64,
    r_bc: f64,
    l_bc: f64,
}

fn pair_sums(img: &Image, b: usize) -> PairSums {
    let (w, h) = (img.width(), img.height());
    let mut s = PairSums::default();
    for y in 0..h {
        let row = img.row(y);
        for x in 0..w - 1 {
            let d = row[x] - row[x + 1];
            if (x + 1) % b == 0 {
                s.h_b += d * d;
            } else {
                s.h_bc += d * d;
            }
        }
        if y + 1 == h {
            continue;
        }
        let next = img.row(y + 1);
        let row_inside = (y + 1) % b != 0;
        for x in 0..w {
            let d = row[x] - next[x];
            if row_inside {
                s.v_bc += d * d;
                if (x + 1) % b != 0 && x + 1 < w {
                    let d = row[x] - next[x + 1];
                    s.r_bc += d * d;
                }
                if x % b != 0 {
                    let d = row[x] - next[x - 1];
                    s.l_bc += d * d;
                }
            } else {
                s.v_b += d * d;
            }
        }
    }
    s
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// `D_B` and `D_B^C` of `test` for one geometry.
pub fn boundary_differences(
    test: &Image,
    geom: &BlockGeometry,
    mode: PairMode,
    counts: DiagonalCounts,
) -> Result<BoundaryDifferences> {
    if test.width() != geom.n_h() || test.height() != geom.n_v() {
        return Err(Error::InvalidGeometry(format!(
            "geometry {}x{} does not match image {}x{}",
            geom.n_h(),
            geom.n_v(),
            test.width(),
            test.height()
        )));
    }
    let s = pair_sums(test, geom.block());
    // no boundary pairs (one block covers the image): defined as zero
    let d_b = ratio(s.h_b + s.v_b, geom.n_hb() + geom.n_vb());
    let d_bc = match mode {
        PairMode::Hv => ratio(s.h_bc + s.v_bc, geom.n_hbc() + geom.n_vbc()),
        PairMode::Diagonal => {
            let (n_r, n_l) = match counts {
                DiagonalCounts::Enumerated => (geom.n_diagonal(), geom.n_diagonal()),
                DiagonalCounts::Axial => geom.axial_diagonal_counts(),
            };
            ratio(s.r_bc + s.l_bc, n_r + n_l)
        }
        PairMode::Combined => ratio(s.h_bc + s.v_bc + s.r_bc + s.l_bc, 2 * (geom.n_hbc() + geom.n_vbc())),
    };
    Ok(BoundaryDifferences { d_b, d_bc })
}

/// `log2 B / log2 min(N_H, N_V)`, before gating.
pub fn eta_scale(geom: &BlockGeometry) -> f64 {
    (geom.block() as f64).log2() / (geom.n_h().min(geom.n_v()) as f64).log2()
}

/// BEF contribution of one block size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BefTerm {
    pub block: usize,
    pub d_b: f64,
    pub d_bc: f64,
    pub eta: f64,
    pub bef: f64,
}

pub fn bef_term(test: &Image, geom: &BlockGeometry, mode: PairMode, counts: DiagonalCounts) -> Result<BefTerm> {
    let BoundaryDifferences { d_b, d_bc } = boundary_differences(test, geom, mode, counts)?;
    let eta = if d_b > d_bc { eta_scale(geom) } else { 0.0 };
    Ok(BefTerm {
        block: geom.block(),
        d_b,
        d_bc,
        eta,
        bef: if eta > 0.0 { eta * (d_b - d_bc) } else { 0.0 },
    })
}

/// Per-block-size terms of `BEF_Tot`, in configuration order.
pub fn bef_terms(test: &Image, cfg: &BefConfig) -> Result<Vec<BefTerm>> {
    cfg.geometries(test.width(), test.height())?
        .iter()
        .map(|g| bef_term(test, g, cfg.pair_mode, cfg.counts))
        .collect()
}

/// `BEF_Tot`: sum of the per-block-size factors. Uses only the test image.
pub fn bef(test: &Image, cfg: &BefConfig) -> Result<f64> {
    Ok(bef_terms(test, cfg)?.iter().map(|t| t.bef).sum())
}

/// `MSE + BEF_Tot(test)`.
pub fn mse_b(reference: &Image, test: &Image, cfg: &BefConfig) -> Result<f64> {
    Ok(mse(reference, test)? + bef(test, cfg)?)
}

/// PSNR on the blockiness-augmented error; `+inf` when that error is zero.
/// [`PairMode::Hv`] gives the original PSNR-B, the diagonal modes the
/// modified variant.
pub fn psnr_b(reference: &Image, test: &Image, cfg: &BefConfig) -> Result<f64> {
    Ok(psnr_from_mse(mse_b(reference, test, cfg)?))
}
