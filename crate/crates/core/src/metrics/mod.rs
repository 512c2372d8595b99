//! Full-reference quality metrics.

pub mod bef;
pub mod ssim;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::image::{Image, PEAK};

pub use bef::{
    bef, bef_term, bef_terms, boundary_differences, eta_scale, mse_b, psnr_b, BefConfig, BefTerm, BoundaryDifferences,
    DiagonalCounts, PairMode,
};
pub use ssim::{ssim, ssim_map, SsimConfig};

/// Mean squared sample difference.
pub fn mse(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_dimensions(test)?;
    let sum: f64 = reference
        .samples()
        .iter()
        .zip(test.samples())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / reference.samples().len() as f64)
}

/// `10 log10(255² / mse)`; zero error maps to `+inf`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

pub fn psnr(reference: &Image, test: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(reference, test)?))
}

/// Serializes non-finite reals as the strings `"inf"`, `"-inf"`, `"nan"`,
/// since JSON has no literal for them.
pub fn serialize_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format_real(*v))
    }
}

/// Fixed 6-decimal rendering used by reports; non-finite values are spelled out.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.6}")
    }
}

/// Blockiness figures for one pair mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockinessReport {
    pub pair_mode: PairMode,
    pub bef_tot: f64,
    pub mse_b: f64,
    #[serde(serialize_with = "serialize_real")]
    pub psnr_b: f64,
    pub terms: Vec<BefTerm>,
}

/// Every metric for one (reference, test) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub mse: f64,
    #[serde(serialize_with = "serialize_real")]
    pub psnr: f64,
    pub ssim: f64,
    pub blockiness: Vec<BlockinessReport>,
}

impl MetricReport {
    pub fn mode(&self, mode: PairMode) -> Option<&BlockinessReport> {
        self.blockiness.iter().find(|b| b.pair_mode == mode)
    }
}

/// Computes MSE, PSNR, SSIM and the BEF / PSNR-B triple for each pair mode
/// in `modes`. `bef.pair_mode` is ignored in favour of `modes`.
pub fn score(
    reference: &Image,
    test: &Image,
    ssim_cfg: &SsimConfig,
    bef_cfg: &BefConfig,
    modes: &[PairMode],
) -> Result<MetricReport> {
    let mse = mse(reference, test)?;
    let ssim = ssim(reference, test, ssim_cfg)?;
    let blockiness = modes
        .iter()
        .map(|&mode| {
            let terms = bef_terms(test, &bef_cfg.with_mode(mode))?;
            let bef_tot: f64 = terms.iter().map(|t| t.bef).sum();
            Ok(BlockinessReport {
                pair_mode: mode,
                bef_tot,
                mse_b: mse + bef_tot,
                psnr_b: psnr_from_mse(mse + bef_tot),
                terms,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MetricReport {
        mse,
        psnr: psnr_from_mse(mse),
        ssim,
        blockiness,
    })
}
