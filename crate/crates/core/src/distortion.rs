//! Pixelwise distortion change caused by a deblocking operation.
//!
//! With `d(x, y) = (x - y)²`, a pixel is in the distortion-decrease region
//! when deblocking moved it closer to the reference and in the
//! distortion-increase region when it moved away. Ties belong to neither.
//! Both means are normalized by the total pixel count, so
//! `mdc = mse(ref, decoded) - mse(ref, deblocked)`.

use serde::Serialize;

use crate::error::Result;
use crate::image::Image;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionChangeReport {
    #[serde(skip)]
    pub ddr_mask: Vec<bool>,
    #[serde(skip)]
    pub dir_mask: Vec<bool>,
    /// Mean distortion decrease.
    pub mdd: f64,
    /// Mean distortion increase.
    pub mdi: f64,
    /// Mean distortion change, `mdd - mdi`.
    pub mdc: f64,
    pub n: usize,
}

impl DistortionChangeReport {
    /// Deblocking is considered likely successful when the mean change is positive.
    pub fn likely_successful(&self) -> bool {
        self.mdc > 0.0
    }

    pub fn ddr_count(&self) -> usize {
        self.ddr_mask.iter().filter(|&&m| m).count()
    }

    pub fn dir_count(&self) -> usize {
        self.dir_mask.iter().filter(|&&m| m).count()
    }
}

pub fn analyze(reference: &Image, decoded: &Image, deblocked: &Image) -> Result<DistortionChangeReport> {
    reference.ensure_same_dimensions(decoded)?;
    reference.ensure_same_dimensions(deblocked)?;
    let n = reference.samples().len();
    let mut ddr_mask = vec![false; n];
    let mut dir_mask = vec![false; n];
    let (mut decrease, mut increase) = (0.0, 0.0);
    let triples = reference
        .samples()
        .iter()
        .zip(decoded.samples())
        .zip(deblocked.samples());
    for (i, ((&x, &y), &z)) in triples.enumerate() {
        let before = (x - y) * (x - y);
        let after = (x - z) * (x - z);
        if after < before {
            ddr_mask[i] = true;
            decrease += before - after;
        } else if before < after {
            dir_mask[i] = true;
            increase += after - before;
        }
    }
    let mdd = decrease / n as f64;
    let mdi = increase / n as f64;
    Ok(DistortionChangeReport {
        ddr_mask,
        dir_mask,
        mdd,
        mdi,
        mdc: mdd - mdi,
        n,
    })
}
