//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Images cross the boundary as row-major 8-bit grey buffers. Each export is
//! a thin wrapper over a plain function that is also usable (and tested)
//! natively.

use blockiq::codec::{encode, CodecConfig};
use blockiq::deblock::{Method, PocsConfig};
use blockiq::harness::corpus;
use blockiq::metrics::{score, BefConfig, MetricReport, PairMode, SsimConfig};
use blockiq::Image;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn image(pixels: &[u8], width: usize, height: usize) -> Result<Image, String> {
    if pixels.len() != width * height {
        return Err(format!("expected {} pixels, got {}", width * height, pixels.len()));
    }
    Image::from_bytes(width, height, pixels).map_err(|e| e.to_string())
}

/// A synthetic corpus image by name (`ramp`, `zoneplate`, `blobs`, `texture`, `shapes`).
pub fn corpus_pixels(name: &str, size: usize) -> Result<Vec<u8>, String> {
    if size == 0 || !size.is_multiple_of(CodecConfig::DEFAULT_BLOCK_SIZE) {
        return Err(format!(
            "size must be a positive multiple of {}",
            CodecConfig::DEFAULT_BLOCK_SIZE
        ));
    }
    corpus::synthetic_corpus(size)
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, img)| img.to_bytes())
        .ok_or_else(|| format!("unknown corpus image {name:?}"))
}

/// Codes `original` at step `delta` and deblocks the decode with `method`;
/// `none` returns the plain decode.
pub fn code_and_deblock(
    original: &[u8],
    width: usize,
    height: usize,
    delta: f64,
    method: &str,
) -> Result<Vec<u8>, String> {
    let img = image(original, width, height)?;
    let method: Method = method.parse().map_err(|e: blockiq::Error| e.to_string())?;
    let encoded =
        encode(&img, CodecConfig::with_delta(delta).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let out = method
        .apply(&encoded.decode(), &encoded, &PocsConfig::default())
        .map_err(|e| e.to_string())?;
    Ok(out.to_bytes())
}

fn report(reference: &Image, test: &Image) -> Result<MetricReport, String> {
    score(
        reference,
        test,
        &SsimConfig::default(),
        &BefConfig::default(),
        &PairMode::ALL,
    )
    .map_err(|e| e.to_string())
}

/// Full metric report for one pair, as JSON.
pub fn score_json(reference: &[u8], test: &[u8], width: usize, height: usize) -> Result<String, String> {
    let r = report(&image(reference, width, height)?, &image(test, width, height)?)?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub delta: f64,
    pub method: Method,
    #[serde(serialize_with = "blockiq::metrics::serialize_real")]
    pub psnr: f64,
    pub ssim: f64,
    #[serde(serialize_with = "blockiq::metrics::serialize_real")]
    pub psnr_b_hv: f64,
    #[serde(serialize_with = "blockiq::metrics::serialize_real")]
    pub psnr_b_diagonal: f64,
}

/// PSNR, SSIM and PSNR-B against the step for each method, with stored
/// (8-bit) outputs, in step-then-method order.
pub fn curve(original: &[u8], width: usize, height: usize, deltas: &[f64]) -> Result<Vec<CurvePoint>, String> {
    let reference = image(original, width, height)?;
    let mut points = Vec::with_capacity(deltas.len() * Method::ALL.len());
    for &delta in deltas {
        for method in Method::ALL {
            let out = code_and_deblock(original, width, height, delta, method.name())?;
            let r = report(&reference, &image(&out, width, height)?)?;
            let psnr_b = |m| r.mode(m).map(|b| b.psnr_b).unwrap_or(f64::NAN);
            points.push(CurvePoint {
                delta,
                method,
                psnr: r.psnr,
                ssim: r.ssim,
                psnr_b_hv: psnr_b(PairMode::Hv),
                psnr_b_diagonal: psnr_b(PairMode::Diagonal),
            });
        }
    }
    Ok(points)
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = corpusImage)]
pub fn corpus_image(name: &str, size: usize) -> Result<Vec<u8>, JsError> {
    corpus_pixels(name, size).map_err(js)
}

#[wasm_bindgen(js_name = codeAndDeblock)]
pub fn code_and_deblock_js(
    original: &[u8],
    width: usize,
    height: usize,
    delta: f64,
    method: &str,
) -> Result<Vec<u8>, JsError> {
    code_and_deblock(original, width, height, delta, method).map_err(js)
}

#[wasm_bindgen(js_name = scoreImages)]
pub fn score_js(reference: &[u8], test: &[u8], width: usize, height: usize) -> Result<String, JsError> {
    score_json(reference, test, width, height).map_err(js)
}

#[wasm_bindgen(js_name = qualityCurve)]
pub fn curve_js(original: &[u8], width: usize, height: usize, deltas: &[f64]) -> Result<String, JsError> {
    let points = curve(original, width, height, deltas).map_err(js)?;
    serde_json::to_string(&points).map_err(|e| js(e.to_string()))
}
