//! Quantization-step sweep: code every input at every step, deblock with
//! every method, score everything.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{encode, CodecConfig};
use crate::deblock::{Method, PocsConfig};
use crate::distortion::analyze;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::metrics::{score, BefConfig, PairMode, SsimConfig};
use crate::pgm;

/// Default quantization steps.
pub const DEFAULT_DELTAS: [f64; 6] = [10.0, 20.0, 30.0, 40.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Path(PathBuf),
    Image(Image),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepInput {
    pub id: String,
    pub source: InputSource,
}

impl SweepInput {
    pub fn path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self {
            id,
            source: InputSource::Path(path),
        }
    }

    pub fn image(id: impl Into<String>, image: Image) -> Self {
        Self {
            id: id.into(),
            source: InputSource::Image(image),
        }
    }

    fn load(&self) -> std::result::Result<Image, String> {
        match &self.source {
            InputSource::Image(img) => Ok(img.clone()),
            InputSource::Path(p) => {
                let bytes = std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
                pgm::load_luma(&bytes).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub deltas: Vec<f64>,
    pub methods: Vec<Method>,
    pub block_size: usize,
    pub bef: BefConfig,
    pub ssim: SsimConfig,
    pub pocs: PocsConfig,
    pub inputs: Vec<SweepInput>,
}

impl SweepSpec {
    pub fn new(inputs: Vec<SweepInput>) -> Self {
        Self {
            deltas: DEFAULT_DELTAS.to_vec(),
            methods: Method::ALL.to_vec(),
            block_size: CodecConfig::DEFAULT_BLOCK_SIZE,
            bef: BefConfig::default(),
            ssim: SsimConfig::default(),
            pocs: PocsConfig::default(),
            inputs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::InvalidConfig("no quantization steps".into()));
        }
        if self
            .deltas
            .windows(2)
            .any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1])
        {
            return Err(Error::InvalidConfig(
                "quantization steps must be strictly increasing".into(),
            ));
        }
        for &d in &self.deltas {
            CodecConfig::new(self.block_size, d)?;
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no deblocking methods".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort_by_key(|m| m.name());
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidConfig("duplicate deblocking method".into()));
        }
        Ok(())
    }
}

/// Metrics for one (image, Δ, method) triple. Field names double as CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub image: String,
    pub delta: f64,
    pub method: Method,
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub psnr_b_hv: f64,
    pub psnr_b_diagonal: f64,
    pub psnr_b_combined: f64,
    pub bef_hv: f64,
    pub bef_diagonal: f64,
    pub bef_combined: f64,
    /// `D_B` at the first configured BEF block size.
    pub d_b: f64,
    pub d_bc_hv: f64,
    pub d_bc_diagonal: f64,
    pub d_bc_combined: f64,
    pub mdd: f64,
    pub mdi: f64,
    pub mdc: f64,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 19] = [
        "image",
        "delta",
        "method",
        "mse",
        "psnr",
        "ssim",
        "psnr_b_hv",
        "psnr_b_diagonal",
        "psnr_b_combined",
        "bef_hv",
        "bef_diagonal",
        "bef_combined",
        "d_b",
        "d_bc_hv",
        "d_bc_diagonal",
        "d_bc_combined",
        "mdd",
        "mdi",
        "mdc",
    ];

    pub fn psnr_b(&self, mode: PairMode) -> f64 {
        match mode {
            PairMode::Hv => self.psnr_b_hv,
            PairMode::Diagonal => self.psnr_b_diagonal,
            PairMode::Combined => self.psnr_b_combined,
        }
    }

    pub fn bef(&self, mode: PairMode) -> f64 {
        match mode {
            PairMode::Hv => self.bef_hv,
            PairMode::Diagonal => self.bef_diagonal,
            PairMode::Combined => self.bef_combined,
        }
    }

    /// Numeric columns, in [`SweepRow::COLUMNS`] order after `method`.
    pub fn numeric_values(&self) -> [f64; 16] {
        [
            self.mse,
            self.psnr,
            self.ssim,
            self.psnr_b_hv,
            self.psnr_b_diagonal,
            self.psnr_b_combined,
            self.bef_hv,
            self.bef_diagonal,
            self.bef_combined,
            self.d_b,
            self.d_bc_hv,
            self.d_bc_diagonal,
            self.d_bc_combined,
            self.mdd,
            self.mdi,
            self.mdc,
        ]
    }
}

/// An input that could not be processed.
#[derive(Debug, Clone, PartialEq)]
pub struct Skip {
    pub image: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<Skip>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Spec(#[from] Error),
    #[error("every input failed: {}", .0.iter().map(|s| format!("{}: {}", s.image, s.reason)).collect::<Vec<_>>().join("; "))]
    AllInputsFailed(Vec<Skip>),
}

fn rows_for_delta(id: &str, reference: &Image, delta: f64, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let encoded = encode(reference, CodecConfig::new(spec.block_size, delta)?)?;
    let decoded = encoded.decode();
    spec.methods
        .iter()
        .map(|&method| {
            let deblocked = method.apply(&decoded, &encoded, &spec.pocs)?;
            let report = score(reference, &deblocked, &spec.ssim, &spec.bef, &PairMode::ALL)?;
            let change = analyze(reference, &decoded, &deblocked)?;
            let mode = |m: PairMode| report.mode(m).expect("all modes scored");
            let first_term = |m: PairMode| mode(m).terms[0];
            Ok(SweepRow {
                image: id.to_string(),
                delta,
                method,
                mse: report.mse,
                psnr: report.psnr,
                ssim: report.ssim,
                psnr_b_hv: mode(PairMode::Hv).psnr_b,
                psnr_b_diagonal: mode(PairMode::Diagonal).psnr_b,
                psnr_b_combined: mode(PairMode::Combined).psnr_b,
                bef_hv: mode(PairMode::Hv).bef_tot,
                bef_diagonal: mode(PairMode::Diagonal).bef_tot,
                bef_combined: mode(PairMode::Combined).bef_tot,
                d_b: first_term(PairMode::Hv).d_b,
                d_bc_hv: first_term(PairMode::Hv).d_bc,
                d_bc_diagonal: first_term(PairMode::Diagonal).d_bc,
                d_bc_combined: first_term(PairMode::Combined).d_bc,
                mdd: change.mdd,
                mdi: change.mdi,
                mdc: change.mdc,
            })
        })
        .collect()
}

fn rows_for_image(input: &SweepInput, spec: &SweepSpec) -> std::result::Result<Vec<SweepRow>, String> {
    let reference = input.load()?;
    // fail fast on geometry before doing any work
    crate::codec::check_block_grid(&reference, spec.block_size).map_err(|e| e.to_string())?;
    spec.bef
        .geometries(reference.width(), reference.height())
        .map_err(|e| e.to_string())?;
    let per_delta: Vec<Result<Vec<SweepRow>>> = spec
        .deltas
        .par_iter()
        .map(|&d| rows_for_delta(&input.id, &reference, d, spec))
        .collect();
    let mut rows = Vec::new();
    for r in per_delta {
        rows.extend(r.map_err(|e| e.to_string())?);
    }
    Ok(rows)
}

/// Runs the sweep. Rows come out in input order, then ascending Δ, then
/// method order, regardless of how the work was scheduled.
pub fn run_sweep(spec: &SweepSpec) -> std::result::Result<SweepOutcome, SweepError> {
    spec.validate()?;
    let per_image: Vec<_> = spec.inputs.par_iter().map(|i| rows_for_image(i, spec)).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (input, result) in spec.inputs.iter().zip(per_image) {
        match result {
            Ok(r) => rows.extend(r),
            Err(reason) => skipped.push(Skip {
                image: input.id.clone(),
                reason,
            }),
        }
    }
    if rows.is_empty() && !skipped.is_empty() {
        return Err(SweepError::AllInputsFailed(skipped));
    }
    Ok(SweepOutcome { rows, skipped })
}
