//! `key = value` sweep configuration files.
//!
//! ```text
//! # comments and blank lines are ignored
//! deltas = 10, 20, 30, 40, 50, 100
//! methods = none, lowpass3, lowpass7, pocs
//! block_size = 8
//! bef_block_sizes = 8
//! axial_counts = false
//! pocs_iterations = 5
//! pocs_kernel = 3
//! ssim_window = 11
//! ssim_sigma = 1.5
//! inputs = portrait.pgm, harbour.pgm
//! output = results
//! ```

use std::path::PathBuf;

use crate::deblock::{LowPassConfig, PocsConfig};
use crate::error::{Error, Result};
use crate::metrics::{BefConfig, DiagonalCounts, SsimConfig};

use super::sweep::{SweepInput, SweepSpec};

/// Parsed entries, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: Vec<(String, String)>,
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    /// Applies every entry on top of `spec` / `output`.
    pub fn apply(&self, spec: &mut SweepSpec, output: &mut Option<PathBuf>) -> Result<()> {
        let mut pocs_iterations = spec.pocs.iterations();
        let mut pocs_kernel = spec.pocs.smoothing().clone();
        let mut ssim_window = spec.ssim.window_size();
        let mut ssim_sigma = spec.ssim.sigma();
        for (key, value) in &self.entries {
            match key.as_str() {
                "deltas" => spec.deltas = list(value).map(|v| number(key, v)).collect::<Result<_>>()?,
                "methods" => spec.methods = list(value).map(str::parse).collect::<Result<_>>()?,
                "block_size" => spec.block_size = number(key, value)?,
                "bef_block_sizes" => {
                    let sizes = list(value).map(|v| number(key, v)).collect::<Result<_>>()?;
                    spec.bef = BefConfig::new(sizes, spec.bef.pair_mode)?.with_counts(spec.bef.counts);
                }
                "axial_counts" => {
                    let on: bool = number(key, value)?;
                    spec.bef.counts = if on {
                        DiagonalCounts::Axial
                    } else {
                        DiagonalCounts::Enumerated
                    };
                }
                "pocs_iterations" => pocs_iterations = number(key, value)?,
                "pocs_kernel" => pocs_kernel = LowPassConfig::uniform(number(key, value)?)?,
                "ssim_window" => ssim_window = number(key, value)?,
                "ssim_sigma" => ssim_sigma = number(key, value)?,
                "inputs" => spec.inputs = list(value).map(SweepInput::path).collect(),
                "output" => *output = Some(PathBuf::from(value)),
                other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
            }
        }
        spec.pocs = PocsConfig::new(pocs_iterations, pocs_kernel)?;
        if ssim_window != spec.ssim.window_size() || ssim_sigma != spec.ssim.sigma() {
            spec.ssim = SsimConfig::new(ssim_window, ssim_sigma)?;
        }
        Ok(())
    }
}
