//! Blocking-artifact toolkit: a block-DCT coding simulator, deblocking
//! filters, and full-reference quality metrics that account for
//! blockiness (PSNR-B with horizontal/vertical or diagonal neighbour pairs).
//!
//! ```
//! use blockiq::{codec, metrics, Image};
//!
//! let reference = Image::from_fn(64, 64, |x, y| (x * 3 + y * 2) as f64).unwrap();
//! let decoded = codec::encode_decode(&reference, codec::CodecConfig::with_delta(40.0).unwrap()).unwrap();
//! let cfg = metrics::BefConfig::single(8, metrics::PairMode::Diagonal).unwrap();
//! let psnr_b = metrics::psnr_b(&reference, &decoded, &cfg).unwrap();
//! assert!(psnr_b <= metrics::psnr(&reference, &decoded).unwrap());
//! ```

pub mod codec;
pub mod deblock;
pub mod distortion;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod image;
pub mod metrics;
pub mod pgm;

pub use error::{Error, Result};
pub use geometry::{build_pair_sets, BlockGeometry, PixelPairSets};
pub use image::Image;
