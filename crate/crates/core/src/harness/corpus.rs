//! Deterministic synthetic test images.
//!
//! Every image is 8-bit representable (integers in `[0, 255]`) so that the
//! in-memory corpus and its PGM files are the same thing.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::Image;

pub const CORPUS_SIZE: usize = 256;

/// Names of the built-in corpus images, in generation order.
pub const CORPUS_NAMES: [&str; 5] = ["ramp", "zoneplate", "blobs", "texture", "shapes"];

fn gaussian_scene(rng: &mut ChaCha8Rng, size: usize, blobs: usize) -> Vec<f64> {
    let s = size as f64;
    let params: Vec<(f64, f64, f64, f64)> = (0..blobs)
        .map(|_| {
            (
                rng.gen_range(0.0..s),
                rng.gen_range(0.0..s),
                rng.gen_range(0.04 * s..0.18 * s),
                rng.gen_range(-90.0..110.0),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let v = params.iter().fold(96.0, |acc, &(cx, cy, r, a)| {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                acc + a * (-d2 / (2.0 * r * r)).exp()
            });
            out.push(v);
        }
    }
    out
}

fn finish(size: usize, samples: Vec<f64>) -> Image {
    Image::new(size, size, samples)
        .expect("square corpus image")
        .quantized()
}

/// Smooth diagonal gradient with a slow cross modulation.
pub fn ramp(size: usize) -> Image {
    let s = size as f64;
    finish(
        size,
        (0..size * size)
            .map(|i| {
                let (x, y) = ((i % size) as f64, (i / size) as f64);
                20.0 + 200.0 * (0.6 * x + 0.4 * y) / s + 12.0 * (2.0 * PI * y / s).sin()
            })
            .collect(),
    )
}

/// Circular zone plate whose local frequency grows towards the corners.
pub fn zoneplate(size: usize) -> Image {
    let s = size as f64;
    let k = PI / (4.0 * s);
    finish(
        size,
        (0..size * size)
            .map(|i| {
                let (x, y) = ((i % size) as f64 - s / 2.0, (i / size) as f64 - s / 2.0);
                128.0 + 100.0 * (k * (x * x + y * y)).cos()
            })
            .collect(),
    )
}

/// Sum of random isotropic Gaussian blobs on a mid-grey background.
pub fn blobs(size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    finish(size, gaussian_scene(&mut rng, size, 14))
}

/// Blob scene with fine-grained noise, a stand-in for natural texture.
pub fn texture(size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = gaussian_scene(&mut rng, size, 10);
    for s in &mut v {
        *s += rng.gen_range(-14.0..14.0);
    }
    finish(size, v)
}

/// Soft-edged rectangles and discs over a gradient, with mild noise.
pub fn shapes(size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = size as f64;
    let soft = |d: f64| 1.0 / (1.0 + (-d / 1.2).exp());
    let discs: Vec<(f64, f64, f64, f64)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(0.15 * s..0.85 * s),
                rng.gen_range(0.15 * s..0.85 * s),
                rng.gen_range(0.05 * s..0.16 * s),
                rng.gen_range(-80.0..90.0),
            )
        })
        .collect();
    let rects: Vec<(f64, f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let (x0, y0) = (rng.gen_range(0.0..0.7 * s), rng.gen_range(0.0..0.7 * s));
            (
                x0,
                y0,
                x0 + rng.gen_range(0.1 * s..0.3 * s),
                y0 + rng.gen_range(0.1 * s..0.3 * s),
                rng.gen_range(-70.0..70.0),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(size * size);
    for yi in 0..size {
        for xi in 0..size {
            let (x, y) = (xi as f64 + 0.5, yi as f64 + 0.5);
            let mut v = 70.0 + 90.0 * y / s;
            for &(x0, y0, x1, y1, a) in &rects {
                v += a * soft(x - x0) * soft(x1 - x) * soft(y - y0) * soft(y1 - y);
            }
            for &(cx, cy, r, a) in &discs {
                v += a * soft(r - ((x - cx).powi(2) + (y - cy).powi(2)).sqrt());
            }
            out.push(v + rng.gen_range(-4.0..4.0));
        }
    }
    finish(size, out)
}

/// The five-image synthetic corpus, `(name, image)` in a fixed order.
pub fn synthetic_corpus(size: usize) -> Vec<(String, Image)> {
    let images = [
        ramp(size),
        zoneplate(size),
        blobs(size, 0x5eed_0001),
        texture(size, 0x5eed_0002),
        shapes(size, 0x5eed_0003),
    ];
    CORPUS_NAMES.iter().map(|n| n.to_string()).zip(images).collect()
}
