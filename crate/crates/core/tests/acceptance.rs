//! Acceptance gate. Runs every check, prints one PASS/FAIL line each, and
//! exits non-zero if any check fails.

use std::path::Path;
use std::time::{Duration, Instant};

use blockiq::codec::{encode, encode_decode, transform_blocks, CodecConfig, Dct2d};
use blockiq::deblock::{lowpass, pocs, LowPassConfig, Method, PocsConfig};
use blockiq::distortion::analyze;
use blockiq::harness::{run_sweep, synthetic_corpus, write_outputs, SweepInput, SweepRow, SweepSpec};
use blockiq::metrics::{
    self, bef, boundary_differences, psnr_b, ssim, BefConfig, DiagonalCounts, PairMode, SsimConfig,
};
use blockiq::{build_pair_sets, pgm, BlockGeometry, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |_, _| rng.gen_range(0..=255) as f64).unwrap()
}

fn smooth_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    let (a, b, c) = (
        rng.gen_range(-6.0..6.0),
        rng.gen_range(-6.0..6.0),
        rng.gen_range(60.0..190.0),
    );
    let mut img = Image::from_fn(w, h, |x, y| {
        c + a * x as f64 + b * y as f64 + 20.0 * ((x + 2 * y) as f64 / 5.0).sin()
    })
    .unwrap();
    for v in img.samples_mut() {
        *v += rng.gen_range(-10.0..10.0);
    }
    img.quantized()
}

// ---------------------------------------------------------------------------
// 1. the 8x8 / B=4 worked example

fn worked_example() -> Outcome {
    let start = Instant::now();
    let g = BlockGeometry::new(8, 8, 4).unwrap();
    let s = build_pair_sets(&g);
    let elapsed = start.elapsed();

    let counts = (s.n_hb(), s.n_hbc(), s.n_vb(), s.n_vbc());
    let label = |a, b| (g.column_major_label(a), g.column_major_label(b));
    let h_b: Vec<_> = (25..=32).map(|k| label(k, k + 8)).collect();
    let v_b: Vec<_> = (0..8).map(|k| label(8 * k + 4, 8 * k + 5)).collect();
    let sets_match = sorted(s.h_b.clone()) == sorted(h_b) && sorted(s.v_b.clone()) == sorted(v_b);
    let closed_form = (g.n_hb(), g.n_hbc(), g.n_vb(), g.n_vbc()) == counts;
    outcome(
        counts == (8, 48, 8, 48) && sets_match && closed_form && elapsed < Duration::from_millis(1),
        format!(
            "counts {counts:?}, boundary sets match figure labels: {sets_match}, {:.3} ms",
            ms(elapsed)
        ),
    )
}

fn sorted(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.sort_unstable();
    v
}

// ---------------------------------------------------------------------------
// 2. brute-force oracle for the blockiness metrics

#[derive(Default)]
struct Acc {
    sum: f64,
    n: usize,
}

impl Acc {
    fn add(&mut self, d: f64) {
        self.sum += d * d;
        self.n += 1;
    }
}

fn mean(parts: &[&Acc]) -> f64 {
    let n: usize = parts.iter().map(|a| a.n).sum();
    if n == 0 {
        0.0
    } else {
        parts.iter().map(|a| a.sum).sum::<f64>() / n as f64
    }
}

/// (d_b, [d_bc hv, diagonal, combined]) by visiting every neighbour offset of
/// every pixel and comparing block coordinates.
fn oracle_differences(img: &Image, b: usize) -> (f64, [f64; 3]) {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let (mut hb, mut hbc, mut vb, mut vbc, mut r, mut l) = (
        Acc::default(),
        Acc::default(),
        Acc::default(),
        Acc::default(),
        Acc::default(),
        Acc::default(),
    );
    let block = |x: isize, y: isize| (x / b as isize, y / b as isize);
    let px = |x: isize, y: isize| img.get(x as usize, y as usize);
    for y in 0..h {
        for x in 0..w {
            for (dx, dy) in [(1isize, 0isize), (0, 1), (1, 1), (-1, 1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || nx >= w || ny >= h {
                    continue;
                }
                let same = block(x, y) == block(nx, ny);
                let d = px(x, y) - px(nx, ny);
                match (dx, dy, same) {
                    (1, 0, false) => hb.add(d),
                    (1, 0, true) => hbc.add(d),
                    (0, 1, false) => vb.add(d),
                    (0, 1, true) => vbc.add(d),
                    (1, 1, true) => r.add(d),
                    (-1, 1, true) => l.add(d),
                    _ => {}
                }
            }
        }
    }
    let d_b = mean(&[&hb, &vb]);
    let hv = mean(&[&hbc, &vbc]);
    let diagonal = mean(&[&r, &l]);
    let n_combined = 2 * (hbc.n + vbc.n);
    let combined = if n_combined == 0 {
        0.0
    } else {
        (hbc.sum + vbc.sum + r.sum + l.sum) / n_combined as f64
    };
    (d_b, [hv, diagonal, combined])
}

fn oracle_mse(a: &Image, b: &Image) -> f64 {
    let mut sum = 0.0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            sum += (a.get(x, y) - b.get(x, y)).powi(2);
        }
    }
    sum / (a.width() * a.height()) as f64
}

fn to_db(mse: f64) -> f64 {
    10.0 * (255.0f64 * 255.0 / mse).log10()
}

fn close_db(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let b = [2usize, 4, 8][rng.gen_range(0..3)];
        let w = b * rng.gen_range(1..=32 / b);
        let h = b * rng.gen_range(1..=32 / b);
        let reference = if case % 2 == 0 {
            random_image(&mut rng, w, h)
        } else {
            smooth_image(&mut rng, w, h)
        };
        let test = if case % 3 == 0 {
            random_image(&mut rng, w, h)
        } else {
            encode_decode(&reference, CodecConfig::new(b, rng.gen_range(5.0..120.0)).unwrap()).unwrap()
        };
        let geom = BlockGeometry::new(w, h, b).unwrap();
        let (d_b, d_bc) = oracle_differences(&test, b);
        let mse = oracle_mse(&reference, &test);
        worst = worst.max((metrics::mse(&reference, &test).unwrap() - mse).abs());
        worst = worst.max(close_db(metrics::psnr(&reference, &test).unwrap(), to_db(mse)));
        for (k, mode) in PairMode::ALL.into_iter().enumerate() {
            let got = boundary_differences(&test, &geom, mode, DiagonalCounts::Enumerated).unwrap();
            worst = worst.max((got.d_b - d_b).abs()).max((got.d_bc - d_bc[k]).abs());
            let eta = if d_b > d_bc[k] {
                (b as f64).log2() / (w.min(h) as f64).log2()
            } else {
                0.0
            };
            let expected_bef = eta * (d_b - d_bc[k]);
            let cfg = BefConfig::single(b, mode).unwrap();
            worst = worst.max((bef(&test, &cfg).unwrap() - expected_bef).abs());
            worst = worst.max(close_db(
                psnr_b(&reference, &test, &cfg).unwrap(),
                to_db(mse + expected_bef),
            ));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("50 images, worst deviation {worst:.2e}, {:.1} ms", ms(elapsed)),
    )
}

// ---------------------------------------------------------------------------
// 3. mean distortion change equals the MSE drop

fn distortion_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let (w, h) = (8 * rng.gen_range(2..6), 8 * rng.gen_range(2..6));
        let reference = smooth_image(&mut rng, w, h);
        let encoded = encode(&reference, CodecConfig::with_delta(rng.gen_range(10.0..100.0)).unwrap()).unwrap();
        let decoded = encoded.decode();
        let deblocked = match case % 4 {
            0 => lowpass(&decoded, &LowPassConfig::uniform(3).unwrap()),
            1 => lowpass(&decoded, &LowPassConfig::uniform(7).unwrap()),
            2 => pocs(&decoded, &PocsConfig::default(), &encoded).unwrap(),
            _ => {
                let mut d = decoded.clone();
                for v in d.samples_mut() {
                    *v = (*v + rng.gen_range(-6.0..6.0)).clamp(0.0, 255.0);
                }
                d
            }
        };
        let report = analyze(&reference, &decoded, &deblocked).unwrap();
        let expected = oracle_mse(&reference, &decoded) - oracle_mse(&reference, &deblocked);
        worst = worst.max((report.mdc - expected).abs());
    }
    outcome(worst <= 1e-9, format!("20 triples, worst deviation {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 4. transform round trip and energy preservation

fn dct_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0004);
    let dct = Dct2d::new(8);
    let (mut recon, mut energy) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let block: Vec<f64> = (0..64).map(|_| rng.gen_range(-255.0..255.0)).collect();
        let coeffs = dct.forward(&block);
        let back = dct.inverse(&coeffs);
        for (a, b) in block.iter().zip(&back) {
            recon = recon.max((a - b).abs());
        }
        let e_px: f64 = block.iter().map(|v| v * v).sum();
        let e_c: f64 = coeffs.coefficients().iter().map(|v| v * v).sum();
        energy = energy.max((e_px - e_c).abs() / e_px);
    }
    outcome(
        recon < 1e-9 && energy <= 1e-6,
        format!("100 blocks, reconstruction {recon:.2e}, relative energy {energy:.2e}"),
    )
}

// ---------------------------------------------------------------------------
// 5. monotone degradation with the quantization step

fn corpus_spec(inputs: Vec<SweepInput>) -> SweepSpec {
    SweepSpec::new(inputs)
}

fn corpus_inputs() -> Vec<SweepInput> {
    synthetic_corpus(256)
        .into_iter()
        .map(|(name, img)| SweepInput::image(name, img))
        .collect()
}

fn rows_for<'a>(rows: &'a [SweepRow], image: &str, method: Method) -> Vec<&'a SweepRow> {
    rows.iter().filter(|r| r.image == image && r.method == method).collect()
}

fn image_names(rows: &[SweepRow]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !names.contains(&r.image) {
            names.push(r.image.clone());
        }
    }
    names
}

fn monotonicity(rows: &[SweepRow], elapsed: Duration) -> Outcome {
    let names = image_names(rows);
    let mut good = Vec::new();
    for name in &names {
        let series = rows_for(rows, name, Method::None);
        let ok = series.windows(2).all(|p| {
            p[1].psnr < p[0].psnr && p[1].ssim < p[0].ssim && PairMode::ALL.iter().all(|&m| p[1].bef(m) >= p[0].bef(m))
        });
        if ok {
            good.push(name.as_str());
        }
    }
    outcome(
        good.len() * 5 >= names.len() * 4 && elapsed < Duration::from_secs(120),
        format!(
            "{}/{} images monotone {:?}, sweep {:.1} s",
            good.len(),
            names.len(),
            good,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. gate, ordering and POCS constraint sets

fn gate_and_ordering(rows: &[SweepRow]) -> Outcome {
    let mut bad_rows = 0;
    for r in rows {
        for m in PairMode::ALL {
            if !(r.bef(m) >= 0.0 && r.psnr_b(m) <= r.psnr) {
                bad_rows += 1;
            }
        }
    }
    let mut worst = 0.0f64;
    for (_, img) in synthetic_corpus(256) {
        for delta in [10.0, 20.0, 30.0, 40.0, 50.0, 100.0] {
            let encoded = encode(&img, CodecConfig::with_delta(delta).unwrap()).unwrap();
            let out = pocs(&encoded.decode(), &PocsConfig::default(), &encoded).unwrap();
            let coeffs = transform_blocks(&out, 8).unwrap();
            for (c, q) in coeffs.iter().zip(encoded.blocks()) {
                for (&c, &q) in c.coefficients().iter().zip(q.coefficients()) {
                    worst = worst.max((c - q).abs() - delta / 2.0);
                }
            }
            let (lo, hi) = out.min_max();
            if lo < 0.0 || hi > 255.0 {
                bad_rows += 1;
            }
        }
    }
    outcome(
        bad_rows == 0 && worst <= 1e-6,
        format!(
            "{} rows, {bad_rows} violations, worst POCS constraint excess {worst:.2e}",
            rows.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. SSIM anchors and windowed oracle

fn oracle_ssim(x: &Image, y: &Image, size: usize, sigma: f64) -> f64 {
    let c = (size / 2) as f64;
    let mut weights = vec![0.0; size * size];
    for j in 0..size {
        for i in 0..size {
            weights[j * size + i] = (-((i as f64 - c).powi(2) + (j as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = weights.iter().sum();
    let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
    let c3 = c2 / 2.0;
    let mut sum = 0.0;
    let mut count = 0;
    for oy in 0..=x.height() - size {
        for ox in 0..=x.width() - size {
            let (mut mx, mut my) = (0.0, 0.0);
            for j in 0..size {
                for i in 0..size {
                    let w = weights[j * size + i] / total;
                    mx += w * x.get(ox + i, oy + j);
                    my += w * y.get(ox + i, oy + j);
                }
            }
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for j in 0..size {
                for i in 0..size {
                    let w = weights[j * size + i] / total;
                    let (dx, dy) = (x.get(ox + i, oy + j) - mx, y.get(ox + i, oy + j) - my);
                    vx += w * dx * dx;
                    vy += w * dy * dy;
                    cov += w * dx * dy;
                }
            }
            let (sx, sy) = (vx.sqrt(), vy.sqrt());
            let l = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            let contrast = (2.0 * sx * sy + c2) / (vx + vy + c2);
            let structure = (cov + c3) / (sx * sy + c3);
            sum += l * contrast * structure;
            count += 1;
        }
    }
    sum / count as f64
}

fn ssim_anchors() -> Outcome {
    let cfg = SsimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0007);
    let (mut identity, mut symmetry, mut oracle) = (true, 0.0f64, 0.0f64);
    for case in 0..10 {
        let x = if case % 2 == 0 {
            smooth_image(&mut rng, 32, 32)
        } else {
            random_image(&mut rng, 32, 32)
        };
        let y = match case % 3 {
            0 => random_image(&mut rng, 32, 32),
            _ => encode_decode(&x, CodecConfig::with_delta(rng.gen_range(10.0..100.0)).unwrap()).unwrap(),
        };
        identity &= ssim(&x, &x, &cfg).unwrap() == 1.0;
        let s_xy = ssim(&x, &y, &cfg).unwrap();
        symmetry = symmetry.max((s_xy - ssim(&y, &x, &cfg).unwrap()).abs());
        oracle = oracle.max((s_xy - oracle_ssim(&x, &y, 11, 1.5)).abs());
    }
    outcome(
        identity && symmetry <= 1e-12 && oracle <= 1e-9,
        format!("self-similarity exact: {identity}, asymmetry {symmetry:.2e}, oracle deviation {oracle:.2e}"),
    )
}

// ---------------------------------------------------------------------------
// 8. POCS beats the unfiltered decode at coarse quantization

fn pocs_direction(rows: &[SweepRow]) -> Outcome {
    let names = image_names(rows);
    let at = |name: &str, method| {
        rows.iter()
            .find(|r| r.image == name && r.method == method && r.delta == 50.0)
    };
    let mut good = Vec::new();
    let mut detail = Vec::new();
    for name in &names {
        let (Some(none), Some(p)) = (at(name, Method::None), at(name, Method::Pocs)) else {
            continue;
        };
        let better = p.psnr_b_hv > none.psnr_b_hv && p.psnr_b_diagonal > none.psnr_b_diagonal;
        if better {
            good.push(name.as_str());
        }
        detail.push(format!(
            "{name} hv {:.2}->{:.2} diag {:.2}->{:.2}",
            none.psnr_b_hv, p.psnr_b_hv, none.psnr_b_diagonal, p.psnr_b_diagonal
        ));
    }
    outcome(
        good.len() * 5 >= names.len() * 4,
        format!("{}/{} images improved; {}", good.len(), names.len(), detail.join(", ")),
    )
}

// ---------------------------------------------------------------------------
// 9. byte-identical outputs from repeated sweeps

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism(in_memory: &[SweepRow]) -> Outcome {
    let corpus_dir = tempfile::tempdir().unwrap();
    let mut inputs = Vec::new();
    for (name, img) in synthetic_corpus(256) {
        let path = corpus_dir.path().join(format!("{name}.pgm"));
        std::fs::write(&path, pgm::save_pgm(&img)).unwrap();
        inputs.push(SweepInput::path(path));
    }
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_sweep(&corpus_spec(inputs.clone())).unwrap();
        write_outputs(dir.path(), &outcome.rows).unwrap();
        outputs.push(read_dir_sorted(dir.path()));
    }
    let reference_dir = tempfile::tempdir().unwrap();
    write_outputs(reference_dir.path(), in_memory).unwrap();
    let from_memory = read_dir_sorted(reference_dir.path());
    let identical = outputs[0] == outputs[1];
    let matches_memory = outputs[0] == from_memory;
    outcome(
        identical && matches_memory && !outputs[0].is_empty(),
        format!(
            "{} files identical across runs: {identical}, file and in-memory inputs agree: {matches_memory}",
            outputs[0].len()
        ),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("worked 8x8 example, B=4", worked_example()),
        ("blockiness metrics vs brute-force oracle", oracle_equivalence()),
        ("mean distortion change equals MSE drop", distortion_identity()),
        ("DCT round trip and energy", dct_round_trip()),
    ];

    let start = Instant::now();
    let sweep = run_sweep(&corpus_spec(corpus_inputs())).expect("corpus sweep");
    let sweep_time = start.elapsed();
    assert!(sweep.skipped.is_empty());
    let rows = sweep.rows;

    results.push((
        "quality falls monotonically with the step",
        monotonicity(&rows, sweep_time),
    ));
    results.push(("BEF gate, PSNR-B ordering, POCS constraints", gate_and_ordering(&rows)));
    results.push(("SSIM anchors and oracle", ssim_anchors()));
    results.push(("POCS raises PSNR-B at step 50", pocs_direction(&rows)));
    results.push(("sweep output determinism", determinism(&rows)));

    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "[{}] {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
