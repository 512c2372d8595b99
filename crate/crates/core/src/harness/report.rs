//! CSV and SVG emission for sweep rows. Both outputs are byte-deterministic
//! functions of the rows.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::deblock::Method;
use crate::error::{Error, Result};
use crate::metrics::format_real;

use super::sweep::SweepRow;

/// RFC-4180 CSV, LF line endings, reals at six decimals (`inf` for infinite PSNR).
pub fn emit_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(SweepRow::COLUMNS).expect("in-memory write");
    for row in rows {
        let mut record = vec![row.image.clone(), format_real(row.delta), row.method.to_string()];
        record.extend(row.numeric_values().iter().map(|&v| format_real(v)));
        w.write_record(&record).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Metrics that get one plot per image.
pub const PLOTTED_METRICS: [(&str, &str); 5] = [
    ("psnr", "PSNR (dB)"),
    ("ssim", "SSIM"),
    ("psnr_b_hv", "PSNR-B (dB)"),
    ("psnr_b_diagonal", "Modified PSNR-B, diagonal (dB)"),
    ("psnr_b_combined", "Modified PSNR-B, combined (dB)"),
];

fn metric_value(row: &SweepRow, metric: &str) -> f64 {
    match metric {
        "psnr" => row.psnr,
        "ssim" => row.ssim,
        "psnr_b_hv" => row.psnr_b_hv,
        "psnr_b_diagonal" => row.psnr_b_diagonal,
        "psnr_b_combined" => row.psnr_b_combined,
        other => unreachable!("unknown metric {other}"),
    }
}

const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn method_colour(m: Method) -> &'static str {
    COLOURS[Method::ALL.iter().position(|&x| x == m).unwrap_or(0)]
}

/// Keeps file names portable.
pub fn sanitize_file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// "Nice" tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step - 1e-9).ceil() as i64;
    let end = (hi / step + 1e-9).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (0..6)
        .find(|&d| {
            let scaled = step * 10f64.powi(d);
            (scaled - scaled.round()).abs() < 1e-6
        })
        .unwrap_or(6) as usize;
    format!("{v:.decimals$}")
}

/// Δ-vs-metric line chart for one image, one line per method.
pub fn render_plot(image: &str, metric: &str, label: &str, rows: &[&SweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 150.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 55.0;

    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let finite: Vec<f64> = rows
        .iter()
        .map(|r| metric_value(r, metric))
        .filter(|v| v.is_finite())
        .collect();
    let (mut y_lo, mut y_hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if finite.is_empty() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    let pad = ((y_hi - y_lo) * 0.08).max(1e-3);
    y_lo -= pad;
    y_hi += pad;
    let (x_lo, x_hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
        (a.min(r.delta), b.max(r.delta))
    });
    let (x_lo, x_hi) = if x_hi > x_lo {
        (x_lo, x_hi)
    } else {
        (x_lo - 1.0, x_hi + 1.0)
    };

    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{} : {}</text>"#,
        LEFT + plot_w / 2.0,
        escape_xml(image),
        escape_xml(label)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333"/>"##
    );

    let x_ticks = ticks(x_lo, x_hi, 6);
    let x_step = x_ticks.get(1).zip(x_ticks.first()).map_or(1.0, |(b, a)| b - a);
    for t in &x_ticks {
        let x = px(*t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 19.0,
            tick_label(*t, x_step)
        );
    }
    let y_ticks = ticks(y_lo, y_hi, 6);
    let y_step = y_ticks.get(1).zip(y_ticks.first()).map_or(1.0, |(b, a)| b - a);
    for t in &y_ticks {
        let y = py(*t);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            tick_label(*t, y_step)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Quantization step Δ</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        LEFT + plot_w / 2.0,
        H - 12.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape_xml(label)
    );

    for (i, &m) in methods.iter().enumerate() {
        let colour = method_colour(m);
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.method == m)
            .map(|r| (r.delta, metric_value(r, metric)))
            .filter(|(_, v)| v.is_finite())
            .map(|(d, v)| (px(d), py(v)))
            .collect();
        let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for (x, y) in &points {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{colour}"/>"#);
        }
        let ly = TOP + 14.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            m
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One SVG per (image, metric), named `<image>_<metric>.svg`, in row order.
pub fn emit_plots(rows: &[SweepRow]) -> Result<Vec<(String, String)>> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to plot".into()));
    }
    let mut images: Vec<&str> = Vec::new();
    for r in rows {
        if !images.contains(&r.image.as_str()) {
            images.push(&r.image);
        }
    }
    let mut out = Vec::new();
    for image in images {
        let subset: Vec<&SweepRow> = rows.iter().filter(|r| r.image == image).collect();
        for (metric, label) in PLOTTED_METRICS {
            out.push((
                format!("{}_{metric}.svg", sanitize_file_stem(image)),
                render_plot(image, metric, label, &subset),
            ));
        }
    }
    Ok(out)
}

/// Name of the CSV written by [`write_outputs`].
pub const CSV_FILE: &str = "results.csv";

/// Writes `results.csv` and every plot into `dir` (created if missing) and
/// returns the written paths.
pub fn write_outputs(dir: &Path, rows: &[SweepRow]) -> std::io::Result<Vec<PathBuf>> {
    let plots = emit_plots(rows).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(plots.len() + 1);
    let csv_path = dir.join(CSV_FILE);
    std::fs::write(&csv_path, emit_csv(rows))?;
    written.push(csv_path);
    for (name, svg) in plots {
        let path = dir.join(name);
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(image: &str, delta: f64, method: Method, psnr: f64) -> SweepRow {
        SweepRow {
            image: image.into(),
            delta,
            method,
            mse: 1.0,
            psnr,
            ssim: 0.9,
            psnr_b_hv: psnr - 1.0,
            psnr_b_diagonal: psnr - 0.5,
            psnr_b_combined: psnr - 0.7,
            bef_hv: 0.25,
            bef_diagonal: 0.125,
            bef_combined: 0.0,
            d_b: 3.0,
            d_bc_hv: 2.0,
            d_bc_diagonal: 2.5,
            d_bc_combined: 2.25,
            mdd: 0.0,
            mdi: 0.0,
            mdc: 0.0,
        }
    }

    #[test]
    fn csv_header_and_one_line() {
        let csv = String::from_utf8(emit_csv(&[row("a,b", 10.0, Method::None, 30.0)])).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], SweepRow::COLUMNS.join(","));
        assert!(lines[1].starts_with("\"a,b\",10.000000,none,1.000000,30.000000,0.900000,29.000000"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn csv_writes_infinity() {
        let csv = String::from_utf8(emit_csv(&[row("x", 10.0, Method::Pocs, f64::INFINITY)])).unwrap();
        assert!(csv.lines().nth(1).unwrap().contains(",inf,"));
    }

    #[test]
    fn plots_per_image_and_metric() {
        let rows: Vec<SweepRow> = [10.0, 20.0, 50.0]
            .iter()
            .flat_map(|&d| {
                [Method::None, Method::Pocs]
                    .into_iter()
                    .flat_map(move |m| ["portrait", "a/b"].map(|i| row(i, d, m, 40.0 - d / 5.0)))
            })
            .collect();
        let plots = emit_plots(&rows).unwrap();
        assert_eq!(plots.len(), 2 * PLOTTED_METRICS.len());
        assert_eq!(plots[0].0, "portrait_psnr.svg");
        assert!(plots.iter().any(|(n, _)| n == "a_b_ssim.svg"));
        let svg = &plots[0].1;
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">pocs</text>") && svg.contains("Quantization step"));
        assert_eq!(emit_plots(&rows).unwrap(), plots);
    }

    #[test]
    fn empty_rows_cannot_be_plotted() {
        assert!(emit_plots(&[]).is_err());
    }

    #[test]
    fn tick_spacing() {
        assert_eq!(ticks(10.0, 100.0, 6), vec![20.0, 40.0, 60.0, 80.0, 100.0]);
        let fine = ticks(0.8, 1.0, 4);
        assert_eq!(fine.len(), 5);
        assert!((fine[0] - 0.8).abs() < 1e-12 && (fine[4] - 1.0).abs() < 1e-12);
        assert_eq!(tick_label(fine[1], 0.05), "0.85");
    }
}
