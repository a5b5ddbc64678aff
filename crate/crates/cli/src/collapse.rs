//! Sorted eigenvalues against normalized rank `a / N^2` for several `N`,
//! written as CSV and as a standalone SVG plot.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use qexpander_core::spectrum::SuperopSpectrum;
use qexpander_core::Error;

use crate::error::{CliError, Result};

pub const COLLAPSE_HEADER: &str = "N,a_over_N2,eig";

/// `(a / N^2, eigenvalue)` from most positive to most negative.
pub fn collapse_curve(s: &SuperopSpectrum) -> Vec<(f64, f64)> {
    let mut vals: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let total = vals.len() as f64;
    vals.into_iter().enumerate().map(|(i, v)| ((i + 1) as f64 / total, v)).collect()
}

/// Eigenvalues without the removed unit one, descending.
fn non_unit_sorted(s: &SuperopSpectrum) -> Vec<f64> {
    let mut vals: Vec<f64> =
        s.eigenvalues.iter().enumerate().filter(|&(i, _)| i != s.unit_index).map(|(_, z)| z.re).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Quantile function of a descending sample at `q in [0, 1]`, with point
/// `a` (1-based) at `(a - 1/2) / n` and linear interpolation in between.
fn quantile(vals: &[f64], q: f64) -> f64 {
    let n = vals.len();
    let pos = q * n as f64 - 0.5;
    if pos <= 0.0 {
        return vals[0];
    }
    if pos >= (n - 1) as f64 {
        return vals[n - 1];
    }
    let lo = pos.floor() as usize;
    let t = pos - lo as f64;
    vals[lo] * (1.0 - t) + vals[lo + 1] * t
}

/// Largest vertical gap between two collapse curves, taken at the
/// plotting positions of the smaller spectrum. The unit eigenvalue is left
/// out of both.
pub fn quantile_distance(a: &SuperopSpectrum, b: &SuperopSpectrum) -> f64 {
    let (small, large) = if a.eigenvalues.len() <= b.eigenvalues.len() { (a, b) } else { (b, a) };
    let xs = non_unit_sorted(small);
    let ys = non_unit_sorted(large);
    if xs.is_empty() || ys.is_empty() {
        return 0.0;
    }
    let k = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - quantile(&ys, (i as f64 + 0.5) / k)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseSummary {
    pub csv: PathBuf,
    pub svg: PathBuf,
    /// `(N_a, N_b, distance)` for each pair of consecutive dimensions.
    pub distances: Vec<(usize, usize, f64)>,
}

/// Writes `collapse.csv` and `collapse.svg` into `dir`. Needs Hermitian
/// spectra for at least two distinct `N`; one spectrum per `N` is used.
pub fn emit_collapse(spectra: &[SuperopSpectrum], dir: &Path) -> Result<CollapseSummary> {
    let mut chosen: Vec<&SuperopSpectrum> = Vec::new();
    for s in spectra {
        if !s.hermitian {
            return Err(Error::Precondition("collapse needs hermitian spectra".into()).into());
        }
        if !chosen.iter().any(|c| c.dim == s.dim) {
            chosen.push(s);
        }
    }
    if chosen.len() < 2 {
        return Err(Error::Precondition("collapse needs spectra for at least two values of N".into()).into());
    }
    chosen.sort_by_key(|s| s.dim);
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let csv = dir.join("collapse.csv");
    let mut text = String::new();
    writeln!(text, "{COLLAPSE_HEADER}").expect("string write");
    let curves: Vec<(usize, Vec<(f64, f64)>)> = chosen.iter().map(|s| (s.dim, collapse_curve(s))).collect();
    for (n, curve) in &curves {
        for (q, v) in curve {
            writeln!(text, "{n},{q},{v}").expect("string write");
        }
    }
    std::fs::File::create(&csv)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| CliError::io(&csv, e))?;

    let svg = dir.join("collapse.svg");
    std::fs::write(&svg, render_svg(&curves)).map_err(|e| CliError::io(&svg, e))?;

    let distances = chosen.windows(2).map(|w| (w[0].dim, w[1].dim, quantile_distance(w[0], w[1]))).collect();
    Ok(CollapseSummary { csv, svg, distances })
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn render_svg(curves: &[(usize, Vec<(f64, f64)>)]) -> String {
    let (w, h) = (640.0, 440.0);
    let (left, right, top, bottom) = (60.0, 20.0, 20.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let x = |q: f64| left + q * pw;
    let y = |v: f64| top + (1.0 - (v + 1.0) / 2.0) * ph;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let q = i as f64 / 4.0;
        let v = -1.0 + i as f64 / 2.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{q}</text>"#, x(q), h - bottom + 18.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v}</text>"#, left - 6.0, y(v) + 4.0);
        let _ = writeln!(s, r##"<line x1="{left}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/>"##, left + pw, y(v), y(v));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">a / N^2</text>"#, left + pw / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">eigenvalue</text>"#, top + ph / 2.0, top + ph / 2.0);
    for (k, (n, curve)) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        // thin long curves; endpoints are always kept
        let stride = (curve.len() / 800).max(1);
        let mut pts = String::new();
        for (i, &(q, v)) in curve.iter().enumerate() {
            if i % stride == 0 || i + 1 == curve.len() {
                let _ = write!(pts, "{:.2},{:.2} ", x(q), y(v));
            }
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.trim_end());
        let ly = top + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" x2="{:.1}" y1="{ly:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, left + pw - 90.0, left + pw - 70.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">N = {n}</text>"#, left + pw - 64.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}
