//! Standalone SVG line charts of a spectrum, its baseline and the corrected
//! trace, with optional snaxel markers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::io::write_atomic;
use crate::spectrum::{interpolate, Baseline, Spectrum};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

pub const OBSERVED_COLOR: &str = "#1f77b4";
pub const BASELINE_COLOR: &str = "#ff7f0e";
pub const CORRECTED_COLOR: &str = "#2ca02c";
pub const SNAXEL_COLOR: &str = "#d62728";
pub const INITIAL_SNAXEL_COLOR: &str = "#17becf";

#[derive(Debug, Clone, Copy, Default)]
pub struct Plot<'a> {
    pub spectrum: Option<&'a Spectrum>,
    pub baseline: Option<&'a Baseline>,
    pub corrected: Option<&'a Spectrum>,
    /// Estimated snaxels, drawn filled at `(x, f(x))`.
    pub snaxels: Option<&'a [f64]>,
    /// Initial snaxels, drawn hollow.
    pub initial_snaxels: Option<&'a [f64]>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn polyline(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], color: &str, label: &str) {
    let _ = write!(
        out,
        r#"<polyline class="{label}" fill="none" stroke="{color}" stroke-width="1.2" points=""#
    );
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", frame.px(*x), frame.py(*y));
    }
    out.push_str("\"/>\n");
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let mut series: Vec<(&[f64], &[f64])> = Vec::new();
        if let Some(s) = self.spectrum {
            series.push((s.channels(), s.intensities()));
        }
        if let Some(b) = self.baseline {
            series.push((b.channels(), b.values()));
        }
        if let Some(c) = self.corrected {
            series.push((c.channels(), c.intensities()));
        }
        let xs = series.iter().flat_map(|(x, _)| x.iter().copied());
        let ys = series.iter().flat_map(|(_, y)| y.iter().copied());
        let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (mut y_min, mut y_max) =
            ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (x_min, x_max) = if x_min.is_finite() && x_max > x_min { (x_min, x_max) } else { (0.0, 1.0) };
        if !(y_min.is_finite() && y_max.is_finite()) {
            (y_min, y_max) = (0.0, 1.0);
        }
        if y_max <= y_min {
            y_min -= 0.5;
            y_max += 0.5;
        }
        let pad = 0.05 * (y_max - y_min);
        let frame = Frame { x_min, x_max, y_min: y_min - pad, y_max: y_max + pad };

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let (left, right) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (top, bottom) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(
            out,
            r#"<path class="axes" d="M{left},{top} L{left},{bottom} L{right},{bottom}" stroke="black" fill="none"/>"#
        );
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let xv = frame.x_min + t * (frame.x_max - frame.x_min);
            let yv = frame.y_min + t * (frame.y_max - frame.y_min);
            let (px, py) = (frame.px(xv), frame.py(yv));
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                bottom + 16.0,
                tick_label(xv)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 6.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">channel</text>"#,
            0.5 * (left + right),
            HEIGHT - 10.0
        );

        if let Some(s) = self.spectrum {
            polyline(&mut out, &frame, s.channels(), s.intensities(), OBSERVED_COLOR, "observed");
        }
        if let Some(b) = self.baseline {
            polyline(&mut out, &frame, b.channels(), b.values(), BASELINE_COLOR, "baseline");
        }
        if let Some(c) = self.corrected {
            polyline(&mut out, &frame, c.channels(), c.intensities(), CORRECTED_COLOR, "corrected");
        }
        if let Some(s) = self.spectrum {
            for (points, fill, stroke) in [
                (self.initial_snaxels, "none", INITIAL_SNAXEL_COLOR),
                (self.snaxels, SNAXEL_COLOR, SNAXEL_COLOR),
            ] {
                for &x in points.unwrap_or_default() {
                    let y = interpolate(s.channels(), s.intensities(), x);
                    let _ = writeln!(
                        out,
                        r#"<circle class="snaxel" cx="{:.2}" cy="{:.2}" r="3.5" fill="{fill}" stroke="{stroke}"/>"#,
                        frame.px(x),
                        frame.py(y)
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.render().as_bytes())
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

pub fn render_svg(
    spectrum: &Spectrum,
    baseline: Option<&Baseline>,
    corrected: Option<&Spectrum>,
    snaxels: Option<&[f64]>,
    path: impl AsRef<Path>,
) -> Result<()> {
    Plot {
        spectrum: Some(spectrum),
        baseline,
        corrected,
        snaxels,
        initial_snaxels: None,
    }
    .write(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::subtract_baseline;

    fn sample() -> (Spectrum, Baseline) {
        let s = Spectrum::from_intensities((0..100).map(|i| ((i as f64) * 0.2).sin() + 2.0).collect())
            .unwrap();
        let b = Baseline::on_grid_of(&s, vec![1.0; 100]).unwrap();
        (s, b)
    }

    #[test]
    fn spectrum_only_has_one_polyline() {
        let (s, _) = sample();
        let svg = Plot { spectrum: Some(&s), ..Default::default() }.render();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn three_traces_have_distinct_colors() {
        let (s, b) = sample();
        let c = subtract_baseline(&s, &b).unwrap();
        let svg = Plot { spectrum: Some(&s), baseline: Some(&b), corrected: Some(&c), ..Default::default() }
            .render();
        assert_eq!(svg.matches("<polyline").count(), 3);
        for color in [OBSERVED_COLOR, BASELINE_COLOR, CORRECTED_COLOR] {
            assert_eq!(svg.matches(&format!("stroke=\"{color}\"")).count(), 1);
        }
    }

    #[test]
    fn one_marker_per_snaxel() {
        let (s, _) = sample();
        let xs: Vec<f64> = (0..15).map(|i| i as f64 * 99.0 / 14.0).collect();
        let svg = Plot { spectrum: Some(&s), snaxels: Some(&xs), ..Default::default() }.render();
        assert_eq!(svg.matches("<circle").count(), 15);
    }

    #[test]
    fn rendering_is_deterministic_and_flat_safe() {
        let (s, b) = sample();
        let p = Plot { spectrum: Some(&s), baseline: Some(&b), ..Default::default() };
        assert_eq!(p.render(), p.render());
        let flat = Spectrum::from_intensities(vec![3.0; 10]).unwrap();
        let svg = Plot { spectrum: Some(&flat), ..Default::default() }.render();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
