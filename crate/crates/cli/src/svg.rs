//! Self-contained SVG line plots: analytic curves as solid polylines,
//! simulated estimates as markers with 95% CI whiskers. Plain text
//! emission, no plotting dependency; the CSV remains the authoritative
//! record.

use std::fmt::Write as _;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    /// Palette slot; series sharing a slot share a color.
    pub color_index: usize,
    pub points: Vec<(f64, f64)>,
    /// CI halfwidths, parallel to `points`; drawn as whiskers.
    pub whiskers: Option<Vec<f64>>,
    /// Markers instead of a connecting line.
    pub markers: bool,
}

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let span = (self.max - self.min).max(1e-300);
        self.lo_px + (v - self.min) / span * (self.hi_px - self.lo_px)
    }

    fn ticks(&self) -> Vec<f64> {
        let span = (self.max - self.min).max(1e-300);
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 2.5, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|&s| span / s <= 6.0)
            .unwrap_or(mag * 10.0);
        let mut t = (self.min / step).ceil() * step;
        let mut out = vec![];
        while t <= self.max + step * 1e-9 {
            out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
            t += step;
        }
        out
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a complete standalone SVG document.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut xs: Vec<f64> = vec![];
    let mut ys: Vec<f64> = vec![];
    for s in series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            xs.push(x);
            let w = s.whiskers.as_ref().and_then(|w| w.get(i)).copied().unwrap_or(0.0);
            ys.push(y - w);
            ys.push(y + w);
        }
    }
    let (x_min, x_max) = extent(&xs);
    let (y_min, y_max) = extent(&ys);
    let x = Scale {
        min: x_min,
        max: x_max,
        lo_px: MARGIN_L,
        hi_px: WIDTH - MARGIN_R,
    };
    let y = Scale {
        min: y_min,
        max: y_max,
        lo_px: HEIGHT - MARGIN_B,
        hi_px: MARGIN_T,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        xml_escape(title)
    );

    // grid and ticks
    for t in x.ticks() {
        let px = x.map(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#dddddd"/>"##,
            y.lo_px, y.hi_px
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y.lo_px + 20.0,
            fmt_tick(t)
        );
    }
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#dddddd"/>"##,
            x.lo_px, x.hi_px
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x.lo_px - 8.0,
            py + 4.0,
            fmt_tick(t)
        );
    }
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        x.lo_px, y.lo_px, x.hi_px, y.lo_px
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        x.lo_px, y.lo_px, x.lo_px, y.hi_px
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x.lo_px + x.hi_px) / 2.0,
        HEIGHT - 14.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (y.lo_px + y.hi_px) / 2.0,
        (y.lo_px + y.hi_px) / 2.0,
        xml_escape(y_label)
    );

    // data
    for s in series {
        let color = PALETTE[s.color_index % PALETTE.len()];
        if s.markers {
            for (i, &(px, py)) in s.points.iter().enumerate() {
                if !px.is_finite() || !py.is_finite() {
                    continue;
                }
                let cx = x.map(px);
                let cy = y.map(py);
                if let Some(w) = s.whiskers.as_ref().and_then(|w| w.get(i)) {
                    let y0 = y.map(py - w);
                    let y1 = y.map(py + w);
                    let _ = writeln!(
                        svg,
                        r#"<line x1="{cx:.2}" y1="{y0:.2}" x2="{cx:.2}" y2="{y1:.2}" stroke="{color}"/>"#
                    );
                    for yy in [y0, y1] {
                        let _ = writeln!(
                            svg,
                            r#"<line x1="{:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{color}"/>"#,
                            cx - 4.0,
                            cx + 4.0
                        );
                    }
                }
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="{color}"/>"#
                );
            }
        } else {
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .map(|&(a, b)| format!("{:.2},{:.2}", x.map(a), y.map(b)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                pts.join(" ")
            );
        }
    }

    // legend
    let lx = WIDTH - MARGIN_R + 14.0;
    for (i, s) in series.iter().enumerate() {
        let ly = MARGIN_T + 10.0 + i as f64 * 20.0;
        let color = PALETTE[s.color_index % PALETTE.len()];
        if s.markers {
            let _ = writeln!(
                svg,
                r#"<circle cx="{}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                lx + 11.0,
                ly - 4.0
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="{color}" stroke-width="1.8"/>"#,
                ly - 4.0,
                lx + 22.0,
                ly - 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly:.2}">{}</text>"#,
            lx + 28.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn extent(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}
