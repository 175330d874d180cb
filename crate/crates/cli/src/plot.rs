//! Minimal static SVG line charts. Output depends only on the data, so
//! plots are as reproducible as the reports.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD_L: f64 = 70.0;
const PAD_R: f64 = 20.0;
const PAD_T: f64 = 36.0;
const PAD_B: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

impl Scale {
    fn map(self, v: f64) -> Option<f64> {
        match self {
            Self::Linear => v.is_finite().then_some(v),
            Self::Log10 => (v > 0.0 && v.is_finite()).then(|| v.log10()),
        }
    }

    fn label(self, axis: &str) -> String {
        match self {
            Self::Linear => axis.to_string(),
            Self::Log10 => format!("log10 {axis}"),
        }
    }
}

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_scale: Scale,
    pub y_scale: Scale,
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-2..1e4).contains(&v.abs()) {
        format!("{}", (v * 100.0).round() / 100.0)
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart<'_> {
    /// Points that cannot be shown on the chosen scales are skipped.
    pub fn render(&self, points: &[(f64, f64)]) -> String {
        let pts: Vec<(f64, f64)> =
            points.iter().filter_map(|&(x, y)| Some((self.x_scale.map(x)?, self.y_scale.map(y)?))).collect();
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(self.title)
        );
        let (x0, x1, y0, y1) = (PAD_L, W - PAD_R, H - PAD_B, PAD_T);
        let _ = writeln!(
            svg,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            H - 12.0,
            escape(&self.x_scale.label(self.x_label))
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_scale.label(self.y_label))
        );
        if pts.is_empty() {
            let _ =
                writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">no plottable data</text>"#, W / 2.0, H / 2.0);
            svg.push_str("</svg>\n");
            return svg;
        }
        let bounds = |f: fn(&(f64, f64)) -> f64| {
            let (lo, hi) = pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (xmin, xmax) = bounds(|p| p.0);
        let (ymin, ymax) = bounds(|p| p.1);
        let sx = |v: f64| x0 + (v - xmin) / (xmax - xmin) * (x1 - x0);
        let sy = |v: f64| y0 - (v - ymin) / (ymax - ymin) * (y0 - y1);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (xmin + f * (xmax - xmin), ymin + f * (ymax - ymin));
            let _ =
                writeln!(svg, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, sx(xv), y0 + 16.0, tick(xv));
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart<'static> {
        Chart { title: "a < b", x_label: "k", y_label: "|f|", x_scale: Scale::Linear, y_scale: Scale::Log10 }
    }

    #[test]
    fn log_scale_drops_nonpositive_values() {
        let svg = chart().render(&[(0.0, 1.0), (1.0, 0.0), (2.0, 0.01)]);
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(line.matches(',').count(), 2);
        assert!(svg.contains("a &lt; b"));
    }

    #[test]
    fn empty_data_still_renders() {
        let svg = chart().render(&[(1.0, -1.0)]);
        assert!(svg.contains("no plottable data") && svg.ends_with("</svg>\n"));
    }
}
