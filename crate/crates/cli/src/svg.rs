//! Minimal log-log scatter plot with a fitted line.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const PAD: f64 = 56.0;

pub struct LogLogPlot<'a> {
    pub title: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    /// `log2 y = intercept + slope·log2 x`.
    pub line: Option<(f64, f64)>,
}

impl LogLogPlot<'_> {
    pub fn render(&self) -> String {
        let lx: Vec<f64> = self.xs.iter().map(|x| x.log2()).collect();
        let ly: Vec<f64> = self.ys.iter().map(|y| y.log2()).collect();
        let (x0, x1) = bounds(&lx);
        let (y0, y1) = bounds(&ly);
        let sx = |v: f64| PAD + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
        let sy = |v: f64| HEIGHT - PAD - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(self.title)
        );
        // axes
        let _ = writeln!(
            out,
            r#"<path d="M{PAD} {PAD} V{b} H{r}" stroke="black" fill="none"/>"#,
            b = HEIGHT - PAD,
            r = WIDTH - PAD
        );
        for t in (x0.ceil() as i64)..=(x1.floor() as i64) {
            let x = sx(t as f64);
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">2^{t}</text>"#,
                HEIGHT - PAD + 16.0
            );
        }
        for t in (y0.ceil() as i64)..=(y1.floor() as i64) {
            let y = sy(t as f64);
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="end">2^{t}</text>"#,
                PAD - 6.0
            );
        }
        if let Some((intercept, slope)) = self.line {
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="1.5"/>"#,
                sx(x0),
                sy(intercept + slope * x0),
                sx(x1),
                sy(intercept + slope * x1)
            );
        }
        for (x, y) in lx.iter().zip(&ly) {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                sx(*x),
                sy(*y)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_and_line() {
        let xs = [16.0, 32.0, 64.0];
        let ys = [0.25, 0.125, 0.0625];
        let svg = LogLogPlot {
            title: "a<b",
            xs: &xs,
            ys: &ys,
            line: Some((2.0, -1.0)),
        }
        .render();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("<line"));
        assert!(svg.contains("a&lt;b"));
    }
}
