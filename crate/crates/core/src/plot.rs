//! Plain SVG line charts of coverage curves.

use crate::format::fmt_g;
use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A horizontal or vertical reference line.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Horizontal { y: f64, label: String },
    Vertical { x: f64, label: String },
    /// The line `y = x`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    pub rules: Vec<Rule>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (a, b, v) = if self.log_x {
            (self.x0.log10(), self.x1.log10(), x.log10())
        } else {
            (self.x0, self.x1, x)
        };
        let t = if b > a { (v - a) / (b - a) } else { 0.5 };
        LEFT + t * (WIDTH - LEFT - RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        let t = if self.y1 > self.y0 {
            (y - self.y0) / (self.y1 - self.y0)
        } else {
            0.5
        };
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Chart {
    fn frame(&self) -> Frame {
        let finite = |v: &f64| v.is_finite() && (!self.log_x || *v > 0.0);
        let mut xs: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(finite).collect();
        let mut ys: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).filter(|v| v.is_finite()).collect();
        for r in &self.rules {
            match r {
                Rule::Horizontal { y, .. } if y.is_finite() => ys.push(*y),
                Rule::Vertical { x, .. } if finite(x) => xs.push(*x),
                _ => {}
            }
        }
        let span = |v: &[f64], lo: f64, hi: f64| {
            let a = v.iter().copied().fold(f64::INFINITY, f64::min);
            let b = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if a.is_finite() {
                (a, b)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = span(&xs, 1.0, 10.0);
        let (y0, y1) = span(&ys, 0.0, 1.0);
        Frame {
            x0,
            x1,
            y0: y0.min(0.0),
            y1: y1.max(1.0),
            log_x: self.log_x,
        }
    }

    pub fn to_svg(&self) -> String {
        let f = self.frame();
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            px((LEFT + WIDTH - RIGHT) / 2.0),
            escape(&self.title)
        );
        let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            px(l),
            px(t),
            px(r - l),
            px(b - t)
        );
        for k in 0..=4 {
            let y = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
            let yy = f.ty(y);
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{yp}" x2="{}" y2="{yp}" stroke="#dddddd"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
                px(l),
                px(r),
                px(l - 6.0),
                px(yy + 4.0),
                fmt_g(y),
                yp = px(yy)
            );
        }
        for x in self.x_ticks(&f) {
            let xx = f.tx(x);
            let _ = writeln!(
                s,
                r#"<line x1="{xp}" y1="{}" x2="{xp}" y2="{}" stroke="black"/><text x="{xp}" y="{}" text-anchor="middle">{}</text>"#,
                px(b),
                px(b + 5.0),
                px(b + 18.0),
                fmt_g(x),
                xp = px(xx)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px((l + r) / 2.0),
            px(HEIGHT - 18.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            px((t + b) / 2.0),
            px((t + b) / 2.0),
            escape(&self.y_label)
        );
        for rule in &self.rules {
            match rule {
                Rule::Horizontal { y, label } if y.is_finite() => {
                    let yy = px(f.ty(*y));
                    let _ = writeln!(
                        s,
                        r#"<line class="nominal" x1="{}" y1="{yy}" x2="{}" y2="{yy}" stroke="black" stroke-dasharray="2,3"/><text x="{}" y="{yy}" dy="-3" text-anchor="end">{}</text>"#,
                        px(l),
                        px(r),
                        px(r - 4.0),
                        escape(label)
                    );
                }
                Rule::Vertical { x, label } if x.is_finite() && (!f.log_x || *x > 0.0) => {
                    let xx = px(f.tx(*x));
                    let _ = writeln!(
                        s,
                        r#"<line class="threshold" x1="{xx}" y1="{}" x2="{xx}" y2="{}" stroke="black" stroke-dasharray="6,4"/><text x="{xx}" y="{}" dx="3">{}</text>"#,
                        px(t),
                        px(b),
                        px(t + 12.0),
                        escape(label)
                    );
                }
                Rule::Diagonal => {
                    let lo = f.x0.max(f.y0);
                    let hi = f.x1.min(f.y1);
                    if hi > lo {
                        let _ = writeln!(
                            s,
                            r#"<line class="diagonal" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
                            px(f.tx(lo)),
                            px(f.ty(lo)),
                            px(f.tx(hi)),
                            px(f.ty(hi))
                        );
                    }
                }
                _ => {}
            }
        }
        for (i, ser) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = ser
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite() && (!f.log_x || p.0 > 0.0))
                .map(|p| format!("{},{}", px(f.tx(p.0)), px(f.ty(p.1))))
                .collect();
            if !pts.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            let ly = t + 14.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                px(r + 10.0),
                px(r + 30.0),
                px(r + 35.0),
                px(ly + 4.0),
                escape(&ser.name),
                ly = px(ly)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn x_ticks(&self, f: &Frame) -> Vec<f64> {
        if f.log_x {
            let (a, b) = (f.x0.log10().floor() as i32, f.x1.log10().ceil() as i32);
            (a..=b)
                .map(|e| 10f64.powi(e))
                .filter(|v| *v >= f.x0 * (1.0 - 1e-9) && *v <= f.x1 * (1.0 + 1e-9))
                .collect()
        } else {
            (0..=4).map(|k| f.x0 + (f.x1 - f.x0) * k as f64 / 4.0).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart {
            title: "coverage".into(),
            x_label: "n".into(),
            y_label: "coverage".into(),
            log_x: true,
            series: vec![Series {
                name: "delta <a&b>".into(),
                points: vec![(100.0, 0.8), (1000.0, 0.9), (10000.0, 0.95)],
            }],
            rules: vec![
                Rule::Horizontal {
                    y: 0.95,
                    label: "0.95".into(),
                },
                Rule::Vertical {
                    x: 4000.0,
                    label: "n_bar = 4000".into(),
                },
            ],
        }
    }

    #[test]
    fn emits_rules_and_series() {
        let svg = chart().to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches(r#"class="nominal""#).count(), 1);
        assert_eq!(svg.matches(r#"class="threshold""#).count(), 1);
        assert!(svg.contains("n_bar = 4000"));
        assert!(svg.contains("delta &lt;a&amp;b&gt;"));
        assert_eq!(svg, chart().to_svg());
    }

    #[test]
    fn vertical_rule_is_placed_on_log_axis() {
        let c = chart();
        let f = c.frame();
        let x = f.tx(4000.0);
        let expected = LEFT + (4000f64.log10() - 2.0) / 2.0 * (WIDTH - LEFT - RIGHT);
        assert!((x - expected).abs() < 1e-9);
    }

    #[test]
    fn empty_chart_is_valid() {
        let c = Chart {
            series: vec![],
            rules: vec![],
            ..chart()
        };
        assert!(c.to_svg().contains("</svg>"));
    }
}
