//! Minimal static SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series<'a> {
    pub label: String,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct Plot<'a> {
    pub title: String,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub series: Vec<Series<'a>>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl<'a> Plot<'a> {
    fn range(&self, pick: impl Fn(&Series<'a>) -> &'a [f64], positive: bool) -> (f64, f64) {
        let (lo, hi) = self
            .series
            .iter()
            .flat_map(|s| pick(s).iter().copied())
            .filter(|v| v.is_finite() && (!positive || *v > 0.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    }

    pub fn render(&self) -> String {
        let (mut x0, mut x1) = self.range(|s| s.x, self.log_x);
        if self.log_x {
            x0 = x0.max(f64::MIN_POSITIVE).log10();
            x1 = x1.max(f64::MIN_POSITIVE).log10();
            if x1 - x0 < 1e-12 {
                x1 = x0 + 1.0;
            }
        }
        let (y0, y1) = self.range(|s| s.y, false);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let fx = |x: f64| {
            let x = if self.log_x { x.log10() } else { x };
            LEFT + (x - x0) / (x1 - x0) * pw
        };
        let fy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );

        // y ticks
        let step = nice_step(y1 - y0);
        let mut v = (y0 / step).ceil() * step;
        while v <= y1 + 1e-9 * step {
            let y = fy(v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                y + 4.0,
                tick_label(v)
            );
            v += step;
        }
        // x ticks
        let ticks: Vec<(f64, String)> = if self.log_x {
            (x0.ceil() as i32..=x1.floor() as i32)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect()
        } else {
            let step = nice_step(x1 - x0);
            let mut v = (x0 / step).ceil() * step;
            let mut t = Vec::new();
            while v <= x1 + 1e-9 * step {
                t.push((v, tick_label(v)));
                v += step;
            }
            t
        };
        for (v, label) in ticks {
            let x = fx(v);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
                TOP + ph,
                TOP + ph + 16.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let colour = COLOURS[k % COLOURS.len()];
            let points: Vec<String> =
                s.x.iter()
                    .zip(s.y)
                    .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_x || **x > 0.0))
                    .map(|(&x, &y)| format!("{:.2},{:.2}", fx(x), fy(y)))
                    .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            let ly = TOP + 14.0 + 18.0 * k as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_each_series_once() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 0.5, 1.0];
        let svg = Plot {
            title: "a < b".into(),
            x_label: "t",
            y_label: "P",
            log_x: false,
            series: vec![
                Series {
                    label: "one".into(),
                    x: &x,
                    y: &y,
                },
                Series {
                    label: "two".into(),
                    x: &x,
                    y: &y,
                },
            ],
        }
        .render();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn log_axis_labels_decades() {
        let x = [0.01, 1.0, 100.0];
        let y = [1.0, 0.0, -1.0];
        let svg = Plot {
            title: String::new(),
            x_label: "kr",
            y_label: "",
            log_x: true,
            series: vec![Series {
                label: "g".into(),
                x: &x,
                y: &y,
            }],
        }
        .render();
        assert!(svg.contains(">1e-2<") && svg.contains(">1e2<"));
    }
}
