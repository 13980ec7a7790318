//! Minimal SVG line charts with optional +-1 std bands.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub color: String,
    /// One value per episode, episode 1 first.
    pub values: Vec<f64>,
    /// Half-width of the shaded band around `values`.
    pub band: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LineChart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn series(mut self, name: &str, values: Vec<f64>, band: Option<Vec<f64>>) -> Self {
        let color = PALETTE[self.series.len() % PALETTE.len()].to_string();
        self.series.push(Series {
            name: name.into(),
            color,
            values,
            band,
        });
        self
    }

    /// Episodes on the x axis run from 1 to the longest series.
    pub fn num_points(&self) -> usize {
        self.series
            .iter()
            .map(|s| s.values.len())
            .max()
            .unwrap_or(0)
    }

    fn y_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.series {
            for (i, &v) in s.values.iter().enumerate() {
                let w = s
                    .band
                    .as_ref()
                    .and_then(|b| b.get(i))
                    .copied()
                    .unwrap_or(0.0);
                if v.is_finite() && w.is_finite() {
                    lo = lo.min(v - w);
                    hi = hi.max(v + w);
                }
            }
        }
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-9 {
            return (lo - 1.0, hi + 1.0);
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn to_svg(&self) -> String {
        let n = self.num_points().max(1);
        let (y_lo, y_hi) = self.y_range();
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let x_of = |episode: usize| {
            if n == 1 {
                LEFT + plot_w / 2.0
            } else {
                LEFT + (episode - 1) as f64 / (n - 1) as f64 * plot_w
            }
        };
        let y_of = |v: f64| TOP + (y_hi - v) / (y_hi - y_lo) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        // axes
        let _ = writeln!(
            svg,
            r#"<g stroke="black" fill="none"><line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/></g>"#,
            TOP + plot_h,
            LEFT + plot_w,
            TOP + plot_h,
            TOP + plot_h
        );
        for episode in x_ticks(n) {
            let x = x_of(episode);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text class="x-tick" x="{x:.2}" y="{}" text-anchor="middle">{episode}</text>"#,
                TOP + plot_h,
                TOP + plot_h + 5.0,
                TOP + plot_h + 18.0
            );
        }
        for i in 0..=5 {
            let v = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
            let y = y_of(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT,
                LEFT + plot_w,
                LEFT - 6.0,
                y + 4.0,
                format_tick(v)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            if let Some(band) = &s.band {
                let upper = s
                    .values
                    .iter()
                    .zip(band)
                    .enumerate()
                    .map(|(i, (v, w))| (i + 1, v + w));
                let lower = s
                    .values
                    .iter()
                    .zip(band)
                    .enumerate()
                    .rev()
                    .map(|(i, (v, w))| (i + 1, v - w));
                let pts: Vec<String> = upper
                    .chain(lower)
                    .filter(|(_, v)| v.is_finite())
                    .map(|(e, v)| format!("{:.2},{:.2}", x_of(e), y_of(v)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polygon points="{}" fill="{}" fill-opacity="0.18" stroke="none"/>"#,
                    pts.join(" "),
                    s.color
                );
            }
            let pts: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_finite())
                .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i + 1), y_of(v)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                pts.join(" "),
                s.color
            );
            let ly = TOP + 10.0 + 20.0 * k as f64;
            let lx = LEFT + plot_w + 15.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
                lx + 20.0,
                s.color,
                lx + 26.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Tick episodes: always the first and the last, plus a few round values.
fn x_ticks(n: usize) -> Vec<usize> {
    let mut ticks = vec![1];
    if n > 1 {
        let raw = n as f64 / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag)
            .max(1.0) as usize;
        let mut e = step;
        while e < n {
            if e > 1 && (n - e) as f64 > 0.4 * step as f64 {
                ticks.push(e);
            }
            e += step;
        }
        ticks.push(n);
    }
    ticks
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
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
    fn ticks_span_all_episodes() {
        assert_eq!(x_ticks(1), vec![1]);
        let t = x_ticks(500);
        assert_eq!((t[0], *t.last().unwrap()), (1, 500));
        assert_eq!(t, vec![1, 100, 200, 300, 400, 500]);
        let t = x_ticks(7);
        assert_eq!((t[0], *t.last().unwrap()), (1, 7));
    }

    #[test]
    fn renders_series_and_band() {
        let chart = LineChart::new("Reward <mean>", "episode", "reward")
            .series("a", vec![1.0, 2.0, 3.0], Some(vec![0.5; 3]))
            .series("b", vec![0.0, f64::NAN, 1.0], None);
        let svg = chart.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.contains("Reward &lt;mean&gt;"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn flat_series_has_range() {
        let svg = LineChart::new("t", "x", "y")
            .series("z", vec![0.0; 4], None)
            .to_svg();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
