//! Minimal SVG chart rendering: polylines, scatter points, axes with nice
//! ticks, and a legend, emitted as plain text with no plotting dependency.

/// One plotted series; scatter series draw circles instead of a polyline.
pub struct Series {
    pub label: String,
    pub color: String,
    pub dashed: bool,
    pub scatter: bool,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn line(label: impl Into<String>, color: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            color: color.into(),
            dashed: false,
            scatter: false,
            points,
        }
    }

    pub fn dashed_line(
        label: impl Into<String>,
        color: impl Into<String>,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Series {
            dashed: true,
            ..Series::line(label, color, points)
        }
    }

    pub fn scatter(label: impl Into<String>, color: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            scatter: true,
            ..Series::line(label, color, points)
        }
    }
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
    /// Draw the y = x reference line (for predicted-vs-true scatters).
    pub diagonal: bool,
    pub series: Vec<Series>,
}

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Chart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 720.0,
            height: 480.0,
            diagonal: false,
            series: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let (left, right, top, bottom) = (70.0, 30.0, 44.0, 58.0);
        let plot_w = self.width - left - right;
        let plot_h = self.height - top - bottom;

        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }

        let mut out = String::with_capacity(8 * 1024);
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">\n",
            w = self.width,
            h = self.height
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
            self.width, self.height
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            self.width / 2.0,
            escape(&self.title)
        ));

        if xs.is_empty() {
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\" \
                 fill=\"#888\">no data</text>\n</svg>\n",
                self.width / 2.0,
                self.height / 2.0
            ));
            return out;
        }

        let (x_lo, x_hi) = padded_bounds(&xs);
        let (y_lo, y_hi) = padded_bounds(&ys);
        let to_px = |x: f64, y: f64| -> (f64, f64) {
            (
                left + (x - x_lo) / (x_hi - x_lo) * plot_w,
                top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h,
            )
        };

        // gridlines and tick labels
        for tx in ticks(x_lo, x_hi, 6) {
            let (px, _) = to_px(tx, y_lo);
            out.push_str(&format!(
                "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" \
                 stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                top,
                top + plot_h
            ));
            out.push_str(&format!(
                "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                top + plot_h + 18.0,
                fmt_tick(tx)
            ));
        }
        for ty in ticks(y_lo, y_hi, 5) {
            let (_, py) = to_px(x_lo, ty);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" \
                 stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                left,
                left + plot_w
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                left - 8.0,
                py + 4.0,
                fmt_tick(ty)
            ));
        }

        // axes
        out.push_str(&format!(
            "<line x1=\"{l:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"#333\" stroke-width=\"1.5\"/>\n\
             <line x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{b:.1}\" stroke=\"#333\" stroke-width=\"1.5\"/>\n",
            l = left,
            r = left + plot_w,
            t = top,
            b = top + plot_h
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
            left + plot_w / 2.0,
            self.height - 14.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\" \
             transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            top + plot_h / 2.0,
            top + plot_h / 2.0,
            escape(&self.y_label)
        ));

        if self.diagonal {
            let lo = x_lo.max(y_lo);
            let hi = x_hi.min(y_hi);
            if hi > lo {
                let (x1, y1) = to_px(lo, lo);
                let (x2, y2) = to_px(hi, hi);
                out.push_str(&format!(
                    "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" \
                     stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"4 4\"/>\n"
                ));
            }
        }

        for s in &self.series {
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| to_px(x, y))
                .collect();
            if s.scatter {
                for (px, py) in &pts {
                    out.push_str(&format!(
                        "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"2.5\" fill=\"{}\" \
                         fill-opacity=\"0.7\"/>\n",
                        s.color
                    ));
                }
            } else if pts.len() > 1 {
                let coords: Vec<String> = pts
                    .iter()
                    .map(|(px, py)| format!("{px:.1},{py:.1}"))
                    .collect();
                let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
                    coords.join(" "),
                    s.color
                ));
            }
        }

        // legend, top-right inside the plot area
        let legend_x = left + plot_w - 150.0;
        let mut legend_y = top + 14.0;
        for s in &self.series {
            if s.scatter {
                out.push_str(&format!(
                    "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{}\"/>\n",
                    legend_x + 12.0,
                    legend_y - 4.0,
                    s.color
                ));
            } else {
                let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
                out.push_str(&format!(
                    "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" \
                     stroke-width=\"2\"{dash}/>\n",
                    legend_x,
                    legend_y - 4.0,
                    legend_x + 24.0,
                    legend_y - 4.0,
                    s.color
                ));
            }
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n",
                legend_x + 30.0,
                legend_y,
                escape(&s.label)
            ));
            legend_y += 16.0;
        }

        out.push_str("</svg>\n");
        out
    }
}

fn padded_bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}

/// Tick positions at a "nice" step (1, 2, 2.5 or 5 times a power of ten).
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * magnitude);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        // avoid the negative-zero label
        out.push(if t == 0.0 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_wellformed_svg_with_polyline() {
        let mut chart = Chart::new("losses", "epoch", "loss");
        chart.series.push(Series::line(
            "train",
            PALETTE[0],
            (0..50).map(|i| (i as f64, 1.0 / (i as f64 + 1.0))).collect(),
        ));
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("losses"));
    }

    #[test]
    fn empty_chart_still_renders() {
        let chart = Chart::new("empty", "x", "y");
        let svg = chart.render();
        assert!(svg.contains("no data"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn scatter_draws_circles() {
        let mut chart = Chart::new("scatter", "true", "predicted");
        chart.diagonal = true;
        chart.series.push(Series::scatter(
            "c0",
            PALETTE[1],
            vec![(0.0, 0.1), (0.5, 0.4), (-0.3, -0.35)],
        ));
        let svg = chart.render();
        assert!(svg.matches("<circle").count() >= 3);
        assert!(svg.contains("stroke-dasharray=\"4 4\""));
    }

    #[test]
    fn tick_steps_are_nice() {
        let t = ticks(0.0, 1.0, 6);
        assert!(t.len() >= 4 && t.len() <= 8);
        let t = ticks(-3.7, 9.2, 6);
        assert!(t.windows(2).all(|w| (w[1] - w[0] - 2.5).abs() < 1e-12));
    }
}
