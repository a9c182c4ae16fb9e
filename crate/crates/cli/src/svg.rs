//! Minimal self-contained SVG renderer for log-log summary plots.
//!
//! One plot shows how an empirical excess-risk curve sits between its
//! lower and upper bounds as the sample size grows, so both axes are
//! logarithmic and every series is drawn as a polyline with point
//! markers; the empirical series additionally carries vertical ±2σ
//! whiskers.  Each series lives in its own `<g class="series">` group,
//! which makes the series count of a rendered file directly checkable.

use bayeslab_core::{Error, Result};

/// One point: plot coordinates plus an optional whisker half-height
/// (already scaled, e.g. 2σ) in y units.
#[derive(Debug, Clone, Copy)]
pub struct PlotPoint {
    /// Abscissa (must be positive to appear on a log axis).
    pub x: f64,
    /// Ordinate (must be positive to appear on a log axis).
    pub y: f64,
    /// Optional whisker half-height in y units.
    pub bar: Option<f64>,
}

/// One named curve.
#[derive(Debug, Clone)]
pub struct Series {
    /// Legend label.
    pub label: String,
    /// Points in drawing order.
    pub points: Vec<PlotPoint>,
    /// Dashed stroke (used for reference bounds).
    pub dashed: bool,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 178.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Axis-tick label for 10^k.
fn decade_label(k: i64) -> String {
    if (-3..=3).contains(&k) {
        format!("{}", 10f64.powi(k as i32))
    } else {
        format!("1e{k}")
    }
}

struct LogAxis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl LogAxis {
    /// Builds an axis over the data range (log10 units) with 10% margins
    /// in log space on each side.
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let span = hi - lo;
        let pad = if span > 0.0 { 0.10 * span } else { 0.5 };
        LogAxis { lo: lo - pad, hi: hi + pad, px_lo, px_hi }
    }

    fn place(&self, log_value: f64) -> f64 {
        let t = (log_value - self.lo) / (self.hi - self.lo);
        self.px_lo + t * (self.px_hi - self.px_lo)
    }

    /// Integer decades inside the padded range; endpoint fallbacks when
    /// the range is narrower than one decade.
    fn ticks(&self) -> Vec<(f64, String)> {
        let first = self.lo.ceil() as i64;
        let last = self.hi.floor() as i64;
        if first <= last {
            (first..=last).map(|k| (k as f64, decade_label(k))).collect()
        } else {
            let fmt = |v: f64| format!("{:.3}", 10f64.powf(v));
            vec![(self.lo, fmt(self.lo)), (self.hi, fmt(self.hi))]
        }
    }
}

/// Renders a log-log plot of the given series.
///
/// Points with a non-positive or non-finite coordinate are dropped (they
/// have no place on a log axis), and a series losing all its points is
/// dropped entirely.
///
/// # Errors
/// When nothing remains to draw.
pub fn render_loglog(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<String> {
    let kept: Vec<(&Series, Vec<PlotPoint>)> = series
        .iter()
        .map(|s| {
            let pts: Vec<PlotPoint> = s
                .points
                .iter()
                .copied()
                .filter(|p| p.x.is_finite() && p.x > 0.0 && p.y.is_finite() && p.y > 0.0)
                .collect();
            (s, pts)
        })
        .filter(|(_, pts)| !pts.is_empty())
        .collect();
    if kept.is_empty() {
        return Err(Error::invalid("nothing to plot: no series with positive finite points"));
    }

    let xs = kept.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.x.log10()));
    let x_axis = LogAxis::new(xs, MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    // Whisker ends participate in the y range so bars never leave the frame.
    let ys = kept.iter().flat_map(|(_, pts)| {
        pts.iter().flat_map(|p| {
            let bar = p.bar.unwrap_or(0.0).max(0.0);
            let lo = if p.y - bar > 0.0 { p.y - bar } else { p.y };
            [lo.log10(), (p.y + bar).log10()]
        })
    });
    let y_axis = LogAxis::new(ys, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));

    // Gridlines and tick labels.
    let (frame_l, frame_r) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (frame_t, frame_b) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
    for (v, label) in x_axis.ticks() {
        let px = x_axis.place(v);
        out.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{frame_t:.2}\" x2=\"{px:.2}\" y2=\"{frame_b:.2}\" \
             stroke=\"#dddddd\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#333333\" \
             text-anchor=\"middle\">{}</text>\n",
            frame_b + 18.0,
            esc(&label)
        ));
    }
    for (v, label) in y_axis.ticks() {
        let py = y_axis.place(v);
        out.push_str(&format!(
            "  <line x1=\"{frame_l:.2}\" y1=\"{py:.2}\" x2=\"{frame_r:.2}\" y2=\"{py:.2}\" \
             stroke=\"#dddddd\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#333333\" \
             text-anchor=\"end\">{}</text>\n",
            frame_l - 8.0,
            py + 4.0,
            esc(&label)
        ));
    }
    out.push_str(&format!(
        "  <rect x=\"{frame_l:.2}\" y=\"{frame_t:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#999999\"/>\n",
        frame_r - frame_l,
        frame_b - frame_t
    ));

    // Series.
    for (i, (s, pts)) in kept.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
        out.push_str(&format!(
            "  <g class=\"series\" data-label=\"{}\">\n",
            esc(&s.label)
        ));
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                format!("{:.2},{:.2}", x_axis.place(p.x.log10()), y_axis.place(p.y.log10()))
            })
            .collect();
        if coords.len() > 1 {
            out.push_str(&format!(
                "    <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                 stroke-width=\"1.8\"{dash}/>\n",
                coords.join(" ")
            ));
        }
        for p in pts {
            let px = x_axis.place(p.x.log10());
            let py = y_axis.place(p.y.log10());
            if let Some(bar) = p.bar {
                if bar > 0.0 {
                    let top = y_axis.place((p.y + bar).log10());
                    // A whisker reaching zero or below has no log-scale end;
                    // clamp it to the frame bottom.
                    let bottom = if p.y - bar > 0.0 {
                        y_axis.place((p.y - bar).log10())
                    } else {
                        frame_b
                    };
                    out.push_str(&format!(
                        "    <line x1=\"{px:.2}\" y1=\"{top:.2}\" x2=\"{px:.2}\" \
                         y2=\"{bottom:.2}\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
                    ));
                    for end in [top, bottom] {
                        out.push_str(&format!(
                            "    <line x1=\"{:.2}\" y1=\"{end:.2}\" x2=\"{:.2}\" \
                             y2=\"{end:.2}\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
                            px - 4.0,
                            px + 4.0
                        ));
                    }
                }
            }
            out.push_str(&format!(
                "    <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
        }
        out.push_str("  </g>\n");
    }

    // Legend.
    let legend_x = frame_r + 14.0;
    out.push_str("  <g class=\"legend\">\n");
    for (i, (s, _)) in kept.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = frame_t + 14.0 + 20.0 * i as f64;
        let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
        out.push_str(&format!(
            "    <line x1=\"{legend_x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>\n",
            legend_x + 22.0
        ));
        out.push_str(&format!(
            "    <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#222222\">{}</text>\n",
            legend_x + 28.0,
            y + 4.0,
            esc(&s.label)
        ));
    }
    out.push_str("  </g>\n");

    // Title and axis labels.
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"26\" font-size=\"15\" fill=\"#111111\" \
         text-anchor=\"middle\">{}</text>\n",
        (frame_l + frame_r) / 2.0,
        esc(title)
    ));
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#111111\" \
         text-anchor=\"middle\">{}</text>\n",
        (frame_l + frame_r) / 2.0,
        HEIGHT - 16.0,
        esc(x_label)
    ));
    out.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" font-size=\"13\" fill=\"#111111\" text-anchor=\"middle\" \
         transform=\"rotate(-90 20 {:.2})\">{}</text>\n",
        (frame_t + frame_b) / 2.0,
        (frame_t + frame_b) / 2.0,
        esc(y_label)
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, pts: &[(f64, f64)]) -> Series {
        Series {
            label: label.to_string(),
            points: pts.iter().map(|&(x, y)| PlotPoint { x, y, bar: None }).collect(),
            dashed: false,
        }
    }

    #[test]
    fn group_count_matches_series_count() {
        let s = vec![
            series("a", &[(1.0, 0.1), (10.0, 0.01)]),
            series("b", &[(1.0, 0.2), (10.0, 0.02)]),
            series("c", &[(1.0, 0.4), (10.0, 0.04)]),
            series("d", &[(1.0, 0.8), (10.0, 0.08)]),
        ];
        let svg = render_loglog("t", "n", "risk", &s).unwrap();
        assert_eq!(svg.matches("<g class=\"series\"").count(), 4);
        assert!(svg.contains("data-label=\"c\""));
        assert!(svg.contains("<g class=\"legend\""));
    }

    #[test]
    fn nonpositive_points_are_dropped_and_empty_input_errors() {
        assert!(render_loglog("t", "x", "y", &[]).is_err());
        let all_bad = vec![series("z", &[(0.0, 1.0), (2.0, -1.0)])];
        assert!(render_loglog("t", "x", "y", &all_bad).is_err());

        let mixed = vec![series("ok", &[(1.0, 1.0)]), series("bad", &[(-1.0, 1.0)])];
        let svg = render_loglog("t", "x", "y", &mixed).unwrap();
        assert_eq!(svg.matches("<g class=\"series\"").count(), 1);
    }

    #[test]
    fn log_mapping_is_monotone() {
        let s = vec![series("m", &[(1.0, 1.0), (10.0, 1.0), (100.0, 1.0)])];
        let svg = render_loglog("t", "x", "y", &s).unwrap();
        let line = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        let pts: Vec<f64> = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap()
            .split(' ')
            .map(|pair| pair.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(pts[0] < pts[1] && pts[1] < pts[2]);
        // Equal decade steps land at equal pixel steps.
        assert!(((pts[1] - pts[0]) - (pts[2] - pts[1])).abs() < 1e-6);
    }

    #[test]
    fn labels_are_escaped() {
        let s = vec![series("a<b&c", &[(1.0, 1.0)])];
        let svg = render_loglog("t", "x", "y", &s).unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b&c"));
    }
}
