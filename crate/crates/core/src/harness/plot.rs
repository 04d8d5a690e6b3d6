//! Minimal static SVG plots: convergence metrics against wall-clock time
//! with a base-10 logarithmic vertical axis.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One labeled curve; points are (time seconds, value).
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Renders the series into an SVG document. Points with nonpositive
/// values are dropped (log scale).
pub fn render_log_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let filtered: Vec<(usize, Vec<(f64, f64)>)> = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            (
                i,
                s.points
                    .iter()
                    .copied()
                    .filter(|(x, y)| x.is_finite() && *y > 0.0 && y.is_finite())
                    .collect(),
            )
        })
        .collect();

    let mut x_max = 0.0f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, pts) in &filtered {
        for &(x, y) in pts {
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !y_min.is_finite() {
        // nothing plottable; emit an empty frame
        y_min = 1e-3;
        y_max = 1.0;
    }
    if x_max <= 0.0 {
        x_max = 1.0;
    }
    let ly_min = y_min.log10().floor();
    let ly_max = y_max.log10().ceil().max(ly_min + 1.0);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + x / x_max * plot_w;
    let sy = |y: f64| {
        let ly = y.log10();
        MARGIN_T + (ly_max - ly) / (ly_max - ly_min) * plot_h
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );

    // horizontal decade grid lines and labels
    let mut dec = ly_min as i64;
    while dec <= ly_max as i64 {
        let y = sy(10f64.powi(dec as i32));
        let _ = write!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e{dec}</text>\n",
            WIDTH - MARGIN_R,
            MARGIN_L - 6.0,
            y + 4.0
        );
        dec += 1;
    }
    // x ticks at quarters
    for i in 0..=4 {
        let x_val = x_max * i as f64 / 4.0;
        let x = sx(x_val);
        let _ = write!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>\n",
            MARGIN_T,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 16.0,
            x_val
        );
    }
    // axes
    let _ = write!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN_L}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n\
         <text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        HEIGHT - MARGIN_B,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(xlabel),
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(ylabel)
    );

    // curves and legend
    for (idx, pts) in &filtered {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[*idx % PALETTE.len()];
        let mut path = String::new();
        for (j, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(
                path,
                "{}{:.2},{:.2}",
                if j == 0 { "M" } else { " L" },
                sx(x),
                sy(y)
            );
        }
        let _ = write!(
            svg,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        );
        let ly = MARGIN_T + 16.0 * (*idx as f64) + 10.0;
        let lx = WIDTH - MARGIN_R - 130.0;
        let _ = write!(
            svg,
            "<line x1=\"{lx}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&series[*idx].label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_plot_contains_curves_and_decades() {
        let series = vec![
            Series {
                label: "SPDHG".into(),
                points: (0..50).map(|k| (k as f64 * 0.1, 1.0 / (k + 1) as f64)).collect(),
            },
            Series {
                label: "PDHG".into(),
                points: (0..50).map(|k| (k as f64 * 0.1, 2.0 / (k + 1) as f64)).collect(),
            },
        ];
        let svg = render_log_plot("convergence", "time (s)", "e_k", &series);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("1e0") || svg.contains("1e-1"));
        assert!(svg.contains("SPDHG"));
    }

    #[test]
    fn nonpositive_points_are_dropped() {
        let series = vec![Series {
            label: "zeros".into(),
            points: vec![(0.0, 0.0), (1.0, -1.0)],
        }];
        let svg = render_log_plot("t", "x", "y", &series);
        assert!(!svg.contains("<path"));
    }
}
