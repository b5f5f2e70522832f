//! Static SVG rendering of RD curves.
//!
//! Self-contained output: fixed canvas, inline styling, no scripting.
//! Rates run along x, quality along y, one polyline per curve with its
//! points marked, plus a legend keyed by curve label.

use adasharp_core::metrics::RdCurve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 42.0;
const MARGIN_BOTTOM: f64 = 54.0;
const TICKS: usize = 5;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// One axis: data range plus the pixel interval it maps onto.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Axis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // Pad 5% each side; give a degenerate range some body.
        let span = hi - lo;
        let pad = if span > 0.0 { 0.05 * span } else { 1.0 };
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let t = (v - self.lo) / (self.hi - self.lo);
        self.px_lo + t * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
            .collect()
    }
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders RD curves to an SVG document string.
pub fn rd_plot_svg(title: &str, quality_label: &str, curves: &[(String, &RdCurve)]) -> String {
    let x = Axis::fit(
        curves
            .iter()
            .flat_map(|(_, c)| c.points().iter().map(|p| p.rate_kbps)),
        MARGIN_LEFT,
        WIDTH - MARGIN_RIGHT,
    );
    // SVG y grows downward; map quality onto the inverted interval.
    let y = Axis::fit(
        curves
            .iter()
            .flat_map(|(_, c)| c.points().iter().map(|p| p.quality)),
        HEIGHT - MARGIN_BOTTOM,
        MARGIN_TOP,
    );

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" fill=\"#333\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));

    // Grid and tick labels.
    for v in x.ticks() {
        let px = x.map(v);
        svg.push_str(&format!(
            "  <line x1=\"{px:.1}\" y1=\"{}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM
        ));
        svg.push_str(&format!(
            "  <text x=\"{px:.1}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 18.0,
            fmt_tick(v)
        ));
    }
    for v in y.ticks() {
        let py = y.map(v);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{py:.1}\" x2=\"{}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"#333\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            py + 4.0,
            fmt_tick(v)
        ));
    }

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333\"/>\n  \
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"#333\"/>\n",
        l = MARGIN_LEFT,
        r = WIDTH - MARGIN_RIGHT,
        t = MARGIN_TOP,
        b = HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\">rate (kbps)</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\" \
         transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        xml_escape(quality_label)
    ));

    // Curves and legend.
    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = curve
            .points()
            .iter()
            .map(|p| format!("{:.2},{:.2}", x.map(p.rate_kbps), y.map(p.quality)))
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
        for p in curve.points() {
            svg.push_str(&format!(
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                x.map(p.rate_kbps),
                y.map(p.quality)
            ));
        }
        let ly = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT - 170.0;
        svg.push_str(&format!(
            "  <line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            lx + 22.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" fill=\"#333\">{}</text>\n",
            lx + 28.0,
            ly + 4.0,
            xml_escape(label)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use adasharp_core::metrics::RdPoint;

    fn curve(name: &str, rates: &[f64], qualities: &[f64]) -> RdCurve {
        let points = rates
            .iter()
            .zip(qualities)
            .map(|(&rate_kbps, &quality)| RdPoint { rate_kbps, quality })
            .collect();
        RdCurve::new(name, points).unwrap()
    }

    #[test]
    fn renders_one_polyline_per_curve() {
        let a = curve("psnr", &[100.0, 200.0, 400.0, 800.0], &[30.0, 33.0, 36.0, 39.0]);
        let b = curve("psnr", &[80.0, 160.0, 320.0, 640.0], &[30.0, 33.0, 36.0, 39.0]);
        let svg = rd_plot_svg("sweep", "psnr (dB)", &[("anchor".into(), &a), ("ours".into(), &b)]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 8);
        assert!(svg.contains("anchor") && svg.contains("ours"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn single_point_curves_do_not_degenerate() {
        let a = curve("psnr", &[100.0], &[30.0]);
        let svg = rd_plot_svg("sweep", "psnr (dB)", &[("only".into(), &a)]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn labels_are_escaped() {
        let a = curve("q", &[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]);
        let svg = rd_plot_svg("a<b&c", "q", &[("x<y".into(), &a)]);
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(svg.contains("x&lt;y"));
    }
}
