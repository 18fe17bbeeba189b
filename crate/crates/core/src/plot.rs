//! Static SVG rendering for ROC curves and feature-importance bars.
//!
//! Output is plain SVG text with fixed-precision coordinates, so
//! identical inputs render byte-identical files.

use crate::eval::RocCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         fill=\"white\"/>\n<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" \
         font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// ROC plot with one labeled curve per entry and a chance diagonal.
pub fn roc_svg(curves: &[(String, &RocCurve)], title: &str) -> String {
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |fpr: f64| MARGIN + fpr * plot_w;
    let y = |tpr: f64| HEIGHT - MARGIN - tpr * plot_h;

    let mut svg = header(title);
    svg.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#bbb\" \
         stroke-dasharray=\"6,4\"/>\n",
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{tick:.2}</text>\n",
            x(tick),
            HEIGHT - MARGIN + 18.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{tick:.2}</text>\n",
            MARGIN - 8.0,
            y(tick) + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">false positive rate</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">true positive rate</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|(fpr, tpr)| format!("{:.2},{:.2}", x(*fpr), y(*tpr)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"3\"/>\n",
            MARGIN + 12.0,
            MARGIN + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{} \
             (AUC {:.4})</text>\n",
            MARGIN + 40.0,
            ly + 4.0,
            escape(label),
            curve.auc
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Horizontal bar chart of `(label, value)` pairs, largest given first.
pub fn bar_chart_svg(items: &[(String, f64)], title: &str) -> String {
    let mut svg = header(title);
    if items.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let plot_w = WIDTH - MARGIN - 200.0;
    let max = items
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::MIN_POSITIVE, f64::max);
    let bar_h = ((HEIGHT - 2.0 * MARGIN) / items.len() as f64).min(28.0);
    for (i, (label, value)) in items.iter().enumerate() {
        let top = MARGIN + i as f64 * bar_h;
        let w = (value / max) * plot_w;
        svg.push_str(&format!(
            "<rect x=\"180\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
            top,
            w,
            bar_h - 4.0,
            PALETTE[0]
        ));
        svg.push_str(&format!(
            "<text x=\"174\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            top + bar_h / 2.0 + 3.0,
            escape(label)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\">{:.4}</text>\n",
            184.0 + w,
            top + bar_h / 2.0 + 3.0,
            value
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_svg_is_deterministic_and_well_formed() {
        let curve = RocCurve {
            points: vec![(0.0, 0.0), (0.2, 0.8), (1.0, 1.0)],
            auc: 0.9,
        };
        let curves = vec![("adaboost k=10".to_string(), &curve)];
        let a = roc_svg(&curves, "test");
        let b = roc_svg(&curves, "test");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
        assert!(a.contains("AUC 0.9000"));
    }

    #[test]
    fn bar_chart_escapes_labels() {
        let items = vec![("a<b".to_string(), 1.0), ("c".to_string(), 0.5)];
        let svg = bar_chart_svg(&items, "bars & more");
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("bars &amp; more"));
    }
}
