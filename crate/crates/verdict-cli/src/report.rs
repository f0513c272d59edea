//! Static SVG/HTML rendering of attribution results.
//!
//! One panel per method, side by side: horizontal signed bars per token,
//! positive (toward Fake) to the right in red, negative (toward Real) to the
//! left in blue. Scores of duplicated surface tokens are aggregated by sum
//! for display; the attribution files keep per-position scores. No
//! timestamps, no randomness: identical attributions render identical
//! markup.

use verdict_core::explain::{Attribution, AttributionComparison};

const PANEL_WIDTH: f64 = 360.0;
const ROW_HEIGHT: f64 = 22.0;
const LABEL_WIDTH: f64 = 110.0;
const TOP_PAD: f64 = 30.0;
const POSITIVE_COLOR: &str = "#b03a2e";
const NEGATIVE_COLOR: &str = "#2471a3";

/// Sum scores by surface form, keeping first-occurrence order.
fn aggregate_by_surface(attr: &Attribution) -> Vec<(String, f64)> {
    let mut order: Vec<String> = Vec::new();
    let mut totals: Vec<f64> = Vec::new();
    for (token, score) in attr.tokens.iter().zip(&attr.scores) {
        match order.iter().position(|t| t == token) {
            Some(i) => totals[i] += score,
            None => {
                order.push(token.clone());
                totals.push(*score);
            }
        }
    }
    order.into_iter().zip(totals).collect()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render one method panel as a standalone SVG element.
pub fn attribution_svg(attr: &Attribution) -> String {
    let rows = aggregate_by_surface(attr);
    let max_abs = rows
        .iter()
        .map(|(_, s)| s.abs())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let bar_span = (PANEL_WIDTH - LABEL_WIDTH - 20.0) / 2.0;
    let center_x = LABEL_WIDTH + bar_span;
    let height = TOP_PAD + rows.len() as f64 * ROW_HEIGHT + 10.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {PANEL_WIDTH} {height}\" role=\"img\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"18\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"13\" font-weight=\"bold\">{}</text>\n",
        PANEL_WIDTH / 2.0,
        xml_escape(attr.method.label())
    ));
    svg.push_str(&format!(
        "  <line x1=\"{center_x:.1}\" y1=\"{TOP_PAD:.1}\" x2=\"{center_x:.1}\" y2=\"{:.1}\" \
         stroke=\"#999\" stroke-width=\"1\"/>\n",
        height - 8.0
    ));
    for (i, (token, score)) in rows.iter().enumerate() {
        let y = TOP_PAD + i as f64 * ROW_HEIGHT;
        let bar_w = score.abs() / max_abs * bar_span;
        let (x, color) = if *score >= 0.0 {
            (center_x, POSITIVE_COLOR)
        } else {
            (center_x - bar_w, NEGATIVE_COLOR)
        };
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"12\">{}</text>\n",
            LABEL_WIDTH - 6.0,
            y + 14.0,
            xml_escape(token)
        ));
        svg.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{:.1}\" width=\"{:.2}\" height=\"14\" fill=\"{color}\"/>\n",
            y + 3.0,
            bar_w.max(0.5)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"10\" \
             fill=\"#444\">{:+.4}</text>\n",
            center_x + bar_span + 4.0,
            y + 14.0,
            score
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Standalone HTML report: the instance, one SVG panel per method, and the
/// pairwise agreement table.
pub fn render_explanation_html(
    text: &str,
    attributions: &[Attribution],
    comparisons: &[AttributionComparison],
) -> String {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n");
    html.push_str("<title>Token attribution report</title>\n<style>\n");
    html.push_str(
        "body { font-family: sans-serif; margin: 2em; }\n\
         .panels { display: flex; gap: 24px; flex-wrap: wrap; }\n\
         .panel { border: 1px solid #ddd; padding: 8px; }\n\
         table { border-collapse: collapse; margin-top: 1em; }\n\
         td, th { border: 1px solid #ccc; padding: 4px 10px; font-size: 13px; }\n\
         .legend { color: #555; font-size: 13px; }\n",
    );
    html.push_str("</style>\n</head>\n<body>\n");
    html.push_str("<h1>Token attribution report</h1>\n");
    html.push_str(&format!(
        "<p><strong>Instance:</strong> <code>{}</code></p>\n",
        xml_escape(text)
    ));
    html.push_str(
        "<p class=\"legend\">Bars to the right (red) push toward Fake; bars to the left (blue) \
         push toward Real. Duplicated tokens are aggregated by surface form for display.</p>\n",
    );
    html.push_str("<div class=\"panels\">\n");
    for attr in attributions {
        html.push_str("<div class=\"panel\">\n");
        html.push_str(&attribution_svg(attr));
        html.push_str(&format!(
            "<p class=\"legend\">base value {:.4}, {} model evaluations</p>\n",
            attr.base_value, attr.meta.n_samples
        ));
        html.push_str("</div>\n");
    }
    html.push_str("</div>\n");

    if !comparisons.is_empty() {
        html.push_str("<h2>Method agreement</h2>\n<table>\n<tr><th>Pair</th><th>Top-k</th>");
        html.push_str("<th>Jaccard</th><th>Sign agreement</th><th>Rank correlation</th></tr>\n");
        for c in comparisons {
            html.push_str(&format!(
                "<tr><td>{} vs {}</td><td>{}</td><td>{:.3}</td><td>{:.3}</td><td>{:.3}</td></tr>\n",
                xml_escape(&c.method_a),
                xml_escape(&c.method_b),
                c.top_k,
                c.jaccard,
                c.sign_agreement,
                c.rank_correlation
            ));
        }
        html.push_str("</table>\n");
    }
    html.push_str("</body>\n</html>\n");
    html
}
