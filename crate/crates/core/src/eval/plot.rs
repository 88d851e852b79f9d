use std::fmt::Write;

use super::CumulativeCurve;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#393b79", "#843c39",
];

/// Pixel layout of the fixed 800x400 canvas.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotLayout {
    pub width: f64,
    pub height: f64,
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
    pub legend_top: f64,
}

impl Default for PlotLayout {
    fn default() -> Self {
        Self { width: 800.0, height: 400.0, left: 70.0, right: 780.0, top: 20.0, bottom: 230.0, legend_top: 282.0 }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn y_range(curves: &[&CumulativeCurve]) -> (f64, f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in curves.iter().flat_map(|c| c.values.iter()) {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0, 0.2);
    }
    if hi - lo < 1e-12 {
        let pad = (lo.abs() * 0.1).max(0.5);
        lo -= pad;
        hi += pad;
    }
    let step = nice_step((hi - lo) / 5.0);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{:.*}", decimals, v)
}

/// Renders cumulative-mean curves against log10 rank as a standalone SVG.
pub fn render_svg(curves: &[&CumulativeCurve], y_label: &str, layout: &PlotLayout) -> String {
    let n_max = curves.iter().map(|c| c.len()).max().unwrap_or(1).max(1);
    let x_span = if n_max > 1 { (n_max as f64).log10() } else { 1.0 };
    let (y_lo, y_hi, y_step) = y_range(curves);
    let px = |k: usize| layout.left + (k as f64).log10() / x_span * (layout.right - layout.left);
    let py = |v: f64| layout.bottom - (v - y_lo) / (y_hi - y_lo) * (layout.bottom - layout.top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif">"#,
        w = layout.width,
        h = layout.height
    );
    let _ = writeln!(s, "<title>{}</title>", escape(y_label));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // axes
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = layout.left,
        r = layout.right,
        t = layout.top,
        b = layout.bottom
    );
    let _ = writeln!(s, r#"<g font-size="10" fill="black">"#);
    let mut p = 0u32;
    while 10f64.powi(p as i32) <= n_max as f64 {
        let k = 10usize.pow(p);
        let x = px(k);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{b5}" stroke="black"/><text x="{x:.2}" y="{ty}" text-anchor="middle">{k}</text>"##,
            b = layout.bottom,
            b5 = layout.bottom + 5.0,
            ty = layout.bottom + 17.0
        );
        p += 1;
    }
    let ticks = ((y_hi - y_lo) / y_step).round() as i64;
    for i in 0..=ticks {
        let v = y_lo + i as f64 * y_step;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{l5}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{label}</text>"##,
            l = layout.left,
            l5 = layout.left - 5.0,
            tx = layout.left - 8.0,
            ty = y + 3.5,
            label = tick_label(v, y_step)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="11">rank k (log scale)</text>"#,
        x = (layout.left + layout.right) / 2.0,
        y = layout.bottom + 34.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {y}) rotate(-90)" text-anchor="middle" font-size="11">mean {label} in top k</text>"#,
        y = (layout.top + layout.bottom) / 2.0,
        label = escape(y_label)
    );
    let _ = writeln!(s, "</g>");

    for (i, c) in curves.iter().enumerate() {
        let mut pts: Vec<String> = Vec::new();
        for (k, v) in c.values.iter().enumerate() {
            let pt = format!("{:.2},{:.2}", px(k + 1), py(*v));
            if pts.last() != Some(&pt) {
                pts.push(pt);
            }
        }
        if pts.len() == 1 {
            // a single rank still needs a visible segment
            pts.push(format!("{:.2},{:.2}", px(1) + 4.0, py(c.values[0])));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }

    let rows = curves.len().div_ceil(2).max(1);
    let row_h = ((layout.height - layout.legend_top - 4.0) / rows as f64).min(14.0);
    let col_w = (layout.right - layout.left + 40.0) / 2.0;
    let _ = writeln!(s, r#"<g font-size="10">"#);
    for (i, c) in curves.iter().enumerate() {
        let x = layout.left - 40.0 + (i / rows) as f64 * col_w;
        let y = layout.legend_top + (i % rows) as f64 * row_h;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y:.2}" x2="{x2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/><text x="{tx}" y="{ty:.2}">{label}</text>"#,
            x2 = x + 18.0,
            color = PALETTE[i % PALETTE.len()],
            tx = x + 22.0,
            ty = y + 3.5,
            label = escape(&c.query_text)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::AttributeName;

    fn curve(text: &str, values: Vec<f64>) -> CumulativeCurve {
        CumulativeCurve { query_id: "q".into(), query_text: text.into(), attribute: AttributeName::Grade, values }
    }

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .map(|n| {
                n.attribute("points")
                    .unwrap()
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn flat_curve_is_horizontal() {
        let c = curve("flat & <odd> \"text\"", vec![3.0; 50]);
        let svg = render_svg(&[&c], "grade", &PlotLayout::default());
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].iter().all(|p| p.1 == lines[0][0].1));
        assert!(svg.contains("flat &amp; &lt;odd&gt; &quot;text&quot;"));
    }

    #[test]
    fn decades_equally_spaced() {
        let c = curve("q", (1..=1000).map(|v| v as f64).collect());
        let svg = render_svg(&[&c], "grade", &PlotLayout::default());
        let pts = &polylines(&svg)[0];
        // no duplicate consecutive points, so index k-1 is rank k here
        let (x1, x10, x100) = (pts[0].0, pts[9].0, pts[99].0);
        assert!(((x10 - x1) - (x100 - x10)).abs() < 0.02);
        assert_eq!(x1, 70.0);
    }

    #[test]
    fn single_point_curve_still_draws() {
        let c = curve("q", vec![1.0]);
        let svg = render_svg(&[&c], "grade", &PlotLayout::default());
        assert_eq!(polylines(&svg)[0].len(), 2);
    }
}
