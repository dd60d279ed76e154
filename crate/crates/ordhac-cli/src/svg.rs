//! Minimal SVG line-chart emitter for benchmark output: a grid of panels,
//! each with labelled axes, one polyline per series, and optional shaded
//! uncertainty bands. Pure string building, no drawing dependencies.

/// One curve in a panel. `band`, when present, holds `(x, low, high)`
/// triples rendered as a translucent ribbon behind the line.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    pub band: Option<Vec<(f64, f64, f64)>>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 52.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 58.0;

/// Render the panels as a single SVG document laid out in `columns` columns.
pub fn render_grid(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns);
    let width = PANEL_W * columns.min(panels.len().max(1)) as f64;
    let height = PANEL_H * rows.max(1) as f64;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (idx, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (idx % columns) as f64;
        let oy = PANEL_H * (idx / columns) as f64;
        render_panel(&mut out, panel, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, x1, y0, y1) = data_bounds(panel);
    let sx = |x: f64| ox + MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| oy + MARGIN_T + plot_h - (y - y0) / (y1 - y0) * plot_h;

    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-weight=\"bold\">{}</text>\n",
        ox + PANEL_W / 2.0,
        oy + 16.0,
        escape(&panel.title)
    ));
    // Axes.
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" \
         stroke=\"#999\"/>\n",
        ox + MARGIN_L,
        oy + MARGIN_T
    ));
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" fill=\"#555\">{}</text>\n",
            sx(x),
            oy + MARGIN_T + plot_h + 14.0,
            trim_number(x)
        ));
    }
    for y in [y0, y1] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#555\">{}</text>\n",
            ox + MARGIN_L - 4.0,
            sy(y) + 4.0,
            trim_number(y)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
        ox + MARGIN_L + plot_w / 2.0,
        oy + MARGIN_T + plot_h + 28.0,
        escape(&panel.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\" \
         transform=\"rotate(-90 {} {})\">{}</text>\n",
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        ox + 14.0,
        oy + MARGIN_T + plot_h / 2.0,
        escape(&panel.y_label)
    ));

    for series in &panel.series {
        if let Some(band) = &series.band {
            if band.len() >= 2 {
                let mut pts: Vec<String> = band
                    .iter()
                    .map(|&(x, _, hi)| format!("{:.2},{:.2}", sx(x), sy(hi.clamp(y0, y1))))
                    .collect();
                for &(x, lo, _) in band.iter().rev() {
                    pts.push(format!("{:.2},{:.2}", sx(x), sy(lo.clamp(y0, y1))));
                }
                out.push_str(&format!(
                    "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                    pts.join(" "),
                    series.color
                ));
            }
        }
    }
    for series in &panel.series {
        if series.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y.clamp(y0, y1))))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"/>\n",
            pts.join(" "),
            series.color
        ));
        for p in &pts {
            let (px, py) = p.split_once(',').unwrap();
            out.push_str(&format!(
                "<circle cx=\"{px}\" cy=\"{py}\" r=\"2.2\" fill=\"{}\"/>\n",
                series.color
            ));
        }
    }
    // Legend along the bottom edge of the panel.
    let mut lx = ox + MARGIN_L;
    let ly = oy + PANEL_H - 14.0;
    for series in &panel.series {
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            ly - 4.0,
            lx + 16.0,
            ly - 4.0,
            series.color
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{ly}\" fill=\"#333\">{}</text>\n",
            lx + 20.0,
            escape(&series.label)
        ));
        lx += 24.0 + 7.0 * series.label.len() as f64;
    }
}

/// Bounds over every point and band edge, padded so flat data stays visible.
fn data_bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for series in &panel.series {
        for &(x, y) in &series.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if let Some(band) = &series.band {
            for &(_, lo, hi) in band {
                y0 = y0.min(lo);
                y1 = y1.max(hi);
            }
        }
    }
    if !x0.is_finite() || !x1.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() || !y1.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    } else {
        let pad = (y1 - y0) * 0.05;
        y0 -= pad;
        y1 += pad;
    }
    (x0, x1, y0, y1)
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
