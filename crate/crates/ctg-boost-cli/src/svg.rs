//! Hand-emitted SVG charts: polyline charts with optional error bars and
//! stacked bar charts.
//!
//! Each chart is one self-contained, well-formed XML document with an
//! explicit `width`/`height`, and embeds the table it was drawn from as a
//! leading comment so a reader can audit the pixels against the numbers.
//! Emission is pure text formatting — same input, same bytes.

/// Chart colour cycle (one entry per series or segment).
pub const PALETTE: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

/// One polyline of a line chart.
pub struct Series {
    pub name: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
    /// Symmetric vertical error bar half-heights, one per point.
    pub bars: Option<Vec<f64>>,
}

/// Axis frame of a line chart.
pub struct ChartFrame {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

/// Escapes text nodes and attribute values.
fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Makes arbitrary text safe inside an XML comment (no `--` runs).
fn comment_escape(s: &str) -> String {
    let mut t = s.replace("--", "- -");
    while t.contains("--") {
        t = t.replace("--", "- -");
    }
    t
}

/// Short numeric label: up to four decimals, trailing zeros trimmed.
fn fmt_num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Maps a data x to a pixel x within the plot area.
fn px(x: f64, range: (f64, f64)) -> f64 {
    let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let span = range.1 - range.0;
    if span == 0.0 {
        return MARGIN_LEFT + w / 2.0;
    }
    MARGIN_LEFT + (x - range.0) / span * w
}

/// Maps a data y to a pixel y within the plot area (origin bottom-left).
fn py(y: f64, range: (f64, f64)) -> f64 {
    let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let span = range.1 - range.0;
    if span == 0.0 {
        return MARGIN_TOP + h / 2.0;
    }
    HEIGHT - MARGIN_BOTTOM - (y - range.0) / span * h
}

/// Opens the document: root element, data comment, title.
fn chart_head(out: &mut String, title: &str, data: &str) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    out.push_str(&format!("<!-- source data:\n{}\n-->\n", comment_escape(data)));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));
}

/// Draws the axis lines, tick marks, tick labels and axis titles.
fn axes(
    out: &mut String,
    x_label: &str,
    y_label: &str,
    x_range: (f64, f64),
    y_range: (f64, f64),
) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = x_range.0 + f * (x_range.1 - x_range.0);
        let yv = y_range.0 + f * (y_range.1 - y_range.0);
        let xp = px(xv, x_range);
        let yp = py(yv, y_range);
        out.push_str(&format!(
            "<line x1=\"{xp:.1}\" y1=\"{y0}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{xp:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            y0 + 20.0,
            fmt_num(xv)
        ));
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{x0}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            x0 - 9.0,
            yp + 4.0,
            fmt_num(yv)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        xml_escape(x_label)
    ));
    out.push_str(&format!(
        "<text transform=\"rotate(-90)\" x=\"{:.1}\" y=\"18\" text-anchor=\"middle\" \
         font-size=\"13\">{}</text>\n",
        -(y0 + y1) / 2.0,
        xml_escape(y_label)
    ));
}

/// Draws a colour-swatch legend in the top-right corner of the plot.
fn legend(out: &mut String, entries: &[(String, String)]) {
    let x = WIDTH - MARGIN_RIGHT - 190.0;
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        out.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n",
            y - 10.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"12\">{}</text>\n",
            x + 18.0,
            xml_escape(name)
        ));
    }
}

/// A polyline chart of one or more series over the given axis ranges.
pub fn line_chart(frame: &ChartFrame, series: &[Series], data: &str) -> String {
    let mut out = String::new();
    chart_head(&mut out, &frame.title, data);
    axes(&mut out, &frame.x_label, &frame.y_label, frame.x_range, frame.y_range);
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x, frame.x_range), py(y, frame.y_range)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
            s.color,
            pts.join(" ")
        ));
        if let Some(bars) = &s.bars {
            for (&(x, y), &half) in s.points.iter().zip(bars) {
                if half <= 0.0 {
                    continue;
                }
                let xp = px(x, frame.x_range);
                let lo = py(y - half, frame.y_range);
                let hi = py(y + half, frame.y_range);
                out.push_str(&format!(
                    "<line x1=\"{xp:.2}\" y1=\"{lo:.2}\" x2=\"{xp:.2}\" y2=\"{hi:.2}\" \
                     stroke=\"{}\"/>\n",
                    s.color
                ));
                for yy in [lo, hi] {
                    out.push_str(&format!(
                        "<line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" \
                         stroke=\"{}\"/>\n",
                        xp - 4.0,
                        xp + 4.0,
                        s.color
                    ));
                }
            }
        }
    }
    let entries: Vec<(String, String)> =
        series.iter().map(|s| (s.name.clone(), s.color.clone())).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// A stacked vertical bar chart: one bar per category, one coloured
/// segment per series, segment heights proportional to `counts`.
///
/// `counts[c][s]` is the height of segment `s` in category `c`.
pub fn stacked_bars(
    title: &str,
    x_label: &str,
    y_label: &str,
    categories: &[&str],
    segments: &[&str],
    counts: &[Vec<u64>],
    data: &str,
) -> String {
    assert_eq!(categories.len(), counts.len(), "one count row per category");
    let y_max = counts.iter().map(|row| row.iter().sum::<u64>()).max().unwrap_or(0).max(1) as f64;
    let y_range = (0.0, y_max);
    let mut out = String::new();
    chart_head(&mut out, title, data);
    axes(&mut out, x_label, y_label, (0.0, 1.0), y_range);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let slot = plot_w / categories.len() as f64;
    let bar_w = slot * 0.55;
    for (c, (name, row)) in categories.iter().zip(counts).enumerate() {
        assert_eq!(row.len(), segments.len(), "one count per segment");
        let cx = MARGIN_LEFT + slot * (c as f64 + 0.5);
        let mut acc = 0u64;
        for (s, &n) in row.iter().enumerate() {
            if n > 0 {
                let base = py(acc as f64, y_range);
                let top = py((acc + n) as f64, y_range);
                out.push_str(&format!(
                    "<rect x=\"{:.2}\" y=\"{top:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" \
                     fill=\"{}\"/>\n",
                    cx - bar_w / 2.0,
                    base - top,
                    PALETTE[s % PALETTE.len()]
                ));
            }
            acc += n;
        }
        out.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 20.0,
            xml_escape(name)
        ));
    }
    let entries: Vec<(String, String)> = segments
        .iter()
        .enumerate()
        .map(|(s, name)| (name.to_string(), PALETTE[s % PALETTE.len()].to_string()))
        .collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}
