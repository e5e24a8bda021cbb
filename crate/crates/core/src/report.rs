//! Report emitters for sweep results: normalized CSV, a log-log SVG
//! scatter, or an aligned text table.

use crate::error::{Error, Result};
use crate::sweep::{CsvTable, CSV_SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    SvgScatter,
    Text,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(ReportFormat::Csv),
            "svg" | "svg_scatter" => Some(ReportFormat::SvgScatter),
            "text" => Some(ReportFormat::Text),
            _ => None,
        }
    }
}

// Measurement columns in priority order for the scatter's y value.
const Y_PRIORITY: [&str; 8] = [
    "card_aa_plus_a",
    "card_aa_plus_ma",
    "card_prod",
    "card_sum",
    "card_diff",
    "card_ratio",
    "e_plus",
    "e_mult",
];

fn numeric(s: &str) -> Option<f64> {
    if s.is_empty() || s == "limit" {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        return Some(p.parse::<f64>().ok()? / q.parse::<f64>().ok()?);
    }
    s.parse().ok()
}

/// Renders the table in the chosen format. Empty tables are an error.
pub fn emit_report(table: &CsvTable, format: ReportFormat) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InputFormat {
            line: 0,
            msg: "no records to report".into(),
        });
    }
    Ok(match format {
        ReportFormat::Csv => emit_csv(table),
        ReportFormat::Text => emit_text(table),
        ReportFormat::SvgScatter => emit_svg(table),
    })
}

fn emit_csv(table: &CsvTable) -> String {
    let mut out = format!("# schema: {CSV_SCHEMA}\n");
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn emit_text(table: &CsvTable) -> String {
    let ncols = table.columns.len();
    let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
    for row in &table.rows {
        for (i, cell) in row.iter().enumerate().take(ncols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let render_row = |cells: &[String], widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:>width$}", width = widths[i]));
        }
        line.trim_end().to_string()
    };
    out.push_str(&render_row(&table.columns, &widths));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (ncols - 1)));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&render_row(row, &widths));
        out.push('\n');
    }
    out
}

/// One circle marker per record at (log n, log y), where y is the first
/// populated measurement column in priority order.
fn emit_svg(table: &CsvTable) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 48.0;

    let n_idx = table.column_index("n");
    let mut points: Vec<(f64, f64, String)> = Vec::new();
    for row in &table.rows {
        let x = n_idx
            .and_then(|i| row.get(i))
            .and_then(|s| numeric(s))
            .unwrap_or(1.0);
        let mut y = None;
        for col in Y_PRIORITY {
            if let Some(i) = table.column_index(col) {
                if let Some(v) = row.get(i).and_then(|s| numeric(s)) {
                    y = Some(v);
                    break;
                }
            }
        }
        let family = table
            .column_index("family")
            .and_then(|i| row.get(i))
            .cloned()
            .unwrap_or_default();
        if let Some(y) = y {
            points.push((x.max(1.0).ln(), y.max(1.0).ln(), family));
        } else {
            // Keep one marker per record even without a usable value.
            points.push((x.max(1.0).ln(), 0.0, family));
        }
    }
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y, _) in &points {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - xmin) / (xmax - xmin) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - ymin) / (ymax - ymin) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">ln n</text>\n",
        W / 2.0,
        H - MARGIN / 3.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 14 {})\">ln size</text>\n",
        14.0,
        H / 2.0,
        H / 2.0
    ));
    for (x, y, family) in &points {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"><title>{family}</title></circle>\n",
            sx(*x),
            sy(*y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
