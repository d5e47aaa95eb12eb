use std::fmt::Write as _;

use serde::Serialize;

use super::quantile;
use crate::error::{Error, Result};

/// Five-number summary of one group, with Tukey whiskers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxStats {
    pub group: String,
    pub count: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// Most extreme values within 1.5 IQR of the box.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn from_values(group: &str, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "group '{group}' has no values"
            )));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
        let fence = 1.5 * (q3 - q1);
        let (lo, hi) = (q1 - fence, q3 + fence);
        let inside = || v.iter().copied().filter(|&x| x >= lo && x <= hi);
        Ok(BoxStats {
            group: group.to_string(),
            count: v.len(),
            q1,
            median,
            q3,
            whisker_low: inside().fold(f64::INFINITY, f64::min),
            whisker_high: inside().fold(f64::NEG_INFINITY, f64::max),
            outliers: v.iter().copied().filter(|&x| x < lo || x > hi).collect(),
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Groups `value_column` by `group_column` (groups in order of first
/// appearance) and computes one box per group. Rows with an empty value are
/// ignored; `filter` keeps only rows whose column equals the given value.
pub fn box_stats(
    csv_text: &str,
    group_column: &str,
    value_column: &str,
    filter: Option<(&str, &str)>,
) -> Result<Vec<BoxStats>> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidArgument(format!("CSV has no column '{name}'")))
    };
    let (gi, vi) = (column(group_column)?, column(value_column)?);
    let filter = filter.map(|(c, v)| column(c).map(|i| (i, v))).transpose()?;
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: line + 2,
            message: e.to_string(),
        })?;
        if let Some((fi, fv)) = filter {
            if record.get(fi) != Some(fv) {
                continue;
            }
        }
        let group = record.get(gi).unwrap_or_default();
        let pos = match groups.iter().position(|(g, _)| g == group) {
            Some(p) => p,
            None => {
                groups.push((group.to_string(), Vec::new()));
                groups.len() - 1
            }
        };
        let raw = record.get(vi).unwrap_or_default().trim();
        if raw.is_empty() {
            continue;
        }
        let value: f64 = raw.parse().map_err(|_| Error::Parse {
            line: line + 2,
            message: format!("'{raw}' is not a number"),
        })?;
        groups[pos].1.push(value);
    }
    if groups.is_empty() {
        return Err(Error::InvalidArgument("no rows to plot".into()));
    }
    groups
        .iter()
        .map(|(g, values)| BoxStats::from_values(g, values))
        .collect()
}

/// Renders boxes as a standalone SVG 1.1 document.
pub fn render_svg(boxes: &[BoxStats], x_label: &str, y_label: &str) -> String {
    const LEFT: f64 = 70.0;
    const TOP: f64 = 30.0;
    const PLOT_H: f64 = 260.0;
    const SLOT: f64 = 70.0;
    let width = LEFT + SLOT * boxes.len() as f64 + 20.0;
    let height = TOP + PLOT_H + 60.0;

    let all = boxes.iter().flat_map(|b| {
        [b.whisker_low, b.whisker_high]
            .into_iter()
            .chain(b.outliers.iter().copied())
    });
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 0.5 };
        lo -= pad;
        hi += pad;
    }
    let y = |v: f64| TOP + PLOT_H * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        TOP + PLOT_H
    );
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{yy:.2}" x2="{LEFT}" y2="{yy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{v:.3}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            yy + 3.0
        );
    }
    for (i, b) in boxes.iter().enumerate() {
        let cx = LEFT + SLOT * (i as f64 + 0.5);
        let half = SLOT * 0.3;
        let _ = writeln!(svg, r#"<g>"#);
        let _ = writeln!(
            svg,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            y(b.whisker_high),
            y(b.q3)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            y(b.q1),
            y(b.whisker_low)
        );
        for w in [b.whisker_low, b.whisker_high] {
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
                cx - half / 2.0,
                y(w),
                cx + half / 2.0,
                y(w)
            );
        }
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#cfe0f3" stroke="black"/>"##,
            cx - half,
            y(b.q3),
            2.0 * half,
            y(b.q1) - y(b.q3)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            y(b.median),
            cx + half,
            y(b.median)
        );
        for &o in &b.outliers {
            let _ = writeln!(
                svg,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="none" stroke="black"/>"#,
                y(o)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            TOP + PLOT_H + 16.0,
            escape(&b.group)
        );
        let _ = writeln!(svg, r#"</g>"#);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        LEFT + SLOT * boxes.len() as f64 / 2.0,
        TOP + PLOT_H + 40.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0,
        escape(y_label)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Box plot of `value_column` grouped by `group_column`.
pub fn emit_svg_boxplot(
    csv_text: &str,
    group_column: &str,
    value_column: &str,
    filter: Option<(&str, &str)>,
) -> Result<String> {
    let boxes = box_stats(csv_text, group_column, value_column, filter)?;
    Ok(render_svg(&boxes, group_column, value_column))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "g,v,kind\na,1,x\na,2,x\na,3,x\na,4,x\na,100,x\nb,5,y\nb,,y\nb,7,y\n";

    #[test]
    fn tukey_boxes() {
        let boxes = box_stats(CSV, "g", "v", None).unwrap();
        assert_eq!(boxes.len(), 2);
        let a = &boxes[0];
        assert_eq!((a.q1, a.median, a.q3), (2.0, 3.0, 4.0));
        assert_eq!((a.whisker_low, a.whisker_high), (1.0, 4.0));
        assert_eq!(a.outliers, vec![100.0]);
        assert_eq!(boxes[1].count, 2);
        let only_y = box_stats(CSV, "g", "v", Some(("kind", "y"))).unwrap();
        assert_eq!(only_y.len(), 1);
        assert_eq!(only_y[0].group, "b");
    }

    #[test]
    fn constant_group_is_degenerate() {
        let b = BoxStats::from_values("c", &[0.5; 4]).unwrap();
        assert_eq!(
            (b.q1, b.median, b.q3, b.whisker_low, b.whisker_high),
            (0.5, 0.5, 0.5, 0.5, 0.5)
        );
        assert!(b.outliers.is_empty());
        let svg = render_svg(&[b], "g", "v");
        assert!(roxmltree::Document::parse(&svg).is_ok());
    }

    #[test]
    fn errors() {
        assert!(box_stats(CSV, "missing", "v", None).is_err());
        assert!(box_stats("g,v\na,\n", "g", "v", None).is_err());
        assert!(box_stats("g,v\na,zz\n", "g", "v", None).is_err());
    }

    #[test]
    fn valid_deterministic_svg() {
        let svg = emit_svg_boxplot(CSV, "g", "v", None).unwrap();
        assert_eq!(svg, emit_svg_boxplot(CSV, "g", "v", None).unwrap());
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("version"), Some("1.1"));
        let groups: Vec<_> = root.children().filter(|n| n.has_tag_name("g")).collect();
        assert_eq!(groups.len(), 2);
        let label = |g: &roxmltree::Node| {
            g.children()
                .rfind(|n| n.has_tag_name("text"))
                .unwrap()
                .text()
                .unwrap()
                .to_string()
        };
        assert_eq!(label(&groups[0]), "a");
        assert_eq!(label(&groups[1]), "b");
    }
}
