//! CSV and SVG emission. CSVs carry a schema-version comment line followed by
//! the header; numbers use Rust's locale-independent shortest round-trip
//! formatting.

use std::fmt::Write as _;
use std::path::Path;

pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(schema: &str, header: &[&str]) -> Self {
        let mut body = String::new();
        let _ = writeln!(body, "# schema: {schema} v1");
        let _ = writeln!(body, "{}", header.join(","));
        Csv { body }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.body, "{}", fields.join(","));
    }

    pub fn write(self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.body)?;
        Ok(())
    }
}

pub fn field<T: std::fmt::Display>(v: T) -> String {
    v.to_string()
}

/// Minimal SVG boxplot: one box per labeled sample set, values in [lo, hi].
pub fn boxplot_svg(title: &str, groups: &[(String, Vec<f64>)]) -> String {
    let width = 120 * groups.len().max(1) + 80;
    let height = 360;
    let (lo, hi) = groups
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo - 0.02, hi + 0.02) } else { (0.0, 1.0) };
    let y = |v: f64| 320.0 - 280.0 * (v - lo) / (hi - lo).max(1e-12);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n\
         <text x=\"10\" y=\"20\" font-size=\"14\">{title}</text>\n"
    );
    for (i, (label, values)) in groups.iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        let mut v = values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        let (min, q1, med, q3, max) = (v[0], q(0.25), q(0.5), q(0.75), v[v.len() - 1]);
        let x = 100 + 120 * i;
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{:.1}\" x2=\"{x}\" y2=\"{:.1}\" stroke=\"black\"/>",
            y(min),
            y(max)
        );
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{:.1}\" width=\"60\" height=\"{:.1}\" fill=\"#9ecae1\" stroke=\"black\"/>",
            x - 30,
            y(q3),
            (y(q1) - y(q3)).max(1.0)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{:.1}\" x2=\"{}\" y2=\"{:.1}\" stroke=\"black\" stroke-width=\"2\"/>",
            x - 30,
            y(med),
            x + 30,
            y(med)
        );
        let _ = writeln!(
            s,
            "<text x=\"{x}\" y=\"345\" font-size=\"11\" text-anchor=\"middle\">{label}</text>"
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Minimal SVG line chart over (x, y) series.
pub fn curves_svg(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let width = 640;
    let height = 400;
    let xs: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).collect();
    let bound = |v: &[f64]| {
        v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    };
    let (x0, x1) = bound(&xs);
    let (y0, y1) = bound(&ys);
    let px = |x: f64| 60.0 + 540.0 * (x - x0) / (x1 - x0).max(1e-12);
    let py = |y: f64| 350.0 - 300.0 * (y - y0) / (y1 - y0).max(1e-12);
    let palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n\
         <text x=\"10\" y=\"20\" font-size=\"14\">{title}</text>\n"
    );
    for (i, (label, points)) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let path: Vec<String> =
            points.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>",
            path.join(" ")
        );
        let _ = writeln!(
            s,
            "<text x=\"565\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{label}</text>",
            40 + 16 * i
        );
    }
    s.push_str("</svg>\n");
    s
}
