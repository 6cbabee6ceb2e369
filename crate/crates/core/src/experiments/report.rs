use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// One line of a study table.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub level: usize,
    /// Study-specific parameter: stretch factor, strip width or degree.
    pub param: Option<f64>,
    pub dofs: usize,
    pub max_h: f64,
    /// Largest circumradius-to-inradius ratio.
    pub kappa: f64,
    pub quasi_uniformity: f64,
    /// The measured constant; `+∞` for a kernel.
    pub value: f64,
    /// Secondary quantity documented per study.
    pub aux: Option<f64>,
    /// Empty, or a short reason this row is not a regular measurement.
    pub flag: String,
    /// Seconds; not part of the CSV so reruns compare byte for byte.
    pub wall_time: f64,
}

impl StudyRow {
    pub fn is_flagged(&self) -> bool {
        !self.flag.is_empty()
    }
}

/// Rows of one study in level order.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyTable {
    pub name: String,
    /// Column label of [`StudyRow::value`].
    pub value_label: String,
    /// Column label of [`StudyRow::param`].
    pub param_label: String,
    /// Column label of [`StudyRow::aux`].
    pub aux_label: String,
    pub rows: Vec<StudyRow>,
}

/// Fixed-width scientific notation; `inf`/`nan` spelled out.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.15e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl StudyTable {
    pub fn new(name: &str, value_label: &str, param_label: &str, aux_label: &str) -> Self {
        StudyTable {
            name: name.into(),
            value_label: value_label.into(),
            param_label: param_label.into(),
            aux_label: aux_label.into(),
            rows: Vec::new(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(StudyRow::is_flagged)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "level,{},dofs,max_h,kappa,quasi_uniformity,{},{},flag",
            self.param_label, self.value_label, self.aux_label
        );
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(format_value).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.level,
                opt(r.param),
                r.dofs,
                format_value(r.max_h),
                format_value(r.kappa),
                format_value(r.quasi_uniformity),
                format_value(r.value),
                opt(r.aux),
                csv_field(&r.flag)
            );
        }
        out
    }

    /// Line plot of the finite values against `log₁₀ h`.
    pub fn to_svg(&self) -> String {
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.value.is_finite() && r.max_h > 0.0)
            .map(|r| (r.max_h.log10(), r.value))
            .collect();
        line_plot_svg(&self.name, "log10(max h)", &self.value_label, &points)
    }

    /// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.svg`.
    pub fn write(&self, dir: &Path, stem: &str) -> std::io::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{stem}.csv"));
        let svg = dir.join(format!("{stem}.svg"));
        fs::write(&csv, self.to_csv())?;
        fs::write(&svg, self.to_svg())?;
        Ok((csv, svg))
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Hand-rolled line plot with markers; non-finite points are dropped.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let points: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (w, h, pad) = (640.0, 400.0, 60.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        w / 2.0,
        xml_escape(title)
    );
    let (x0, x1, y0, y1) = (pad, w - pad / 2.0, h - pad, pad);
    let _ = writeln!(
        out,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        (x0 + x1) / 2.0,
        h - 15.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    );
    if !points.is_empty() {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi - lo > 1e-12 * hi.abs().max(1.0) {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (xa, xb) = span(&mut points.iter().map(|p| p.0));
        let (ya, yb) = span(&mut points.iter().map(|p| p.1));
        let sx = |x: f64| x0 + (x - xa) / (xb - xa) * (x1 - x0);
        let sy = |y: f64| y0 - (y - ya) / (yb - ya) * (y0 - y1);
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
            path.join(" ")
        );
        for &(x, y) in &points {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, sx(x), sy(y));
        }
        for (v, anchor_y) in [(ya, y0), (yb, y1)] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{:.4}</text>"#,
                x0 - 5.0,
                anchor_y + 4.0,
                v
            );
        }
        for (v, anchor_x) in [(xa, x0), (xb, x1)] {
            let _ = writeln!(
                out,
                r#"<text x="{anchor_x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{:.3}</text>"#,
                y0 + 16.0,
                v
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
