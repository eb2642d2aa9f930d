//! Trajectory CSV files, SVG line charts and run manifests.
//!
//! CSV is the canonical trajectory format (floats at 17 significant
//! digits so values round-trip exactly); JSON carries tensors and
//! summaries. Charts are plain hand-emitted SVG, deterministic byte for
//! byte: no timestamps, no external plotting machinery.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::flow::{TrajectoryRecord, TrajectoryRow};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
}

/// Format a float with 17 significant digits (a fixed width rather than
/// the shortest exact form, so files stay column-aligned and diffable).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a trajectory record as CSV text.
pub fn trajectory_to_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::new();
    out.push_str(TrajectoryRow::CSV_HEADER);
    out.push('\n');
    for row in &record.rows {
        let vals = row.csv_values();
        let line: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parse a trajectory CSV produced by [`trajectory_to_csv`].
pub fn trajectory_from_csv(text: &str) -> Result<TrajectoryRecord, ReportError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ReportError::MalformedCsv("empty input".into()))?;
    if header.trim() != TrajectoryRow::CSV_HEADER {
        return Err(ReportError::MalformedCsv(format!(
            "unexpected header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(ReportError::MalformedCsv(format!(
                "line {}: expected 12 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut v = [0.0f64; 12];
        for (slot, field) in v.iter_mut().zip(fields.iter()) {
            *slot = field
                .trim()
                .parse::<f64>()
                .map_err(|e| ReportError::MalformedCsv(format!("line {}: {e}", lineno + 2)))?;
        }
        rows.push(TrajectoryRow {
            t: v[0],
            scalar_min: v[1],
            scalar_max: v[2],
            ricci_min: v[3],
            holsec_min: v[4],
            orthbis_min: v[5],
            mu_star: v[6],
            h_max: v[7],
            int_f: v[8],
            env_scalar: v[9],
            env_ricci: v[10],
            env_holsec: v[11],
        });
    }
    if rows.is_empty() {
        return Err(ReportError::MalformedCsv("no data rows".into()));
    }
    Ok(TrajectoryRecord { rows })
}

/// One curve for the chart: a label, points and a dash pattern.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Render a line chart as standalone SVG. Solid lines for simulated
/// bounds, dashed for envelopes; output contains no timestamps.
pub fn render_chart(title: &str, series: &[Series<'_>]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if !x0.is_finite() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 - x0).abs() < 1e-300 {
        x1 = x0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0).max(1e-12);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);
    let palette = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
    ];
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    let _ = write!(
        svg,
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        title
    );
    let _ = write!(
        svg,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB,
        H - MB
    );
    for k in 0..=5 {
        let fx = x0 + (x1 - x0) * k as f64 / 5.0;
        let fy = y0 + (y1 - y0) * k as f64 / 5.0;
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.3}</text>\n",
            sx(fx),
            H - MB + 18.0,
            fx
        );
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
            ML - 6.0,
            sy(fy) + 4.0,
            fy
        );
        let _ = write!(
            svg,
            "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
            sy(fy),
            W - MR,
            sy(fy)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let dash = if s.dashed {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = write!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
            pts.join(" ")
        );
        let ly = MT + 16.0 * i as f64;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            W - MR - 150.0,
            W - MR - 120.0,
            W - MR - 114.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Worst envelope violation of one bound column (positive = violation).
pub fn worst_violation(
    record: &TrajectoryRecord,
    bound: impl Fn(&TrajectoryRow) -> f64,
    env: impl Fn(&TrajectoryRow) -> f64,
) -> f64 {
    record
        .rows
        .iter()
        .map(|r| env(r) - bound(r))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// SVG charts (one per bound, simulated solid vs envelope dashed) plus a
/// plain-text summary listing the worst violation per bound.
pub fn emit_report(record: &TrajectoryRecord) -> (Vec<(String, String)>, String) {
    let t: Vec<f64> = record.times();
    let make = |name: &str,
                bound: fn(&TrajectoryRow) -> f64,
                env: Option<fn(&TrajectoryRow) -> f64>|
     -> (String, String) {
        let mut series = vec![Series {
            label: "simulated",
            points: t
                .iter()
                .zip(record.rows.iter())
                .map(|(&t, r)| (t, bound(r)))
                .collect(),
            dashed: false,
        }];
        if let Some(env) = env {
            series.push(Series {
                label: "envelope",
                points: t
                    .iter()
                    .zip(record.rows.iter())
                    .map(|(&t, r)| (t, env(r)))
                    .collect(),
                dashed: true,
            });
        }
        (format!("{name}.svg"), render_chart(name, &series))
    };
    let charts = vec![
        make("scalar_min", |r| r.scalar_min, Some(|r| r.env_scalar)),
        make("ricci_min", |r| r.ricci_min, Some(|r| r.env_ricci)),
        make("holsec_min", |r| r.holsec_min, Some(|r| r.env_holsec)),
        make("orthbis_min", |r| r.orthbis_min, None),
        make("mu_star", |r| r.mu_star, None),
        make("h_max", |r| r.h_max, None),
    ];
    let mut summary = String::new();
    let _ = writeln!(summary, "rows: {}", record.rows.len());
    let _ = writeln!(
        summary,
        "t span: [{}, {}]",
        fmt_f64(record.rows[0].t),
        fmt_f64(record.rows.last().unwrap().t)
    );
    for (name, bound, env) in [
        (
            "scalar_min",
            (|r: &TrajectoryRow| r.scalar_min) as fn(&TrajectoryRow) -> f64,
            (|r: &TrajectoryRow| r.env_scalar) as fn(&TrajectoryRow) -> f64,
        ),
        ("ricci_min", |r| r.ricci_min, |r| r.env_ricci),
        ("holsec_min", |r| r.holsec_min, |r| r.env_holsec),
    ] {
        let v = worst_violation(record, bound, env);
        let _ = writeln!(
            summary,
            "worst envelope violation for {name}: {} ({})",
            fmt_f64(v),
            if v > 0.0 { "VIOLATED" } else { "contained" }
        );
    }
    let orthbis_ok = record.rows.iter().all(|r| r.orthbis_min > 0.0);
    let _ = writeln!(
        summary,
        "orthogonal bisectional positivity held throughout: {orthbis_ok}"
    );
    (charts, summary)
}

/// Manifest of one CLI run: configuration digest and the produced files
/// with their content digests.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_sha256: String,
    pub wall_clock_ms: u128,
    pub status: String,
    pub files: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        let _ = write!(s, "{b:02x}");
    }
    s
}

impl RunManifest {
    pub fn new(config_text: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            wall_clock_ms: 0,
            status: "ok".into(),
            files: Vec::new(),
        }
    }

    pub fn add_file(&mut self, path: &str, contents: &[u8]) {
        self.files.push(ManifestEntry {
            path: path.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents),
        });
    }
}
