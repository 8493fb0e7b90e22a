//! Convergence tables and their CSV / JSON serializations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "psi_re",
    "psi_im",
    "predicted_re",
    "predicted_im",
    "abs_error",
    "route_disagreement",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    #[serde(serialize_with = "ser_complex")]
    pub psi: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub predicted: Complex64,
    pub abs_error: f64,
    /// `|moment route − Fredholm route|`, or the experiment's second route.
    pub route_disagreement: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AsymptoticsReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
    /// Measure and symbol specs, limit constants, per-experiment extras.
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub assertions: Vec<AssertionOutcome>,
    pub wall_time_s: f64,
}

/// Ten significant digits in scientific notation.
pub fn fmt_sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        format!("{x}")
    }
}

impl AsymptoticsReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    pub fn meta_complex(&mut self, key: &str, z: Complex64) {
        self.meta(key, [z.re, z.im]);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.assertions.push(AssertionOutcome {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn first_failure(&self) -> Option<&AssertionOutcome> {
        self.assertions.iter().find(|a| !a.passed)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.abs_error).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                fmt_sig(r.psi.re),
                fmt_sig(r.psi.im),
                fmt_sig(r.predicted.re),
                fmt_sig(r.predicted.im),
                fmt_sig(r.abs_error),
                fmt_sig(r.route_disagreement),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path, format: Format) -> Result<()> {
        let text = match format {
            Format::Csv => self.to_csv_string()?,
            Format::Json => self.to_json_string()? + "\n",
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn median3(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Medians of the first three and the last three values.
pub fn head_tail_medians(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 6 {
        return None;
    }
    Some((median3(&xs[..3]), median3(&xs[xs.len() - 3..])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AsymptoticsReport {
        let mut r = AsymptoticsReport::new("szego");
        for n in [8, 16] {
            r.rows.push(ReportRow {
                n,
                psi: Complex64::new(1.0 / n as f64, -0.25),
                predicted: Complex64::new(1.0, 0.0),
                abs_error: 1.0 / 3.0,
                route_disagreement: 0.0,
            });
        }
        r
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_csv_string().unwrap();
        let lines: Vec<&str> = s.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(
            lines[1],
            "8,1.250000000e-1,-2.500000000e-1,1.000000000e0,0.000000000e0,3.333333333e-1,0.000000000e0"
        );
        assert!(!s.contains('\r'));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn json_has_rows_and_metadata() {
        let mut r = sample();
        r.meta("measure", "lebesgue");
        let v: serde_json::Value = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
        assert_eq!(v["metadata"]["measure"], "lebesgue");
        assert_eq!(v["rows"][1]["n"], 16);
        assert_eq!(v["rows"][0]["psi"][1], -0.25);
    }

    #[test]
    fn medians() {
        assert_eq!(head_tail_medians(&[3.0, 1.0, 2.0, 0.5, 0.1, 0.3]), Some((2.0, 0.3)));
        assert_eq!(head_tail_medians(&[1.0; 5]), None);
    }
}
