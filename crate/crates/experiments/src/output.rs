//! Row types emitted by the runners and the CSV/JSON writers.
//!
//! CSV: header row, lowercase snake_case column names, LF line endings,
//! shortest-round-trip float formatting — byte-identical for identical runs.
//! JSON (`--format json`): a records array with the same field names.

use serde::Serialize;

use crate::error::Result;

pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// One λ of the cost-curve experiment. The λ = 0 row is the unregularized
/// squared Wasserstein distance; its entropy split does not exist.
#[derive(Debug, Clone, Serialize)]
pub struct CostCurveRow {
    pub lambda: f64,
    pub total: f64,
    pub transport_term: f64,
    pub entropy_term: Option<f64>,
    pub relative_total: Option<f64>,
}

impl CsvRecord for CostCurveRow {
    fn header() -> &'static [&'static str] {
        &["lambda", "total", "transport_term", "entropy_term", "relative_total"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt(self.lambda),
            fmt(self.total),
            fmt(self.transport_term),
            fmt_opt(self.entropy_term),
            fmt_opt(self.relative_total),
        ]
    }
}

/// One grid node of a coupling-contour run, with the coupling parameters
/// alongside.
#[derive(Debug, Clone, Serialize)]
pub struct ContourRow {
    pub lambda: f64,
    pub x: f64,
    pub y: f64,
    pub density: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub sigma_cross: f64,
}

impl CsvRecord for ContourRow {
    fn header() -> &'static [&'static str] {
        &["lambda", "x", "y", "density", "mean_x", "mean_y", "sigma_cross"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt(self.lambda),
            fmt(self.x),
            fmt(self.y),
            fmt(self.density),
            fmt(self.mean_x),
            fmt(self.mean_y),
            fmt(self.sigma_cross),
        ]
    }
}

/// One embedded distribution of an MDS run.
#[derive(Debug, Clone, Serialize)]
pub struct MdsRow {
    pub lambda: f64,
    pub r: usize,
    pub k: usize,
    pub x: f64,
    pub y: f64,
}

impl CsvRecord for MdsRow {
    fn header() -> &'static [&'static str] {
        &["lambda", "r", "k", "x", "y"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt(self.lambda),
            self.r.to_string(),
            self.k.to_string(),
            fmt(self.x),
            fmt(self.y),
        ]
    }
}

/// One benchmark cell: average prediction error with its 95% confidence
/// halfwidth.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub dim: usize,
    pub sample_size: usize,
    pub lambda: f64,
    pub mean_error: f64,
    pub ci_halfwidth: f64,
    pub replications: usize,
}

impl CsvRecord for BenchmarkRow {
    fn header() -> &'static [&'static str] {
        &["dim", "sample_size", "lambda", "mean_error", "ci_halfwidth", "replications"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.dim.to_string(),
            self.sample_size.to_string(),
            fmt(self.lambda),
            fmt(self.mean_error),
            fmt(self.ci_halfwidth),
            self.replications.to_string(),
        ]
    }
}

/// One cell of the oracle verification run.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub var1: f64,
    pub var2: f64,
    pub lambda: f64,
    pub cross_closed: f64,
    pub cross_oracle: f64,
    pub cross_rel_err: f64,
    pub total_closed: f64,
    pub total_oracle: f64,
    pub total_rel_err: f64,
    /// Measured gap (oracle − log(2πλ)-variant total)/(2λn); log π ≈ 1.14473
    /// indicates the corrected −2λn·log(2λ) constant is the one the oracle
    /// supports.
    pub entropy_constant_gap: f64,
}

impl CsvRecord for OracleRow {
    fn header() -> &'static [&'static str] {
        &[
            "var1",
            "var2",
            "lambda",
            "cross_closed",
            "cross_oracle",
            "cross_rel_err",
            "total_closed",
            "total_oracle",
            "total_rel_err",
            "entropy_constant_gap",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt(self.var1),
            fmt(self.var2),
            fmt(self.lambda),
            fmt(self.cross_closed),
            fmt(self.cross_oracle),
            fmt(self.cross_rel_err),
            fmt(self.total_closed),
            fmt(self.total_oracle),
            fmt(self.total_rel_err),
            fmt(self.entropy_constant_gap),
        ]
    }
}

pub fn write_csv<R: CsvRecord>(rows: &[R], out: &mut impl std::io::Write) -> Result<()> {
    writeln!(out, "{}", R::header().join(","))?;
    for row in rows {
        writeln!(out, "{}", row.fields().join(","))?;
    }
    Ok(())
}

pub fn write_json<R: Serialize>(rows: &[R], out: &mut impl std::io::Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)
        .map_err(|e| crate::error::Error::Config(format!("json encoding failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_empty_optionals() {
        let rows = vec![CostCurveRow {
            lambda: 0.0,
            total: 1.5,
            transport_term: 1.5,
            entropy_term: None,
            relative_total: Some(1.5),
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "lambda,total,transport_term,entropy_term,relative_total\n0,1.5,1.5,,1.5\n"
        );
    }

    #[test]
    fn json_uses_field_names() {
        let rows = vec![BenchmarkRow {
            dim: 5,
            sample_size: 60,
            lambda: 0.1,
            mean_error: 0.5,
            ci_halfwidth: 0.01,
            replications: 10,
        }];
        let mut buf = Vec::new();
        write_json(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"sample_size\": 60"));
        assert!(text.contains("\"mean_error\": 0.5"));
    }
}
