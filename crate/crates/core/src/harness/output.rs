//! CSV and JSON emission of aggregated rows, per-realization records and
//! auxiliary tables.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::Scheme;
use crate::error::{Error, Result};
use crate::harness::experiment::{RealizationRecord, ResultRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config {
                field: "format".into(),
                reason: format!("expected csv or json, got `{s}`"),
            }),
        }
    }
}

pub const RESULT_HEADER: &str = "sweep_value,scheme,ee_mean,ee_std,rate_mean,e_motor_mean,tau_mean,failures";

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

// nine significant digits
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULT_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            sig9(r.sweep_value),
            r.scheme.to_string(),
            sig9(r.ee_mean),
            sig9(r.ee_std),
            sig9(r.rate_mean),
            sig9(r.e_motor_mean),
            sig9(r.tau_mean),
            r.failures.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn results_to_json(rows: &[ResultRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(io)
}

/// Renders `rows` in `format`.
pub fn render_results(rows: &[ResultRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(results_to_csv(rows)),
        Format::Json => results_to_json(rows),
    }
}

/// Writes `rows` to `path`, creating parent directories.
pub fn emit_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    write_text(path, &render_results(rows, format)?)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes()).map_err(io)
}

fn parse_field<T: FromStr>(line: usize, name: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::Io(format!("line {line}: cannot parse {name} from `{text}`")))
}

/// Reads a CSV written by [`results_to_csv`].
pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RESULT_HEADER => {}
        other => return Err(Error::Io(format!("unexpected header {other:?}"))),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Io(format!("line {line}: expected 8 fields, got {}", f.len())));
            }
            Ok(ResultRow {
                sweep_value: parse_field(line, "sweep_value", f[0])?,
                scheme: f[1].trim().parse::<Scheme>().map_err(|e| Error::Io(format!("line {line}: {e}")))?,
                ee_mean: parse_field(line, "ee_mean", f[2])?,
                ee_std: parse_field(line, "ee_std", f[3])?,
                rate_mean: parse_field(line, "rate_mean", f[4])?,
                e_motor_mean: parse_field(line, "e_motor_mean", f[5])?,
                tau_mean: parse_field(line, "tau_mean", f[6])?,
                failures: parse_field(line, "failures", f[7])?,
            })
        })
        .collect()
}

pub fn parse_results_json(text: &str) -> Result<Vec<ResultRow>> {
    serde_json::from_str(text).map_err(io)
}

/// Per-realization dump with shortest round-trip floats.
pub fn records_to_csv(records: &[RealizationRecord]) -> String {
    let mut out = String::from("sweep_value,scheme,realization,seed,ee,sum_rate,e_motor,tau,converged\n");
    for r in records {
        out.push_str(&format!(
            "{:e},{},{},{},{:e},{:e},{:e},{:e},{}\n",
            r.sweep_value, r.scheme, r.realization, r.seed, r.ee, r.sum_rate, r.e_motor, r.tau, r.converged
        ));
    }
    out
}

/// Antenna positions chosen by one scheme in one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionRow {
    pub scheme: Scheme,
    pub antenna: usize,
    /// Current position (m).
    pub cpv: f64,
    /// Destination position (m).
    pub dpv: f64,
}

pub fn positions_to_csv(rows: &[PositionRow]) -> String {
    let mut out = String::from("scheme,antenna,cpv,dpv\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.scheme, r.antenna, sig9(r.cpv), sig9(r.dpv)));
    }
    out
}

/// One sample of the motor torque and power curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorCurvePoint {
    /// Angular speed (rad/s).
    pub omega: f64,
    /// Linear antenna speed (m/s).
    pub speed: f64,
    /// Pull-out torque (N*m).
    pub torque: f64,
    /// Mechanical power (W).
    pub power: f64,
}

pub fn motor_curves_to_csv(points: &[MotorCurvePoint]) -> String {
    let mut out = String::from("omega,speed,torque,power\n");
    for p in points {
        out.push_str(&format!("{},{},{},{}\n", sig9(p.omega), sig9(p.speed), sig9(p.torque), sig9(p.power)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: f64, scheme: Scheme) -> ResultRow {
        ResultRow {
            sweep_value: v,
            scheme,
            ee_mean: 6.123456789123,
            ee_std: 0.1 / 3.0,
            rate_mean: 12.5,
            e_motor_mean: 1.0e-3 / 7.0,
            tau_mean: 0.0123,
            failures: 2,
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(results_to_csv(&[]), format!("{RESULT_HEADER}\n"));
        assert!(parse_results_csv(&results_to_csv(&[])).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let rows = vec![row(3.0, Scheme::Proposed), row(8.0, Scheme::Fpa)];
        let back = parse_results_json(&results_to_json(&rows).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn csv_round_trip_keeps_nine_digits() {
        let rows = vec![row(0.05, Scheme::ConvEe), row(40.0, Scheme::Zf)];
        let back = parse_results_csv(&results_to_csv(&rows)).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.scheme, b.scheme);
            assert_eq!(a.failures, b.failures);
            for (x, y) in [(a.ee_mean, b.ee_mean), (a.ee_std, b.ee_std), (a.e_motor_mean, b.e_motor_mean), (a.sweep_value, b.sweep_value)] {
                assert!((x - y).abs() <= 5e-9 * x.abs(), "{x} vs {y}");
            }
        }
        assert!(results_to_csv(&rows).contains("6.12345679e0"));
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_results_csv("a,b\n").is_err());
        let bad = format!("{RESULT_HEADER}\n1,proposed,2\n");
        assert!(parse_results_csv(&bad).is_err());
    }

    #[test]
    fn emit_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.json");
        emit_results(&[row(1.0, Scheme::Sm)], Format::Json, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(parse_results_json(&text).unwrap()[0].scheme, Scheme::Sm);
    }
}
