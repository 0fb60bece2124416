//! Plain-text grid files: `r,theta,value,converged` rows plus a JSON
//! metadata sidecar at `<path>.meta.json`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureSpec;
use crate::transforms::{EvaluationGrid, Field, FieldMeta};

pub const HEADER: [&str; 4] = ["r", "theta", "value", "converged"];

#[derive(Debug, Error)]
pub enum GridFileError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv error in {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("malformed grid file {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("malformed sidecar {path}: {source}")]
    Sidecar { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub operator: String,
    pub source: String,
    pub prefactor: f64,
    pub quadrature: QuadratureSpec,
    pub harmonic: bool,
    pub n_r: usize,
    pub n_theta: usize,
    pub artifact_version: String,
    /// Only written on request, so data files stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// 17 significant digits in scientific notation; parses back exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> GridFileError + '_ {
    move |source| GridFileError::Io { path: path.to_path_buf(), source }
}

/// Writes the field and its sidecar.
pub fn write_field(path: &Path, field: &Field, timestamp: bool) -> Result<(), GridFileError> {
    let csv_err = |source| GridFileError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(HEADER).map_err(csv_err)?;
    for k in 0..field.grid.len() {
        let (r, t) = field.grid.point(k);
        w.write_record([
            format_value(r),
            format_value(t),
            format_value(field.values[k]),
            field.converged[k].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))?;
    let meta = Sidecar {
        operator: field.meta.operator.clone(),
        source: field.meta.source.clone(),
        prefactor: field.meta.prefactor,
        quadrature: field.meta.quadrature,
        harmonic: field.meta.harmonic,
        n_r: field.grid.n_r(),
        n_theta: field.grid.n_theta(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: timestamp.then(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        }),
    };
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    fs::write(&side, text + "\n").map_err(io_err(&side))
}

/// Reads a grid file; the sidecar supplies metadata when present.
pub fn read_field(path: &Path) -> Result<Field, GridFileError> {
    let fmt = |message: String| GridFileError::Format { path: path.to_path_buf(), message };
    let csv_err = |source| GridFileError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(fmt(format!("expected header {:?}", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64, GridFileError> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| fmt(format!("row {}: column {} is not a number", line + 2, HEADER[i])))
        };
        let conv = match rec.get(3).map(str::trim) {
            Some("true") => true,
            Some("false") => false,
            _ => return Err(fmt(format!("row {}: converged must be true or false", line + 2))),
        };
        rows.push((num(0)?, num(1)?, num(2)?, conv));
    }
    if rows.is_empty() {
        return Err(fmt("no data rows".into()));
    }
    let r0 = rows[0].0;
    let n_theta = rows.iter().take_while(|row| row.0 == r0).count();
    if rows.len() % n_theta != 0 {
        return Err(fmt(format!("{} rows do not form a grid with {n_theta} angles", rows.len())));
    }
    let angles: Vec<f64> = rows[..n_theta].iter().map(|row| row.1).collect();
    let radii: Vec<f64> = rows.iter().step_by(n_theta).map(|row| row.0).collect();
    for (k, row) in rows.iter().enumerate() {
        if row.0 != radii[k / n_theta] || row.1 != angles[k % n_theta] {
            return Err(fmt(format!("row {} breaks the tensor-grid ordering", k + 2)));
        }
    }
    let grid = EvaluationGrid::from_axes(radii, angles).map_err(|e| fmt(e.to_string()))?;
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let text = fs::read_to_string(&side).map_err(io_err(&side))?;
        let s: Sidecar = serde_json::from_str(&text).map_err(|source| GridFileError::Sidecar { path: side, source })?;
        FieldMeta {
            operator: s.operator,
            source: s.source,
            prefactor: s.prefactor,
            quadrature: s.quadrature,
            harmonic: s.harmonic,
        }
    } else {
        FieldMeta {
            operator: "unknown".into(),
            source: "unknown".into(),
            prefactor: 1.0,
            quadrature: QuadratureSpec::default(),
            harmonic: false,
        }
    };
    Ok(Field {
        grid,
        values: rows.iter().map(|row| row.2).collect(),
        converged: rows.iter().map(|row| row.3).collect(),
        meta,
    })
}

/// Wide table: one `theta` column followed by one column per series.
pub fn write_columns(path: &Path, x_name: &str, x: &[f64], series: &[(String, Vec<f64>)]) -> Result<(), GridFileError> {
    let csv_err = |source| GridFileError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec![x_name.to_string()];
    header.extend(series.iter().map(|(name, _)| name.clone()));
    w.write_record(&header).map_err(csv_err)?;
    for (k, xv) in x.iter().enumerate() {
        let mut row = vec![format_value(*xv)];
        row.extend(series.iter().map(|(_, v)| format_value(v[k])));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Field {
        let grid = EvaluationGrid::uniform(0.9, 3, 4).unwrap();
        let values = (0..grid.len()).map(|k| (k as f64 * 0.1).sin() / 3.0).collect();
        Field {
            converged: (0..grid.len()).map(|k| k != 5).collect(),
            grid,
            values,
            meta: FieldMeta {
                operator: "q_transform".into(),
                source: "x".into(),
                prefactor: 1.0 / (2.0 * std::f64::consts::PI),
                quadrature: QuadratureSpec::default(),
                harmonic: true,
            },
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = std::env::temp_dir().join(format!("gridfile-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.csv");
        let f = sample();
        write_field(&path, &f, false).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back, f);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("r,theta,value,converged\n"));
        assert_eq!(text.lines().count(), 1 + 12);
        assert!(!fs::read_to_string(sidecar_path(&path)).unwrap().contains("created_unix"));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn seventeen_digits() {
        let s = format_value(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }
}
