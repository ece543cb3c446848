//! CSV datasets and outputs, key=value configuration and manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use btf_core::{Dataset, PosteriorDraws, PosteriorSummary};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn parse_value(path: &Path, row: usize, field: &str, name: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| CliError::BadValue {
        path: path.to_path_buf(),
        row,
        message: format!("{name} = {field:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(CliError::BadValue {
            path: path.to_path_buf(),
            row,
            message: format!("{name} = {field:?} is not finite"),
        });
    }
    Ok(v)
}

/// Reads a CSV with header `x,y`. Rows are numbered from 1 after the header.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    read_dataset_bytes(path, &bytes)
}

pub(crate) fn read_dataset_bytes(path: &Path, bytes: &[u8]) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.headers().map_err(|e| CliError::csv(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(CliError::BadValue {
            path: path.to_path_buf(),
            row: 0,
            message: format!("header must be `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::BadValue {
            path: path.to_path_buf(),
            row,
            message: e.to_string(),
        })?;
        let xi = parse_value(path, row, &record[0], "x")?;
        let yi = parse_value(path, row, &record[1], "y")?;
        if let Some(&prev) = x.last() {
            if xi <= prev {
                return Err(CliError::Unsorted {
                    path: path.to_path_buf(),
                    row,
                });
            }
        }
        x.push(xi);
        y.push(yi);
    }
    if x.is_empty() {
        return Err(CliError::BadValue {
            path: path.to_path_buf(),
            row: 0,
            message: "no data rows".into(),
        });
    }
    Ok(Dataset::new(x, y)?)
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut write = || -> csv::Result<()> {
        w.write_record(["x", "y"])?;
        for (x, y) in data.x().iter().zip(data.y()) {
            w.write_record([fmt_f64(*x), fmt_f64(*y)])?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| CliError::csv(path, e))
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub x: f64,
    pub y: f64,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub ess: f64,
}

pub fn summary_rows(data: &Dataset, summary: &PosteriorSummary) -> Vec<SummaryRow> {
    (0..data.len())
        .map(|i| SummaryRow {
            x: data.x()[i],
            y: data.y()[i],
            mean: summary.mean[i],
            lo: summary.lower[i],
            hi: summary.upper[i],
            ess: summary.ess[i],
        })
        .collect()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut write = || -> csv::Result<()> {
        w.write_record(["x", "y", "mean", "lo", "hi", "ess"])?;
        for r in rows {
            w.write_record([r.x, r.y, r.mean, r.lo, r.hi, r.ess].map(fmt_f64))?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| CliError::csv(path, e))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let field = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| CliError::BadValue {
                path: path.to_path_buf(),
                row: i + 1,
                message: format!("{:?} is not a number", &record[j]),
            })
        };
        rows.push(SummaryRow {
            x: field(0)?,
            y: field(1)?,
            mean: field(2)?,
            lo: field(3)?,
            hi: field(4)?,
            ess: field(5)?,
        });
    }
    Ok(rows)
}

/// Retained draws, one row per draw: `sigma2, theta_1, …, theta_n`.
pub fn write_draws(path: &Path, draws: &PosteriorDraws) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut write = || -> csv::Result<()> {
        let mut header = vec!["sigma2".to_string()];
        header.extend((1..=draws.dim()).map(|i| format!("theta_{i}")));
        w.write_record(&header)?;
        for s in 0..draws.len() {
            let mut row = vec![fmt_f64(draws.sigma2.get(s).copied().unwrap_or(f64::NAN))];
            row.extend(draws.draw(s).iter().map(|v| fmt_f64(*v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| CliError::csv(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Ordered `key=value` pairs; blank lines and `#` comments are skipped on
/// reading.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(path, &text)
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        for (k, v) in &self.0 {
            writeln!(f, "{k}={v}").map_err(|e| CliError::io(path, e))?;
        }
        Ok(())
    }
}

pub fn create_dir(path: &Path) -> Result<PathBuf> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}
