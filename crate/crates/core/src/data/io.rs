use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::data::npy;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Npy,
}

impl DataFormat {
    /// Guesses the format from a `.csv` or `.npy` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "npy" => Some(DataFormat::Npy),
            _ => None,
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "npy" => Ok(DataFormat::Npy),
            _ => Err(Error::param(format!("unknown data format {s:?}"))),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, location: String, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        location,
        message: message.into(),
    }
}

pub fn load_pointcloud(path: &Path, format: DataFormat) -> Result<PointCloud> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    match format {
        DataFormat::Csv => parse_csv(&bytes, path),
        DataFormat::Npy => {
            let (data, rows, cols) = npy::decode(&bytes).map_err(|e| npy::into_error(e, path))?;
            PointCloud::new(data, rows, cols)
        }
    }
}

pub fn save_pointcloud(cloud: &PointCloud, path: &Path, format: DataFormat) -> Result<()> {
    let bytes = match format {
        DataFormat::Csv => to_csv(cloud).into_bytes(),
        DataFormat::Npy => npy::encode(cloud),
    };
    std::fs::write(path, bytes).map_err(io_err(path))
}

/// One row per line, shortest round-trip float text, no header.
pub fn to_csv(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.as_slice().len() * 20);
    for row in cloud.rows() {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Comma-separated numbers; a first row that does not parse as numbers is
/// taken as a header.
fn parse_csv(bytes: &[u8], path: &Path) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut data = Vec::new();
    let mut dim = None;
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
            format_err(path, format!("line {line}"), e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(col, field)| field.parse::<f64>().map_err(|_| col))
            .collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(col) => {
                return Err(format_err(
                    path,
                    format!("line {line}, column {}", col + 1),
                    format!("non-numeric field {:?}", &record[col]),
                ))
            }
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(format_err(
                    path,
                    format!("line {line}"),
                    format!("row has {} fields, expected {d}", values.len()),
                ))
            }
            _ => {}
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "{}: non-finite value at line {line}, column {}",
                path.display(),
                col + 1
            )));
        }
        data.extend(values);
        rows += 1;
    }
    let dim = dim.ok_or_else(|| format_err(path, "line 1".into(), "no numeric rows"))?;
    PointCloud::new(data, rows, dim)
}
