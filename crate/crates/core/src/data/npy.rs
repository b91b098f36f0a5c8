//! Minimal NPY reader and writer for 1-D and 2-D float arrays.
//!
//! Reads format versions 1.0 and 2.0 with `<f4`, `<f8`, `>f4` or `>f8`
//! payloads in C order; writes version 1.0, `<f8`, with the header padded
//! to a 64-byte boundary the way NumPy does.

use crate::error::Error;
use crate::geometry::PointCloud;

const MAGIC: &[u8] = b"\x93NUMPY";
const ALIGN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F32 { little: bool },
    F64 { little: bool },
}

impl Dtype {
    fn size(self) -> usize {
        match self {
            Dtype::F32 { .. } => 4,
            Dtype::F64 { .. } => 8,
        }
    }
}

/// Header problem or payload mismatch, located by byte offset.
#[derive(Debug)]
pub struct NpyError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> std::result::Result<T, NpyError> {
    Err(NpyError {
        offset,
        message: message.into(),
    })
}

/// Decodes an NPY byte buffer into a point cloud (1-D arrays become `N × 1`).
pub fn decode(bytes: &[u8]) -> std::result::Result<(Vec<f64>, usize, usize), NpyError> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return err(0, "missing NPY magic string");
    }
    let (major, minor) = (bytes[6], bytes[7]);
    let (header_len, header_start) = match major {
        1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
        2 => {
            if bytes.len() < 12 {
                return err(8, "truncated header length");
            }
            (
                u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize,
                12,
            )
        }
        _ => return err(6, format!("unsupported NPY version {major}.{minor}")),
    };
    let data_start = header_start + header_len;
    if bytes.len() < data_start {
        return err(header_start, "header extends past end of file");
    }
    let header = std::str::from_utf8(&bytes[header_start..data_start])
        .or_else(|_| err(header_start, "header is not valid text"))?;

    let descr = dict_value(header, "descr")
        .ok_or(())
        .or_else(|_| err(header_start, "header has no 'descr'"))?;
    let dtype = match descr.trim().trim_matches(|c| c == '\'' || c == '"') {
        "<f4" => Dtype::F32 { little: true },
        ">f4" => Dtype::F32 { little: false },
        "<f8" => Dtype::F64 { little: true },
        ">f8" => Dtype::F64 { little: false },
        other => return err(header_start, format!("unsupported dtype {other}")),
    };
    let fortran = dict_value(header, "fortran_order")
        .ok_or(())
        .or_else(|_| err(header_start, "header has no 'fortran_order'"))?;
    if fortran.trim() != "False" {
        return err(header_start, "only C-order arrays are supported");
    }
    let shape_txt = dict_value(header, "shape")
        .ok_or(())
        .or_else(|_| err(header_start, "header has no 'shape'"))?;
    let dims: Vec<usize> = shape_txt
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| err(header_start, format!("malformed shape {shape_txt}")))?;
    let (rows, cols) = match dims.as_slice() {
        [n] => (*n, 1),
        [n, d] => (*n, *d),
        _ => {
            return err(
                header_start,
                format!("only 1-D and 2-D arrays are supported, got shape {shape_txt}"),
            )
        }
    };

    let expected = rows * cols * dtype.size();
    let payload = &bytes[data_start..];
    if payload.len() != expected {
        return err(
            data_start,
            format!(
                "payload has {} bytes, shape ({rows}, {cols}) needs {expected}",
                payload.len()
            ),
        );
    }
    let values: Vec<f64> = match dtype {
        Dtype::F32 { little } => payload
            .chunks_exact(4)
            .map(|c| {
                let b = [c[0], c[1], c[2], c[3]];
                (if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) }) as f64
            })
            .collect(),
        Dtype::F64 { little } => payload
            .chunks_exact(8)
            .map(|c| {
                let b: [u8; 8] = c.try_into().unwrap();
                if little {
                    f64::from_le_bytes(b)
                } else {
                    f64::from_be_bytes(b)
                }
            })
            .collect(),
    };
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return err(
            data_start + pos * dtype.size(),
            format!("non-finite value at row {}, column {}", pos / cols, pos % cols),
        );
    }
    Ok((values, rows, cols))
}

/// Raw text of the value stored under `key` in a Python dict literal.
fn dict_value<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let quoted = [format!("'{key}'"), format!("\"{key}\"")];
    let at = quoted.iter().find_map(|q| header.find(q.as_str()).map(|i| i + q.len()))?;
    let rest = header[at..].trim_start().strip_prefix(':')?.trim_start();
    if rest.starts_with('(') {
        let end = rest.find(')')?;
        Some(&rest[..=end])
    } else {
        let end = rest.find([',', '}']).unwrap_or(rest.len());
        Some(&rest[..end])
    }
}

/// Encodes a cloud as a version 1.0 `<f8` array of shape `(N, D)`.
pub fn encode(cloud: &PointCloud) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, {}), }}",
        cloud.n_samples(),
        cloud.dim()
    );
    let unpadded = MAGIC.len() + 4 + dict.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    let header_len = dict.len() + padding + 1;

    let mut out = Vec::with_capacity(MAGIC.len() + 4 + header_len + cloud.as_slice().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat_n(b' ', padding));
    out.push(b'\n');
    for v in cloud.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub(crate) fn into_error(e: NpyError, path: &std::path::Path) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        location: format!("byte {}", e.offset),
        message: e.message,
    }
}
