//! Grid file format.
//!
//! A file is one line of JSON header, a newline, then the payload:
//!
//! ```text
//! {"L":8.0,"n":257,"payload":"f64le"}\n<n*n little-endian f64>
//! {"L":8.0,"n":257,"payload":"csv"}\n<n lines of n comma-separated values>
//! ```
//!
//! Values are stored row-major over `values[[i, j]]`: the outer index is the
//! `x1` index `i`, so line `i` of a CSV payload holds `x2 = -L .. L`. CSV
//! values use the shortest representation that parses back to the same
//! `f64`, so both payloads round-trip bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::grid::GridField;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    F64le,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    #[serde(rename = "L")]
    half_width: f64,
    n: usize,
    payload: Payload,
}

pub fn encode_grid(f: &GridField, payload: Payload) -> Vec<u8> {
    let header = Header { half_width: f.half_width(), n: f.n(), payload };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    match payload {
        Payload::F64le => {
            out.reserve(8 * f.n() * f.n());
            for v in f.values().iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Payload::Csv => {
            for row in f.values().rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(",").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn decode_grid(bytes: &[u8], path: &Path) -> Result<GridField> {
    let bad = |msg: String| LabError::Format { path: path.to_path_buf(), msg };
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| bad("missing header line".into()))?;
    let header: Header = serde_json::from_slice(&bytes[..nl]).map_err(|e| bad(format!("header: {e}")))?;
    let n = header.n;
    let body = &bytes[nl + 1..];
    let values: Vec<f64> = match header.payload {
        Payload::F64le => {
            if body.len() != 8 * n * n {
                return Err(bad(format!("expected {} payload bytes, found {}", 8 * n * n, body.len())));
            }
            body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect()
        }
        Payload::Csv => {
            let text = std::str::from_utf8(body).map_err(|e| bad(e.to_string()))?;
            let mut vals = Vec::with_capacity(n * n);
            for (lineno, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                for tok in line.split(',') {
                    let v: f64 = tok.trim().parse().map_err(|e| bad(format!("payload line {}: {e}", lineno + 1)))?;
                    vals.push(v);
                }
            }
            if vals.len() != n * n {
                return Err(bad(format!("expected {} values, found {}", n * n, vals.len())));
            }
            vals
        }
    };
    let arr = Array2::from_shape_vec((n, n), values).map_err(|e| bad(e.to_string()))?;
    GridField::new(header.half_width, arr)
}

pub fn write_grid(path: &Path, f: &GridField, payload: Payload) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_grid(f, payload))?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridField> {
    decode_grid(&fs::read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(seed: u64) -> GridField {
        GridField::from_fn(1.5, 17, |x, y| ((seed as f64 + 1.0) * x).sin() * y.exp() / 3.0 + 1e-300 * x).unwrap()
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(seed in 0u64..1000, csv in any::<bool>()) {
            let f = field(seed);
            let payload = if csv { Payload::Csv } else { Payload::F64le };
            let g = decode_grid(&encode_grid(&f, payload), Path::new("mem")).unwrap();
            prop_assert_eq!(g.half_width().to_bits(), f.half_width().to_bits());
            for (a, b) in f.values().iter().zip(g.values().iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.grid");
        let f = field(3);
        write_grid(&p, &f, Payload::Csv).unwrap();
        assert_eq!(read_grid(&p).unwrap(), f);

        let mut bytes = encode_grid(&f, Payload::F64le);
        bytes.truncate(bytes.len() - 8);
        assert!(matches!(decode_grid(&bytes, &p), Err(LabError::Format { .. })));
        assert!(decode_grid(b"not json\n", &p).is_err());
    }
}
