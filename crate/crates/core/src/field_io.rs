//! Binary field files: one line of JSON header, then the raw samples.
//!
//! The payload holds `points^dim` complex samples in grid order (axis 0
//! slowest), each written as two little-endian `f64` values, real part
//! first.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{FieldState, GridSpec};

pub const FORMAT_TAG: &str = "nls-field";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
    pub time: f64,
    /// Always `"f64le-interleaved"`.
    pub encoding: String,
}

pub fn write_field<W: Write>(mut w: W, field: &FieldState) -> Result<()> {
    let header = FieldHeader {
        format: FORMAT_TAG.into(),
        version: FORMAT_VERSION,
        dim: field.grid.dim,
        extent: field.grid.extent,
        points: field.grid.points,
        time: field.time,
        encoding: "f64le-interleaved".into(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Io(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * field.values.len());
    for v in &field.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: BufRead>(mut r: R) -> Result<FieldState> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim_end())
        .map_err(|e| Error::Io(format!("bad field header: {e}")))?;
    if header.format != FORMAT_TAG || header.version != FORMAT_VERSION {
        return Err(Error::Io(format!(
            "unsupported field format {} v{}",
            header.format, header.version
        )));
    }
    if header.encoding != "f64le-interleaved" {
        return Err(Error::Io(format!(
            "unsupported encoding {}",
            header.encoding
        )));
    }
    let grid = GridSpec::new(header.dim, header.extent, header.points)?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != 16 * grid.len() {
        return Err(Error::Io(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            16 * grid.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    FieldState::from_values(grid, values, header.time)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_layout() {
        let g = GridSpec::new(2, 3.0, 8).unwrap();
        let mut f = FieldState::from_fn(g, |x| Complex64::new(x[0], -x[1]));
        f.time = 0.25;
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(buf.len() - nl - 1, 16 * 64);
        // second sample is (i0, i1) = (0, 1): re = x0 = -3
        let off = nl + 1 + 16;
        assert_eq!(
            f64::from_le_bytes(buf[off..off + 8].try_into().unwrap()),
            -3.0
        );
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_rejected() {
        let g = GridSpec::new(1, 1.0, 8).unwrap();
        let f = FieldState::zeros(g);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.pop();
        assert!(read_field(&buf[..]).is_err());
    }
}
