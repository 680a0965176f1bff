//! `mhdcrit-field-v1` snapshot files.
//!
//! A snapshot is one line of compact JSON (the header, terminated by
//! `\n`) followed by the raw little-endian `f64` real-space samples of every
//! named field, concatenated in header order. Each block holds `n^dim`
//! values in row-major order.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FieldError, Grid, ScalarField};

pub const FORMAT: &str = "mhdcrit-field-v1";
pub const DTYPE: &str = "f64-le";
pub const LAYOUT: &str = "row-major real-space samples";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format: String,
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    pub fields: Vec<String>,
    pub dtype: String,
    pub layout: String,
}

impl SnapshotHeader {
    pub fn for_grid(grid: &Grid, names: &[&str]) -> Self {
        SnapshotHeader {
            format: FORMAT.to_string(),
            dim: grid.dim(),
            n: grid.n(),
            box_length: grid.box_length(),
            fields: names.iter().map(|s| s.to_string()).collect(),
            dtype: DTYPE.to_string(),
            layout: LAYOUT.to_string(),
        }
    }
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    names: &[&str],
    fields: &[&ScalarField],
) -> Result<(), FieldError> {
    assert_eq!(names.len(), fields.len());
    let grid = fields.first().ok_or_else(|| FieldError::Snapshot("no fields".into()))?.grid();
    if fields.iter().any(|f| !f.same_grid(fields[0])) {
        return Err(FieldError::GridMismatch);
    }
    let header = SnapshotHeader::for_grid(grid, names);
    serde_json::to_writer(&mut w, &header).map_err(|e| FieldError::Snapshot(e.to_string()))?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for f in fields {
        buf.clear();
        for v in f.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

/// Read a snapshot, returning its grid, header and fields in header order.
pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<(Arc<Grid>, SnapshotHeader, Vec<ScalarField>), FieldError> {
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(FieldError::Snapshot("missing header terminator".into()));
    }
    line.pop();
    let header: SnapshotHeader =
        serde_json::from_slice(&line).map_err(|e| FieldError::Snapshot(e.to_string()))?;
    if header.format != FORMAT {
        return Err(FieldError::Snapshot(format!("unsupported format {:?}", header.format)));
    }
    if header.dtype != DTYPE || header.layout != LAYOUT {
        return Err(FieldError::Snapshot("unsupported dtype or layout".into()));
    }
    let grid = Grid::new(header.dim, header.n, header.box_length)?;
    let mut bytes = vec![0u8; grid.len() * 8];
    let mut fields = Vec::with_capacity(header.fields.len());
    for _ in &header.fields {
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        fields.push(ScalarField::from_real(&grid, values));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(FieldError::Snapshot("trailing bytes after last field".into()));
    }
    Ok((grid, header, fields))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 10, 16])) {
            let g = Grid::new(2, n, 1.0 + (seed % 7) as f64 * 0.37).unwrap();
            let a = ScalarField::from_fn(&g, |x| ((seed as f64) * 1e-3 + x[0] * 3.1).sin() * x[1].exp());
            let b = ScalarField::from_fn(&g, |x| x[1] / (1.0 + (seed >> 40) as f64) - 1e-300);
            let mut out = Vec::new();
            write_snapshot(&mut out, &["a", "b"], &[&a, &b]).unwrap();
            let (g2, h, f) = read_snapshot(&out[..]).unwrap();
            prop_assert_eq!(h.fields, vec!["a".to_string(), "b".to_string()]);
            prop_assert_eq!(g2.box_length().to_bits(), g.box_length().to_bits());
            for (x, y) in f[0].values().iter().zip(a.values()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
            for (x, y) in f[1].values().iter().zip(b.values()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn header_layout() {
        let g = Grid::new(2, 8, 2.0).unwrap();
        let z = ScalarField::zeros(&g);
        let mut out = Vec::new();
        write_snapshot(&mut out, &["rho"], &[&z]).unwrap();
        let nl = out.iter().position(|&b| b == b'\n').unwrap();
        let header = std::str::from_utf8(&out[..nl]).unwrap();
        assert_eq!(
            header,
            r#"{"format":"mhdcrit-field-v1","dim":2,"n":8,"box_length":2.0,"fields":["rho"],"dtype":"f64-le","layout":"row-major real-space samples"}"#
        );
        assert_eq!(out.len(), nl + 1 + 64 * 8);
    }

    #[test]
    fn truncated_data_is_an_error() {
        let g = Grid::new(2, 8, 2.0).unwrap();
        let z = ScalarField::zeros(&g);
        let mut out = Vec::new();
        write_snapshot(&mut out, &["rho"], &[&z]).unwrap();
        out.truncate(out.len() - 3);
        assert!(read_snapshot(&out[..]).is_err());
    }
}
