//! The on-disk field container: a two-line text header followed by raw
//! little-endian f64 values in row-major order.
//!
//! ```text
//! lisawave-snapshot v1
//! field=u n_x=64 n_y=64 h=0.015625 t=0.5
//! <8 * (n_x+1) * (n_y+1) payload bytes>
//! ```
//!
//! `h` and `t` are written in shortest round-trip decimal form, so a write
//! followed by a read reproduces every bit. Cell-centered rasters (material
//! maps) reuse the container by storing an a x b array under header
//! dimensions n_x = a-1, n_y = b-1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Error, Result};

pub const MAGIC: &str = "lisawave-snapshot v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: String,
    /// Array dimensions in cells; the payload holds (n_x+1)(n_y+1) values.
    pub n_x: usize,
    pub n_y: usize,
    pub h: f64,
    pub t: f64,
    pub data: Vec<f64>,
}

impl Snapshot {
    fn expected_len(n_x: usize, n_y: usize) -> Option<usize> {
        n_x.checked_add(1)?.checked_mul(n_y.checked_add(1)?)
    }
}

fn fail<T>(path: &Path, reason: impl Into<String>) -> Result<T> {
    Err(Error::Snapshot { path: path.display().to_string(), reason: reason.into() })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    if snap.field.is_empty() || snap.field.chars().any(|c| c.is_whitespace()) {
        return fail(path, format!("field name {:?} must be one non-empty token", snap.field));
    }
    match Snapshot::expected_len(snap.n_x, snap.n_y) {
        Some(n) if n == snap.data.len() => {}
        _ => {
            return fail(
                path,
                format!(
                    "payload holds {} values, dimensions {} x {} require {}",
                    snap.data.len(),
                    snap.n_x,
                    snap.n_y,
                    (snap.n_x + 1) * (snap.n_y + 1)
                ),
            )
        }
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "field={} n_x={} n_y={} h={} t={}",
        snap.field, snap.n_x, snap.n_y, snap.h, snap.t
    )?;
    for v in &snap.data {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut reader = BufReader::new(File::open(path)?);
    let magic = read_line(&mut reader, path)?;
    if magic != MAGIC {
        return fail(path, format!("bad magic line {magic:?}, expected {MAGIC:?}"));
    }
    let header = read_line(&mut reader, path)?;
    let mut field = None;
    let mut n_x = None;
    let mut n_y = None;
    let mut h = None;
    let mut t = None;
    for token in header.split(' ') {
        let (key, value) = match token.split_once('=') {
            Some(kv) => kv,
            None => return fail(path, format!("malformed header token {token:?}")),
        };
        match key {
            "field" => field = Some(value.to_string()),
            "n_x" => n_x = value.parse::<usize>().ok(),
            "n_y" => n_y = value.parse::<usize>().ok(),
            "h" => h = value.parse::<f64>().ok(),
            "t" => t = value.parse::<f64>().ok(),
            _ => return fail(path, format!("unknown header key {key:?}")),
        }
    }
    let (field, n_x, n_y, h, t) = match (field, n_x, n_y, h, t) {
        (Some(f), Some(nx), Some(ny), Some(h), Some(t)) => (f, nx, ny, h, t),
        _ => return fail(path, format!("header {header:?} is missing or repeats a key")),
    };
    let expected = match Snapshot::expected_len(n_x, n_y).and_then(|n| n.checked_mul(8)) {
        Some(n) => n / 8,
        None => return fail(path, format!("dimensions {n_x} x {n_y} overflow")),
    };
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() < expected * 8 {
        return fail(
            path,
            format!(
                "payload truncated: {} bytes for {} declared values",
                bytes.len(),
                expected
            ),
        );
    }
    if bytes.len() > expected * 8 {
        return fail(
            path,
            format!(
                "payload holds {} trailing bytes past {} declared values",
                bytes.len() - expected * 8,
                expected
            ),
        );
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Snapshot { field, n_x, n_y, h, t, data })
}

fn read_line(reader: &mut impl Read, path: &Path) -> Result<String> {
    // byte-at-a-time keeps the reader positioned exactly at the payload
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        match reader.read(&mut byte)? {
            0 => return fail(path, "unexpected end of file inside header"),
            _ => {
                if byte[0] == b'\n' {
                    break;
                }
                line.push(byte[0]);
                if line.len() > 4096 {
                    return fail(path, "header line exceeds 4096 bytes");
                }
            }
        }
    }
    match String::from_utf8(line) {
        Ok(s) => Ok(s),
        Err(_) => fail(path, "header is not UTF-8"),
    }
}
