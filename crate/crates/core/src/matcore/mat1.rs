//! `MAT1` binary matrix format.
//!
//! ```text
//! magic   8 bytes  "SPOPMAT1"
//! rows    u64 LE
//! cols    u64 LE
//! data    rows*cols f64 LE, row-major
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SPOPMAT1";
const HEADER_LEN: usize = 24;

pub fn encode(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for x in m.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated MAT1 header".into()));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad MAT1 magic".into()));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let cols = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let count = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Format("MAT1 dimensions overflow".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() as u64 != count {
        return Err(Error::Format(format!(
            "MAT1 body has {} bytes, expected {count} for {rows}x{cols}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Matrix::new(rows as usize, cols as usize, data)
}

pub fn write_to<W: Write>(m: &Matrix, mut w: W) -> Result<()> {
    w.write_all(&encode(m))?;
    Ok(())
}

pub fn read_from<R: Read>(mut r: R) -> Result<Matrix> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    decode(&buf)
}

pub fn save(m: &Matrix, path: &Path) -> Result<()> {
    std::fs::write(path, encode(m))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Matrix> {
    decode(&std::fs::read(path)?)
}
