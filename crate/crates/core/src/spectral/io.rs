//! Binary field snapshots.
//!
//! Layout (little-endian): `b"IBNL"`, version `u32`, dim `u32`, `M u32`,
//! `L f64`, time `f64`, then `M^dim` complex values as `(re, im)` `f64`
//! pairs in row-major order. Decoded grids carry the half-cell offset.

use std::fs;
use std::path::Path;

use super::{ComplexField, Grid, C64};
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 4] = b"IBNL";
pub const FIELD_VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

pub fn encode_field(field: &ComplexField) -> Vec<u8> {
    let g = &field.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * field.values.len());
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.points_per_axis() as u32).to_le_bytes());
    out.extend_from_slice(&g.box_length().to_le_bytes());
    out.extend_from_slice(&field.time.to_le_bytes());
    for z in &field.values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode_field(bytes: &[u8]) -> Result<ComplexField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Decode(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != FIELD_MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    let version = u32_at(bytes, 4);
    if version != FIELD_VERSION {
        return Err(Error::Decode(format!("unsupported version {version}")));
    }
    let dim = u32_at(bytes, 8) as usize;
    let m = u32_at(bytes, 12) as usize;
    let l = f64_at(bytes, 16);
    let time = f64_at(bytes, 24);
    if !time.is_finite() {
        return Err(Error::Decode("non-finite timestamp".into()));
    }
    let grid = Grid::new(dim, m, l).map_err(|e| Error::Decode(e.to_string()))?;
    let expected = grid
        .len()
        .checked_mul(16)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Decode("size overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Decode(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let values: Vec<C64> = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| C64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    let field = ComplexField { grid, values, time };
    if !field.is_finite() {
        return Err(Error::Decode("non-finite field value".into()));
    }
    Ok(field)
}

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ComplexField> {
    decode_field(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexField {
        let g = Grid::new(2, 4, 3.0).unwrap();
        let mut f = ComplexField::from_fn(g, |x| C64::new(x[0], -x[1]));
        f.time = 0.25;
        f
    }

    #[test]
    fn round_trip() {
        let f = sample();
        let bytes = encode_field(&f);
        assert_eq!(bytes.len(), 32 + 16 * 16);
        assert_eq!(decode_field(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode_field(&sample());
        assert!(decode_field(&bytes[..31]).is_err());
        assert!(decode_field(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_field(&bad).is_err());
        let mut bad = bytes.clone();
        bad[12] = 3; // M = 3
        assert!(decode_field(&bad).is_err());
        let mut bad = bytes.clone();
        bad[32..40].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(decode_field(&bad).is_err());
        let mut bad = bytes;
        bad[16..24].copy_from_slice(&(-1.0f64).to_le_bytes());
        assert!(decode_field(&bad).is_err());
    }
}
