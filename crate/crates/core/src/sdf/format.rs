//! Bit-packed grid files.
//!
//! | bytes        | content                                   |
//! |--------------|-------------------------------------------|
//! | 4            | magic `SDFG`                              |
//! | 2            | version, u16 LE (currently 1)             |
//! | 12           | dims `nx ny nz`, u32 LE each              |
//! | 48           | bbox `minx miny minz maxx maxy maxz`, f64 LE |
//! | ceil(n / 8)  | values in storage order, LSB first; 1 = +1 |

use std::path::Path;

use super::{SdfGrid, FREE, SOLID};
use crate::error::{Error, Result};
use crate::math::{Aabb, Vec3};

pub const GRID_MAGIC: &[u8; 4] = b"SDFG";
pub const GRID_FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 12 + 48;

pub fn encode_grid(grid: &SdfGrid) -> Vec<u8> {
    let n = grid.len();
    let mut out = Vec::with_capacity(HEADER_LEN + n.div_ceil(8));
    out.extend_from_slice(GRID_MAGIC);
    out.extend_from_slice(&GRID_FORMAT_VERSION.to_le_bytes());
    for d in grid.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    let b = grid.bbox();
    for v in b.min.to_array().into_iter().chain(b.max.to_array()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut packed = vec![0u8; n.div_ceil(8)];
    for (i, &v) in grid.values().iter().enumerate() {
        if v == FREE {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&packed);
    out
}

pub fn decode_grid(bytes: &[u8], name: &str) -> Result<SdfGrid> {
    let bad = |msg: String| Error::format(name, 0, msg);
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "file is {} bytes, shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..4] != GRID_MAGIC {
        return Err(bad("bad magic; not a grid file".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != GRID_FORMAT_VERSION {
        return Err(bad(format!("unsupported grid format version {version}")));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let dims = [u32_at(6), u32_at(10), u32_at(14)];
    let c: Vec<f64> = (0..6).map(|i| f64_at(18 + 8 * i)).collect();
    if c.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite bounding box".into()));
    }
    let bbox = Aabb::new(Vec3::new(c[0], c[1], c[2]), Vec3::new(c[3], c[4], c[5]));
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| bad("dims overflow".into()))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != n.div_ceil(8) {
        return Err(bad(format!(
            "expected {} payload bytes for {n} nodes, found {}",
            n.div_ceil(8),
            payload.len()
        )));
    }
    let values = (0..n)
        .map(|i| {
            if payload[i / 8] >> (i % 8) & 1 == 1 {
                FREE
            } else {
                SOLID
            }
        })
        .collect();
    SdfGrid::new(dims, bbox, values).map_err(|e| bad(e.to_string()))
}

pub fn write_grid(path: impl AsRef<Path>, grid: &SdfGrid) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_grid(grid)).map_err(|e| Error::io(path, e))
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<SdfGrid> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_grid(&bytes, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SdfGrid {
        let bbox = Aabb::new(Vec3::new(-1.5, -1.5, -0.5), Vec3::new(1.5, 1.5, 2.5));
        let values = (0..3 * 4 * 5)
            .map(|i| if i % 3 == 0 { SOLID } else { FREE })
            .collect();
        SdfGrid::new([3, 4, 5], bbox, values).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let bytes = encode_grid(&sample());
        assert_eq!(bytes.len(), HEADER_LEN + 8);
        let back = decode_grid(&bytes, "g").unwrap();
        assert_eq!(back, sample());
        assert_eq!(encode_grid(&back), bytes);
    }

    #[test]
    fn header_layout() {
        let bytes = encode_grid(&sample());
        assert_eq!(&bytes[..4], b"SDFG");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..10], &[3, 0, 0, 0]);
        assert_eq!(f64::from_le_bytes(bytes[18..26].try_into().unwrap()), -1.5);
        // node 0 is solid, nodes 1 and 2 free
        assert_eq!(bytes[HEADER_LEN] & 0b111, 0b110);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode_grid(&sample());
        assert!(decode_grid(&bytes[..bytes.len() - 1], "g").is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_grid(&bad, "g").is_err());
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(decode_grid(&bad, "g").is_err());
        assert!(decode_grid(b"SDF", "g").is_err());
    }
}
