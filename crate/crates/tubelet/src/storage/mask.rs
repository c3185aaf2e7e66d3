use std::path::Path;

use tubelet_core::CoverageGrid;

use super::{check_payload, checked_len, read_bytes, with_path, write_bytes, FormatError, Header, Result};

pub const MASK_MAGIC: [u8; 4] = *b"TBM1";
pub const MASK_VERSION: u16 = 1;
/// Magic, version, then `T, H, W` as `u32`; payload is `f32` coverage.
const MASK_HEADER_LEN: usize = 4 + 2 + 3 * 4;

pub fn encode_mask(grid: &CoverageGrid) -> Vec<u8> {
    let (t, h, w) = grid.shape();
    let mut out = Vec::with_capacity(MASK_HEADER_LEN + 4 * grid.data().len());
    out.extend_from_slice(&MASK_MAGIC);
    out.extend_from_slice(&MASK_VERSION.to_le_bytes());
    for d in [t, h, w] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in grid.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_mask(bytes: &[u8]) -> Result<CoverageGrid, FormatError> {
    let need = MASK_HEADER_LEN;
    let mut hdr = Header::new(bytes);
    hdr.magic(MASK_MAGIC, need)?;
    hdr.version(MASK_VERSION, need)?;
    let dims = [hdr.u32(need)?, hdr.u32(need)?, hdr.u32(need)?];
    check_payload(need, hdr.rest(), checked_len(&dims, 4)?)?;
    let data = hdr
        .rest()
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    CoverageGrid::from_data(dims[0] as usize, dims[1] as usize, dims[2] as usize, data)
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))
}

pub fn write_mask(grid: &CoverageGrid, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_mask(grid))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<CoverageGrid> {
    let path = path.as_ref();
    with_path(path, decode_mask(&read_bytes(path)?))
}
