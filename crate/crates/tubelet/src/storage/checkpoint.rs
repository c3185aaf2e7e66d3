use std::path::Path;

use tubelet_core::contrastive::{EncoderDims, EncoderParams};

use super::{check_payload, checked_len, read_bytes, with_path, write_bytes, FormatError, Header, Result};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"TBCK";
pub const CHECKPOINT_VERSION: u16 = 1;
/// Magic, version, then `frames, grid, hidden, proj_hidden, embed` as `u32`.
const CHECKPOINT_HEADER_LEN: usize = 4 + 2 + 5 * 4;

/// Parameters follow the header as `f64` in declaration order
/// (`w0, b0, w1, b1, ...`, weights `outputs × inputs` row-major).
pub fn encode_checkpoint(params: &EncoderParams) -> Vec<u8> {
    let d = params.dims;
    let mut out = Vec::with_capacity(CHECKPOINT_HEADER_LEN + 8 * params.num_params());
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for v in [d.frames, d.grid, d.hidden, d.proj_hidden, d.embed] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for block in params.blocks() {
        for v in block {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<EncoderParams, FormatError> {
    let need = CHECKPOINT_HEADER_LEN;
    let mut hdr = Header::new(bytes);
    hdr.magic(CHECKPOINT_MAGIC, need)?;
    hdr.version(CHECKPOINT_VERSION, need)?;
    let mut v = [0u32; 5];
    for x in &mut v {
        *x = hdr.u32(need)?;
    }
    let dims = EncoderDims {
        frames: v[0] as usize,
        grid: v[1] as usize,
        hidden: v[2] as usize,
        proj_hidden: v[3] as usize,
        embed: v[4] as usize,
    };
    dims.validate()
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    let count: u64 = dims
        .layer_shapes()
        .iter()
        .map(|&(i, o)| checked_len(&[i as u32, o as u32], 1).map(|w| w + o as u64))
        .sum::<Result<u64, FormatError>>()?;
    let bytes_needed = count
        .checked_mul(8)
        .ok_or_else(|| FormatError::InvalidHeader("declared size overflows".into()))?;
    check_payload(need, hdr.rest(), bytes_needed)?;
    let values: Vec<f64> = hdr
        .rest()
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FormatError::InvalidHeader("non-finite parameter".into()));
    }
    EncoderParams::from_blocks(dims, &values).map_err(|e| FormatError::InvalidHeader(e.to_string()))
}

pub fn write_checkpoint(params: &EncoderParams, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_checkpoint(params))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<EncoderParams> {
    let path = path.as_ref();
    with_path(path, decode_checkpoint(&read_bytes(path)?))
}
