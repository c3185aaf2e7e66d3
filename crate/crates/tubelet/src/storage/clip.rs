use std::path::Path;

use tubelet_core::clip::CHANNELS;
use tubelet_core::Clip;

use super::{check_payload, checked_len, read_bytes, with_path, write_bytes, FormatError, Header, Result};

pub const CLIP_MAGIC: [u8; 4] = *b"TBC1";
pub const CLIP_VERSION: u16 = 1;
/// Magic, version, then `T, H, W, C` as `u32`.
pub const CLIP_HEADER_LEN: usize = 4 + 2 + 4 * 4;

pub fn encode_clip(clip: &Clip) -> Vec<u8> {
    let (t, h, w) = clip.shape();
    let mut out = Vec::with_capacity(CLIP_HEADER_LEN + clip.data().len());
    out.extend_from_slice(&CLIP_MAGIC);
    out.extend_from_slice(&CLIP_VERSION.to_le_bytes());
    for d in [t, h, w, CHANNELS] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(clip.data());
    out
}

pub fn decode_clip(bytes: &[u8]) -> Result<Clip, FormatError> {
    let need = CLIP_HEADER_LEN;
    let mut hdr = Header::new(bytes);
    hdr.magic(CLIP_MAGIC, need)?;
    hdr.version(CLIP_VERSION, need)?;
    let dims = [hdr.u32(need)?, hdr.u32(need)?, hdr.u32(need)?, hdr.u32(need)?];
    if dims[3] as usize != CHANNELS {
        return Err(FormatError::InvalidHeader(format!("channel count {} is not 3", dims[3])));
    }
    let len = checked_len(&dims, 1)?;
    check_payload(need, hdr.rest(), len)?;
    Clip::from_data(
        dims[0] as usize,
        dims[1] as usize,
        dims[2] as usize,
        hdr.rest().to_vec(),
    )
    .map_err(|e| FormatError::InvalidHeader(e.to_string()))
}

pub fn write_clip(clip: &Clip, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_clip(clip))
}

pub fn read_clip(path: impl AsRef<Path>) -> Result<Clip> {
    let path = path.as_ref();
    with_path(path, decode_clip(&read_bytes(path)?))
}
