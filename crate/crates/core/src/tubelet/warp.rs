//! Inverse-mapped bilinear warping of patches about their center.

use alloc::vec;

use super::transform::{Affine, Theta};
use super::Patch;
use crate::clip::CHANNELS;
use crate::math;
use crate::{Error, Result};

/// Matrices with `|det|` below this are rejected.
pub const DEGENERATE_DET: f64 = 1e-6;

/// Mask values this close to 0 or 1 are snapped, so numerically exact
/// integer-position samples (e.g. quarter turns) keep binary coverage.
const MASK_SNAP: f64 = 1e-6;

pub fn warp(patch: &Patch, theta: &Theta) -> Result<Patch> {
    warp_affine(patch, &theta.matrix())
}

/// Apply `m` about the patch center. The output canvas is the bounding box
/// of the transformed corners; samples that fall outside the source get
/// zero coverage, and colors are coverage-weighted so edges do not darken.
pub fn warp_affine(patch: &Patch, m: &Affine) -> Result<Patch> {
    if *m == Affine::IDENTITY {
        return Ok(patch.clone());
    }
    let det = m.det();
    if !(det.abs() >= DEGENERATE_DET) {
        return Err(Error::DegenerateTransform { det });
    }
    let inv = m.inverse().ok_or(Error::DegenerateTransform { det })?;

    let (w, h) = (patch.width as f64, patch.height as f64);
    let a = &m.0;
    let half_x = a[0][0].abs() * w / 2.0 + a[0][1].abs() * h / 2.0;
    let half_y = a[1][0].abs() * w / 2.0 + a[1][1].abs() * h / 2.0;
    let out_w = (math::ceil(2.0 * half_x - 1e-6) as usize).max(1);
    let out_h = (math::ceil(2.0 * half_y - 1e-6) as usize).max(1);

    let mut pixels = vec![0.0f32; out_w * out_h * CHANNELS];
    let mut mask = vec![0.0f32; out_w * out_h];
    let (sw, sh) = (patch.width as isize, patch.height as isize);

    for y in 0..out_h {
        for x in 0..out_w {
            let qx = x as f64 + 0.5 - out_w as f64 / 2.0;
            let qy = y as f64 + 0.5 - out_h as f64 / 2.0;
            let (px, py) = inv.apply(qx, qy);
            // Continuous index coordinates in the source (pixel centers at integers).
            let sx = px + w / 2.0 - 0.5;
            let sy = py + h / 2.0 - 0.5;
            let x0 = math::floor(sx);
            let y0 = math::floor(sy);
            let fx = sx - x0;
            let fy = sy - y0;
            let (x0, y0) = (x0 as isize, y0 as isize);

            let mut cov = 0.0f64;
            let mut acc = [0.0f64; 3];
            for (dy, wy) in [(0isize, 1.0 - fy), (1, fy)] {
                for (dx, wx) in [(0isize, 1.0 - fx), (1, fx)] {
                    let (ix, iy) = (x0 + dx, y0 + dy);
                    let wgt = wx * wy;
                    if wgt == 0.0 || ix < 0 || iy < 0 || ix >= sw || iy >= sh {
                        continue;
                    }
                    let (ix, iy) = (ix as usize, iy as usize);
                    let mk = f64::from(patch.mask_at(iy, ix)) * wgt;
                    if mk == 0.0 {
                        continue;
                    }
                    cov += mk;
                    let p = patch.pixel_at(iy, ix);
                    for c in 0..CHANNELS {
                        acc[c] += mk * f64::from(p[c]);
                    }
                }
            }
            let o = y * out_w + x;
            let cov_snapped = if cov >= 1.0 - MASK_SNAP {
                1.0
            } else if cov <= MASK_SNAP {
                0.0
            } else {
                cov
            };
            if cov_snapped > 0.0 {
                mask[o] = cov_snapped as f32;
                for c in 0..CHANNELS {
                    pixels[o * CHANNELS + c] = (acc[c] / cov) as f32;
                }
            }
        }
    }
    if !mask.iter().any(|&v| v > 0.0) {
        return Err(Error::DegenerateTransform { det });
    }
    Ok(Patch {
        width: out_w,
        height: out_h,
        pixels,
        mask,
    })
}
