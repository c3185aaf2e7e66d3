use std::path::Path;

use tubelet_core::trajectory::{Point, Trajectory};
use tubelet_core::CoverageGrid;

use super::{write_bytes, Result};

const PALETTE: [[u8; 3]; 8] = [
    [228, 26, 28],
    [55, 126, 184],
    [77, 175, 74],
    [152, 78, 163],
    [255, 127, 0],
    [166, 86, 40],
    [247, 129, 191],
    [23, 190, 207],
];

const WHITE: [u8; 3] = [255; 3];
const BLACK: [u8; 3] = [0; 3];

/// An 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            let i = 3 * (y as usize * self.width + x as usize);
            self.data[i..i + 3].copy_from_slice(&rgb);
        }
    }

    /// Binary PPM (`P6`).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }
}

fn color(i: usize) -> [u8; 3] {
    if i < PALETTE.len() {
        return PALETTE[i];
    }
    // Golden-angle hues past the fixed palette.
    let h = (i as f64 * 0.618_033_988_749_895).fract() * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as usize {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [r, g, b].map(|c: f64| (40.0 + 180.0 * c) as u8)
}

fn pixel(p: Point) -> (i64, i64) {
    (p.x.floor() as i64, p.y.floor() as i64)
}

fn segment(r: &mut Raster, a: Point, b: Point, rgb: [u8; 3]) {
    let steps = (b.x - a.x).abs().max((b.y - a.y).abs()).ceil().max(1.0) as usize;
    for s in 0..=steps {
        let (x, y) = pixel(a.lerp(b, s as f64 / steps as f64));
        r.put(x, y, rgb);
    }
}

/// Each trajectory as a polyline in its own color over white; a 3×3 square
/// marks the start and a black pixel inside a plus marks the end.
pub fn trajectory_raster(trajectories: &[Trajectory], (width, height): (usize, usize)) -> Raster {
    let mut r = Raster::filled(width, height, WHITE);
    for (i, t) in trajectories.iter().enumerate() {
        let rgb = color(i);
        for w in t.centers.windows(2) {
            segment(&mut r, w[0], w[1], rgb);
        }
        let (Some(&first), Some(&last)) = (t.centers.first(), t.centers.last()) else {
            continue;
        };
        let (sx, sy) = pixel(first);
        for dy in -1..=1 {
            for dx in -1..=1 {
                r.put(sx + dx, sy + dy, rgb);
            }
        }
        let (ex, ey) = pixel(last);
        for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            r.put(ex + dx, ey + dy, rgb);
        }
        r.put(ex, ey, BLACK);
    }
    r
}

pub fn render_trajectory_plot(
    trajectories: &[Trajectory],
    frame: (usize, usize),
    path: impl AsRef<Path>,
) -> Result<()> {
    write_bytes(path.as_ref(), &trajectory_raster(trajectories, frame).to_ppm())
}

/// All frames side by side as grayscale, one-pixel gaps between frames.
pub fn render_coverage_strip(grid: &CoverageGrid, path: impl AsRef<Path>) -> Result<()> {
    let (frames, h, w) = grid.shape();
    let width = frames * (w + 1) - 1;
    let mut r = Raster::filled(width.max(1), h.max(1), [255, 0, 255]);
    for t in 0..frames {
        for y in 0..h {
            for x in 0..w {
                let v = (grid.get(t, y, x) * 255.0).round() as u8;
                r.put((t * (w + 1) + x) as i64, y as i64, [v; 3]);
            }
        }
    }
    write_bytes(path.as_ref(), &r.to_ppm())
}
