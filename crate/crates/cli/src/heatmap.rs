//! Joint spectral intensity rendered as a PNG with a viridis colormap.

use std::path::Path;

use image::{ImageBuffer, Rgb};
use pairgen::jsa::JsaGrid;

use crate::report::WriteError;

// Polynomial fit to viridis, accurate to about one 8-bit level.
const VIRIDIS: [[f64; 3]; 7] = [
    [
        0.277_727_327_223_417_7,
        0.005_407_344_544_966_578,
        0.334_099_805_335_306_1,
    ],
    [0.105_093_043_108_577_4, 1.404_613_529_898_575, 1.384_590_162_594_685],
    [
        -0.330_861_828_725_556_3,
        0.214_847_559_468_213,
        0.095_095_163_028_236_59,
    ],
    [-4.634_230_498_983_486, -5.799_100_973_351_585, -19.332_440_956_279_87],
    [6.228_269_936_347_081, 14.179_933_366_805_09, 56.690_552_600_681_05],
    [4.776_384_997_670_288, -13.745_145_377_746_01, -65.353_032_633_372_34],
    [-5.435_455_855_934_631, 4.645_852_612_178_535, 26.312_435_249_583_2],
];

pub fn viridis(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let mut out = [0u8; 3];
    for (ch, o) in out.iter_mut().enumerate() {
        let v = VIRIDIS.iter().rev().fold(0.0, |acc, c| acc * t + c[ch]);
        *o = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    }
    out
}

/// One pixel per cell (block-averaged down to at most `max_pixels` per
/// side), ω₁ to the right and ω₂ upward, intensity scaled to its maximum.
pub fn render_jsi(grid: &JsaGrid<f64>, max_pixels: usize) -> ImageBuffer<Rgb<u8>, Vec<u8>> {
    let n = grid.cells();
    let block = n.div_ceil(max_pixels.max(1));
    let px = n.div_ceil(block);
    let mut acc = vec![0.0; px * px];
    for i in 0..n {
        for j in 0..n {
            acc[(i / block) * px + j / block] += grid.at(i, j).norm_sqr();
        }
    }
    let peak = acc.iter().copied().fold(0.0, f64::max);
    ImageBuffer::from_fn(px as u32, px as u32, |x, y| {
        let (i, j) = (x as usize, px - 1 - y as usize);
        let t = if peak > 0.0 { acc[i * px + j] / peak } else { 0.0 };
        Rgb(viridis(t))
    })
}

pub fn write_jsi(path: &Path, grid: &JsaGrid<f64>, max_pixels: usize) -> Result<(), WriteError> {
    render_jsi(grid, max_pixels).save(path).map_err(|e| WriteError {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })
}
