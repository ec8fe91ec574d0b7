//! Histogram-of-oriented-gradients descriptors over grayscale windows.
//!
//! The window is treated as a self-contained patch: gradients use central
//! differences inside it and one-sided differences on its borders, so a
//! descriptor depends only on the pixels of its own window.

use serde::{Deserialize, Serialize};

use super::image::GrayImage;
use super::FeatureError;

// Block norms at or below this are flushed to zero instead of normalized,
// which keeps constant windows at an exactly-zero descriptor.
const NORM_FLOOR: f64 = 1e-12;

/// Descriptor layout parameters. Defaults are the canonical pedestrian
/// configuration: 64x128 window, 8 px cells, 2x2-cell blocks, 9 unsigned
/// orientation bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HogParams {
    /// Detection window width in pixels.
    pub window_w: usize,
    /// Detection window height in pixels.
    pub window_h: usize,
    /// Cell side in pixels.
    pub cell: usize,
    /// Block side in cells; blocks overlap with stride one cell.
    pub block: usize,
    /// Unsigned orientation bins over [0, 180).
    pub bins: usize,
}

impl Default for HogParams {
    fn default() -> Self {
        HogParams { window_w: 64, window_h: 128, cell: 8, block: 2, bins: 9 }
    }
}

impl HogParams {
    /// Descriptor length for a window of the given pixel dimensions.
    pub fn descriptor_len_for(&self, w: usize, h: usize) -> usize {
        let (cx, cy) = (w / self.cell, h / self.cell);
        let (bx, by) = (cx + 1 - self.block, cy + 1 - self.block);
        bx * by * self.block * self.block * self.bins
    }

    /// Descriptor length for the default window size (3780 for defaults).
    pub fn descriptor_len(&self) -> usize {
        self.descriptor_len_for(self.window_w, self.window_h)
    }

    fn validate(&self) -> Result<(), FeatureError> {
        if self.cell == 0 || self.block == 0 || self.bins == 0 {
            return Err(FeatureError::BadGeometry(
                "cell, block, and bins must all be nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// An integer pixel window inside an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Window {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Window { x, y, w, h }
    }
}

/// Per-pixel gradient magnitudes and unsigned orientations in degrees
/// [0, 180), row-major.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    pub orientation: Vec<f64>,
}

/// Computes [-1, 0, 1] central-difference gradients, falling back to
/// one-sided differences on the image border.
pub fn gradients(img: &GrayImage) -> Result<GradientField, FeatureError> {
    if img.width < 3 || img.height < 3 {
        return Err(FeatureError::ImageTooSmall { width: img.width, height: img.height });
    }
    let (w, h) = (img.width, img.height);
    let mut magnitude = vec![0.0; w * h];
    let mut orientation = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let gx = img.get((x + 1).min(w - 1), y) - img.get(x.saturating_sub(1), y);
            let gy = img.get(x, (y + 1).min(h - 1)) - img.get(x, y.saturating_sub(1));
            let idx = y * w + x;
            magnitude[idx] = gx.hypot(gy);
            orientation[idx] = unsigned_angle(gx, gy);
        }
    }
    Ok(GradientField { width: w, height: h, magnitude, orientation })
}

fn unsigned_angle(gx: f64, gy: f64) -> f64 {
    let mut deg = gy.atan2(gx).to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    deg
}

/// A dense HOG descriptor together with the layout it was computed under.
#[derive(Debug, Clone, PartialEq)]
pub struct HogDescriptor {
    pub values: Vec<f64>,
    /// Layout parameters; `window_w`/`window_h` are the dimensions of the
    /// window this descriptor was actually computed over.
    pub params: HogParams,
}

/// Computes the descriptor of one window: per-cell orientation histograms
/// with bilinear votes split across the two nearest bins, overlapping
/// `block`x`block`-cell blocks at one-cell stride, L2-Hys normalization
/// per block (clip at 0.2, renormalize).
pub fn hog(
    img: &GrayImage,
    window: Window,
    params: &HogParams,
) -> Result<HogDescriptor, FeatureError> {
    params.validate()?;
    if window.x + window.w > img.width || window.y + window.h > img.height {
        return Err(FeatureError::WindowOutOfBounds {
            x: window.x,
            y: window.y,
            w: window.w,
            h: window.h,
            img_w: img.width,
            img_h: img.height,
        });
    }
    if window.w % params.cell != 0 || window.h % params.cell != 0 {
        return Err(FeatureError::BadGeometry(format!(
            "window {}x{} is not divisible by the {} px cell",
            window.w, window.h, params.cell
        )));
    }
    let (cells_x, cells_y) = (window.w / params.cell, window.h / params.cell);
    if cells_x < params.block || cells_y < params.block {
        return Err(FeatureError::BadGeometry(format!(
            "{cells_x}x{cells_y} cells cannot host a {0}x{0}-cell block",
            params.block
        )));
    }

    let crop = GrayImage::from_fn(window.w, window.h, |x, y| {
        img.get(window.x + x, window.y + y)
    });
    let grads = gradients(&crop)?;

    // One pass over the window fills all cell histograms; blocks then reuse
    // them instead of revisiting pixels.
    let bins = params.bins;
    let mut hist = vec![0.0; cells_x * cells_y * bins];
    let bin_width = 180.0 / bins as f64;
    for y in 0..window.h {
        for x in 0..window.w {
            let idx = y * window.w + x;
            let m = grads.magnitude[idx];
            let cell_base = ((y / params.cell) * cells_x + x / params.cell) * bins;
            let centered = grads.orientation[idx] / bin_width - 0.5;
            let lower = centered.floor();
            let frac = centered - lower;
            let b0 = (lower as i64).rem_euclid(bins as i64) as usize;
            let b1 = (b0 + 1) % bins;
            hist[cell_base + b0] += m * (1.0 - frac);
            hist[cell_base + b1] += m * frac;
        }
    }

    let (blocks_x, blocks_y) = (cells_x + 1 - params.block, cells_y + 1 - params.block);
    let block_len = params.block * params.block * bins;
    let mut values = Vec::with_capacity(blocks_x * blocks_y * block_len);
    let mut block = vec![0.0; block_len];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            let mut k = 0;
            for cy in by..by + params.block {
                for cx in bx..bx + params.block {
                    let base = (cy * cells_x + cx) * bins;
                    block[k..k + bins].copy_from_slice(&hist[base..base + bins]);
                    k += bins;
                }
            }
            l2_hys(&mut block);
            values.extend_from_slice(&block);
        }
    }
    Ok(HogDescriptor {
        values,
        params: HogParams { window_w: window.w, window_h: window.h, ..*params },
    })
}

fn l2_hys(v: &mut [f64]) {
    let n1 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n1 <= NORM_FLOOR {
        v.fill(0.0);
        return;
    }
    for x in v.iter_mut() {
        *x = (*x / n1).min(0.2);
    }
    let n2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n2 <= NORM_FLOOR {
        v.fill(0.0);
        return;
    }
    for x in v.iter_mut() {
        *x /= n2;
    }
}

#[cfg(test)]
pub(crate) mod naive {
    //! Brute-force reference implementation, written independently of the
    //! production path: every block revisits its pixels and recomputes
    //! gradients directly from image differences.

    use super::super::image::GrayImage;
    use super::{HogParams, Window};

    fn pixel(img: &GrayImage, window: Window, x: i64, y: i64) -> f64 {
        let cx = x.clamp(0, window.w as i64 - 1) as usize;
        let cy = y.clamp(0, window.h as i64 - 1) as usize;
        img.get(window.x + cx, window.y + cy)
    }

    fn cell_histogram(
        img: &GrayImage,
        window: Window,
        cell_x: usize,
        cell_y: usize,
        p: &HogParams,
    ) -> Vec<f64> {
        let mut hist = vec![0.0; p.bins];
        for dy in 0..p.cell {
            for dx in 0..p.cell {
                let x = (cell_x * p.cell + dx) as i64;
                let y = (cell_y * p.cell + dy) as i64;
                let gx = pixel(img, window, x + 1, y) - pixel(img, window, x - 1, y);
                let gy = pixel(img, window, x, y + 1) - pixel(img, window, x, y - 1);
                let mag = (gx * gx + gy * gy).sqrt();
                let mut angle = gy.atan2(gx) * 180.0 / std::f64::consts::PI;
                while angle < 0.0 {
                    angle += 180.0;
                }
                while angle >= 180.0 {
                    angle -= 180.0;
                }
                let pos = angle / (180.0 / p.bins as f64) - 0.5;
                let low = pos.floor() as i64;
                let t = pos - pos.floor();
                let b0 = low.rem_euclid(p.bins as i64) as usize;
                let b1 = (low + 1).rem_euclid(p.bins as i64) as usize;
                hist[b0] += mag * (1.0 - t);
                hist[b1] += mag * t;
            }
        }
        hist
    }

    pub fn naive_hog(img: &GrayImage, window: Window, p: &HogParams) -> Vec<f64> {
        let cells_x = window.w / p.cell;
        let cells_y = window.h / p.cell;
        let mut out = Vec::new();
        for by in 0..cells_y + 1 - p.block {
            for bx in 0..cells_x + 1 - p.block {
                let mut block = Vec::new();
                for cy in by..by + p.block {
                    for cx in bx..bx + p.block {
                        block.extend(cell_histogram(img, window, cx, cy, p));
                    }
                }
                let norm = block.iter().fold(0.0, |acc, v| acc + v * v).sqrt();
                if norm <= 1e-12 {
                    block.iter_mut().for_each(|v| *v = 0.0);
                } else {
                    block.iter_mut().for_each(|v| *v = (*v / norm).min(0.2));
                    let norm2 = block.iter().fold(0.0, |acc, v| acc + v * v).sqrt();
                    if norm2 <= 1e-12 {
                        block.iter_mut().for_each(|v| *v = 0.0);
                    } else {
                        block.iter_mut().for_each(|v| *v /= norm2);
                    }
                }
                out.extend(block);
            }
        }
        out
    }
}
