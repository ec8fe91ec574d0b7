//! Grayscale frame storage and dependency-free PGM (P5) input/output.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::FeatureError;

/// A row-major grayscale image with intensities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, FeatureError> {
        if data.len() != width * height {
            return Err(FeatureError::InvalidImage(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(FeatureError::InvalidImage(format!(
                "intensity {v} outside [0, 1]"
            )));
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..width * height)
            .map(|i| f(i % width, i / width).clamp(0.0, 1.0))
            .collect();
        GrayImage { width, height, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Loads an 8-bit binary PGM (magic `P5`), mapping intensities to [0, 1]
/// by dividing by 255.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, FeatureError> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;

    // Header tokens are separated by whitespace; `#` starts a comment that
    // runs to end of line.
    let mut next_token = |bytes: &[u8]| -> Result<String, FeatureError> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(FeatureError::MalformedPgm("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if next_token(&bytes)? != "P5" {
        return Err(FeatureError::MalformedPgm("magic is not P5".into()));
    }
    let parse = |tok: String| {
        tok.parse::<usize>()
            .map_err(|_| FeatureError::MalformedPgm(format!("bad header number {tok:?}")))
    };
    let width = parse(next_token(&bytes)?)?;
    let height = parse(next_token(&bytes)?)?;
    let maxval = parse(next_token(&bytes)?)?;
    if width == 0 || height == 0 {
        return Err(FeatureError::MalformedPgm("zero dimension".into()));
    }
    if !(1..=255).contains(&maxval) {
        return Err(FeatureError::MalformedPgm(format!(
            "maxval {maxval} is not 8-bit"
        )));
    }
    // Exactly one whitespace byte separates the header from pixel data.
    pos += 1;
    let expected = width * height;
    let pixels = bytes.get(pos..pos + expected).ok_or_else(|| {
        FeatureError::MalformedPgm(format!(
            "expected {expected} pixel bytes, found {}",
            bytes.len().saturating_sub(pos)
        ))
    })?;
    let data = pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
    GrayImage::new(width, height, data)
}

/// Writes an 8-bit binary PGM, mapping [0, 1] intensities to 0..=255.
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), FeatureError> {
    let mut out = Vec::with_capacity(img.data.len() + 32);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height)?;
    out.extend(img.data.iter().map(|v| (v * 255.0).round() as u8));
    fs::write(path, out)?;
    Ok(())
}
