//! Appearance features for the rear-view camera: grayscale images, HOG
//! descriptors, linear SVM scoring, sliding-window detection, and the
//! cosine similarity used for re-identification matching.

mod detect;
mod hog;
mod image;
mod svm;

pub use detect::{detect, iou, nms, Detection, PixelBox};
pub use hog::{gradients, hog, GradientField, HogDescriptor, HogParams, Window};
pub use image::{load_pgm, save_pgm, GrayImage};
pub use svm::{load_svm_model, save_svm_model, svm_score, DetectorModel, LinearSvmModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("image {width}x{height} is smaller than the 3x3 gradient support")]
    ImageTooSmall { width: usize, height: usize },
    #[error("window {x},{y} {w}x{h} exceeds the {img_w}x{img_h} image")]
    WindowOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        img_w: usize,
        img_h: usize,
    },
    #[error("bad descriptor geometry: {0}")]
    BadGeometry(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cosine of the angle between two equal-length nonzero vectors.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, FeatureError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(FeatureError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(FeatureError::ZeroVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
