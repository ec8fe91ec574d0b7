//! Sliding-window detection over a grayscale frame, with greedy
//! non-maximum suppression of overlapping responses.

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

use super::hog::{hog, HogParams, Window};
use super::image::GrayImage;
use super::svm::{svm_score, LinearSvmModel};
use super::FeatureError;

/// An axis-aligned pixel box, `(x, y)` at the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// One detector response. The foot point is the box's bottom-center, the
/// coordinate handed to the ground-plane homography.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: PixelBox,
    pub score: f64,
}

impl Detection {
    pub fn foot_point(&self) -> Point2 {
        Point2::new(self.bbox.x + self.bbox.w / 2.0, self.bbox.y + self.bbox.h)
    }
}

/// Intersection-over-union of two boxes; 0 when either is empty.
pub fn iou(a: &PixelBox, b: &PixelBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    let union = a.w * a.h + b.w * b.h - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Greedy non-maximum suppression: keep boxes in descending score order,
/// dropping any box whose IoU with an already-kept box exceeds the
/// threshold. Score ties keep the earlier input box first.
pub fn nms(dets: &[Detection], iou_threshold: f64) -> Vec<Detection> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score).then(a.cmp(&b)));
    let mut kept: Vec<Detection> = Vec::new();
    for idx in order {
        if kept.iter().all(|k| iou(&k.bbox, &dets[idx].bbox) <= iou_threshold) {
            kept.push(dets[idx]);
        }
    }
    kept
}

/// Slides the model's window over the image in row-major order, keeps
/// windows scoring above the model threshold, and reduces them by NMS.
/// Returned detections are sorted by descending score.
pub fn detect(
    img: &GrayImage,
    model: &LinearSvmModel,
    params: &HogParams,
    stride: usize,
    nms_iou: f64,
) -> Result<Vec<Detection>, FeatureError> {
    if stride == 0 {
        return Err(FeatureError::BadGeometry("stride must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&nms_iou) {
        return Err(FeatureError::BadGeometry(format!(
            "nms_iou {nms_iou} outside [0, 1)"
        )));
    }
    let expected = params.descriptor_len();
    if model.weights.len() != expected {
        return Err(FeatureError::LengthMismatch { expected, got: model.weights.len() });
    }
    let (ww, wh) = (params.window_w, params.window_h);
    let mut candidates = Vec::new();
    if img.width >= ww && img.height >= wh {
        for y in (0..=img.height - wh).step_by(stride) {
            for x in (0..=img.width - ww).step_by(stride) {
                let d = hog(img, Window::new(x, y, ww, wh), params)?;
                let score = svm_score(model, &d)?;
                if score > model.threshold {
                    candidates.push(Detection {
                        bbox: PixelBox { x: x as f64, y: y as f64, w: ww as f64, h: wh as f64 },
                        score,
                    });
                }
            }
        }
    }
    Ok(nms(&candidates, nms_iou))
}
