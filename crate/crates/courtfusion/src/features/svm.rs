//! Linear SVM inference and the on-disk detector model format. Training is
//! out of scope; models are constructed or loaded from JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hog::{HogDescriptor, HogParams};
use super::FeatureError;

/// Inference-side linear SVM: score = weights . descriptor + bias, with a
/// decision threshold on the score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

/// A linear SVM together with the descriptor layout it was built for; the
/// JSON model-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
    pub hog: HogParams,
}

impl DetectorModel {
    pub fn svm(&self) -> LinearSvmModel {
        LinearSvmModel {
            weights: self.weights.clone(),
            bias: self.bias,
            threshold: self.threshold,
        }
    }
}

/// Loads a detector model, rejecting weights that do not match the
/// descriptor length implied by its HOG parameters.
pub fn load_svm_model(path: impl AsRef<Path>) -> Result<DetectorModel, FeatureError> {
    let text = fs::read_to_string(path)?;
    let model: DetectorModel = serde_json::from_str(&text)
        .map_err(|e| FeatureError::InvalidImage(format!("model JSON: {e}")))?;
    let expected = model.hog.descriptor_len();
    if model.weights.len() != expected {
        return Err(FeatureError::LengthMismatch { expected, got: model.weights.len() });
    }
    Ok(model)
}

pub fn save_svm_model(model: &DetectorModel, path: impl AsRef<Path>) -> Result<(), FeatureError> {
    let text = serde_json::to_string_pretty(model).expect("model serializes");
    fs::write(path, text)?;
    Ok(())
}

/// Raw SVM decision value for one descriptor.
pub fn svm_score(model: &LinearSvmModel, d: &HogDescriptor) -> Result<f64, FeatureError> {
    if model.weights.len() != d.values.len() {
        return Err(FeatureError::LengthMismatch {
            expected: model.weights.len(),
            got: d.values.len(),
        });
    }
    let mut score = model.bias;
    for (w, v) in model.weights.iter().zip(&d.values) {
        score += w * v;
    }
    Ok(score)
}
