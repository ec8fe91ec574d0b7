//! Two-camera player tracking for court sports.
//!
//! An overhead camera watches the whole court, so players never occlude one
//! another in it; a rear camera sees appearance detail but merges players
//! when they line up. This crate fuses the two: the top view drives
//! detection, ground-plane localization, and frame-to-frame tracking, while
//! the rear view supplies appearance features that keep identities stable
//! across exits and returns.
//!
//! Modules, in dependency order:
//!
//! - [`geometry`]: planar homographies between image and court coordinates,
//!   camera calibration from corner correspondences, court containment.
//! - [`features`]: grayscale images, HOG descriptors, linear-SVM scoring,
//!   sliding-window detection with non-maximum suppression, and cosine
//!   similarity over feature vectors.
//! - [`tracker`]: gated nearest-neighbor association of detections to
//!   world-frame tracks, with timeout and off-court exit handling.
//! - [`reid`]: a login/logout player registry that re-binds returning
//!   players to their original ids by feature similarity.
//! - [`sim`]: a scripted two-camera scenario simulator with per-camera
//!   noise and rear-view occlusion merging, plus the end-to-end pipeline
//!   and its evaluation metrics.
//! - [`plot`]: deterministic SVG rendering of tracked trajectories.
//! - [`cli`]: the `courtfusion` binary's argument surface and exit codes.
//!
//! The `examples/` directory is the guided tour; each file exercises one
//! capability end to end:
//!
//! | example | shows |
//! |---|---|
//! | `calibrate_court` | corner calibration and pixel/world round-trips |
//! | `hog_features` | descriptor layout and brightness invariance |
//! | `detect_players` | sliding-window detection over a synthetic scene |
//! | `track_crossing` | two players crossing without identity switches |
//! | `reid_relogin` | logout on exit, re-login under the original id |
//! | `simulate_and_evaluate` | fused vs rear-only metrics over seeds |
//! | `frame_streams` | the JSON Lines interchange format |
//! | `plot_trajectories` | SVG court diagrams from pipeline output |
//!
//! Fixed seeds make every simulation, pipeline run, and rendered artifact
//! byte-reproducible.

pub mod cli;
pub mod features;
pub mod geometry;
pub mod plot;
pub mod reid;
pub mod sim;
pub mod tracker;
