//! End-to-end harness: feeds rendered frames through the tracker and the
//! identity registry, exports trajectory and binding logs, and scores the
//! result against ground truth.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ScenarioSpec, SimError, SimFrame};
use crate::features::{Detection, PixelBox};
use crate::geometry::Point2;
use crate::reid::{BindingRow, PlayerRegistry, RearViewObservation};
use crate::tracker::{
    associate, TrackEventKind, TrackState, TrackerConfig, TrackerState, TrajectoryRow,
};

/// World distance (meters) within which a truth player and a track are
/// considered the same object during evaluation.
pub const EVAL_GATE: f64 = 1.0;

/// Which camera feeds the tracker. `Fused` is the full two-camera design:
/// top view drives tracking, rear view supplies identity features.
/// `RearOnly` is the single-camera ablation: the rear view must do both
/// jobs, so occlusion merges corrupt tracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    Fused,
    RearOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub mode: PipelineMode,
    pub gate_radius: f64,
    pub max_missed: u32,
    pub match_threshold: f64,
    pub pairing_gate: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode: PipelineMode::Fused,
            gate_radius: crate::tracker::TrackerConfig::default().gate_radius,
            max_missed: crate::tracker::TrackerConfig::default().max_missed,
            match_threshold: crate::reid::DEFAULT_MATCH_THRESHOLD,
            pairing_gate: crate::reid::DEFAULT_PAIRING_GATE,
        }
    }
}

/// Tracking quality against ground truth.
///
/// `id_switches` counts frames where a truth player's bound player id
/// differs from the previous binding for that player (logout gaps are
/// ignored). `reid_failures` counts entry events bound to a different id
/// than the nearest truth player's established one. `trajectory_rmse` is
/// over matched (truth, track) pairs. `frames_fully_correct` is the
/// fraction of frames where every visible truth player is bound to its
/// stable id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub id_switches: u64,
    pub reid_failures: u64,
    pub trajectory_rmse: f64,
    pub frames_fully_correct: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub trajectories: Vec<TrajectoryRow>,
    pub bindings: Vec<BindingRow>,
    pub report: EvalReport,
    pub registry: PlayerRegistry,
}

fn synthetic_detection(obs: &RearViewObservation) -> Detection {
    Detection {
        bbox: PixelBox {
            x: obs.image_point.x - super::DET_BOX_W / 2.0,
            y: obs.image_point.y - super::DET_BOX_H,
            w: super::DET_BOX_W,
            h: super::DET_BOX_H,
        },
        score: 1.0,
    }
}

/// Renders the scenario and runs the tracking pipeline over it.
pub fn run_pipeline(
    spec: &ScenarioSpec,
    options: &PipelineOptions,
) -> Result<PipelineOutput, SimError> {
    let frames = super::simulate(spec)?;
    run_pipeline_on_frames(spec, &frames, options)
}

/// Runs the tracking pipeline over pre-rendered frames. Splitting this
/// from `run_pipeline` lets ablations reuse the exact same frames.
pub fn run_pipeline_on_frames(
    spec: &ScenarioSpec,
    frames: &[SimFrame],
    options: &PipelineOptions,
) -> Result<PipelineOutput, SimError> {
    let calibration = match options.mode {
        PipelineMode::Fused => spec.top_cal.clone(),
        PipelineMode::RearOnly => spec.rear_cal.clone(),
    };
    let mut tracker = TrackerState::new(
        spec.court.clone(),
        calibration,
        TrackerConfig {
            gate_radius: options.gate_radius,
            max_missed: options.max_missed,
        },
    );
    let mut registry = PlayerRegistry::new(options.match_threshold, options.pairing_gate);

    let mut trajectories = Vec::new();
    let mut binding_rows = Vec::new();
    let mut last_bound: HashMap<String, u64> = HashMap::new();
    let mut stable: HashMap<String, u64> = HashMap::new();
    let mut id_switches = 0u64;
    let mut reid_failures = 0u64;
    let mut sq_sum = 0.0;
    let mut samples = 0u64;
    let mut correct_frames = 0u64;

    for frame in frames {
        let dets: Vec<Detection> = match options.mode {
            PipelineMode::Fused => frame.top_detections.clone(),
            PipelineMode::RearOnly => {
                frame.rear_observations.iter().map(synthetic_detection).collect()
            }
        };
        let events = tracker.step(frame.frame_index, &dets)?;
        let bindings = registry.process_frame(&events, &frame.rear_observations)?;

        let mut frame_rows: Vec<TrajectoryRow> = tracker
            .active_tracks()
            .map(|t| TrajectoryRow {
                frame_index: frame.frame_index,
                track_id: t.track_id,
                world: t.world_position(),
                state: TrackState::Active,
            })
            .collect();
        for e in events.iter().filter(|e| e.kind == TrackEventKind::Exited) {
            frame_rows.push(TrajectoryRow {
                frame_index: frame.frame_index,
                track_id: e.track_id,
                world: e.position,
                state: TrackState::Exited,
            });
        }
        frame_rows.sort_by_key(|r| r.track_id);
        trajectories.extend(frame_rows);
        binding_rows.extend(bindings.iter().map(|b| BindingRow {
            frame_index: frame.frame_index,
            track_id: b.track_id,
            player_id: b.player_id,
        }));

        let binding_of: HashMap<u64, u64> =
            bindings.iter().map(|b| (b.track_id, b.player_id)).collect();
        let visible: Vec<&super::TruthEntry> =
            frame.truth.iter().filter(|t| t.visible).collect();
        let truth_positions: Vec<(u64, Point2)> = visible
            .iter()
            .enumerate()
            .map(|(i, t)| (i as u64, t.position))
            .collect();
        let active: Vec<(u64, Point2)> = tracker
            .active_tracks()
            .map(|t| (t.track_id, t.world_position()))
            .collect();
        let track_positions: Vec<Point2> = active.iter().map(|&(_, p)| p).collect();
        let matching = associate(&truth_positions, &track_positions, EVAL_GATE);

        let mut frame_correct = true;
        let mut matched_truths: HashSet<u64> = HashSet::new();
        for &(truth_idx, track_slot) in &matching.matched {
            let truth = visible[truth_idx as usize];
            let (track_id, track_pos) = active[track_slot];
            let d = truth.position.distance(track_pos);
            sq_sum += d * d;
            samples += 1;
            matched_truths.insert(truth_idx);
            match binding_of.get(&track_id) {
                Some(&player_id) => {
                    if let Some(&prev) = last_bound.get(&truth.name) {
                        if prev != player_id {
                            id_switches += 1;
                        }
                    }
                    last_bound.insert(truth.name.clone(), player_id);
                    let stable_id = *stable.entry(truth.name.clone()).or_insert(player_id);
                    if player_id != stable_id {
                        frame_correct = false;
                    }
                }
                None => frame_correct = false,
            }
        }
        if matched_truths.len() != visible.len() {
            frame_correct = false;
        }
        if frame_correct {
            correct_frames += 1;
        }

        for e in events.iter().filter(|e| e.kind == TrackEventKind::Entered) {
            let Some(&player_id) = binding_of.get(&e.track_id) else {
                continue;
            };
            let nearest = visible
                .iter()
                .map(|t| (t.position.distance(e.position), &t.name))
                .filter(|(d, _)| *d <= EVAL_GATE)
                .min_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((_, name)) = nearest {
                if let Some(&stable_id) = stable.get(name) {
                    if player_id != stable_id {
                        reid_failures += 1;
                    }
                }
            }
        }
    }

    let trajectory_rmse = if samples > 0 { (sq_sum / samples as f64).sqrt() } else { 0.0 };
    let frames_fully_correct = if frames.is_empty() {
        1.0
    } else {
        correct_frames as f64 / frames.len() as f64
    };
    Ok(PipelineOutput {
        trajectories,
        bindings: binding_rows,
        report: EvalReport {
            id_switches,
            reid_failures,
            trajectory_rmse,
            frames_fully_correct,
        },
        registry,
    })
}
