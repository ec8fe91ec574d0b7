//! Synthetic two-view match generator: scripted world-coordinate player
//! motion is projected through both camera homographies with additive
//! Gaussian noise, rear-view observations that fall within a pixel
//! threshold merge into one (modeling occlusion), and players can leave
//! and re-enter the court on schedule.
//!
//! Randomness contract: one ChaCha8 stream per run, seeded from the
//! scenario seed with `seed_from_u64`. Each frame processes players in
//! spec order; a visible player consumes, in order, top-view noise (x, y),
//! rear-view noise (x, y), then one standard-normal draw per feature
//! dimension. Invisible players consume nothing. This makes streams
//! reproducible across platforms and releases.

mod pipeline;
pub mod scenarios;

pub use pipeline::{
    run_pipeline, run_pipeline_on_frames, EvalReport, PipelineMode, PipelineOptions,
    PipelineOutput, EVAL_GATE,
};

use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Detection, PixelBox};
use crate::geometry::{CameraCalibration, CourtModel, GeometryError, Point2};
use crate::reid::{ReidError, RearViewObservation};
use crate::tracker::TrackerError;

/// Generator recorded in stream headers and reports so runs can be
/// reproduced by other implementations.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64";

/// Nominal pixel size of a synthesized detection box.
const DET_BOX_W: f64 = 40.0;
const DET_BOX_H: f64 = 80.0;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("malformed frame stream: {0}")]
    MalformedStream(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error(transparent)]
    Reid(#[from] ReidError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Waypoint {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// One player's scripted motion and intrinsic appearance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionScript {
    pub player_name: String,
    pub waypoints: Vec<Waypoint>,
    pub feature_basis: Vec<f64>,
}

/// A scheduled absence: the player is missing from both views for
/// `t_exit <= t < t_return`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitEvent {
    pub player: String,
    pub t_exit: f64,
    pub t_return: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub court: CourtModel,
    pub top_cal: CameraCalibration,
    pub rear_cal: CameraCalibration,
    pub players: Vec<MotionScript>,
    #[serde(default = "defaults::fps")]
    pub fps: u32,
    /// Episode length in seconds.
    pub duration: f64,
    /// Per-axis world-coordinate noise (meters) applied independently per
    /// camera before projection.
    #[serde(default = "defaults::noise_sigma")]
    pub noise_sigma: f64,
    /// Rear-view pixel distance below which observations merge.
    #[serde(default = "defaults::merge_distance")]
    pub merge_distance: f64,
    /// Magnitude of the feature perturbation orthogonal to the basis; the
    /// resulting cosine similarity to the basis is 1/sqrt(1 + noise^2).
    #[serde(default = "defaults::feature_noise")]
    pub feature_noise: f64,
    #[serde(default)]
    pub exit_events: Vec<ExitEvent>,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
}

mod defaults {
    pub fn fps() -> u32 {
        30
    }
    pub fn noise_sigma() -> f64 {
        0.05
    }
    pub fn merge_distance() -> f64 {
        60.0
    }
    pub fn feature_noise() -> f64 {
        0.2
    }
    pub fn seed() -> u64 {
        7
    }
}

impl ScenarioSpec {
    /// Parses and validates a scenario from its JSON form.
    pub fn from_json(json: &str) -> Result<Self, SimError> {
        let spec: ScenarioSpec = serde_json::from_str(json)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidScenario(msg));
        if self.name.is_empty() {
            return fail("scenario name must be nonempty".into());
        }
        if self.fps == 0 {
            return fail("fps must be positive".into());
        }
        if !(self.duration > 0.0) {
            return fail(format!("duration must be positive, got {}", self.duration));
        }
        if self.frame_count() == 0 {
            return fail("duration is shorter than one frame".into());
        }
        if !(self.noise_sigma >= 0.0) {
            return fail(format!("noise_sigma must be nonnegative, got {}", self.noise_sigma));
        }
        if !(self.merge_distance >= 0.0) {
            return fail(format!(
                "merge_distance must be nonnegative, got {}",
                self.merge_distance
            ));
        }
        if !(self.feature_noise >= 0.0) {
            return fail(format!(
                "feature_noise must be nonnegative, got {}",
                self.feature_noise
            ));
        }
        if self.players.is_empty() {
            return fail("at least one player is required".into());
        }
        let dim = self.players[0].feature_basis.len();
        for (i, script) in self.players.iter().enumerate() {
            let name = &script.player_name;
            if name.is_empty() {
                return fail(format!("player {i} has an empty name"));
            }
            if self.players[..i].iter().any(|s| s.player_name == *name) {
                return fail(format!("duplicate player name {name:?}"));
            }
            if script.waypoints.is_empty() {
                return fail(format!("player {name:?} has no waypoints"));
            }
            for w in script.waypoints.windows(2) {
                if !(w[1].t > w[0].t) {
                    return fail(format!(
                        "player {name:?} waypoint times must be strictly increasing ({} then {})",
                        w[0].t, w[1].t
                    ));
                }
            }
            let has_exit = self.exit_events.iter().any(|e| e.player == *name);
            if !has_exit {
                for w in &script.waypoints {
                    if !self.court.contains(w.position()) {
                        return fail(format!(
                            "player {name:?} waypoint ({}, {}) lies outside the court and the \
                             player has no exit events",
                            w.x, w.y
                        ));
                    }
                }
            }
            if script.feature_basis.len() != dim {
                return fail(format!(
                    "player {name:?} feature basis has length {}, expected {dim}",
                    script.feature_basis.len()
                ));
            }
            let norm: f64 = script.feature_basis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return fail(format!("player {name:?} feature basis must be nonzero"));
            }
        }
        for e in &self.exit_events {
            if !self.players.iter().any(|s| s.player_name == e.player) {
                return fail(format!("exit event references unknown player {:?}", e.player));
            }
            if !(e.t_exit < e.t_return) {
                return fail(format!(
                    "exit event for {:?} must have t_exit < t_return ({} vs {})",
                    e.player, e.t_exit, e.t_return
                ));
            }
        }
        for (i, a) in self.exit_events.iter().enumerate() {
            for b in &self.exit_events[i + 1..] {
                if a.player == b.player && a.t_exit < b.t_return && b.t_exit < a.t_return {
                    return fail(format!("overlapping exit events for player {:?}", a.player));
                }
            }
        }
        Ok(())
    }

    pub fn frame_count(&self) -> u64 {
        (self.duration * self.fps as f64).round() as u64
    }

    pub fn time_of(&self, frame_index: u64) -> f64 {
        frame_index as f64 / self.fps as f64
    }

    /// Whether `player` is scheduled to be absent from both views at `t`.
    pub fn absent_at(&self, player: &str, t: f64) -> bool {
        self.exit_events
            .iter()
            .any(|e| e.player == player && e.t_exit <= t && t < e.t_return)
    }
}

/// Ground-truth state of one player at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub name: String,
    pub position: Point2,
    pub visible: bool,
}

/// One rendered frame: what both cameras saw, plus the truth that
/// produced it (one entry per scripted player, visible or not).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimFrame {
    pub frame_index: u64,
    pub top_detections: Vec<Detection>,
    pub rear_observations: Vec<RearViewObservation>,
    pub truth: Vec<TruthEntry>,
}

/// Scripted position at time `t`: piecewise-linear between bracketing
/// waypoints, clamped to the endpoints outside the scripted range.
pub fn interpolate(script: &MotionScript, t: f64) -> Point2 {
    let wps = &script.waypoints;
    if t <= wps[0].t {
        return wps[0].position();
    }
    let last = &wps[wps.len() - 1];
    if t >= last.t {
        return last.position();
    }
    let hi = wps.partition_point(|w| w.t <= t);
    let (a, b) = (&wps[hi - 1], &wps[hi]);
    let f = (t - a.t) / (b.t - a.t);
    Point2::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
}

/// The basis plus a perturbation of magnitude `beta` orthogonal to it,
/// giving cosine similarity exactly 1/sqrt(1 + beta^2) to the basis.
fn perturbed_feature(basis: &[f64], raw: &[f64], beta: f64) -> Vec<f64> {
    let norm_b: f64 = basis.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = basis.iter().map(|v| v / norm_b).collect();
    let dot: f64 = raw.iter().zip(&unit).map(|(r, u)| r * u).sum();
    let ortho: Vec<f64> = raw.iter().zip(&unit).map(|(r, u)| r - dot * u).collect();
    let norm_o: f64 = ortho.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_o < 1e-12 {
        return unit;
    }
    unit.iter()
        .zip(&ortho)
        .map(|(u, o)| u + beta * o / norm_o)
        .collect()
}

/// Merges rear observations whose pixel distance is below the threshold.
///
/// Grouping is transitive; a merged observation sits at the pixel centroid
/// of its members (lifted back to world coordinates) and carries the
/// feature of the member with the largest image y, the one nearest the
/// rear camera and therefore in front.
fn merge_rear_observations(
    obs: Vec<RearViewObservation>,
    merge_distance: f64,
    rear_cal: &CameraCalibration,
) -> Result<Vec<RearViewObservation>, SimError> {
    let n = obs.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn root(group: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while group[r] != r {
            r = group[r];
        }
        let mut c = i;
        while group[c] != r {
            let next = group[c];
            group[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if obs[i].image_point.distance(obs[j].image_point) < merge_distance {
                let (ri, rj) = (root(&mut group, i), root(&mut group, j));
                // Union toward the smaller index so output order follows
                // first membership.
                group[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut cluster_of: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for i in 0..n {
        let r = root(&mut group, i);
        match cluster_of.get(&r) {
            Some(&c) => clusters[c].push(i),
            None => {
                cluster_of.insert(r, clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    let mut merged = Vec::with_capacity(clusters.len());
    for members in clusters {
        if members.len() == 1 {
            merged.push(obs[members[0]].clone());
            continue;
        }
        let k = members.len() as f64;
        let centroid = Point2::new(
            members.iter().map(|&i| obs[i].image_point.x).sum::<f64>() / k,
            members.iter().map(|&i| obs[i].image_point.y).sum::<f64>() / k,
        );
        let front = members
            .iter()
            .copied()
            .max_by(|&a, &b| obs[a].image_point.y.total_cmp(&obs[b].image_point.y))
            .expect("cluster is nonempty");
        merged.push(RearViewObservation {
            feature: obs[front].feature.clone(),
            image_point: centroid,
            world_point: rear_cal.to_world.project(centroid)?,
        });
    }
    Ok(merged)
}

/// Renders one frame. Draw order is documented at module level; callers
/// must advance frames sequentially on one RNG for reproducible streams.
pub fn render_frame(
    spec: &ScenarioSpec,
    frame_index: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SimFrame, SimError> {
    debug_assert!(frame_index < spec.frame_count());
    let t = spec.time_of(frame_index);
    let noise = Normal::new(0.0, spec.noise_sigma)
        .map_err(|e| SimError::InvalidScenario(format!("noise_sigma: {e}")))?;

    let mut top_detections = Vec::new();
    let mut rear_raw = Vec::new();
    let mut truth = Vec::new();
    for script in &spec.players {
        let position = interpolate(script, t);
        let visible = !spec.absent_at(&script.player_name, t);
        truth.push(TruthEntry {
            name: script.player_name.clone(),
            position,
            visible,
        });
        if !visible {
            continue;
        }

        let top_world = Point2::new(position.x + noise.sample(rng), position.y + noise.sample(rng));
        let rear_world =
            Point2::new(position.x + noise.sample(rng), position.y + noise.sample(rng));
        let dim = script.feature_basis.len();
        let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();

        let top_px = spec.top_cal.from_world.project(top_world)?;
        top_detections.push(Detection {
            bbox: PixelBox {
                x: top_px.x - DET_BOX_W / 2.0,
                y: top_px.y - DET_BOX_H,
                w: DET_BOX_W,
                h: DET_BOX_H,
            },
            score: 1.0,
        });

        let rear_px = spec.rear_cal.from_world.project(rear_world)?;
        rear_raw.push(RearViewObservation {
            feature: perturbed_feature(&script.feature_basis, &raw, spec.feature_noise),
            image_point: rear_px,
            world_point: rear_world,
        });
    }
    let rear_observations =
        merge_rear_observations(rear_raw, spec.merge_distance, &spec.rear_cal)?;
    Ok(SimFrame {
        frame_index,
        top_detections,
        rear_observations,
        truth,
    })
}

/// Renders the whole episode from the scenario's seed.
pub fn simulate(spec: &ScenarioSpec) -> Result<Vec<SimFrame>, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.frame_count())
        .map(|f| render_frame(spec, f, &mut rng))
        .collect()
}

/// First line of a frames file: the resolved scenario plus the RNG
/// identifier and frame count, enough to reproduce or validate the stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamHeader {
    pub scenario: ScenarioSpec,
    pub rng: String,
    pub frame_count: u64,
}

/// Writes the JSON Lines frame stream: one header line, then one frame
/// per line.
pub fn write_frames<W: io::Write>(
    spec: &ScenarioSpec,
    frames: &[SimFrame],
    mut out: W,
) -> Result<(), SimError> {
    let header = StreamHeader {
        scenario: spec.clone(),
        rng: RNG_ALGORITHM.to_string(),
        frame_count: frames.len() as u64,
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for frame in frames {
        writeln!(out, "{}", serde_json::to_string(frame)?)?;
    }
    Ok(())
}

/// Reads a JSON Lines frame stream produced by `write_frames`.
pub fn read_frames<R: io::BufRead>(input: R) -> Result<(ScenarioSpec, Vec<SimFrame>), SimError> {
    let mut lines = input.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| SimError::MalformedStream("empty stream, expected a header line".into()))??;
    let header: StreamHeader = serde_json::from_str(&header_line)?;
    header.scenario.validate()?;
    let mut frames = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(serde_json::from_str::<SimFrame>(&line)?);
    }
    if frames.len() as u64 != header.frame_count {
        return Err(SimError::MalformedStream(format!(
            "header declares {} frames but stream holds {}",
            header.frame_count,
            frames.len()
        )));
    }
    Ok((header.scenario, frames))
}
