//! Top-view track maintenance: detections are lifted to world coordinates,
//! associated to tracks by a distance-gated greedy matcher, and entry/exit
//! events are emitted as players appear on or leave the court.

use thiserror::Error;

use crate::features::Detection;
use crate::geometry::{CameraCalibration, CourtModel, GeometryError, Point2};

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("frame {frame_index} is not greater than the last stepped frame {last}")]
    NonMonotonicFrame { frame_index: u64, last: u64 },
    #[error("zero variance: correlation is undefined for a constant signal")]
    ZeroVariance,
    #[error("shape mismatch: template has {expected} samples, candidate {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackState {
    Active,
    Exited,
}

/// One recorded observation of a track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub frame_index: u64,
    /// Top-view pixel position (detection foot point).
    pub pixel: Point2,
    /// The same point lifted through the top-view calibration.
    pub world: Point2,
}

/// A single player's top-view track. Points are strictly increasing in
/// frame index; coasted (unmatched) frames record nothing.
#[derive(Debug, Clone)]
pub struct Track {
    pub track_id: u64,
    pub points: Vec<TrackPoint>,
    pub last_seen: u64,
    pub state: TrackState,
    /// Optional appearance template for correlation scoring.
    pub template: Option<Vec<f64>>,
    missed: u32,
    outside_streak: u32,
}

impl Track {
    /// Last known world position.
    pub fn world_position(&self) -> Point2 {
        self.points.last().expect("tracks are created with a first point").world
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackEventKind {
    Entered,
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackEvent {
    pub kind: TrackEventKind,
    pub track_id: u64,
    pub frame_index: u64,
    pub position: Point2,
}

/// The result of one association round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    /// (track_id, detection index) pairs, in match order.
    pub matched: Vec<(u64, usize)>,
    pub unmatched_tracks: Vec<u64>,
    pub unmatched_dets: Vec<usize>,
}

/// Globally greedy one-to-one assignment on ascending pairwise distance.
///
/// Tracks are given as (track_id, last world position). Pairs farther apart
/// than `gate_radius` are never matched. Distance ties break on lowest
/// track id, then lexicographically smallest detection position, so the
/// matching is deterministic under permutation of the detections.
pub fn associate(tracks: &[(u64, Point2)], dets: &[Point2], gate_radius: f64) -> Association {
    let mut pairs = Vec::new();
    for &(track_id, pos) in tracks {
        for (di, d) in dets.iter().enumerate() {
            let dist = pos.distance(*d);
            if dist <= gate_radius {
                pairs.push((dist, track_id, di));
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| dets[a.2].x.total_cmp(&dets[b.2].x))
            .then_with(|| dets[a.2].y.total_cmp(&dets[b.2].y))
            .then_with(|| a.2.cmp(&b.2))
    });

    let mut matched = Vec::new();
    let mut track_used: Vec<bool> = vec![false; tracks.len()];
    let mut det_used = vec![false; dets.len()];
    let track_slot: std::collections::HashMap<u64, usize> =
        tracks.iter().enumerate().map(|(i, &(id, _))| (id, i)).collect();
    for (_, track_id, di) in pairs {
        let slot = track_slot[&track_id];
        if !track_used[slot] && !det_used[di] {
            track_used[slot] = true;
            det_used[di] = true;
            matched.push((track_id, di));
        }
    }
    Association {
        matched,
        unmatched_tracks: tracks
            .iter()
            .enumerate()
            .filter(|(i, _)| !track_used[*i])
            .map(|(_, &(id, _))| id)
            .collect(),
        unmatched_dets: (0..dets.len()).filter(|&i| !det_used[i]).collect(),
    }
}

/// Zero-mean normalized cross-correlation of two equal-length signals.
pub fn ncc_score(template: &[f64], candidate: &[f64]) -> Result<f64, TrackerError> {
    if template.len() != candidate.len() || template.is_empty() {
        return Err(TrackerError::ShapeMismatch {
            expected: template.len(),
            got: candidate.len(),
        });
    }
    let n = template.len() as f64;
    let mean_t = template.iter().sum::<f64>() / n;
    let mean_c = candidate.iter().sum::<f64>() / n;
    let mut cross = 0.0;
    let mut var_t = 0.0;
    let mut var_c = 0.0;
    for (t, c) in template.iter().zip(candidate) {
        let (dt, dc) = (t - mean_t, c - mean_c);
        cross += dt * dc;
        var_t += dt * dt;
        var_c += dc * dc;
    }
    if var_t == 0.0 || var_c == 0.0 {
        return Err(TrackerError::ZeroVariance);
    }
    Ok((cross / (var_t.sqrt() * var_c.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    /// Largest world distance (meters) at which a detection can extend a
    /// track.
    pub gate_radius: f64,
    /// Consecutive unmatched frames after which a track exits; also the
    /// persistence required of the out-of-bounds exit condition.
    pub max_missed: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig { gate_radius: 1.5, max_missed: 5 }
    }
}

/// Mutable tracker state for one match. Single-writer: `step` must be
/// called from one logical thread; the state may move between threads
/// between calls.
#[derive(Debug, Clone)]
pub struct TrackerState {
    pub tracks: Vec<Track>,
    pub next_track_id: u64,
    pub gate_radius: f64,
    pub max_missed: u32,
    pub court: CourtModel,
    pub calibration: CameraCalibration,
    last_frame: Option<u64>,
}

impl TrackerState {
    pub fn new(court: CourtModel, calibration: CameraCalibration, config: TrackerConfig) -> Self {
        TrackerState {
            tracks: Vec::new(),
            next_track_id: 0,
            gate_radius: config.gate_radius,
            max_missed: config.max_missed,
            court,
            calibration,
            last_frame: None,
        }
    }

    pub fn active_tracks(&self) -> impl Iterator<Item = &Track> {
        self.tracks.iter().filter(|t| t.state == TrackState::Active)
    }

    pub fn track(&self, track_id: u64) -> Option<&Track> {
        self.tracks.iter().find(|t| t.track_id == track_id)
    }

    /// Advances the tracker by one frame of top-view detections.
    ///
    /// Detections are lifted to world coordinates, associated to active
    /// tracks, and leftovers inside the court spawn new tracks (`entered`).
    /// A track exits (`exited`) after more than `max_missed` consecutive
    /// unmatched frames, or once its position has stayed outside the court
    /// plus boundary margin for `max_missed` consecutive frames.
    pub fn step(
        &mut self,
        frame_index: u64,
        dets: &[Detection],
    ) -> Result<Vec<TrackEvent>, TrackerError> {
        if let Some(last) = self.last_frame {
            if frame_index <= last {
                return Err(TrackerError::NonMonotonicFrame { frame_index, last });
            }
        }
        self.last_frame = Some(frame_index);

        let mut worlds = Vec::with_capacity(dets.len());
        for d in dets {
            worlds.push(self.calibration.to_world.project(d.foot_point())?);
        }

        let id_positions: Vec<(u64, Point2)> = self
            .active_tracks()
            .map(|t| (t.track_id, t.world_position()))
            .collect();
        let assoc = associate(&id_positions, &worlds, self.gate_radius);

        for &(track_id, di) in &assoc.matched {
            let track = self
                .tracks
                .iter_mut()
                .find(|t| t.track_id == track_id)
                .expect("matched ids come from active tracks");
            track.points.push(TrackPoint {
                frame_index,
                pixel: dets[di].foot_point(),
                world: worlds[di],
            });
            track.last_seen = frame_index;
            track.missed = 0;
        }
        for &track_id in &assoc.unmatched_tracks {
            let track = self.tracks.iter_mut().find(|t| t.track_id == track_id).unwrap();
            track.missed += 1;
        }

        let mut events = Vec::new();
        for track in &mut self.tracks {
            if track.state != TrackState::Active {
                continue;
            }
            if self.court.contains_with_margin(track.world_position()) {
                track.outside_streak = 0;
            } else {
                track.outside_streak += 1;
            }
            if track.missed > self.max_missed || track.outside_streak >= self.max_missed {
                track.state = TrackState::Exited;
                events.push(TrackEvent {
                    kind: TrackEventKind::Exited,
                    track_id: track.track_id,
                    frame_index,
                    position: track.world_position(),
                });
            }
        }

        for &di in &assoc.unmatched_dets {
            if !self.court.contains(worlds[di]) {
                continue;
            }
            let track_id = self.next_track_id;
            self.next_track_id += 1;
            self.tracks.push(Track {
                track_id,
                points: vec![TrackPoint {
                    frame_index,
                    pixel: dets[di].foot_point(),
                    world: worlds[di],
                }],
                last_seen: frame_index,
                state: TrackState::Active,
                template: None,
                missed: 0,
                outside_streak: 0,
            });
            events.push(TrackEvent {
                kind: TrackEventKind::Entered,
                track_id,
                frame_index,
                position: worlds[di],
            });
        }
        // Exits come first so a same-frame exit/enter pair replays in
        // registry order.
        events.sort_by_key(|e| (e.kind == TrackEventKind::Entered, e.track_id));
        Ok(events)
    }
}

/// The recorded world-coordinate series of one track.
pub fn trajectory_world(track: &Track) -> Vec<(u64, Point2)> {
    track.points.iter().map(|p| (p.frame_index, p.world)).collect()
}

/// One exported trajectory row; the CSV schema is
/// `frame_index,track_id,world_x_m,world_y_m,state`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub frame_index: u64,
    pub track_id: u64,
    pub world: Point2,
    pub state: TrackState,
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from("frame_index,track_id,world_x_m,world_y_m,state\n");
    for r in rows {
        let state = match r.state {
            TrackState::Active => "active",
            TrackState::Exited => "exited",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.frame_index, r.track_id, r.world.x, r.world.y, state
        ));
    }
    out
}
