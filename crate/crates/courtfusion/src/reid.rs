//! Player identity registry. Tracks carry short-lived ids; this module
//! binds them to persistent player ids using rear-view appearance features,
//! so a player who leaves the court and returns gets their old id back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::cosine_similarity;
use crate::geometry::Point2;
use crate::tracker::{associate, TrackEvent, TrackEventKind};

pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.9;
pub const DEFAULT_PAIRING_GATE: f64 = 2.0;
/// Weight of the new observation when refreshing a stored feature.
const FEATURE_BLEND: f64 = 0.3;

#[derive(Debug, Error, PartialEq)]
pub enum ReidError {
    #[error("track {track_id} is not bound to any player")]
    UnknownTrack { track_id: u64 },
    #[error("track {track_id} is already bound to player {player_id}")]
    TrackAlreadyBound { track_id: u64, player_id: u64 },
    #[error("no rear-view observation within the pairing gate for entering track {track_id}")]
    NoObservationForEntry { track_id: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoginState {
    #[serde(rename = "login")]
    LoggedIn,
    #[serde(rename = "logout")]
    LoggedOut,
}

/// One known player. `track_id` is set exactly while the player is logged
/// in; a logged-out record keeps its feature and last position so the
/// player can be re-identified later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRecord {
    pub player_id: u64,
    pub state: LoginState,
    pub feature: Vec<f64>,
    pub position: Point2,
    pub track_id: Option<u64>,
}

/// An appearance sample from the rear camera: a feature vector plus the
/// observation's image and court positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearViewObservation {
    pub feature: Vec<f64>,
    pub image_point: Point2,
    pub world_point: Point2,
}

/// A track currently carrying a player identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub track_id: u64,
    pub player_id: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerRegistry {
    pub records: Vec<PlayerRecord>,
    pub next_id: u64,
    /// Smallest cosine similarity (inclusive) that re-identifies a
    /// logged-out player.
    pub match_threshold: f64,
    /// Largest world distance (meters) at which a rear-view observation
    /// can be paired with an entry event.
    pub pairing_gate: f64,
}

impl Default for PlayerRegistry {
    fn default() -> Self {
        PlayerRegistry::new(DEFAULT_MATCH_THRESHOLD, DEFAULT_PAIRING_GATE)
    }
}

impl PlayerRegistry {
    pub fn new(match_threshold: f64, pairing_gate: f64) -> Self {
        PlayerRegistry {
            records: Vec::new(),
            next_id: 0,
            match_threshold,
            pairing_gate,
        }
    }

    fn record_for_track(&self, track_id: u64) -> Option<usize> {
        self.records
            .iter()
            .position(|r| r.state == LoginState::LoggedIn && r.track_id == Some(track_id))
    }

    /// Logs out the player bound to `track_id` and returns their id. The
    /// record keeps its feature and last known position.
    pub fn handle_exit(&mut self, track_id: u64) -> Result<u64, ReidError> {
        let idx = self
            .record_for_track(track_id)
            .ok_or(ReidError::UnknownTrack { track_id })?;
        let record = &mut self.records[idx];
        record.state = LoginState::LoggedOut;
        record.track_id = None;
        Ok(record.player_id)
    }

    /// Best logged-out record with cosine similarity at or above the match
    /// threshold. Similarity ties resolve to the lowest player id;
    /// comparisons that are undefined (zero vectors, length mismatch)
    /// count as no match.
    pub fn match_feature(&self, feature: &[f64]) -> Option<u64> {
        let mut best: Option<(f64, u64)> = None;
        for r in &self.records {
            if r.state != LoginState::LoggedOut {
                continue;
            }
            let Ok(sim) = cosine_similarity(&r.feature, feature) else {
                continue;
            };
            if sim < self.match_threshold {
                continue;
            }
            // Records are in ascending id order, so strict improvement
            // keeps the lowest id on ties.
            if best.map_or(true, |(s, _)| sim > s) {
                best = Some((sim, r.player_id));
            }
        }
        best.map(|(_, id)| id)
    }

    /// Binds an entering track to a player: a re-identified logged-out
    /// player if the observation's feature matches one, a freshly
    /// registered player otherwise. Returns the player id.
    ///
    /// On re-identification the stored feature is refreshed by an
    /// exponential blend toward the new observation; the record's position
    /// becomes the observation's world point either way.
    pub fn handle_enter(
        &mut self,
        track_id: u64,
        obs: &RearViewObservation,
    ) -> Result<u64, ReidError> {
        if let Some(idx) = self.record_for_track(track_id) {
            return Err(ReidError::TrackAlreadyBound {
                track_id,
                player_id: self.records[idx].player_id,
            });
        }
        if let Some(player_id) = self.match_feature(&obs.feature) {
            let record = self
                .records
                .iter_mut()
                .find(|r| r.player_id == player_id)
                .expect("match_feature returns ids of existing records");
            record.state = LoginState::LoggedIn;
            record.track_id = Some(track_id);
            record.position = obs.world_point;
            if record.feature.len() == obs.feature.len() {
                for (old, new) in record.feature.iter_mut().zip(&obs.feature) {
                    *old = (1.0 - FEATURE_BLEND) * *old + FEATURE_BLEND * new;
                }
            }
            return Ok(player_id);
        }
        let player_id = self.next_id;
        self.next_id += 1;
        self.records.push(PlayerRecord {
            player_id,
            state: LoginState::LoggedIn,
            feature: obs.feature.clone(),
            position: obs.world_point,
            track_id: Some(track_id),
        });
        Ok(player_id)
    }

    /// Replays one frame of track events against the registry and returns
    /// the complete current track-to-player binding.
    ///
    /// Exits are applied first so that a player who leaves and re-enters in
    /// the same frame is matched against their own just-logged-out record.
    /// Each entry event is then paired with a distinct rear-view
    /// observation (greedy ascending world distance within the pairing
    /// gate) and replayed through `handle_enter`; an entry with no
    /// observation in range is an error.
    pub fn process_frame(
        &mut self,
        events: &[TrackEvent],
        observations: &[RearViewObservation],
    ) -> Result<Vec<Binding>, ReidError> {
        for e in events.iter().filter(|e| e.kind == TrackEventKind::Exited) {
            self.handle_exit(e.track_id)?;
        }

        let mut entries: Vec<&TrackEvent> = events
            .iter()
            .filter(|e| e.kind == TrackEventKind::Entered)
            .collect();
        entries.sort_by_key(|e| e.track_id);
        let entry_positions: Vec<(u64, Point2)> =
            entries.iter().map(|e| (e.track_id, e.position)).collect();
        let obs_positions: Vec<Point2> = observations.iter().map(|o| o.world_point).collect();
        let pairing = associate(&entry_positions, &obs_positions, self.pairing_gate);
        let obs_for_track: std::collections::HashMap<u64, usize> =
            pairing.matched.into_iter().collect();

        for e in entries {
            let obs_idx = *obs_for_track
                .get(&e.track_id)
                .ok_or(ReidError::NoObservationForEntry { track_id: e.track_id })?;
            self.handle_enter(e.track_id, &observations[obs_idx])?;
        }
        Ok(self.bindings())
    }

    /// Current (track, player) bindings in ascending track order.
    pub fn bindings(&self) -> Vec<Binding> {
        let mut out: Vec<Binding> = self
            .records
            .iter()
            .filter_map(|r| {
                r.track_id.map(|track_id| Binding { track_id, player_id: r.player_id })
            })
            .collect();
        out.sort_by_key(|b| b.track_id);
        out
    }

    /// Every known player with login state and last position, ascending id.
    pub fn positions_report(&self) -> Vec<(u64, LoginState, Point2)> {
        let mut out: Vec<(u64, LoginState, Point2)> = self
            .records
            .iter()
            .map(|r| (r.player_id, r.state, r.position))
            .collect();
        out.sort_by_key(|&(id, _, _)| id);
        out
    }
}

/// Registry snapshot as a JSON array of records, ascending id. Feature
/// vectors are omitted unless `with_features` is set.
pub fn registry_export(registry: &PlayerRegistry, with_features: bool) -> serde_json::Value {
    let mut records: Vec<&PlayerRecord> = registry.records.iter().collect();
    records.sort_by_key(|r| r.player_id);
    serde_json::Value::Array(
        records
            .into_iter()
            .map(|r| {
                let mut obj = serde_json::json!({
                    "id": r.player_id,
                    "id_state": match r.state {
                        LoginState::LoggedIn => "login",
                        LoginState::LoggedOut => "logout",
                    },
                    "position": [r.position.x, r.position.y],
                });
                if with_features {
                    obj["feature"] = serde_json::json!(r.feature);
                }
                obj
            })
            .collect(),
    )
}

/// One exported binding row; the CSV schema is
/// `frame_index,track_id,player_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BindingRow {
    pub frame_index: u64,
    pub track_id: u64,
    pub player_id: u64,
}

pub fn binding_csv(rows: &[BindingRow]) -> String {
    let mut out = String::from("frame_index,track_id,player_id\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.frame_index, r.track_id, r.player_id));
    }
    out
}
