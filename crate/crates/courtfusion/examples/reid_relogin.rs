//! Walks the exit/return scenario frame by frame, showing how the identity
//! registry logs a player out when their track leaves the court and binds
//! the original id again when they come back.
//!
//! Run with `cargo run --example reid_relogin`.

use courtfusion::reid::{registry_export, PlayerRegistry, DEFAULT_MATCH_THRESHOLD, DEFAULT_PAIRING_GATE};
use courtfusion::sim::{scenarios, simulate};
use courtfusion::tracker::{TrackerConfig, TrackerState};

fn main() {
    let spec = scenarios::builtin("exit_return").expect("bundled scenario");
    let frames = simulate(&spec).expect("scenario is valid");

    let mut tracker = TrackerState::new(
        spec.court.clone(),
        spec.top_cal.clone(),
        TrackerConfig::default(),
    );
    let mut registry = PlayerRegistry::new(DEFAULT_MATCH_THRESHOLD, DEFAULT_PAIRING_GATE);

    let mut last_printed = Vec::new();
    for frame in &frames {
        let events = tracker
            .step(frame.frame_index, &frame.top_detections)
            .expect("frames arrive in order");
        let bindings = registry
            .process_frame(&events, &frame.rear_observations)
            .expect("every entering track has a rear observation");

        // Only print frames where the binding set changed.
        let snapshot: Vec<(u64, u64)> = bindings.iter().map(|b| (b.track_id, b.player_id)).collect();
        if snapshot != last_printed {
            let desc: Vec<String> = snapshot
                .iter()
                .map(|(t, p)| format!("track {t} = player {p}"))
                .collect();
            println!("frame {:3}: [{}]", frame.frame_index, desc.join(", "));
            last_printed = snapshot;
        }
    }

    println!();
    println!("final registry:");
    println!(
        "{}",
        serde_json::to_string_pretty(&registry_export(&registry, false)).expect("serializable")
    );
}
