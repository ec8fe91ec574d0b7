//! Feeds the bundled crossing scenario's top-view detections through the
//! tracker and prints the resulting track events and world trajectories.
//!
//! The top-down camera keeps the two players separated for the whole clip,
//! so each keeps one track even as they pass within centimeters mid-court.
//!
//! Run with `cargo run --example track_crossing`.

use courtfusion::sim::{scenarios, simulate};
use courtfusion::tracker::{TrackerConfig, TrackerState};

fn main() {
    let spec = scenarios::builtin("crossing").expect("bundled scenario");
    let frames = simulate(&spec).expect("scenario is valid");

    let mut tracker = TrackerState::new(
        spec.court.clone(),
        spec.top_cal.clone(),
        TrackerConfig::default(),
    );

    for frame in &frames {
        let events = tracker
            .step(frame.frame_index, &frame.top_detections)
            .expect("frames arrive in order");
        for event in events {
            println!(
                "frame {:3}  {:?} track {} at ({:.2} m, {:.2} m)",
                event.frame_index, event.kind, event.track_id, event.position.x, event.position.y
            );
        }
    }

    println!();
    for track in &tracker.tracks {
        let first = track.points.first().expect("tracks have points");
        let last = track.points.last().expect("tracks have points");
        println!(
            "track {}: {} observations, ({:.2}, {:.2}) -> ({:.2}, {:.2}), state {:?}",
            track.track_id,
            track.points.len(),
            first.world.x,
            first.world.y,
            last.world.x,
            last.world.y,
            track.state
        );
    }
}
