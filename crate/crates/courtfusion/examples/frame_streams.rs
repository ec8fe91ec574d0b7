//! Writes a simulated frame stream to JSON Lines and reads it back, the
//! interchange format the `simulate` and `track` subcommands speak.
//!
//! Run with `cargo run --example frame_streams`.

use courtfusion::sim::{read_frames, scenarios, simulate, write_frames};

fn main() {
    let spec = scenarios::builtin("exit_return").expect("bundled scenario");
    let frames = simulate(&spec).expect("scenario is valid");

    let mut buf = Vec::new();
    write_frames(&spec, &frames, &mut buf).expect("in-memory write");
    println!(
        "stream: {} lines, {} bytes (1 header + {} frames)",
        buf.iter().filter(|&&b| b == b'\n').count(),
        buf.len(),
        frames.len()
    );

    let (spec_back, frames_back) = read_frames(buf.as_slice()).expect("stream is well formed");
    println!(
        "read back scenario `{}` with {} frames, identical: {}",
        spec_back.name,
        frames_back.len(),
        frames_back == frames
    );

    let mid = &frames[frames.len() / 2];
    println!(
        "frame {}: {} top detections, {} rear observations, {} truth entries",
        mid.frame_index,
        mid.top_detections.len(),
        mid.rear_observations.len(),
        mid.truth.len()
    );
}
