//! Runs the crossing scenario and renders the recovered world trajectories
//! as an SVG court diagram.
//!
//! Run with `cargo run --example plot_trajectories`.

use courtfusion::plot::render_svg;
use courtfusion::sim::{run_pipeline, scenarios, PipelineOptions};

fn main() {
    let spec = scenarios::builtin("crossing").expect("bundled scenario");
    let output = run_pipeline(&spec, &PipelineOptions::default()).expect("scenario is valid");

    let svg = render_svg(&spec.court, &output.trajectories);
    let path = std::env::temp_dir().join("crossing_trajectories.svg");
    std::fs::write(&path, &svg).expect("temp dir is writable");

    println!(
        "plotted {} trajectory points across {} tracks",
        output.trajectories.len(),
        output.registry.records.len()
    );
    println!("wrote {}", path.display());
}
