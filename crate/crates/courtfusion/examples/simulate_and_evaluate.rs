//! Runs the crossing scenario through both pipeline modes over several
//! seeds: the two-camera fusion and the rear-only ablation that loses the
//! players whenever the rear view merges them.
//!
//! Run with `cargo run --example simulate_and_evaluate`.

use courtfusion::sim::{
    run_pipeline, scenarios, PipelineMode, PipelineOptions,
};

fn main() {
    let mut spec = scenarios::builtin("crossing").expect("bundled scenario");
    let fused = PipelineOptions::default();
    let rear_only = PipelineOptions {
        mode: PipelineMode::RearOnly,
        ..PipelineOptions::default()
    };

    println!("seed | mode      | switches | reid failures | rmse (m) | frames correct");
    for seed in 7..12 {
        spec.seed = seed;
        for (label, options) in [("fused", &fused), ("rear-only", &rear_only)] {
            let output = run_pipeline(&spec, options).expect("scenario is valid");
            let r = output.report;
            println!(
                "{:4} | {:9} | {:8} | {:13} | {:8.4} | {:.3}",
                seed,
                label,
                r.id_switches,
                r.reid_failures,
                r.trajectory_rmse,
                r.frames_fully_correct
            );
        }
    }
}
