//! Command-line surface: calibration, simulation, tracking, evaluation, and
//! SVG plotting behind a stable exit-code contract.
//!
//! Exit codes: 0 success, 2 input or schema error, 3 pipeline error. With
//! `evaluate --strict` a run that saw identity switches exits 1 so CI can
//! gate on it without conflating it with malformed input.
//!
//! Tunables resolve with a fixed precedence: CLI flag, then the JSON config
//! file named by the `COURTFUSION_CONFIG` env var, then the scenario file,
//! then built-in defaults.

use std::env;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::geometry::{CameraCalibration, CourtModel};
use crate::plot::{parse_trajectory_csv, render_svg};
use crate::reid::{binding_csv, registry_export};
use crate::sim::{
    read_frames, run_pipeline, run_pipeline_on_frames, scenarios, simulate, write_frames,
    PipelineMode, PipelineOptions, ScenarioSpec, RNG_ALGORITHM,
};
use crate::tracker::trajectory_csv;

/// Env var naming a JSON config file with default overrides.
pub const CONFIG_ENV: &str = "COURTFUSION_CONFIG";

#[derive(Parser)]
#[command(name = "courtfusion", version, about = "Two-camera court tracking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive ground-plane homographies from four image/world corner pairs.
    Calibrate {
        /// JSON file with `image_corners` and `world_corners`.
        corners: PathBuf,
        /// Write the calibration JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a scenario to a JSON Lines frame stream.
    Simulate {
        /// Bundled scenario name or path to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        noise_sigma: Option<f64>,
        /// Write the frame stream here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the tracker over a scenario or a pre-rendered frame stream.
    Track {
        /// Bundled scenario name or path to a scenario JSON file.
        #[arg(long, required_unless_present = "frames")]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Frame stream from `simulate`; carries its own scenario header.
        #[arg(long, conflicts_with_all = ["scenario", "seed", "noise_sigma"])]
        frames: Option<PathBuf>,
        #[arg(long)]
        noise_sigma: Option<f64>,
        /// Single-camera ablation: track from the rear view alone.
        #[arg(long)]
        rear_only: bool,
        #[arg(long)]
        gate_radius: Option<f64>,
        #[arg(long)]
        match_threshold: Option<f64>,
        /// Write the trajectory CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-frame track-to-player binding CSV.
        #[arg(long)]
        bindings_out: Option<PathBuf>,
        /// Also write the final player registry as JSON.
        #[arg(long)]
        registry_out: Option<PathBuf>,
        /// Include feature vectors in the registry export.
        #[arg(long)]
        with_features: bool,
    },
    /// Run the pipeline and print tracking quality metrics as JSON.
    Evaluate {
        /// Bundled scenario name or path to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate this many consecutive seeds and merge the reports.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        noise_sigma: Option<f64>,
        /// Single-camera ablation: track from the rear view alone.
        #[arg(long)]
        rear_only: bool,
        #[arg(long)]
        gate_radius: Option<f64>,
        #[arg(long)]
        match_threshold: Option<f64>,
        /// Exit 1 unless the run saw zero identity switches.
        #[arg(long)]
        strict: bool,
        /// Also write the report JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a trajectory CSV as an SVG court diagram.
    Plot {
        trajectories: PathBuf,
        /// Take court dimensions from this scenario instead of the standard court.
        #[arg(long)]
        scenario: Option<String>,
        /// Write the SVG here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Optional defaults loaded from the file named by [`CONFIG_ENV`].
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub gate_radius: Option<f64>,
    pub match_threshold: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Pipeline(String),
    StrictIdSwitches(u64),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Pipeline(_) => 3,
            CliError::StrictIdSwitches(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) | CliError::Pipeline(m) => m.clone(),
            CliError::StrictIdSwitches(n) => format!("strict mode: {n} identity switches"),
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn pipeline<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Pipeline(e.to_string())
}

/// Parses `args` and runs the selected subcommand, returning the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    let config = match load_config() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {}", err.message());
            return err.exit_code();
        }
    };
    match dispatch(cli.command, &config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

fn load_config() -> Result<ConfigFile, CliError> {
    let Some(path) = env::var_os(CONFIG_ENV) else {
        return Ok(ConfigFile::default());
    };
    let path = PathBuf::from(path);
    let context = format!("config file {}", path.display());
    let text = fs::read_to_string(&path).map_err(input(&context))?;
    serde_json::from_str(&text).map_err(input(&context))
}

fn dispatch(command: Command, config: &ConfigFile) -> Result<(), CliError> {
    match command {
        Command::Calibrate { corners, out } => cmd_calibrate(&corners, out.as_deref()),
        Command::Simulate {
            scenario,
            seed,
            noise_sigma,
            out,
        } => cmd_simulate(&scenario, seed, noise_sigma, out.as_deref(), config),
        Command::Track {
            scenario,
            seed,
            frames,
            noise_sigma,
            rear_only,
            gate_radius,
            match_threshold,
            out,
            bindings_out,
            registry_out,
            with_features,
        } => {
            let options = pipeline_options(rear_only, gate_radius, match_threshold, config)?;
            cmd_track(
                scenario.as_deref(),
                seed,
                frames.as_deref(),
                noise_sigma,
                &options,
                out.as_deref(),
                bindings_out.as_deref(),
                registry_out.as_deref(),
                with_features,
                config,
            )
        }
        Command::Evaluate {
            scenario,
            seed,
            seeds,
            noise_sigma,
            rear_only,
            gate_radius,
            match_threshold,
            strict,
            out,
        } => {
            let options = pipeline_options(rear_only, gate_radius, match_threshold, config)?;
            cmd_evaluate(
                &scenario,
                seed,
                seeds,
                noise_sigma,
                &options,
                strict,
                out.as_deref(),
                config,
            )
        }
        Command::Plot {
            trajectories,
            scenario,
            out,
        } => cmd_plot(&trajectories, scenario.as_deref(), out.as_deref()),
    }
}

/// Loads a scenario by bundled name or file path; existing files win so a
/// local `crossing` file can shadow the bundled scenario of the same name.
fn resolve_scenario(name_or_path: &str) -> Result<ScenarioSpec, CliError> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        let context = format!("scenario {}", path.display());
        let text = fs::read_to_string(path).map_err(input(&context))?;
        return ScenarioSpec::from_json(&text).map_err(input(&context));
    }
    if let Some(spec) = scenarios::builtin(name_or_path) {
        return Ok(spec);
    }
    Err(CliError::Input(format!(
        "unknown scenario `{name_or_path}`: not a readable file or one of {:?}",
        scenarios::BUILTIN_NAMES
    )))
}

fn apply_spec_overrides(
    spec: &mut ScenarioSpec,
    cli_seed: Option<u64>,
    cli_sigma: Option<f64>,
    config: &ConfigFile,
) -> Result<(), CliError> {
    if let Some(seed) = cli_seed.or(config.seed) {
        spec.seed = seed;
    }
    if let Some(sigma) = cli_sigma.or(config.noise_sigma) {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(CliError::Input(format!(
                "noise_sigma must be finite and >= 0, got {sigma}"
            )));
        }
        spec.noise_sigma = sigma;
    }
    Ok(())
}

fn pipeline_options(
    rear_only: bool,
    cli_gate: Option<f64>,
    cli_threshold: Option<f64>,
    config: &ConfigFile,
) -> Result<PipelineOptions, CliError> {
    let mut options = PipelineOptions::default();
    if rear_only {
        options.mode = PipelineMode::RearOnly;
    }
    if let Some(gate) = cli_gate.or(config.gate_radius) {
        if !gate.is_finite() || gate <= 0.0 {
            return Err(CliError::Input(format!(
                "gate_radius must be finite and > 0, got {gate}"
            )));
        }
        options.gate_radius = gate;
    }
    if let Some(threshold) = cli_threshold.or(config.match_threshold) {
        if !threshold.is_finite() || !(-1.0..=1.0).contains(&threshold) {
            return Err(CliError::Input(format!(
                "match_threshold must be a cosine in [-1, 1], got {threshold}"
            )));
        }
        options.match_threshold = threshold;
    }
    Ok(options)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Pipeline(format!("writing {}: {e}", path.display()))),
        None => io::stdout().write_all(bytes).map_err(pipeline),
    }
}

fn cmd_calibrate(corners: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let context = format!("corners {}", corners.display());
    let text = fs::read_to_string(corners).map_err(input(&context))?;
    let cal: CameraCalibration = serde_json::from_str(&text).map_err(input(&context))?;
    eprintln!(
        "max corner reprojection error: {:e}",
        cal.max_reprojection_error()
    );
    let mut json = serde_json::to_string_pretty(&cal).map_err(pipeline)?;
    json.push('\n');
    emit(out, json.as_bytes())
}

fn cmd_simulate(
    scenario: &str,
    seed: Option<u64>,
    noise_sigma: Option<f64>,
    out: Option<&Path>,
    config: &ConfigFile,
) -> Result<(), CliError> {
    let mut spec = resolve_scenario(scenario)?;
    apply_spec_overrides(&mut spec, seed, noise_sigma, config)?;
    let frames = simulate(&spec).map_err(pipeline)?;
    let mut buf = Vec::new();
    write_frames(&spec, &frames, &mut buf).map_err(pipeline)?;
    emit(out, &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_track(
    scenario: Option<&str>,
    seed: Option<u64>,
    frames_path: Option<&Path>,
    noise_sigma: Option<f64>,
    options: &PipelineOptions,
    out: Option<&Path>,
    bindings_out: Option<&Path>,
    registry_out: Option<&Path>,
    with_features: bool,
    config: &ConfigFile,
) -> Result<(), CliError> {
    let (spec, frames) = match frames_path {
        Some(path) => {
            let context = format!("frames {}", path.display());
            let file = fs::File::open(path).map_err(input(&context))?;
            read_frames(BufReader::new(file)).map_err(input(&context))?
        }
        None => {
            let scenario = scenario.expect("clap requires --scenario without --frames");
            let mut spec = resolve_scenario(scenario)?;
            apply_spec_overrides(&mut spec, seed, noise_sigma, config)?;
            let frames = simulate(&spec).map_err(pipeline)?;
            (spec, frames)
        }
    };
    let output = run_pipeline_on_frames(&spec, &frames, options).map_err(pipeline)?;
    emit(out, trajectory_csv(&output.trajectories).as_bytes())?;
    if let Some(path) = bindings_out {
        emit(Some(path), binding_csv(&output.bindings).as_bytes())?;
    }
    if let Some(path) = registry_out {
        let mut json =
            serde_json::to_string_pretty(&registry_export(&output.registry, with_features))
                .map_err(pipeline)?;
        json.push('\n');
        emit(Some(path), json.as_bytes())?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    scenario: &str,
    seed: Option<u64>,
    seeds: Option<u64>,
    noise_sigma: Option<f64>,
    options: &PipelineOptions,
    strict: bool,
    out: Option<&Path>,
    config: &ConfigFile,
) -> Result<(), CliError> {
    let mut spec = resolve_scenario(scenario)?;
    apply_spec_overrides(&mut spec, seed, noise_sigma, config)?;
    let count = seeds.unwrap_or(1);
    if count == 0 {
        return Err(CliError::Input("--seeds must be >= 1".into()));
    }
    let base = spec.seed;
    base.checked_add(count - 1)
        .ok_or_else(|| CliError::Input("seed range overflows u64".into()))?;

    let mut reports = Vec::new();
    for s in base..base + count {
        spec.seed = s;
        let output = run_pipeline(&spec, options).map_err(pipeline)?;
        reports.push((s, output.report));
    }

    let json = if count == 1 {
        serde_json::to_string(&reports[0].1).map_err(pipeline)?
    } else {
        let n = reports.len() as f64;
        let mode = match options.mode {
            PipelineMode::Fused => "fused",
            PipelineMode::RearOnly => "rear_only",
        };
        let value = serde_json::json!({
            "scenario": spec.name,
            "mode": mode,
            "rng": RNG_ALGORITHM,
            "seeds": reports.iter().map(|(s, _)| *s).collect::<Vec<_>>(),
            "reports": reports.iter().map(|(_, r)| r).collect::<Vec<_>>(),
            "total_id_switches": reports.iter().map(|(_, r)| r.id_switches).sum::<u64>(),
            "total_reid_failures": reports.iter().map(|(_, r)| r.reid_failures).sum::<u64>(),
            "mean_trajectory_rmse":
                reports.iter().map(|(_, r)| r.trajectory_rmse).sum::<f64>() / n,
            "mean_frames_fully_correct":
                reports.iter().map(|(_, r)| r.frames_fully_correct).sum::<f64>() / n,
        });
        serde_json::to_string(&value).map_err(pipeline)?
    };
    let mut line = json;
    line.push('\n');
    io::stdout().write_all(line.as_bytes()).map_err(pipeline)?;
    if let Some(path) = out {
        emit(Some(path), line.as_bytes())?;
    }

    let total_switches: u64 = reports.iter().map(|(_, r)| r.id_switches).sum();
    if strict && total_switches != 0 {
        return Err(CliError::StrictIdSwitches(total_switches));
    }
    Ok(())
}

fn cmd_plot(trajectories: &Path, scenario: Option<&str>, out: Option<&Path>) -> Result<(), CliError> {
    let context = format!("trajectories {}", trajectories.display());
    let text = fs::read_to_string(trajectories).map_err(input(&context))?;
    let rows = parse_trajectory_csv(&text).map_err(input(&context))?;
    let court = match scenario {
        Some(s) => resolve_scenario(s)?.court,
        None => CourtModel::default(),
    };
    emit(out, render_svg(&court, &rows).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_prefers_files_then_builtins() {
        let spec = resolve_scenario("crossing").unwrap();
        assert_eq!(spec.name, "crossing");

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("custom.json");
        let mut custom = spec.clone();
        custom.name = "custom".to_string();
        fs::write(&path, serde_json::to_string(&custom).unwrap()).unwrap();
        let loaded = resolve_scenario(path.to_str().unwrap()).unwrap();
        assert_eq!(loaded.name, "custom");

        let err = resolve_scenario("no_such_scenario").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn cli_overrides_beat_config_which_beats_scenario() {
        let config = ConfigFile {
            gate_radius: Some(2.5),
            match_threshold: Some(0.8),
            noise_sigma: Some(0.01),
            seed: Some(99),
        };

        let options = pipeline_options(false, Some(3.0), None, &config).unwrap();
        assert_eq!(options.gate_radius, 3.0);
        assert_eq!(options.match_threshold, 0.8);

        let defaults = pipeline_options(true, None, None, &ConfigFile::default()).unwrap();
        assert_eq!(defaults.mode, PipelineMode::RearOnly);
        assert_eq!(defaults.gate_radius, PipelineOptions::default().gate_radius);

        let mut spec = scenarios::builtin("crossing").unwrap();
        apply_spec_overrides(&mut spec, Some(5), None, &config).unwrap();
        assert_eq!(spec.seed, 5);
        assert_eq!(spec.noise_sigma, 0.01);

        let mut spec = scenarios::builtin("crossing").unwrap();
        apply_spec_overrides(&mut spec, None, None, &config).unwrap();
        assert_eq!(spec.seed, 99);
    }

    #[test]
    fn out_of_range_overrides_are_input_errors() {
        let config = ConfigFile::default();
        assert_eq!(
            pipeline_options(false, Some(-1.0), None, &config)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            pipeline_options(false, None, Some(1.5), &config)
                .unwrap_err()
                .exit_code(),
            2
        );
        let mut spec = scenarios::builtin("crossing").unwrap();
        assert_eq!(
            apply_spec_overrides(&mut spec, None, Some(-0.1), &config)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let parsed: Result<ConfigFile, _> = serde_json::from_str(r#"{"gate_radius": 2.0}"#);
        assert!(parsed.is_ok());
        let bad: Result<ConfigFile, _> = serde_json::from_str(r#"{"gait_radius": 2.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn strict_violation_has_its_own_exit_code() {
        let err = CliError::StrictIdSwitches(3);
        assert_eq!(err.exit_code(), 1);
        assert!(err.message().contains('3'));
    }
}
