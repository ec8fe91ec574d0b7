//! Bundled scenarios, embedded at build time so the binary and examples
//! run without a source checkout. The JSON files under `scenarios/` are
//! the authoritative copies and double as schema documentation.

use super::ScenarioSpec;

pub const CROSSING: &str = include_str!("../../../../scenarios/crossing.json");
pub const EXIT_RETURN: &str = include_str!("../../../../scenarios/exit_return.json");
pub const SAME_SIDE: &str = include_str!("../../../../scenarios/same_side.json");

pub const BUILTIN_NAMES: [&str; 3] = ["crossing", "exit_return", "same_side"];

/// Parses a bundled scenario by name.
pub fn builtin(name: &str) -> Option<ScenarioSpec> {
    let json = match name {
        "crossing" => CROSSING,
        "exit_return" => EXIT_RETURN,
        "same_side" => SAME_SIDE,
        _ => return None,
    };
    Some(ScenarioSpec::from_json(json).expect("bundled scenarios are valid"))
}
