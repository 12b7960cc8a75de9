use std::path::Path;

use super::CliError;
use crate::simulator::SimConfig;

/// Parses and validates a scenario document. Missing keys take their
/// defaults; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> Result<SimConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: SimConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Scenario(e.inner().to_string())
        } else {
            CliError::Scenario(format!("{path}: {}", e.inner()))
        }
    })?;
    Ok(cfg.validate()?)
}

pub fn load_scenario(path: &Path) -> Result<SimConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

pub fn scenario_to_json(cfg: &SimConfig) -> String {
    let mut text = serde_json::to_string_pretty(cfg).expect("SimConfig always serializes");
    text.push('\n');
    text
}

pub fn write_scenario(cfg: &SimConfig, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, scenario_to_json(cfg)).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}
