//! Built-in scenarios shipped with the binary.

use crate::error::CliError;

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2a", "fig2b", "fig2c"];

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    match name {
        "fig1" => Ok(include_str!("../presets/fig1.toml")),
        "fig2a" => Ok(include_str!("../presets/fig2a.toml")),
        "fig2b" => Ok(include_str!("../presets/fig2b.toml")),
        "fig2c" => Ok(include_str!("../presets/fig2c.toml")),
        other => Err(CliError::Config(format!(
            "unknown scenario `{other}` (available: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn every_preset_resolves() {
        for name in PRESET_NAMES {
            let cfg = RunConfig::from_toml(preset(name).unwrap()).unwrap();
            let scenario = cfg.resolve().unwrap();
            assert_eq!(scenario.name, name);
        }
    }

    #[test]
    fn unknown_preset_is_config_error() {
        assert!(matches!(preset("fig3"), Err(CliError::Config(_))));
    }
}
