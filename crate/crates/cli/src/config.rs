//! Tolerance settings: command-line flags override the TOML config file,
//! which overrides the library defaults.

use std::path::Path;

use annulus_core::fixed_points::IsolationConfig;
use annulus_core::index::DEFAULT_MIN_DISP;
use annulus_core::nielsen::SweepConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub resolution: Option<f64>,
    pub min_disp: Option<f64>,
    pub index_min_disp: Option<f64>,
    pub max_boxes: Option<usize>,
    pub jitter_retries: Option<usize>,
    pub jitter: Option<f64>,
    pub lipschitz_safety: Option<f64>,
    pub periodic_tolerance: Option<f64>,
    pub integer_tolerance: Option<f64>,
    pub continuum_extent: Option<f64>,
    pub residue_precision: Option<f64>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Settings, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `flags` win.
    pub fn overridden_by(self, flags: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: flags.$f.or(self.$f)),* } };
        }
        pick!(
            resolution,
            min_disp,
            index_min_disp,
            max_boxes,
            jitter_retries,
            jitter,
            lipschitz_safety,
            periodic_tolerance,
            integer_tolerance,
            continuum_extent,
            residue_precision
        )
    }

    pub fn isolation(&self) -> IsolationConfig {
        let d = IsolationConfig::default();
        IsolationConfig {
            resolution: self.resolution.unwrap_or(d.resolution),
            min_disp: self.min_disp.unwrap_or(d.min_disp),
            max_boxes: self.max_boxes.unwrap_or(d.max_boxes),
            jitter_retries: self.jitter_retries.unwrap_or(d.jitter_retries),
            jitter: self.jitter.unwrap_or(d.jitter),
            lipschitz_safety: self.lipschitz_safety.unwrap_or(d.lipschitz_safety),
            record_excluded: false,
        }
    }

    pub fn sweep(&self) -> SweepConfig {
        let d = SweepConfig::default();
        SweepConfig {
            isolation: self.isolation(),
            periodic_tolerance: self.periodic_tolerance.unwrap_or(d.periodic_tolerance),
            integer_tolerance: self.integer_tolerance.unwrap_or(d.integer_tolerance),
            continuum_extent: self.continuum_extent.unwrap_or(d.continuum_extent),
            residue_precision: self.residue_precision.unwrap_or(d.residue_precision),
        }
    }

    pub fn index_min_disp(&self) -> f64 {
        self.index_min_disp.unwrap_or(DEFAULT_MIN_DISP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beats_defaults() {
        let file: Settings = toml::from_str("resolution = 0.01\nperiodic_tolerance = 1e-6").unwrap();
        let flags = Settings {
            resolution: Some(0.002),
            ..Default::default()
        };
        let s = file.overridden_by(flags);
        assert_eq!(s.sweep().isolation.resolution, 0.002);
        assert_eq!(s.sweep().periodic_tolerance, 1e-6);
        assert_eq!(s.sweep().integer_tolerance, SweepConfig::default().integer_tolerance);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Settings>("resolutoin = 0.1").is_err());
    }
}
