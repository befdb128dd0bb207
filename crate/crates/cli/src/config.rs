//! Run configuration: a TOML file and command-line flags, flags winning.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// fi, hl or heat
    #[arg(long)]
    pub problem: Option<String>,
    /// Built-in datum name
    #[arg(long)]
    pub datum: Option<String>,
    /// Tabulated datum: CSV columns x, f, f', f'', f'''
    #[arg(long)]
    pub datum_file: Option<PathBuf>,
    /// Declared decay rate of half-line data
    #[arg(long)]
    pub decay_rate: Option<f64>,
    /// Contour radius R (search radius for `zeros`)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Contour deformation angle
    #[arg(long)]
    pub delta: Option<f64>,
    /// Half-line indentation radius around the origin
    #[arg(long)]
    pub indent_radius: Option<f64>,
    /// Route half-line Gamma^- below the origin (negative control)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub below_axis: Option<bool>,
    /// Number of x points, evenly spaced on [x_min, x_max]
    #[arg(long)]
    pub x_grid: Option<usize>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Times (repeat or comma-separate)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// Spectral points re:im for `transform` (repeat or comma-separate)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<String>>,
    /// all, inversion, identity, solution, deformation, augeig, zeros, heat
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum zero-to-contour distance for `zeros`
    #[arg(long)]
    pub margin: Option<f64>,
    /// Main output (CSV or JSON); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run manifest JSON
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Contour polyline CSV
    #[arg(long)]
    pub contour_out: Option<PathBuf>,
    /// Spectral samples JSON
    #[arg(long)]
    pub samples_json: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: &RunConfig) -> Self {
        overlay!(
            self, flags, problem, datum, datum_file, decay_rate, radius, delta, indent_radius, below_axis, x_grid, x_min,
            x_max, t, lambda, suite, seed, margin, out, manifest, contour_out, samples_json
        );
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_unset_flags_keep_file_values() {
        let file: RunConfig = toml::from_str("problem = \"hl\"\ndatum = \"hl_exp1\"\nradius = 30.0\nt = [0.0, 0.1]\n").unwrap();
        let flags = RunConfig { radius: Some(50.0), below_axis: Some(true), ..RunConfig::default() };
        let merged = file.overlay(&flags);
        assert_eq!(merged.radius, Some(50.0));
        assert_eq!(merged.datum.as_deref(), Some("hl_exp1"));
        assert_eq!(merged.t, Some(vec![0.0, 0.1]));
        assert_eq!(merged.below_axis, Some(true));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("radius = 1.0\nnodes = 3\n").is_err());
    }
}
