//! JSON run configuration: every pipeline tunable in one machine-writable
//! file. Explicit command-line flags override config values, which in turn
//! override the built-in defaults.

use std::path::Path;

use serde::Deserialize;

/// All tunables, each optional. Unknown keys are rejected so typos fail
/// loudly instead of silently running with defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // ping-pong smoothing
    pub max_gap: Option<usize>,
    pub min_flank: Option<usize>,
    // feature extraction
    pub window_sizes: Option<Vec<u32>>,
    // decision tree
    pub max_depth: Option<usize>,
    pub min_leaf: Option<usize>,
    pub min_split: Option<usize>,
    // evaluation
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub stratified: Option<bool>,
    // simulation
    pub mode: Option<String>,
    pub duration_s: Option<u32>,
    pub extent_m: Option<f64>,
    pub spacing_m: Option<f64>,
    pub jitter_frac: Option<f64>,
    pub alpha: Option<f64>,
    pub shadow_sigma_db: Option<f64>,
    pub hysteresis_db: Option<f64>,
    pub p0_dbm: Option<f64>,
    pub d0_m: Option<f64>,
    pub decorrelation_m: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Flag value if given, else config value, else the built-in default.
pub fn resolve<T: Clone>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
