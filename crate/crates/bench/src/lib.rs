//! Shared fixtures for the pipeline benchmarks.

use cellmode_core::preprocess::{smooth_pingpong, SmoothingParams};
use cellmode_core::synth::{generate_trace, SuiteParams};
use cellmode_core::trace::{FeatureVector, Mode, Trace};

/// A smoothed 600 s driving trace from the default simulation parameters.
pub fn driving_trace() -> Trace {
    let trace = generate_trace(&SuiteParams::default(), Mode::Driving)
        .expect("default parameters simulate");
    smooth_pingpong(&trace, &SmoothingParams::default())
}

/// Labeled instances from a small three-mode suite, ready for training.
pub fn training_instances() -> Vec<FeatureVector> {
    let params = SuiteParams {
        traces_per_mode: 5,
        ..SuiteParams::default()
    };
    let traces = cellmode_core::synth::generate_suite(&params).expect("suite generates");
    let mut instances = Vec::new();
    for trace in &traces {
        let smoothed = smooth_pingpong(trace, &SmoothingParams::default());
        instances.extend(cellmode_core::features::extract_instances(&smoothed));
    }
    instances.retain(|i| i.label.is_some());
    instances
}
