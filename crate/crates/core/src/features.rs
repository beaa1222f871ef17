//! Tumbling-window segmentation and feature extraction.
//!
//! Every feature is computed inside a fixed-size non-overlapping window.
//! Six features are extracted per window: four from the time domain
//! (unique cell count, average cell residence time, RSS variance, average
//! consecutive RSS difference) and two from the frequency domain (dominant
//! frequency and signal energy), on both the logarithmic (dBm) and linear
//! (mW) RSS scales, over 10 s, 30 s, and 60 s windows. One instance per
//! 60 s macro-window carries all 36 values: the smaller-window features are
//! averaged over the sub-windows inside the macro-window.

use std::collections::HashSet;

use crate::preprocess::dbm_to_milliwatts;
use crate::spectrum::dft;
use crate::trace::{FeatureVector, Mode, Sample, Trace};

/// Window sizes used for the canonical 36-feature instance, seconds.
pub const WINDOW_SIZES_S: [u32; 3] = [10, 30, 60];

/// Nominal sampling period of the collector, milliseconds.
pub const NOMINAL_PERIOD_MS: i64 = 1000;

/// Features extracted per (window, scale) pair, in canonical order.
pub const FEATURES_PER_WINDOW_SCALE: usize = 6;

/// Fraction of the macro-window's labeled samples that must agree for the
/// instance to carry a label.
const LABEL_MAJORITY: f64 = 0.8;

/// Residual spectral energy below which a window is treated as silent and
/// its dominant frequency reported as 0 Hz.
const SILENCE_ENERGY: f64 = 1e-12;

/// RSS representation used when computing signal-value features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Raw dBm readings.
    Logarithmic,
    /// Milliwatts, via `10^(dBm/10)`.
    Linear,
}

impl Scale {
    pub const BOTH: [Scale; 2] = [Scale::Logarithmic, Scale::Linear];

    pub fn convert(self, rss_dbm: f64) -> f64 {
        match self {
            Scale::Logarithmic => rss_dbm,
            Scale::Linear => dbm_to_milliwatts(rss_dbm),
        }
    }
}

/// A tumbling window over a trace: samples with
/// `start_ms <= timestamp < end_ms`.
#[derive(Debug, Clone)]
pub struct Window<'a> {
    pub start_ms: i64,
    pub end_ms: i64,
    pub samples: &'a [Sample],
    pub nominal_len_s: u32,
    /// False when the window holds fewer than 90% of its nominal 1 Hz
    /// sample count; invalid windows are excluded from instance extraction.
    pub valid: bool,
}

impl Window<'_> {
    pub fn duration_s(&self) -> f64 {
        (self.end_ms - self.start_ms) as f64 / 1000.0
    }
}

/// Minimum sample count for a window of `window_s` seconds to be valid.
pub fn min_sample_count(window_s: u32) -> usize {
    // ceil(0.9 * window_s) at the nominal 1 Hz rate
    (9 * window_s as usize).div_ceil(10)
}

fn slice_between(samples: &[Sample], start_ms: i64, end_ms: i64) -> &[Sample] {
    let lo = samples.partition_point(|s| s.timestamp_ms < start_ms);
    let hi = samples.partition_point(|s| s.timestamp_ms < end_ms);
    &samples[lo..hi]
}

fn window_over<'a>(trace: &'a Trace, start_ms: i64, window_s: u32) -> Window<'a> {
    let end_ms = start_ms + window_s as i64 * 1000;
    let samples = slice_between(&trace.samples, start_ms, end_ms);
    Window {
        start_ms,
        end_ms,
        samples,
        nominal_len_s: window_s,
        valid: samples.len() >= min_sample_count(window_s),
    }
}

/// Segments a trace into tumbling windows of `window_s` seconds aligned to
/// the first sample's timestamp.
///
/// A window is emitted only if the trace extent (last timestamp plus one
/// nominal period) covers it entirely, so a trailing partial window is
/// discarded. Sparse windows are emitted but flagged invalid.
pub fn segment_windows(trace: &Trace, window_s: u32) -> Vec<Window<'_>> {
    let (Some(first), Some(last)) = (trace.samples.first(), trace.samples.last()) else {
        return Vec::new();
    };
    let span_ms = last.timestamp_ms + NOMINAL_PERIOD_MS - first.timestamp_ms;
    let window_ms = window_s as i64 * 1000;
    let count = span_ms / window_ms;
    (0..count)
        .map(|k| window_over(trace, first.timestamp_ms + k * window_ms, window_s))
        .collect()
}

/// Number of distinct serving cells observed in the window.
pub fn unique_cell_count(window: &Window<'_>) -> usize {
    window
        .samples
        .iter()
        .map(|s| &s.cell_id)
        .collect::<HashSet<_>>()
        .len()
}

/// Mean dwell time per serving cell, in seconds.
///
/// Samples are split into maximal same-ID runs; each run's residence is its
/// timestamp span plus one nominal period, so a single cell holding a full
/// 10-sample 1 Hz window reports 10 s.
pub fn avg_residence_time(window: &Window<'_>) -> f64 {
    if window.samples.is_empty() {
        return 0.0;
    }
    let mut run_times = Vec::new();
    let mut run_start = 0;
    for i in 1..=window.samples.len() {
        if i == window.samples.len()
            || window.samples[i].cell_id != window.samples[run_start].cell_id
        {
            let span =
                window.samples[i - 1].timestamp_ms - window.samples[run_start].timestamp_ms;
            run_times.push(span as f64 / 1000.0 + NOMINAL_PERIOD_MS as f64 / 1000.0);
            run_start = i;
        }
    }
    run_times.iter().sum::<f64>() / run_times.len() as f64
}

fn converted(window: &Window<'_>, scale: Scale) -> Vec<f64> {
    window
        .samples
        .iter()
        .map(|s| scale.convert(s.rss_dbm))
        .collect()
}

// Deviations from the mean, computed on values shifted by the first
// element. Shift invariance keeps the math identical while cancelling the
// large common offset, so a constant window yields exact zeros on both
// scales.
fn deviations(values: &[f64]) -> Vec<f64> {
    let base = values[0];
    let mut shifted: Vec<f64> = values.iter().map(|v| v - base).collect();
    let mean = shifted.iter().sum::<f64>() / shifted.len() as f64;
    for v in &mut shifted {
        *v -= mean;
    }
    shifted
}

/// Population variance of the scale-converted RSS values.
pub fn rss_variance(window: &Window<'_>, scale: Scale) -> f64 {
    let values = converted(window, scale);
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    deviations(&values).iter().map(|d| d * d).sum::<f64>() / n
}

/// Mean absolute difference between consecutive scale-converted readings.
/// Zero for windows with fewer than two samples.
pub fn avg_consecutive_diff(window: &Window<'_>, scale: Scale) -> f64 {
    let values = converted(window, scale);
    if values.len() < 2 {
        return 0.0;
    }
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (values.len() - 1) as f64
}

fn residual_spectrum(window: &Window<'_>, scale: Scale) -> Option<crate::spectrum::Spectrum> {
    let values = converted(window, scale);
    if values.is_empty() {
        return None;
    }
    let residual = deviations(&values);
    let rate = residual.len() as f64 / window.duration_s();
    Some(dft(&residual, rate).expect("residual series is non-empty"))
}

fn spectral_energy(spectrum: &crate::spectrum::Spectrum) -> f64 {
    let n = spectrum.bin_magnitudes.len() as f64;
    spectrum.bin_magnitudes[1..]
        .iter()
        .map(|m| m * m)
        .sum::<f64>()
        / n
}

/// Frequency (Hz) of the strongest spectral bin after DC removal.
///
/// Searches bins 1..=n/2; ties go to the lowest frequency. Windows whose
/// residual energy is below the silence threshold report 0 Hz.
pub fn dominant_frequency(window: &Window<'_>, scale: Scale) -> f64 {
    let Some(spectrum) = residual_spectrum(window, scale) else {
        return 0.0;
    };
    if spectral_energy(&spectrum) < SILENCE_ENERGY {
        return 0.0;
    }
    let half = spectrum.bin_magnitudes.len() / 2;
    let mut best_bin = 0usize;
    let mut best_mag = f64::NEG_INFINITY;
    for k in 1..=half {
        let mag = spectrum.bin_magnitudes[k];
        if mag > best_mag {
            best_mag = mag;
            best_bin = k;
        }
    }
    best_bin as f64 * spectrum.bin_width_hz
}

/// Total energy of the mean-removed RSS series: the squared spectral
/// magnitudes over bins 1..n, divided by n. By Parseval's identity this
/// equals the time-domain sum of squared deviations from the mean.
pub fn signal_energy(window: &Window<'_>, scale: Scale) -> f64 {
    match residual_spectrum(window, scale) {
        Some(spectrum) => spectral_energy(&spectrum),
        None => 0.0,
    }
}

fn window_features(window: &Window<'_>, scale: Scale) -> [f64; FEATURES_PER_WINDOW_SCALE] {
    [
        unique_cell_count(window) as f64,
        avg_residence_time(window),
        rss_variance(window, scale),
        avg_consecutive_diff(window, scale),
        dominant_frequency(window, scale),
        signal_energy(window, scale),
    ]
}

/// Error from instance extraction: the window-size set is unusable.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WindowConfigError {
    #[error("window sizes must be non-empty, strictly increasing, and non-zero")]
    NotIncreasing,
    #[error("window size {0} s does not divide the macro-window size {1} s")]
    NotDivisible(u32, u32),
}

fn check_window_sizes(window_sizes: &[u32]) -> Result<u32, WindowConfigError> {
    let Some(&largest) = window_sizes.last() else {
        return Err(WindowConfigError::NotIncreasing);
    };
    if window_sizes[0] == 0 || window_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WindowConfigError::NotIncreasing);
    }
    for &w in window_sizes {
        if largest % w != 0 {
            return Err(WindowConfigError::NotDivisible(w, largest));
        }
    }
    Ok(largest)
}

fn majority_label(trace: &Trace, window: &Window<'_>) -> Option<Mode> {
    let mut counts = [0usize; 3];
    for sample in window.samples {
        if let Some(mode) = trace.mode_at(sample.timestamp_ms) {
            counts[mode.index()] += 1;
        }
    }
    let labeled: usize = counts.iter().sum();
    if labeled == 0 {
        return None;
    }
    let best = Mode::ALL
        .into_iter()
        .max_by_key(|m| (counts[m.index()], std::cmp::Reverse(m.index())))
        .expect("three modes");
    if counts[best.index()] as f64 >= LABEL_MAJORITY * labeled as f64 {
        Some(best)
    } else {
        None
    }
}

/// Extracts canonical 36-feature instances, one per valid 60 s macro-window.
///
/// The trace should already be smoothed; features never see pre-smoothing
/// cell IDs when the full pipeline is used.
pub fn extract_instances(trace: &Trace) -> Vec<FeatureVector> {
    extract_instances_windows(trace, &WINDOW_SIZES_S)
        .expect("canonical window sizes are always valid")
}

/// [`extract_instances`] over an explicit window-size set. Sizes must be
/// strictly increasing and each must divide the largest (the macro-window).
///
/// A macro-window yields an instance only when it and every sub-window pass
/// the 90% sample-count rule. Features of each smaller window size are
/// arithmetic means over that size's sub-windows. The instance is labeled
/// with the majority ground-truth mode when at least 80% of the labeled
/// samples agree, and left unlabeled otherwise.
pub fn extract_instances_windows(
    trace: &Trace,
    window_sizes: &[u32],
) -> Result<Vec<FeatureVector>, WindowConfigError> {
    let macro_s = check_window_sizes(window_sizes)?;
    let mut instances = Vec::new();

    'macros: for macro_window in segment_windows(trace, macro_s) {
        if !macro_window.valid {
            continue;
        }
        let mut features = Vec::with_capacity(window_sizes.len() * 2 * FEATURES_PER_WINDOW_SCALE);
        for &w in window_sizes {
            let sub_count = (macro_s / w) as usize;
            let mut subs = Vec::with_capacity(sub_count);
            for k in 0..sub_count {
                let start = macro_window.start_ms + k as i64 * w as i64 * 1000;
                let sub = window_over(trace, start, w);
                if !sub.valid {
                    continue 'macros;
                }
                subs.push(sub);
            }
            for scale in Scale::BOTH {
                let mut sums = [0.0; FEATURES_PER_WINDOW_SCALE];
                for sub in &subs {
                    for (sum, value) in sums.iter_mut().zip(window_features(sub, scale)) {
                        *sum += value;
                    }
                }
                features.extend(sums.iter().map(|s| s / sub_count as f64));
            }
        }
        let label = majority_label(trace, &macro_window);
        instances.push(FeatureVector::new(macro_window.start_ms, features, label));
    }
    Ok(instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Segment, FEATURE_COUNT};
    use std::f64::consts::PI;

    fn trace_1hz(values: &[(&str, f64)]) -> Trace {
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, (id, rss))| Sample::new(i as i64 * 1000, *id, *rss))
            .collect();
        Trace::new(samples, vec![])
    }

    fn constant_trace(n: usize, id: &str, rss: f64) -> Trace {
        trace_1hz(&vec![(id, rss); n])
    }

    #[test]
    fn exact_division_yields_full_windows() {
        let trace = constant_trace(60, "A", -70.0);
        let windows = segment_windows(&trace, 10);
        assert_eq!(windows.len(), 6);
        for w in &windows {
            assert_eq!(w.samples.len(), 10);
            assert!(w.valid);
            assert_eq!(w.end_ms - w.start_ms, 10_000);
        }
    }

    #[test]
    fn trailing_partial_window_is_discarded() {
        let trace = constant_trace(65, "A", -70.0);
        let windows = segment_windows(&trace, 10);
        assert_eq!(windows.len(), 6);
    }

    #[test]
    fn sparse_window_is_flagged_invalid() {
        // 10 s span with two samples missing: 8 < ceil(0.9 * 10) = 9.
        let mut trace = constant_trace(10, "A", -70.0);
        trace.samples.remove(7);
        trace.samples.remove(3);
        let windows = segment_windows(&trace, 10);
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].samples.len(), 8);
        assert!(!windows[0].valid);
    }

    #[test]
    fn empty_trace_yields_no_windows() {
        assert!(segment_windows(&Trace::default(), 10).is_empty());
    }

    #[test]
    fn min_sample_count_thresholds() {
        assert_eq!(min_sample_count(10), 9);
        assert_eq!(min_sample_count(30), 27);
        assert_eq!(min_sample_count(60), 54);
    }

    #[test]
    fn unique_cell_count_is_set_cardinality() {
        let trace = trace_1hz(&[("A", -70.0), ("B", -71.0), ("A", -72.0)]);
        let windows = segment_windows(&trace, 3);
        assert_eq!(unique_cell_count(&windows[0]), 2);

        let constant = constant_trace(10, "A", -70.0);
        let windows = segment_windows(&constant, 10);
        assert_eq!(unique_cell_count(&windows[0]), 1);
    }

    #[test]
    fn residence_time_spans_the_window_for_a_single_cell() {
        let trace = constant_trace(10, "A", -70.0);
        let windows = segment_windows(&trace, 10);
        assert_eq!(avg_residence_time(&windows[0]), 10.0);
    }

    #[test]
    fn residence_time_averages_over_runs() {
        let mut values = vec![("A", -70.0); 5];
        values.extend(vec![("B", -75.0); 5]);
        let trace = trace_1hz(&values);
        let windows = segment_windows(&trace, 10);
        assert_eq!(avg_residence_time(&windows[0]), 5.0);
    }

    #[test]
    fn variance_of_two_points() {
        let trace = trace_1hz(&[("A", -80.0), ("A", -82.0)]);
        let windows = segment_windows(&trace, 2);
        assert_eq!(rss_variance(&windows[0], Scale::Logarithmic), 1.0);
        assert!(rss_variance(&windows[0], Scale::Linear) > 0.0);

        let constant = constant_trace(10, "A", -70.0);
        let windows = segment_windows(&constant, 10);
        assert_eq!(rss_variance(&windows[0], Scale::Logarithmic), 0.0);
    }

    #[test]
    fn consecutive_diff_examples() {
        let trace = trace_1hz(&[("A", -80.0), ("A", -82.0), ("A", -79.0)]);
        let windows = segment_windows(&trace, 3);
        assert_eq!(avg_consecutive_diff(&windows[0], Scale::Logarithmic), 2.5);

        let single = trace_1hz(&[("A", -80.0)]);
        let windows = segment_windows(&single, 1);
        assert_eq!(avg_consecutive_diff(&windows[0], Scale::Logarithmic), 0.0);
    }

    #[test]
    fn constant_window_is_spectrally_silent() {
        let trace = constant_trace(60, "A", -70.0);
        let windows = segment_windows(&trace, 60);
        assert_eq!(dominant_frequency(&windows[0], Scale::Logarithmic), 0.0);
        assert_eq!(signal_energy(&windows[0], Scale::Logarithmic), 0.0);
    }

    #[test]
    fn injected_tone_dominates_at_its_bin() {
        // Tone at bin 6 of a 60-sample 1 Hz window: 6 / 60 s = 0.1 Hz.
        let samples: Vec<(&str, f64)> = (0..60)
            .map(|i| ("A", -80.0 + 3.0 * (2.0 * PI * 6.0 * i as f64 / 60.0).cos()))
            .collect::<Vec<_>>();
        let trace = trace_1hz(&samples);
        let windows = segment_windows(&trace, 60);
        let freq = dominant_frequency(&windows[0], Scale::Logarithmic);
        assert!((freq - 0.1).abs() < 1e-12, "got {freq}");
    }

    #[test]
    fn stronger_tone_wins_over_weaker() {
        let samples: Vec<(&str, f64)> = (0..60)
            .map(|i| {
                let t = i as f64 / 60.0;
                let rss = -80.0
                    + 3.0 * (2.0 * PI * 6.0 * t).cos()
                    + 1.0 * (2.0 * PI * 12.0 * t).cos();
                ("A", rss)
            })
            .collect();
        let trace = trace_1hz(&samples);
        let windows = segment_windows(&trace, 60);
        let freq = dominant_frequency(&windows[0], Scale::Logarithmic);
        assert!((freq - 0.1).abs() < 1e-12, "got {freq}");
    }

    #[test]
    fn parseval_ties_energy_to_time_domain() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [10usize, 30, 60, 17] {
            let samples: Vec<(&str, f64)> = (0..n)
                .map(|_| ("A", rng.random_range(-100.0..-60.0)))
                .collect();
            let trace = trace_1hz(&samples);
            let windows = segment_windows(&trace, n as u32);
            let energy = signal_energy(&windows[0], Scale::Logarithmic);
            let values: Vec<f64> = trace.samples.iter().map(|s| s.rss_dbm).collect();
            let mean = values.iter().sum::<f64>() / n as f64;
            let time_domain: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            assert!(
                (energy - time_domain).abs() < 1e-9,
                "n={n}: {energy} vs {time_domain}"
            );

            for scale in Scale::BOTH {
                assert!(signal_energy(&windows[0], scale) >= 0.0);
                assert!(rss_variance(&windows[0], scale) >= 0.0);
                let freq = dominant_frequency(&windows[0], scale);
                assert!((0.0..=0.5).contains(&freq), "freq {freq} out of range");
            }
        }
    }

    #[test]
    fn degenerate_trace_yields_degenerate_instance() {
        let mut trace = constant_trace(60, "A", -70.0);
        trace.segments = vec![Segment::new(0, 59_000, Mode::Stationary)];
        let instances = extract_instances(&trace);
        assert_eq!(instances.len(), 1);
        let inst = &instances[0];
        assert_eq!(inst.features.len(), FEATURE_COUNT);
        assert_eq!(inst.label, Some(Mode::Stationary));
        assert_eq!(inst.window_start_ms, 0);
        // Per (window, scale) block: count 1, residence = window length,
        // everything else 0.
        for (w_idx, &w) in WINDOW_SIZES_S.iter().enumerate() {
            for s_idx in 0..2 {
                let base = (w_idx * 2 + s_idx) * FEATURES_PER_WINDOW_SCALE;
                assert_eq!(inst.features[base], 1.0, "count at {base}");
                assert_eq!(inst.features[base + 1], w as f64, "residence at {base}");
                for off in 2..6 {
                    assert_eq!(inst.features[base + off], 0.0, "feature {off} at {base}");
                }
            }
        }
    }

    #[test]
    fn two_macro_windows_from_120_seconds() {
        let trace = constant_trace(120, "A", -70.0);
        assert_eq!(extract_instances(&trace).len(), 2);
    }

    #[test]
    fn sub_window_features_are_arithmetic_means() {
        // Cell boundary at t = 15 s: the six 10 s windows see counts
        // 1,2,1,1,1,1 (mean 7/6), the two 30 s windows 2,1 (mean 3/2),
        // and the macro-window 2.
        let mut values = vec![("A", -70.0); 15];
        values.extend(vec![("B", -70.0); 45]);
        let trace = trace_1hz(&values);
        let instances = extract_instances(&trace);
        assert_eq!(instances.len(), 1);
        let inst = &instances[0];
        let count_10s = inst.features[0];
        let count_30s = inst.features[2 * FEATURES_PER_WINDOW_SCALE];
        let count_60s = inst.features[4 * FEATURES_PER_WINDOW_SCALE];
        assert!((count_10s - 7.0 / 6.0).abs() < 1e-12);
        assert_eq!(count_30s, 1.5);
        assert_eq!(count_60s, 2.0);
        // Residence at 10 s: five single-cell windows of 10 s plus one
        // split window with two 5 s runs -> (5 * 10 + 5) / 6.
        let residence_10s = inst.features[1];
        assert!((residence_10s - 55.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn weak_majority_leaves_instance_unlabeled() {
        // 70% walking / 30% driving is below the 80% agreement bar.
        let mut trace = constant_trace(60, "A", -70.0);
        trace.segments = vec![
            Segment::new(0, 41_000, Mode::Walking),
            Segment::new(42_000, 59_000, Mode::Driving),
        ];
        let instances = extract_instances(&trace);
        assert_eq!(instances.len(), 1);
        assert_eq!(instances[0].label, None);
    }

    #[test]
    fn strong_majority_labels_instance() {
        // 50 of 60 samples walking: 83% >= 80%.
        let mut trace = constant_trace(60, "A", -70.0);
        trace.segments = vec![
            Segment::new(0, 49_000, Mode::Walking),
            Segment::new(50_000, 59_000, Mode::Driving),
        ];
        let instances = extract_instances(&trace);
        assert_eq!(instances[0].label, Some(Mode::Walking));
    }

    #[test]
    fn unlabeled_samples_do_not_dilute_the_majority() {
        // Only 10 samples are labeled, all walking; the rest carry nothing.
        let mut trace = constant_trace(60, "A", -70.0);
        trace.segments = vec![Segment::new(0, 9_000, Mode::Walking)];
        let instances = extract_instances(&trace);
        assert_eq!(instances[0].label, Some(Mode::Walking));
    }

    #[test]
    fn macro_window_with_invalid_sub_window_is_skipped() {
        // Knock out two samples of one 10 s sub-window in the first
        // macro-window; the second macro-window stays intact.
        let mut trace = constant_trace(120, "A", -70.0);
        trace.samples.retain(|s| s.timestamp_ms != 13_000 && s.timestamp_ms != 14_000);
        let instances = extract_instances(&trace);
        assert_eq!(instances.len(), 1);
        assert_eq!(instances[0].window_start_ms, 60_000);
    }

    #[test]
    fn cell_features_are_scale_invariant() {
        let mut values = vec![("A", -88.0); 20];
        values.extend(vec![("B", -72.0); 40]);
        let trace = trace_1hz(&values);
        let instances = extract_instances(&trace);
        let inst = &instances[0];
        for w_idx in 0..WINDOW_SIZES_S.len() {
            let log_base = (w_idx * 2) * FEATURES_PER_WINDOW_SCALE;
            let lin_base = (w_idx * 2 + 1) * FEATURES_PER_WINDOW_SCALE;
            assert_eq!(inst.features[log_base], inst.features[lin_base]);
            assert_eq!(inst.features[log_base + 1], inst.features[lin_base + 1]);
        }
    }

    #[test]
    fn scales_carry_distinct_information() {
        // A small wiggle around a strong signal against a big wiggle around
        // a weak one: the log scale ranks them one way, the linear scale the
        // other way round.
        let strong: Vec<(&str, f64)> = (0..10)
            .map(|i| ("A", if i % 2 == 0 { -59.5 } else { -60.5 }))
            .collect();
        let weak: Vec<(&str, f64)> = (0..10)
            .map(|i| ("A", if i % 2 == 0 { -98.0 } else { -102.0 }))
            .collect();
        let t1 = trace_1hz(&strong);
        let t2 = trace_1hz(&weak);
        let w1 = segment_windows(&t1, 10);
        let w2 = segment_windows(&t2, 10);
        assert!(
            rss_variance(&w1[0], Scale::Logarithmic) < rss_variance(&w2[0], Scale::Logarithmic)
        );
        assert!(rss_variance(&w1[0], Scale::Linear) > rss_variance(&w2[0], Scale::Linear));
    }

    #[test]
    fn bad_window_sets_are_rejected() {
        let trace = constant_trace(60, "A", -70.0);
        assert!(matches!(
            extract_instances_windows(&trace, &[]),
            Err(WindowConfigError::NotIncreasing)
        ));
        assert!(matches!(
            extract_instances_windows(&trace, &[10, 10, 60]),
            Err(WindowConfigError::NotIncreasing)
        ));
        assert!(matches!(
            extract_instances_windows(&trace, &[25, 60]),
            Err(WindowConfigError::NotDivisible(25, 60))
        ));
    }
}
