//! Cell-ID stream smoothing and RSS scale conversion.
//!
//! Noisy propagation and tower load make a phone bounce between nearby
//! serving cells (the ping-pong effect), injecting spurious handoffs that
//! look like movement. [`smooth_pingpong`] rewrites short foreign runs that
//! sit between two runs of one dominant cell back to the dominant ID.
//!
//! RSS arrives in dBm (logarithmic). The linear milliwatt view of the same
//! signal weights fluctuations differently depending on the absolute level,
//! so both scales are kept as separate feature sources downstream.

use crate::trace::Trace;

/// Parameters of the ping-pong smoothing filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingParams {
    /// Longest foreign run (in samples) that can be replaced.
    pub max_gap: usize,
    /// Run length (in samples) at which a flanking cell counts as dominant.
    pub min_flank: usize,
}

impl Default for SmoothingParams {
    /// At 1 Hz sampling, removes the canonical 1-2 sample ping-pong bounce
    /// while letting genuine >= 3 s visits to another cell survive.
    fn default() -> Self {
        SmoothingParams {
            max_gap: 2,
            min_flank: 3,
        }
    }
}

// Run-length encoding over sample indices: (start index, length) per
// maximal same-ID run.
fn cell_runs(trace: &Trace) -> Vec<(usize, usize)> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, sample) in trace.samples.iter().enumerate() {
        match runs.last_mut() {
            Some((start, len)) if trace.samples[*start].cell_id == sample.cell_id => *len += 1,
            _ => runs.push((i, 1)),
        }
    }
    runs
}

/// Replaces ping-pong bounces in the serving-cell stream.
///
/// A maximal run of length <= `max_gap` is rewritten when the runs on both
/// sides carry one common cell ID and at least one of them is dominant
/// (length >= `min_flank`). Replacements are applied left to right with
/// immediate effect, so an absorbed bounce lets the grown dominant run
/// qualify later bounces in the same pass; passes repeat until a fixpoint.
///
/// Timestamps, RSS values, and trace length are never touched. Runs at the
/// trace boundaries have only one neighbour and are never rewritten.
pub fn smooth_pingpong(trace: &Trace, params: &SmoothingParams) -> Trace {
    #[derive(Clone)]
    struct Run {
        id_index: usize, // index of any sample carrying this run's ID
        len: usize,
    }

    let mut runs: Vec<Run> = cell_runs(trace)
        .into_iter()
        .map(|(start, len)| Run {
            id_index: start,
            len,
        })
        .collect();

    let id = |run: &Run| &trace.samples[run.id_index].cell_id;

    // Each pass can only shrink the run list, so the fixpoint is reached
    // within the initial run count (itself bounded by the trace length).
    loop {
        let mut changed = false;
        let mut i = 1;
        while i + 1 < runs.len() {
            let replace = runs[i].len <= params.max_gap
                && id(&runs[i - 1]) == id(&runs[i + 1])
                && (runs[i - 1].len >= params.min_flank || runs[i + 1].len >= params.min_flank);
            if replace {
                runs[i - 1].len += runs[i].len + runs[i + 1].len;
                runs.drain(i..=i + 1);
                changed = true;
                // The merged run is now the left flank of whatever follows;
                // keep scanning from the same position.
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }

    let mut smoothed = trace.clone();
    let mut cursor = 0;
    for run in &runs {
        let replacement = trace.samples[run.id_index].cell_id.clone();
        for sample in &mut smoothed.samples[cursor..cursor + run.len] {
            sample.cell_id = replacement.clone();
        }
        cursor += run.len;
    }
    smoothed
}

/// Converts dBm to milliwatts: `10^(rss_dbm / 10)`.
///
/// Strictly increasing and always positive. Equal dB steps map to unequal
/// linear steps, which is why the two scales carry distinct information.
pub fn dbm_to_milliwatts(rss_dbm: f64) -> f64 {
    10f64.powf(rss_dbm / 10.0)
}

/// Error from [`milliwatts_to_dbm`]: power must be strictly positive.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("power must be > 0 mW to convert to dBm, got {0}")]
pub struct NonPositivePower(pub f64);

/// Converts milliwatts to dBm: `10 * log10(p_mw)`. Inverse of
/// [`dbm_to_milliwatts`].
pub fn milliwatts_to_dbm(p_mw: f64) -> Result<f64, NonPositivePower> {
    if p_mw > 0.0 {
        Ok(10.0 * p_mw.log10())
    } else {
        Err(NonPositivePower(p_mw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Sample, Trace};
    use proptest::prelude::*;

    fn trace_from_ids(ids: &[&str]) -> Trace {
        let samples = ids
            .iter()
            .enumerate()
            .map(|(i, id)| Sample::new(1000 * (i as i64 + 1), *id, -70.0 - i as f64))
            .collect();
        Trace::new(samples, vec![])
    }

    fn ids_of(trace: &Trace) -> Vec<String> {
        trace
            .samples
            .iter()
            .map(|s| s.cell_id.as_str().to_string())
            .collect()
    }

    fn smooth_ids(ids: &[&str]) -> Vec<String> {
        ids_of(&smooth_pingpong(
            &trace_from_ids(ids),
            &SmoothingParams::default(),
        ))
    }

    #[test]
    fn single_interloper_is_replaced() {
        assert_eq!(smooth_ids(&["A", "A", "A", "B", "A", "A", "A"]), vec!["A"; 7]);
    }

    #[test]
    fn long_foreign_run_survives() {
        let ids = ["A", "A", "A", "B", "B", "B", "A", "A", "A"];
        assert_eq!(smooth_ids(&ids), ids.to_vec());
    }

    #[test]
    fn alternating_bounces_collapse_to_dominant() {
        // Replacing the first bounce grows the dominant run, which then
        // qualifies the second bounce within the same pass.
        assert_eq!(
            smooth_ids(&["A", "A", "A", "B", "A", "B", "A", "A", "A"]),
            vec!["A"; 9]
        );
    }

    #[test]
    fn different_flank_ids_block_replacement() {
        let ids = ["A", "A", "A", "B", "C", "C", "C"];
        assert_eq!(smooth_ids(&ids), ids.to_vec());
    }

    #[test]
    fn short_flanks_block_replacement() {
        let ids = ["A", "A", "B", "A", "A"];
        assert_eq!(smooth_ids(&ids), ids.to_vec());
    }

    #[test]
    fn boundary_runs_are_never_rewritten() {
        let ids = ["B", "A", "A", "A", "B"];
        assert_eq!(smooth_ids(&ids), ids.to_vec());
    }

    #[test]
    fn late_merge_enables_earlier_replacement_on_next_pass() {
        // First pass only the right bounce qualifies; the merged run then
        // feeds the left bounce on the second pass.
        assert_eq!(
            smooth_ids(&["A", "A", "B", "A", "A", "B", "A", "A", "A"]),
            vec!["A"; 9]
        );
    }

    #[test]
    fn smoothing_preserves_everything_but_cell_ids() {
        let trace = trace_from_ids(&["A", "A", "A", "B", "A", "A", "A"]);
        let smoothed = smooth_pingpong(&trace, &SmoothingParams::default());
        assert_eq!(smoothed.len(), trace.len());
        for (a, b) in trace.samples.iter().zip(&smoothed.samples) {
            assert_eq!(a.timestamp_ms, b.timestamp_ms);
            assert_eq!(a.rss_dbm, b.rss_dbm);
        }
    }

    #[test]
    fn dbm_to_milliwatts_known_points() {
        assert_eq!(dbm_to_milliwatts(0.0), 1.0);
        assert!((dbm_to_milliwatts(-30.0) - 0.001).abs() < 1e-18);
        // 10^(-11.3), evaluated independently with mpmath.
        assert!((dbm_to_milliwatts(-113.0) - 5.011872336272715e-12).abs() < 1e-22);
    }

    #[test]
    fn milliwatts_to_dbm_known_points_and_domain() {
        assert_eq!(milliwatts_to_dbm(1.0).unwrap(), 0.0);
        assert!((milliwatts_to_dbm(0.001).unwrap() + 30.0).abs() < 1e-12);
        assert!(milliwatts_to_dbm(0.0).is_err());
        assert!(milliwatts_to_dbm(-1.0).is_err());
    }

    #[test]
    fn linear_step_ratio_is_constant() {
        // (f(x+1)-f(x)) / (f(x+2)-f(x+1)) == 10^(-1/10) for every x: the
        // log scale compresses uniformly, the linear scale does not.
        let expected = 10f64.powf(-0.1);
        for x in -113..=-53 {
            let x = x as f64;
            let ratio = (dbm_to_milliwatts(x + 1.0) - dbm_to_milliwatts(x))
                / (dbm_to_milliwatts(x + 2.0) - dbm_to_milliwatts(x + 1.0));
            assert!(
                (ratio - expected).abs() < 1e-12,
                "ratio {ratio} at {x} dBm"
            );
        }
    }

    proptest! {
        #[test]
        fn scale_round_trip(x in -113.0f64..=-51.0) {
            let back = milliwatts_to_dbm(dbm_to_milliwatts(x)).unwrap();
            prop_assert!((back - x).abs() < 1e-9);
        }

        #[test]
        fn dbm_to_milliwatts_is_strictly_monotone(x in -113.0f64..=-51.0, step in 1e-6f64..10.0) {
            prop_assert!(dbm_to_milliwatts(x + step) > dbm_to_milliwatts(x));
        }

        #[test]
        fn smoothing_is_idempotent_and_reaches_fixpoint(
            ids in proptest::collection::vec(0u8..4, 0..60),
            max_gap in 1usize..4,
            min_flank in 1usize..4,
        ) {
            let names: Vec<String> = ids.iter().map(|i| format!("C{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let trace = trace_from_ids(&refs);
            let params = SmoothingParams { max_gap, min_flank };

            let once = smooth_pingpong(&trace, &params);
            let twice = smooth_pingpong(&once, &params);
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.len(), trace.len());

            // The longest run never shrinks.
            let longest = |t: &Trace| {
                cell_runs(t).iter().map(|&(_, len)| len).max().unwrap_or(0)
            };
            prop_assert!(longest(&once) >= longest(&trace));
        }
    }
}
