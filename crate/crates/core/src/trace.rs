//! Core domain types shared by every stage of the pipeline.
//!
//! All types are immutable values after construction and can be shared or
//! sent between threads freely.

use std::fmt;
use std::str::FromStr;

/// Transportation mode.
///
/// The ordering `Stationary < Walking < Driving` is used only for
/// deterministic iteration and tie-breaking, never as a semantic claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Stationary,
    Walking,
    Driving,
}

impl Mode {
    /// All modes in canonical order.
    pub const ALL: [Mode; 3] = [Mode::Stationary, Mode::Walking, Mode::Driving];

    /// Canonical index: 0 stationary, 1 walking, 2 driving.
    pub fn index(self) -> usize {
        match self {
            Mode::Stationary => 0,
            Mode::Walking => 1,
            Mode::Driving => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Mode> {
        Mode::ALL.get(index).copied()
    }

    /// The canonical lowercase string, as used in trace files.
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Stationary => "stationary",
            Mode::Walking => "walking",
            Mode::Driving => "driving",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error returned when a mode string is not one of the three canonical names.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mode {0:?} (expected stationary, walking, or driving)")]
pub struct ParseModeError(pub String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stationary" => Ok(Mode::Stationary),
            "walking" => Ok(Mode::Walking),
            "driving" => Ok(Mode::Driving),
            other => Err(ParseModeError(other.to_string())),
        }
    }
}

/// Opaque serving-cell identifier.
///
/// Equality is the only meaningful operation, so GSM, UMTS, and LTE ID
/// formats (numeric or composite strings) all work unchanged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(String);

impl CellId {
    pub fn new(id: impl Into<String>) -> Self {
        CellId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> Self {
        CellId(s.to_string())
    }
}

impl From<u64> for CellId {
    fn from(n: u64) -> Self {
        CellId(n.to_string())
    }
}

/// One serving-cell observation: timestamp, cell ID, and RSS in dBm.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Milliseconds since epoch. The nominal collection rate is 1 Hz but
    /// downstream windowing tolerates jitter and gaps.
    pub timestamp_ms: i64,
    pub cell_id: CellId,
    /// Received signal strength in dBm; expected range is roughly
    /// [-113, -51] but only finiteness is enforced.
    pub rss_dbm: f64,
}

impl Sample {
    pub fn new(timestamp_ms: i64, cell_id: impl Into<CellId>, rss_dbm: f64) -> Self {
        Sample {
            timestamp_ms,
            cell_id: cell_id.into(),
            rss_dbm,
        }
    }
}

/// Ground-truth annotation: every sample with
/// `start_ms <= timestamp <= end_ms` carries `mode`.
///
/// Bounds are inclusive; a segment produced from a single labeled sample has
/// `start_ms == end_ms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start_ms: i64,
    pub end_ms: i64,
    pub mode: Mode,
}

impl Segment {
    pub fn new(start_ms: i64, end_ms: i64, mode: Mode) -> Self {
        Segment {
            start_ms,
            end_ms,
            mode,
        }
    }

    pub fn contains(&self, timestamp_ms: i64) -> bool {
        self.start_ms <= timestamp_ms && timestamp_ms <= self.end_ms
    }
}

/// A time-ordered sequence of samples plus optional ground-truth segments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub samples: Vec<Sample>,
    pub segments: Vec<Segment>,
}

impl Trace {
    pub fn new(samples: Vec<Sample>, segments: Vec<Segment>) -> Self {
        Trace { samples, segments }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Ground-truth mode at a timestamp, if any segment covers it.
    pub fn mode_at(&self, timestamp_ms: i64) -> Option<Mode> {
        self.segments
            .iter()
            .find(|s| s.contains(timestamp_ms))
            .map(|s| s.mode)
    }
}

/// Why a trace failed validation. `index` points at the offending sample or
/// segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Sample timestamp is not strictly greater than its predecessor's.
    NonIncreasingTimestamp,
    /// Sample RSS is NaN or infinite.
    NonFiniteRss,
    /// Sample cell ID is the empty string.
    EmptyCellId,
    /// Segment has `start_ms > end_ms`.
    InvertedSegment,
    /// Segment overlaps the previous segment (in start-time order).
    OverlappingSegment,
}

/// One invariant breach found by [`validate_trace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::NonIncreasingTimestamp => {
                write!(f, "non-increasing timestamp at sample {}", self.index)
            }
            ViolationKind::NonFiniteRss => write!(f, "non-finite RSS at sample {}", self.index),
            ViolationKind::EmptyCellId => write!(f, "empty cell ID at sample {}", self.index),
            ViolationKind::InvertedSegment => {
                write!(f, "segment {} has start after end", self.index)
            }
            ViolationKind::OverlappingSegment => {
                write!(f, "segment {} overlaps its predecessor", self.index)
            }
        }
    }
}

/// Checks every trace invariant, returning one violation per breach.
///
/// Violations are data, not errors: an empty result means the trace is valid.
pub fn validate_trace(trace: &Trace) -> Vec<Violation> {
    let mut violations = Vec::new();

    for (i, sample) in trace.samples.iter().enumerate() {
        if i > 0 && sample.timestamp_ms <= trace.samples[i - 1].timestamp_ms {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::NonIncreasingTimestamp,
            });
        }
        if !sample.rss_dbm.is_finite() {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::NonFiniteRss,
            });
        }
        if sample.cell_id.is_empty() {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::EmptyCellId,
            });
        }
    }

    for (i, seg) in trace.segments.iter().enumerate() {
        if seg.start_ms > seg.end_ms {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::InvertedSegment,
            });
        }
    }
    // Overlap check on a copy sorted by start so unordered segment lists are
    // still diagnosed correctly.
    let mut order: Vec<usize> = (0..trace.segments.len()).collect();
    order.sort_by_key(|&i| trace.segments[i].start_ms);
    for pair in order.windows(2) {
        let (a, b) = (&trace.segments[pair[0]], &trace.segments[pair[1]]);
        if b.start_ms <= a.end_ms {
            violations.push(Violation {
                index: pair[1],
                kind: ViolationKind::OverlappingSegment,
            });
        }
    }

    violations
}

/// Number of features in a canonical instance: six features, two scales,
/// three window sizes.
pub const FEATURE_COUNT: usize = 36;

/// One classification instance: the feature values for a macro-window, an
/// optional ground-truth label, and the window's start time.
///
/// Canonical feature order is window size (10 s, 30 s, 60 s) outermost, then
/// scale (logarithmic, linear), then feature (unique-cell-count,
/// avg-residence-time, rss-variance, avg-consecutive-diff,
/// dominant-frequency, signal-energy) innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub features: Vec<f64>,
    pub label: Option<Mode>,
    pub window_start_ms: i64,
}

impl FeatureVector {
    pub fn new(window_start_ms: i64, features: Vec<f64>, label: Option<Mode>) -> Self {
        FeatureVector {
            features,
            label,
            window_start_ms,
        }
    }
}
