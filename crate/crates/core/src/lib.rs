//! Transportation-mode detection from serving-cell traces.
//!
//! A phone's movement speed leaves a signature in the only two values every
//! handset reports for its serving cell: the cell ID and the received signal
//! strength. This crate turns raw (timestamp, cell ID, RSS) traces into a
//! stationary / walking / driving classification:
//!
//! 1. [`ingest`] reads and writes CSV traces with optional per-row labels.
//! 2. [`preprocess`] removes ping-pong handoff noise from the cell-ID stream
//!    and converts RSS between dBm and milliwatts.
//! 3. [`features`] segments a trace into tumbling windows and extracts six
//!    features per window on both scales over three window sizes (36 total).
//! 4. [`classifier`] trains a deterministic CART decision tree.
//! 5. [`eval`] runs k-fold cross-validation and renders confusion matrices
//!    with precision/recall.
//! 6. [`synth`] generates labeled traces from a path-loss + mobility model
//!    so the whole pipeline can be exercised without field data.

pub mod classifier;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod preprocess;
pub mod spectrum;
pub mod synth;
pub mod trace;

pub use classifier::{DecisionTree, TreeParams};
pub use eval::ConfusionMatrix;
pub use features::Scale;
pub use trace::{CellId, FeatureVector, Mode, Sample, Segment, Trace};
