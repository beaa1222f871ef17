//! Cross-validated evaluation: confusion matrices, precision/recall, and
//! report rendering.
//!
//! Folds come from a seeded uniform shuffle followed by round-robin
//! assignment; per-fold predictions are pooled into a single confusion
//! matrix. Macro precision/recall are unweighted means over the classes
//! whose denominator is non-zero.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::classifier::{self, ModelError, TrainError, TreeParams};
use crate::trace::{FeatureVector, Mode};

/// 3x3 confusion counts: rows are ground truth, columns are predictions,
/// both in canonical mode order (stationary, walking, driving).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [[u64; 3]; 3]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn add(&mut self, truth: Mode, predicted: Mode) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, truth: Mode) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn col_sum(&self, predicted: Mode) -> u64 {
        self.counts.iter().map(|row| row[predicted.index()]).sum()
    }

    /// Correct predictions: the diagonal total.
    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

/// Evaluation failure.
#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("need k >= 2 folds, got {0}")]
    BadK(usize),
    #[error("need at least {needed} instances for {k} folds, got {got}")]
    TooFewInstances { needed: usize, k: usize, got: usize },
    #[error("instance {0} has no label")]
    Unlabeled(usize),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Splits `0..n_instances` into `k` disjoint folds: seeded shuffle, then
/// round-robin (shuffled item i lands in fold `i % k`), so fold sizes
/// differ by at most one.
pub fn kfold_split(n_instances: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::BadK(k));
    }
    if n_instances < k {
        return Err(EvalError::TooFewInstances {
            needed: k,
            k,
            got: n_instances,
        });
    }
    let mut order: Vec<usize> = (0..n_instances).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(n_instances.div_ceil(k)); k];
    for (i, index) in order.into_iter().enumerate() {
        folds[i % k].push(index);
    }
    Ok(folds)
}

/// Stratified variant of [`kfold_split`]: instances are shuffled and dealt
/// round-robin within each class, keeping per-class proportions roughly
/// equal across folds.
pub fn kfold_split_stratified(
    labels: &[Mode],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::BadK(k));
    }
    if labels.len() < k {
        return Err(EvalError::TooFewInstances {
            needed: k,
            k,
            got: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next_fold = 0usize;
    for mode in Mode::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == mode).collect();
        members.shuffle(&mut rng);
        for index in members {
            folds[next_fold % k].push(index);
            next_fold += 1;
        }
    }
    Ok(folds)
}

/// k-fold cross-validation pooled into one confusion matrix: each fold is
/// predicted by a tree trained on the other k-1 folds.
pub fn cross_validate(
    instances: &[FeatureVector],
    k: usize,
    params: &TreeParams,
    seed: u64,
) -> Result<ConfusionMatrix, EvalError> {
    cross_validate_opts(instances, k, params, seed, false)
}

/// [`cross_validate`] with optional stratified folds.
pub fn cross_validate_opts(
    instances: &[FeatureVector],
    k: usize,
    params: &TreeParams,
    seed: u64,
    stratified: bool,
) -> Result<ConfusionMatrix, EvalError> {
    let labels: Vec<Mode> = instances
        .iter()
        .enumerate()
        .map(|(i, inst)| inst.label.ok_or(EvalError::Unlabeled(i)))
        .collect::<Result<_, _>>()?;

    let folds = if stratified {
        kfold_split_stratified(&labels, k, seed)?
    } else {
        kfold_split(instances.len(), k, seed)?
    };

    let mut matrix = ConfusionMatrix::new();
    for held_out in &folds {
        let mut in_fold = vec![false; instances.len()];
        for &i in held_out {
            in_fold[i] = true;
        }
        let training: Vec<FeatureVector> = instances
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_fold[*i])
            .map(|(_, inst)| inst.clone())
            .collect();
        let tree = classifier::train(&training, params, seed)?;
        for &i in held_out {
            let predicted = tree.predict(&instances[i].features)?;
            matrix.add(labels[i], predicted);
        }
    }
    Ok(matrix)
}

/// Derived metrics for a confusion matrix. Percentages throughout;
/// `None` marks a class whose denominator is zero (undefined metric).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub counts: [[u64; 3]; 3],
    /// Per-class precision: diagonal over column sum, percent.
    pub precision: [Option<f64>; 3],
    /// Per-class recall: diagonal over row sum, percent.
    pub recall: [Option<f64>; 3],
    /// Unweighted mean over classes with defined precision.
    pub macro_precision: f64,
    /// Unweighted mean over classes with defined recall.
    pub macro_recall: f64,
    /// Row-normalized percentages (each non-zero row sums to 100).
    pub row_normalized: [[f64; 3]; 3],
    /// Column-normalized percentages (each non-zero column sums to 100).
    pub col_normalized: [[f64; 3]; 3],
}

/// Unweighted mean of per-class metric values.
pub fn macro_average(per_class: &[f64]) -> f64 {
    if per_class.is_empty() {
        return 0.0;
    }
    per_class.iter().sum::<f64>() / per_class.len() as f64
}

/// Computes precision/recall and normalized views from raw counts.
pub fn metrics(matrix: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    if matrix.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }

    let mut precision = [None; 3];
    let mut recall = [None; 3];
    let mut row_normalized = [[0.0; 3]; 3];
    let mut col_normalized = [[0.0; 3]; 3];

    for mode in Mode::ALL {
        let i = mode.index();
        let row = matrix.row_sum(mode);
        let col = matrix.col_sum(mode);
        if row > 0 {
            recall[i] = Some(100.0 * matrix.counts[i][i] as f64 / row as f64);
            for (j, cell) in row_normalized[i].iter_mut().enumerate() {
                *cell = 100.0 * matrix.counts[i][j] as f64 / row as f64;
            }
        }
        if col > 0 {
            precision[i] = Some(100.0 * matrix.counts[i][i] as f64 / col as f64);
            for (j, row_out) in col_normalized.iter_mut().enumerate() {
                row_out[i] = 100.0 * matrix.counts[j][i] as f64 / col as f64;
            }
        }
    }

    let defined = |values: &[Option<f64>; 3]| -> Vec<f64> {
        values.iter().flatten().copied().collect()
    };

    Ok(MetricsReport {
        counts: matrix.counts,
        macro_precision: macro_average(&defined(&precision)),
        macro_recall: macro_average(&defined(&recall)),
        precision,
        recall,
        row_normalized,
        col_normalized,
    })
}

/// Output format for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
struct PerClass {
    stationary: Option<f64>,
    walking: Option<f64>,
    driving: Option<f64>,
}

impl PerClass {
    fn from_array(values: [Option<f64>; 3]) -> Self {
        PerClass {
            stationary: values[0],
            walking: values[1],
            driving: values[2],
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonReport {
    counts: [[u64; 3]; 3],
    precision: PerClass,
    recall: PerClass,
    macro_precision: f64,
    macro_recall: f64,
}

fn render_table(out: &mut String, title: &str, rows: &[[f64; 3]; 3]) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "{:<14} {:>12} {:>12} {:>12}",
        "ground truth", "stationary", "walking", "driving"
    );
    for mode in Mode::ALL {
        let row = rows[mode.index()];
        let _ = writeln!(
            out,
            "{:<14} {:>11.2}% {:>11.2}% {:>11.2}%",
            mode.as_str(),
            row[0],
            row[1],
            row[2]
        );
    }
}

/// Renders a metrics report.
///
/// The text form mirrors the usual confusion-table layout (ground-truth
/// rows by predicted columns, percentages to 2 decimals); JSON carries the
/// raw counts plus every derived metric and parses back losslessly.
pub fn render_report(report: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let json = JsonReport {
                counts: report.counts,
                precision: PerClass::from_array(report.precision),
                recall: PerClass::from_array(report.recall),
                macro_precision: report.macro_precision,
                macro_recall: report.macro_recall,
            };
            let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
            text.push('\n');
            text
        }
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<14} {:>12} {:>12} {:>12}",
                "counts", "stationary", "walking", "driving"
            );
            for mode in Mode::ALL {
                let row = report.counts[mode.index()];
                let _ = writeln!(
                    out,
                    "{:<14} {:>12} {:>12} {:>12}",
                    mode.as_str(),
                    row[0],
                    row[1],
                    row[2]
                );
            }
            out.push('\n');
            render_table(&mut out, "recall (%), row-normalized", &report.row_normalized);
            out.push('\n');
            render_table(
                &mut out,
                "precision (%), column-normalized",
                &report.col_normalized,
            );
            out.push('\n');
            let _ = writeln!(out, "macro precision: {:.2}%", report.macro_precision);
            let _ = writeln!(out, "macro recall:    {:.2}%", report.macro_recall);
            out
        }
    }
}

/// Reconstructs a report from its JSON rendering (counts are authoritative;
/// metrics are recomputed).
pub fn report_from_json(text: &str) -> Result<MetricsReport, EvalError> {
    let json: JsonReport = serde_json::from_str(text)?;
    metrics(&ConfusionMatrix::from_counts(json.counts))
}
