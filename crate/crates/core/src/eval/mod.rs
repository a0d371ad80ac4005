//! Linear classification on topological features, probability stacking, and macro metrics.

mod ensemble;
mod features;
mod logistic;
mod metrics;

use thiserror::Error;

pub use ensemble::{ensemble_combine, predict_stacked, stack_features, stack_probabilities};
pub use features::{split_rows, FeatureMatrix, FeatureSet, Labels, Provenance};
pub use logistic::{log_loss, train_linear, ClassModel, InputTransform, LinearModel, LogisticConfig, Probabilities};
pub use metrics::{class_metrics, evaluate, evaluate_probabilities, ClassMetrics, EvalReport, THRESHOLD};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("duplicate feature column '{0}'")]
    DuplicateColumn(String),
    #[error("duplicate row id '{0}'")]
    DuplicateRow(String),
    #[error("non-finite value in row '{row}', column '{column}'")]
    NonFinite { row: String, column: String },
    #[error("row id '{0}' not found")]
    MissingRow(String),
    #[error("feature column '{0}' not found")]
    MissingColumn(String),
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
    #[error("class '{0}' has only one label value in the training data")]
    DegenerateClass(String),
    #[error("no rows to train or evaluate on")]
    Empty,
    #[error("unknown feature set '{0}' (expected tp1, tp2, tp1+tp2 or all)")]
    UnknownFeatureSet(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
