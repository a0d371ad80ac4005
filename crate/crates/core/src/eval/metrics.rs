use std::fmt::Write as _;

use super::features::{FeatureMatrix, Labels};
use super::logistic::{LinearModel, Probabilities};
use super::EvalError;
use crate::format::fmt_num;

pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub name: String,
    /// Binary accuracy of this label.
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-class binary metrics and their unweighted means.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<ClassMetrics>,
    pub macro_accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores 0/1 predictions against targets for one class.
pub fn class_metrics(name: &str, predicted: &[bool], actual: &[bool]) -> ClassMetrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    ClassMetrics { name: name.to_string(), accuracy: ratio(tp + tn, predicted.len()), precision, recall, f1 }
}

/// Thresholds probabilities at 0.5 and scores each class.
pub fn evaluate_probabilities(proba: &Probabilities, labels: &Labels) -> Result<EvalReport, EvalError> {
    if proba.values.len() != labels.n_rows() {
        return Err(EvalError::Misaligned(format!(
            "{} predictions for {} labelled rows",
            proba.values.len(),
            labels.n_rows()
        )));
    }
    if proba.classes != labels.classes {
        return Err(EvalError::Misaligned(format!("classes {:?} vs {:?}", proba.classes, labels.classes)));
    }
    if labels.n_rows() == 0 {
        return Err(EvalError::Empty);
    }
    let classes: Vec<ClassMetrics> = labels
        .classes
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let predicted: Vec<bool> = proba.values.iter().map(|r| r[c] >= THRESHOLD).collect();
            class_metrics(name, &predicted, &labels.column(c))
        })
        .collect();
    Ok(EvalReport::from_classes(classes))
}

/// Predicts with `model` and scores the result.
pub fn evaluate(model: &LinearModel, features: &FeatureMatrix, labels: &Labels) -> Result<EvalReport, EvalError> {
    evaluate_probabilities(&model.predict_proba(features)?, labels)
}

impl EvalReport {
    pub fn from_classes(classes: Vec<ClassMetrics>) -> EvalReport {
        let k = classes.len().max(1) as f64;
        let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(f).sum::<f64>() / k;
        EvalReport {
            macro_accuracy: mean(|c| c.accuracy),
            macro_precision: mean(|c| c.precision),
            macro_recall: mean(|c| c.recall),
            macro_f1: mean(|c| c.f1),
            classes,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,accuracy,precision,recall,f1\n");
        let mut row = |name: &str, a: f64, p: f64, r: f64, f: f64| {
            writeln!(out, "{name},{},{},{},{}", fmt_num(a), fmt_num(p), fmt_num(r), fmt_num(f)).unwrap();
        };
        for c in &self.classes {
            row(&c.name, c.accuracy, c.precision, c.recall, c.f1);
        }
        row("macro", self.macro_accuracy, self.macro_precision, self.macro_recall, self.macro_f1);
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<10} {:>9} {:>9} {:>9} {:>9}\n", "class", "accuracy", "precision", "recall", "f1");
        let mut row = |name: &str, a: f64, p: f64, r: f64, f: f64| {
            writeln!(out, "{name:<10} {a:>9.4} {p:>9.4} {r:>9.4} {f:>9.4}").unwrap();
        };
        for c in &self.classes {
            row(&c.name, c.accuracy, c.precision, c.recall, c.f1);
        }
        row("macro", self.macro_accuracy, self.macro_precision, self.macro_recall, self.macro_f1);
        out
    }
}
