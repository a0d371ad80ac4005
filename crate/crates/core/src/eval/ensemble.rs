use super::features::{FeatureMatrix, Labels};
use super::logistic::{train_with_transform, InputTransform, LinearModel, LogisticConfig, Probabilities};
use super::EvalError;

/// Column-stacks probability sources into one feature matrix, rows in the first source's order.
///
/// Source `k`'s columns are named `s{k}:{class}`. All sources must cover the same ids and classes.
pub fn stack_features(sources: &[&Probabilities]) -> Result<FeatureMatrix, EvalError> {
    let Some(first) = sources.first() else {
        return Err(EvalError::Misaligned("no probability sources".into()));
    };
    let mut stacked = first.to_features("s0:")?;
    for (k, src) in sources.iter().enumerate().skip(1) {
        if src.classes != first.classes {
            return Err(EvalError::Misaligned(format!(
                "source {k} classes {:?} differ from {:?}",
                src.classes, first.classes
            )));
        }
        if src.ids.len() != first.ids.len() {
            return Err(EvalError::Misaligned(format!(
                "source {k} has {} rows, source 0 has {}",
                src.ids.len(),
                first.ids.len()
            )));
        }
        stacked = stacked
            .hstack(&src.to_features(&format!("s{k}:"))?)
            .map_err(|e| EvalError::Misaligned(format!("source {k}: {e}")))?;
    }
    Ok(stacked)
}

/// Fits a per-class logistic model on the logits of all stacked probability columns.
pub fn stack_probabilities(
    sources: &[&Probabilities],
    labels: &Labels,
    config: &LogisticConfig,
) -> Result<LinearModel, EvalError> {
    let features = stack_features(sources)?;
    if sources[0].classes != labels.classes {
        return Err(EvalError::Misaligned(format!(
            "probability classes {:?} differ from label classes {:?}",
            sources[0].classes, labels.classes
        )));
    }
    train_with_transform(&features, labels, config, InputTransform::Logit)
}

/// Two-source stacking: probabilities, not hard predictions, feed a logistic model per class.
pub fn ensemble_combine(
    proba_a: &Probabilities,
    proba_b: &Probabilities,
    labels: &Labels,
    config: &LogisticConfig,
) -> Result<LinearModel, EvalError> {
    stack_probabilities(&[proba_a, proba_b], labels, config)
}

/// Applies a stacked model to the same kind of sources it was trained on.
pub fn predict_stacked(model: &LinearModel, sources: &[&Probabilities]) -> Result<Probabilities, EvalError> {
    model.predict_proba(&stack_features(sources)?)
}
