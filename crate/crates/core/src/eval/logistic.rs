//! One-vs-rest L2-regularized logistic regression, fitted by damped Newton steps.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::features::{FeatureMatrix, Labels};
use super::EvalError;
use crate::format::fmt_num;

const MODEL_MAGIC: &str = "texttopo-linear-model";
const MODEL_VERSION: u32 = 1;

/// Probabilities are clipped to `[EPS, 1 - EPS]` before taking logits.
const LOGIT_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    /// Penalty `l2 / 2 * |w|^2` on the (standardized) weights; the intercept is not penalized.
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the largest gradient component is below this, per training row.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig { l2: 1.0, max_iter: 100, tol: 1e-10 }
    }
}

impl LogisticConfig {
    /// Near-unregularized setting used for stacking probabilities.
    pub fn stacking() -> Self {
        LogisticConfig { l2: 1e-3, ..Default::default() }
    }

    fn validate(&self) -> Result<(), EvalError> {
        if !(0.0..f64::INFINITY).contains(&self.l2) {
            return Err(EvalError::Config(format!("l2 must be >= 0, got {}", self.l2)));
        }
        if self.max_iter == 0 {
            return Err(EvalError::Config("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Transform applied to raw inputs before standardization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputTransform {
    Identity,
    /// Inputs are probabilities; use their clipped logits.
    Logit,
}

impl InputTransform {
    fn apply(self, x: f64) -> f64 {
        match self {
            InputTransform::Identity => x,
            InputTransform::Logit => {
                let p = x.clamp(LOGIT_EPS, 1.0 - LOGIT_EPS);
                (p / (1.0 - p)).ln()
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            InputTransform::Identity => "identity",
            InputTransform::Logit => "logit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub name: String,
    pub intercept: f64,
    /// Weights on standardized inputs.
    pub weights: Vec<f64>,
}

/// A fitted one-vs-rest linear model with its input standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub transform: InputTransform,
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    /// Standard deviations; 0 marks a constant column, which contributes nothing.
    pub scales: Vec<f64>,
    pub classes: Vec<ClassModel>,
}

/// Per-row, per-class probabilities with row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Probabilities {
    pub ids: Vec<String>,
    pub classes: Vec<String>,
    /// `values[row][class]`
    pub values: Vec<Vec<f64>>,
}

impl Probabilities {
    pub fn column(&self, class: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[class]).collect()
    }

    /// As a feature matrix with columns named `{prefix}{class}`.
    pub fn to_features(&self, prefix: &str) -> Result<FeatureMatrix, EvalError> {
        let names = self.classes.iter().map(|c| format!("{prefix}{c}")).collect();
        FeatureMatrix::from_rows(self.ids.clone(), names, &self.values)
    }

    /// Reads a feature file whose columns are class names.
    pub fn from_features(m: &FeatureMatrix) -> Result<Probabilities, EvalError> {
        let values: Vec<Vec<f64>> = (0..m.n_rows()).map(|i| m.row(i).to_vec()).collect();
        if values.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(EvalError::Config("probabilities must lie in [0, 1]".into()));
        }
        Ok(Probabilities { ids: m.ids().to_vec(), classes: m.names().to_vec(), values })
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-ln sigmoid(z)` for a positive target, computed stably.
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Mean binary cross-entropy of probabilities against targets, with the same clipping as the logit transform.
pub fn log_loss(p: &[f64], y: &[bool]) -> f64 {
    let total: f64 = p
        .iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(LOGIT_EPS, 1.0 - LOGIT_EPS);
            if y {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    total / p.len().max(1) as f64
}

struct Standardized {
    /// Rows x (features + 1), last column is the intercept's constant 1.
    design: DMatrix<f64>,
    means: Vec<f64>,
    scales: Vec<f64>,
}

fn standardize(features: &FeatureMatrix, transform: InputTransform) -> Standardized {
    let (n, m) = (features.n_rows(), features.n_cols());
    let raw = |i: usize, j: usize| transform.apply(features.get(i, j));
    let mut means = vec![0.0; m];
    let mut scales = vec![0.0; m];
    for j in 0..m {
        let mean = (0..n).map(|i| raw(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (raw(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        means[j] = mean;
        // relative threshold: treat columns that are constant up to rounding as constant
        scales[j] = if var.sqrt() > 1e-12 * mean.abs().max(1.0) { var.sqrt() } else { 0.0 };
    }
    let design = DMatrix::from_fn(n, m + 1, |i, j| {
        if j == m {
            1.0
        } else if scales[j] == 0.0 {
            0.0
        } else {
            (raw(i, j) - means[j]) / scales[j]
        }
    });
    Standardized { design, means, scales }
}

/// Penalized negative log-likelihood of `beta` (weights then intercept).
fn objective(x: &DMatrix<f64>, y: &[bool], beta: &DVector<f64>, l2: f64) -> f64 {
    let z = x * beta;
    let nll: f64 = z.iter().zip(y).map(|(&z, &y)| if y { softplus_neg(z) } else { softplus_neg(-z) }).sum();
    let m = beta.len() - 1;
    nll + 0.5 * l2 * beta.rows(0, m).norm_squared()
}

/// Fits one binary problem on a standardized design matrix.
fn fit_binary(x: &DMatrix<f64>, y: &[bool], config: &LogisticConfig) -> DVector<f64> {
    let (n, k) = (x.nrows(), x.ncols());
    let m = k - 1;
    let mut beta = DVector::zeros(k);
    // Start the intercept at the prior log-odds.
    let pos = y.iter().filter(|&&v| v).count() as f64;
    beta[m] = (pos / (n as f64 - pos)).ln();
    let mut current = objective(x, y, &beta, config.l2);

    for _ in 0..config.max_iter {
        let z = x * &beta;
        let p: Vec<f64> = z.iter().map(|&v| sigmoid(v)).collect();
        let residual = DVector::from_iterator(n, p.iter().zip(y).map(|(&p, &y)| p - f64::from(u8::from(y))));
        let mut grad = x.transpose() * &residual;
        for j in 0..m {
            grad[j] += config.l2 * beta[j];
        }
        if grad.amax() <= config.tol * n as f64 {
            break;
        }

        let mut weighted = x.clone();
        for (i, mut row) in weighted.row_iter_mut().enumerate() {
            row *= p[i] * (1.0 - p[i]);
        }
        let mut hessian = x.transpose() * weighted;
        for j in 0..m {
            hessian[(j, j)] += config.l2;
        }
        // Small ridge keeps separable or degenerate problems solvable.
        let ridge = 1e-10 * (1.0 + hessian.diagonal().amax());
        for j in 0..k {
            hessian[(j, j)] += ridge;
        }
        let step = match hessian.cholesky() {
            Some(ch) => ch.solve(&grad),
            None => grad.clone(),
        };

        // Backtrack until the objective decreases; no decrease means we are at the optimum
        // to machine precision.
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let candidate = &beta - &step * t;
            let value = objective(x, y, &candidate, config.l2);
            if value < current {
                beta = candidate;
                current = value;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    beta
}

/// Trains one logistic model per class on standardized features.
pub fn train_linear(
    features: &FeatureMatrix,
    labels: &Labels,
    config: &LogisticConfig,
) -> Result<LinearModel, EvalError> {
    train_with_transform(features, labels, config, InputTransform::Identity)
}

pub(crate) fn train_with_transform(
    features: &FeatureMatrix,
    labels: &Labels,
    config: &LogisticConfig,
    transform: InputTransform,
) -> Result<LinearModel, EvalError> {
    config.validate()?;
    if features.n_rows() != labels.n_rows() {
        return Err(EvalError::Misaligned(format!(
            "{} feature rows but {} label rows",
            features.n_rows(),
            labels.n_rows()
        )));
    }
    if features.n_rows() == 0 {
        return Err(EvalError::Empty);
    }
    for (c, name) in labels.classes.iter().enumerate() {
        let pos = labels.values.iter().filter(|r| r[c]).count();
        if pos == 0 || pos == labels.n_rows() {
            return Err(EvalError::DegenerateClass(name.clone()));
        }
    }

    let Standardized { design, means, scales } = standardize(features, transform);
    let classes = (0..labels.classes.len())
        .into_par_iter()
        .map(|c| {
            let beta = fit_binary(&design, &labels.column(c), config);
            let m = beta.len() - 1;
            ClassModel {
                name: labels.classes[c].clone(),
                intercept: beta[m],
                weights: beta.rows(0, m).iter().copied().collect(),
            }
        })
        .collect();
    Ok(LinearModel { transform, feature_names: features.names().to_vec(), means, scales, classes })
}

impl LinearModel {
    /// Class probabilities for every row; columns are matched by name.
    pub fn predict_proba(&self, features: &FeatureMatrix) -> Result<Probabilities, EvalError> {
        let cols: Vec<usize> = self
            .feature_names
            .iter()
            .map(|n| features.column_index(n).ok_or_else(|| EvalError::MissingColumn(n.clone())))
            .collect::<Result<_, _>>()?;
        let mut values = Vec::with_capacity(features.n_rows());
        for i in 0..features.n_rows() {
            let x: Vec<f64> = cols
                .iter()
                .enumerate()
                .map(|(j, &col)| {
                    if self.scales[j] == 0.0 {
                        0.0
                    } else {
                        (self.transform.apply(features.get(i, col)) - self.means[j]) / self.scales[j]
                    }
                })
                .collect();
            values.push(
                self.classes
                    .iter()
                    .map(|c| sigmoid(c.intercept + c.weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>()))
                    .collect(),
            );
        }
        Ok(Probabilities {
            ids: features.ids().to_vec(),
            classes: self.classes.iter().map(|c| c.name.clone()).collect(),
            values,
        })
    }

    /// Versioned plain-text form; numbers use the shared 12-digit rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MODEL_MAGIC} v{MODEL_VERSION}").unwrap();
        writeln!(out, "transform {}", self.transform.name()).unwrap();
        writeln!(out, "features {}", self.feature_names.len()).unwrap();
        for ((name, mean), scale) in self.feature_names.iter().zip(&self.means).zip(&self.scales) {
            writeln!(out, "feature {name} {} {}", fmt_num(*mean), fmt_num(*scale)).unwrap();
        }
        writeln!(out, "classes {}", self.classes.len()).unwrap();
        for c in &self.classes {
            let weights: Vec<String> = c.weights.iter().map(|&w| fmt_num(w)).collect();
            writeln!(out, "class {} {} {}", c.name, fmt_num(c.intercept), weights.join(" ")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearModel, EvalError> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, message: &str| EvalError::Parse { line, message: message.to_string() };
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| bad(line, &format!("invalid number '{s}'")));
        let mut next =
            |what: &str| lines.next().ok_or_else(|| bad(0, &format!("unexpected end of file, expected {what}")));

        let (line, magic) = next("header")?;
        if magic != format!("{MODEL_MAGIC} v{MODEL_VERSION}") {
            return Err(bad(line, "unsupported model header"));
        }
        let (line, t) = next("transform")?;
        let transform = match t.strip_prefix("transform ") {
            Some("identity") => InputTransform::Identity,
            Some("logit") => InputTransform::Logit,
            _ => return Err(bad(line, "expected 'transform identity|logit'")),
        };
        let count = |line: usize, s: &str, key: &str| -> Result<usize, EvalError> {
            s.strip_prefix(key)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad(line, &format!("expected '{key} <count>'")))
        };
        let (line, f) = next("feature count")?;
        let n_features = count(line, f, "features")?;
        let (mut feature_names, mut means, mut scales) = (Vec::new(), Vec::new(), Vec::new());
        for _ in 0..n_features {
            let (line, l) = next("feature line")?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            let ["feature", name, mean, scale] = parts[..] else {
                return Err(bad(line, "expected 'feature <name> <mean> <scale>'"));
            };
            feature_names.push(name.to_string());
            means.push(num(line, mean)?);
            scales.push(num(line, scale)?);
        }
        let (line, c) = next("class count")?;
        let n_classes = count(line, c, "classes")?;
        let mut classes = Vec::new();
        for _ in 0..n_classes {
            let (line, l) = next("class line")?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 3 + n_features || parts[0] != "class" {
                return Err(bad(line, "expected 'class <name> <intercept> <weights...>'"));
            }
            let weights = parts[3..].iter().map(|s| num(line, s)).collect::<Result<_, _>>()?;
            classes.push(ClassModel { name: parts[1].to_string(), intercept: num(line, parts[2])?, weights });
        }
        Ok(LinearModel { transform, feature_names, means, scales, classes })
    }
}
