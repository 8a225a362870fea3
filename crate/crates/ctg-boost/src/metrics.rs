//! Evaluation metrics for multiclass classifiers.
//!
//! Everything is computed from a confusion matrix (rows = true class,
//! columns = predicted class) plus, for ROC/AUC, per-class scores.
//! Zero-denominator cases never error: the affected metric is pinned to
//! zero and a warning string records which convention fired. Kappa and
//! the Gorodkin multiclass correlation are evaluated from exact integer
//! tallies so that their algebraic identities (diagonal matrix gives 1,
//! constant predictor gives 0) hold bit-exactly.

use serde::Serialize;
use thiserror::Error;

/// Errors raised by metric computations.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("label {label} at position {position} is out of range for {n_classes} classes")]
    LabelOutOfRange { position: usize, label: u8, n_classes: usize },
}

// ── Confusion matrix ────────────────────────────────────────────────

/// K x K contingency table of `counts[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// An all-zero K x K matrix.
    pub fn new(k: usize) -> Self {
        ConfusionMatrix { k, counts: vec![0; k * k] }
    }

    /// Tallies paired label lists. Both slices must have equal length and
    /// every label must be `< k`.
    pub fn from_labels(y_true: &[u8], y_pred: &[u8], k: usize) -> Result<Self, MetricsError> {
        if y_true.len() != y_pred.len() {
            return Err(MetricsError::LengthMismatch { expected: y_true.len(), got: y_pred.len() });
        }
        let mut cm = ConfusionMatrix::new(k);
        for (position, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
            for &label in [t, p].iter() {
                if label as usize >= k {
                    return Err(MetricsError::LabelOutOfRange { position, label, n_classes: k });
                }
            }
            cm.counts[t as usize * k + p as usize] += 1;
        }
        Ok(cm)
    }

    /// Number of classes.
    pub fn n_classes(&self) -> usize {
        self.k
    }

    /// Count of rows with true class `t` predicted as `p`.
    pub fn count(&self, t: usize, p: usize) -> u64 {
        self.counts[t * self.k + p]
    }

    /// Total rows with true class `t`.
    pub fn row_sum(&self, t: usize) -> u64 {
        (0..self.k).map(|p| self.count(t, p)).sum()
    }

    /// Total rows predicted as class `p`.
    pub fn col_sum(&self, p: usize) -> u64 {
        (0..self.k).map(|t| self.count(t, p)).sum()
    }

    /// Total tallied rows.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Correctly classified rows.
    pub fn trace(&self) -> u64 {
        (0..self.k).map(|c| self.count(c, c)).sum()
    }

    /// Fraction correct; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.trace() as f64 / total as f64
    }
}

impl std::fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for t in 0..self.k {
            for p in 0..self.k {
                if p > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>6}", self.count(t, p))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Cohen's kappa: agreement beyond chance, `(p_o - p_e) / (1 - p_e)`.
/// Evaluated as a ratio of exact integer tallies; 0 when chance agreement
/// is total (`p_e = 1`) or the matrix is empty.
pub fn cohen_kappa(cm: &ConfusionMatrix) -> f64 {
    let n = cm.total() as i128;
    if n == 0 {
        return 0.0;
    }
    let chance: i128 =
        (0..cm.n_classes()).map(|c| cm.row_sum(c) as i128 * cm.col_sum(c) as i128).sum();
    let numerator = cm.trace() as i128 * n - chance;
    let denominator = n * n - chance;
    if denominator == 0 {
        return 0.0;
    }
    numerator as f64 / denominator as f64
}

/// Gorodkin's K-class Matthews correlation coefficient.
/// `(c*s - Σ p_k t_k) / sqrt((s² - Σ p_k²)(s² - Σ t_k²))` with `c` the
/// trace, `s` the total, `t_k` row sums, `p_k` column sums; 0 when the
/// denominator vanishes.
pub fn matthews_corrcoef(cm: &ConfusionMatrix) -> f64 {
    let s = cm.total() as i128;
    if s == 0 {
        return 0.0;
    }
    let c = cm.trace() as i128;
    let mut cross = 0i128;
    let mut p_sq = 0i128;
    let mut t_sq = 0i128;
    for k in 0..cm.n_classes() {
        let t_k = cm.row_sum(k) as i128;
        let p_k = cm.col_sum(k) as i128;
        cross += p_k * t_k;
        p_sq += p_k * p_k;
        t_sq += t_k * t_k;
    }
    let den = (s * s - p_sq) * (s * s - t_sq);
    if den == 0 {
        return 0.0;
    }
    (c * s - cross) as f64 / (den as f64).sqrt()
}

// ── ROC / AUC ───────────────────────────────────────────────────────

/// One-vs-rest ROC curve for a single class, with its trapezoidal AUC.
/// Points start at (0, 0) and end at (1, 1); tied scores advance as a
/// single diagonal step, which makes the trapezoidal area equal the
/// tie-aware Mann-Whitney statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    pub auc: f64,
}

/// ROC curve for binary ground truth; `None` when either class is absent
/// (a degenerate curve has no defined AUC).
pub fn roc_curve_binary(scores: &[f64], is_positive: &[bool]) -> Option<RocCurve> {
    assert_eq!(scores.len(), is_positive.len(), "scores/labels length mismatch");
    let pos_total: u64 = is_positive.iter().filter(|&&p| p).count() as u64;
    let neg_total = is_positive.len() as u64 - pos_total;
    if pos_total == 0 || neg_total == 0 {
        return None;
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // Walk score groups in descending order, accumulating counts; area is
    // summed in count space and normalized once at the end.
    let mut fpr = vec![0.0];
    let mut tpr = vec![0.0];
    let mut tp: u64 = 0;
    let mut fp: u64 = 0;
    let mut area2: u64 = 0; // twice the area, in count units
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        let mut group_tp = 0u64;
        let mut group_fp = 0u64;
        while i < order.len() && scores[order[i]] == score {
            if is_positive[order[i]] {
                group_tp += 1;
            } else {
                group_fp += 1;
            }
            i += 1;
        }
        let prev_tp = tp;
        tp += group_tp;
        fp += group_fp;
        area2 += group_fp * (prev_tp + tp);
        fpr.push(fp as f64 / neg_total as f64);
        tpr.push(tp as f64 / pos_total as f64);
    }
    let auc = area2 as f64 / (2 * pos_total * neg_total) as f64;
    Some(RocCurve { fpr, tpr, auc })
}

/// One-vs-rest ROC for each class from a row-major `n x k` probability
/// (or score) matrix. Entry `c` is `None` when class `c` is degenerate
/// in `y_true` (no positives or no negatives).
pub fn roc_auc_ovr(
    y_true: &[u8],
    proba: &[f64],
    k: usize,
) -> Result<Vec<Option<RocCurve>>, MetricsError> {
    if proba.len() != y_true.len() * k {
        return Err(MetricsError::LengthMismatch { expected: y_true.len() * k, got: proba.len() });
    }
    if let Some((position, &label)) =
        y_true.iter().enumerate().find(|(_, &l)| l as usize >= k)
    {
        return Err(MetricsError::LabelOutOfRange { position, label, n_classes: k });
    }
    let mut curves = Vec::with_capacity(k);
    for class in 0..k {
        let scores: Vec<f64> = (0..y_true.len()).map(|i| proba[i * k + class]).collect();
        let is_pos: Vec<bool> = y_true.iter().map(|&l| l as usize == class).collect();
        curves.push(roc_curve_binary(&scores, &is_pos));
    }
    Ok(curves)
}

// ── Aggregate report ────────────────────────────────────────────────

/// Per-class diagnostics inside a [`MetricsReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub support: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `None` when the class was degenerate in the evaluation split.
    pub auc: Option<f64>,
}

/// The full seven-metric evaluation summary, with per-class detail.
///
/// Macro averages run over classes with nonzero support; weighted
/// averages weight by support. AUC aggregates skip degenerate classes
/// (and renormalize their weights). Every zero-denominator convention
/// that fired is recorded in `warnings`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n_evaluated: usize,
    pub accuracy: f64,
    pub auc_macro: f64,
    pub auc_weighted: f64,
    pub recall_macro: f64,
    pub recall_weighted: f64,
    pub precision_macro: f64,
    pub precision_weighted: f64,
    pub f1_macro: f64,
    pub f1_weighted: f64,
    pub kappa: f64,
    pub mcc: f64,
    pub per_class: Vec<ClassMetrics>,
    pub warnings: Vec<String>,
}

/// Mean over classes with nonzero support; 0 when every class is empty.
fn macro_average(values: &[f64], supports: &[u64]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (v, &s) in values.iter().zip(supports) {
        if s > 0 {
            sum += v;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Support-weighted mean; 0 when total support is zero.
fn weighted_average(values: &[f64], supports: &[u64]) -> f64 {
    let total: u64 = supports.iter().sum();
    if total == 0 {
        return 0.0;
    }
    values.iter().zip(supports).map(|(v, &s)| v * s as f64).sum::<f64>() / total as f64
}

/// Computes the full report from predictions and a row-major `n x k`
/// probability matrix.
pub fn summary(
    y_true: &[u8],
    y_pred: &[u8],
    proba: &[f64],
    k: usize,
) -> Result<MetricsReport, MetricsError> {
    let cm = ConfusionMatrix::from_labels(y_true, y_pred, k)?;
    let curves = roc_auc_ovr(y_true, proba, k)?;
    Ok(summarize(&cm, &curves))
}

/// Assembles a report from an existing confusion matrix and ROC set.
pub fn summarize(cm: &ConfusionMatrix, curves: &[Option<RocCurve>]) -> MetricsReport {
    let k = cm.n_classes();
    assert_eq!(curves.len(), k, "one ROC slot per class required");
    let mut warnings = Vec::new();

    let supports: Vec<u64> = (0..k).map(|c| cm.row_sum(c)).collect();
    let mut precision = vec![0.0; k];
    let mut recall = vec![0.0; k];
    let mut f1 = vec![0.0; k];
    for c in 0..k {
        let col = cm.col_sum(c);
        let diag = cm.count(c, c) as f64;
        if col == 0 {
            warnings.push(format!("precision of class {c} pinned to 0 (no predictions)"));
        } else {
            precision[c] = diag / col as f64;
        }
        if supports[c] == 0 {
            warnings.push(format!("recall of class {c} pinned to 0 (no support)"));
        } else {
            recall[c] = diag / supports[c] as f64;
        }
        let pr = precision[c] + recall[c];
        if pr == 0.0 {
            warnings.push(format!("f1 of class {c} pinned to 0"));
        } else {
            f1[c] = 2.0 * precision[c] * recall[c] / pr;
        }
    }

    let aucs: Vec<Option<f64>> = curves.iter().map(|c| c.as_ref().map(|c| c.auc)).collect();
    for (c, auc) in aucs.iter().enumerate() {
        if auc.is_none() {
            warnings.push(format!("auc of class {c} skipped (degenerate in this split)"));
        }
    }
    let auc_values: Vec<f64> = aucs.iter().map(|a| a.unwrap_or(0.0)).collect();
    let auc_supports: Vec<u64> = supports
        .iter()
        .zip(&aucs)
        .map(|(&s, a)| if a.is_some() { s } else { 0 })
        .collect();
    let auc_included = aucs.iter().filter(|a| a.is_some()).count();
    let auc_macro = if auc_included == 0 {
        warnings.push("auc aggregates pinned to 0 (all classes degenerate)".to_string());
        0.0
    } else {
        aucs.iter().flatten().sum::<f64>() / auc_included as f64
    };
    let auc_weighted = weighted_average(&auc_values, &auc_supports);

    let kappa = cohen_kappa(cm);
    let n = cm.total();
    if n > 0 {
        let chance: u128 =
            (0..k).map(|c| cm.row_sum(c) as u128 * cm.col_sum(c) as u128).sum();
        if chance == (n as u128) * (n as u128) {
            warnings.push("kappa pinned to 0 (chance agreement is total)".to_string());
        }
    }
    let mcc = matthews_corrcoef(cm);

    let per_class = (0..k)
        .map(|c| ClassMetrics {
            support: supports[c],
            precision: precision[c],
            recall: recall[c],
            f1: f1[c],
            auc: aucs[c],
        })
        .collect();

    MetricsReport {
        n_evaluated: n as usize,
        accuracy: cm.accuracy(),
        auc_macro,
        auc_weighted,
        recall_macro: macro_average(&recall, &supports),
        recall_weighted: weighted_average(&recall, &supports),
        precision_macro: macro_average(&precision, &supports),
        precision_weighted: weighted_average(&precision, &supports),
        f1_macro: macro_average(&f1, &supports),
        f1_weighted: weighted_average(&f1, &supports),
        kappa,
        mcc,
        per_class,
        warnings,
    }
}
