//! Evaluation protocols: stratified k-fold cross-validation, multi-model
//! comparison on shared folds, and hyperparameter validation curves.
//!
//! Oversampling placement is explicit. `SmoteScope::Fold` (the sound
//! protocol) rebalances each fold's training part only, so evaluation
//! rows never influence synthesis. `SmoteScope::Global` rebalances the
//! whole dataset before folding — the optimistic protocol some published
//! pipelines use, kept reproducible here so the difference can be
//! measured. `SmoteScope::Off` disables oversampling.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::baselines::{BaselineError, ModelSpec, TrainedModel};
use crate::dataset::{class_counts, Dataset, DatasetError};
use crate::gbdt::GbdtConfig;
use crate::metrics::{summary, MetricsError, MetricsReport};
use crate::resample::{smote, ResampleError, SmoteConfig};

/// Errors from the evaluation protocols.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Cross-validation needs at least two folds.
    #[error("folds must be at least 2 (got {0})")]
    TooFewFolds(usize),
    /// Stratification requires every present class to fill every fold.
    #[error("class {class} has only {count} rows, fewer than {folds} folds")]
    FoldsExceedClassCount { class: u8, count: usize, folds: usize },
    /// A validation-curve parameter name was not recognized.
    #[error("unknown curve parameter `{0}`; expected n_estimators, num_leaves, or learning_rate")]
    UnknownParam(String),
    /// A validation-curve value does not fit its parameter.
    #[error("invalid value {value} for {param}: {reason}")]
    InvalidParamValue { param: String, value: f64, reason: String },
    #[error(transparent)]
    Data(#[from] DatasetError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Where oversampling happens relative to the fold boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoteScope {
    /// Rebalance each fold's training part only (no leakage).
    Fold,
    /// Rebalance the full dataset before folding (optimistic protocol).
    Global,
    /// No oversampling.
    Off,
}

/// Cross-validation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    /// Number of stratified folds.
    pub folds: usize,
    /// Seed for the fold shuffle.
    pub seed: u64,
    /// Oversampling placement.
    pub smote_scope: SmoteScope,
    /// Oversampling settings; under `Fold` scope, fold `f` uses
    /// `smote.seed + f` so folds draw independent synthesis streams.
    pub smote: SmoteConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 20,
            seed: 123,
            smote_scope: SmoteScope::Fold,
            smote: SmoteConfig::default(),
        }
    }
}

/// The seven headline numbers of a report, weighted-average flavour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadlineMetrics {
    pub accuracy: f64,
    pub auc: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub kappa: f64,
    pub mcc: f64,
}

impl HeadlineMetrics {
    /// Extracts the headline row from a full report.
    pub fn of(report: &MetricsReport) -> Self {
        HeadlineMetrics {
            accuracy: report.accuracy,
            auc: report.auc_weighted,
            recall: report.recall_weighted,
            precision: report.precision_weighted,
            f1: report.f1_weighted,
            kappa: report.kappa,
            mcc: report.mcc,
        }
    }

    fn zeros() -> Self {
        HeadlineMetrics {
            accuracy: 0.0,
            auc: 0.0,
            recall: 0.0,
            precision: 0.0,
            f1: 0.0,
            kappa: 0.0,
            mcc: 0.0,
        }
    }

    fn map2(a: &Self, b: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        HeadlineMetrics {
            accuracy: f(a.accuracy, b.accuracy),
            auc: f(a.auc, b.auc),
            recall: f(a.recall, b.recall),
            precision: f(a.precision, b.precision),
            f1: f(a.f1, b.f1),
            kappa: f(a.kappa, b.kappa),
            mcc: f(a.mcc, b.mcc),
        }
    }
}

/// Per-fold means and population standard deviations of the headlines.
fn mean_std(rows: &[HeadlineMetrics]) -> (HeadlineMetrics, HeadlineMetrics) {
    let n = rows.len() as f64;
    let sum = rows
        .iter()
        .fold(HeadlineMetrics::zeros(), |acc, r| HeadlineMetrics::map2(&acc, r, |a, b| a + b));
    let mean = HeadlineMetrics::map2(&sum, &HeadlineMetrics::zeros(), |a, _| a / n);
    let var = rows.iter().fold(HeadlineMetrics::zeros(), |acc, r| {
        let d = HeadlineMetrics::map2(r, &mean, |a, b| a - b);
        HeadlineMetrics::map2(&acc, &d, |a, b| a + b * b)
    });
    let std = HeadlineMetrics::map2(&var, &HeadlineMetrics::zeros(), |a, _| (a / n).sqrt());
    (mean, std)
}

/// The outcome of cross-validating one model.
#[derive(Debug, Clone, Serialize)]
pub struct CvReport {
    /// Model identifier (see [`ModelSpec::name`]).
    pub model: String,
    pub folds: usize,
    /// Full report of every fold, in fold order.
    pub per_fold: Vec<MetricsReport>,
    /// Fold means of the headline metrics.
    pub mean: HeadlineMetrics,
    /// Fold population standard deviations of the headline metrics.
    pub std: HeadlineMetrics,
    /// Wall-clock seconds spent fitting and scoring across all folds.
    pub tt_seconds: f64,
}

/// Assigns every row to a fold: per class (ascending), the rows are
/// shuffled with a single seeded stream and dealt round-robin, so each
/// fold receives each class's count within one row of every other fold.
pub fn fold_assignments(
    ds: &Dataset,
    folds: usize,
    seed: u64,
) -> Result<Vec<usize>, HarnessError> {
    if folds < 2 {
        return Err(HarnessError::TooFewFolds(folds));
    }
    for (class, &count) in class_counts(ds).iter().enumerate() {
        if count > 0 && count < folds {
            return Err(HarnessError::FoldsExceedClassCount {
                class: class as u8,
                count,
                folds,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0usize; ds.n_rows()];
    for class in 0..ds.n_classes() as u8 {
        let mut members: Vec<usize> =
            (0..ds.n_rows()).filter(|&i| ds.labels()[i] == class).collect();
        members.shuffle(&mut rng);
        for (i, &row) in members.iter().enumerate() {
            assign[row] = i % folds;
        }
    }
    Ok(assign)
}

/// One fold's materialized data: the (possibly oversampled) training set
/// and the untouched evaluation set. The first `n_original` training rows
/// are verbatim originals; any rows beyond are synthetic. Synthetic row
/// ids are fold-local (they continue from the largest id in the fold's
/// training part) and may coincide numerically with held-out ids — they
/// never denote original rows.
struct FoldData {
    train: Dataset,
    n_original: usize,
    test: Dataset,
}

/// Builds every fold once so all compared models see identical data.
fn materialize_folds(ds: &Dataset, cfg: &CvConfig) -> Result<Vec<FoldData>, HarnessError> {
    let source;
    let working = match cfg.smote_scope {
        SmoteScope::Global => {
            source = smote(ds, &cfg.smote)?;
            &source
        }
        _ => ds,
    };
    let assign = fold_assignments(working, cfg.folds, cfg.seed)?;
    let mut out = Vec::with_capacity(cfg.folds);
    for fold in 0..cfg.folds {
        let train_idx: Vec<usize> =
            (0..working.n_rows()).filter(|&i| assign[i] != fold).collect();
        let test_idx: Vec<usize> =
            (0..working.n_rows()).filter(|&i| assign[i] == fold).collect();
        let test = working.subset(&test_idx);
        let train = match cfg.smote_scope {
            SmoteScope::Fold => {
                let fold_cfg =
                    SmoteConfig { seed: cfg.smote.seed + fold as u64, ..cfg.smote };
                smote(&working.subset(&train_idx), &fold_cfg)?
            }
            _ => working.subset(&train_idx),
        };
        let data = FoldData { train, n_original: train_idx.len(), test };
        // Evaluation rows must never reach the training side: the
        // original (verbatim) portion of the training part must be
        // disjoint from the test part.
        let test_ids: std::collections::HashSet<u32> =
            data.test.row_ids().iter().copied().collect();
        assert!(
            data.train.row_ids()[..data.n_original].iter().all(|id| !test_ids.contains(id)),
            "fold {fold}: a row appears on both sides"
        );
        out.push(data);
    }
    Ok(out)
}

/// Fits and scores one model on pre-built folds.
fn cv_over_folds(
    spec: &ModelSpec,
    folds: &[FoldData],
    k: usize,
) -> Result<CvReport, HarnessError> {
    let mut per_fold = Vec::with_capacity(folds.len());
    let started = Instant::now();
    for fold in folds {
        let model = TrainedModel::fit(spec, &fold.train)?;
        let proba = model.predict_proba_batch(&fold.test)?;
        let preds = model.predict_batch(&fold.test)?;
        per_fold.push(summary(fold.test.labels(), &preds, &proba, k)?);
    }
    let tt_seconds = started.elapsed().as_secs_f64();
    let rows: Vec<HeadlineMetrics> = per_fold.iter().map(HeadlineMetrics::of).collect();
    let (mean, std) = mean_std(&rows);
    Ok(CvReport {
        model: spec.name().to_string(),
        folds: folds.len(),
        per_fold,
        mean,
        std,
        tt_seconds,
    })
}

/// Stratified k-fold cross-validation of one model.
pub fn kfold_cv(
    ds: &Dataset,
    spec: &ModelSpec,
    cfg: &CvConfig,
) -> Result<CvReport, HarnessError> {
    let folds = materialize_folds(ds, cfg)?;
    cv_over_folds(spec, &folds, ds.n_classes())
}

/// Cross-validates several models on identical folds (same assignments,
/// same oversampled training sets), returning reports in input order.
pub fn compare_models(
    ds: &Dataset,
    specs: &[ModelSpec],
    cfg: &CvConfig,
) -> Result<Vec<CvReport>, HarnessError> {
    let folds = materialize_folds(ds, cfg)?;
    specs.iter().map(|spec| cv_over_folds(spec, &folds, ds.n_classes())).collect()
}

/// Hyperparameters a validation curve can sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveParam {
    NEstimators,
    NumLeaves,
    LearningRate,
}

impl CurveParam {
    /// Parses a parameter name as used on the command line.
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "n_estimators" => Ok(CurveParam::NEstimators),
            "num_leaves" => Ok(CurveParam::NumLeaves),
            "learning_rate" => Ok(CurveParam::LearningRate),
            other => Err(HarnessError::UnknownParam(other.to_string())),
        }
    }

    /// Canonical parameter name.
    pub fn name(self) -> &'static str {
        match self {
            CurveParam::NEstimators => "n_estimators",
            CurveParam::NumLeaves => "num_leaves",
            CurveParam::LearningRate => "learning_rate",
        }
    }

    /// Returns `base` with this parameter set to `value`.
    pub fn apply(self, base: &GbdtConfig, value: f64) -> Result<GbdtConfig, HarnessError> {
        let as_count = |value: f64| -> Result<usize, HarnessError> {
            if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
                return Err(HarnessError::InvalidParamValue {
                    param: self.name().to_string(),
                    value,
                    reason: "must be a non-negative integer".to_string(),
                });
            }
            Ok(value as usize)
        };
        let mut cfg = base.clone();
        match self {
            CurveParam::NEstimators => cfg.n_estimators = as_count(value)?,
            CurveParam::NumLeaves => cfg.num_leaves = as_count(value)?,
            CurveParam::LearningRate => cfg.learning_rate = value,
        }
        Ok(cfg)
    }
}

/// One sweep point of a validation curve: training-side and
/// evaluation-side accuracy, averaged over folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub value: f64,
    pub train_mean: f64,
    pub train_std: f64,
    pub cv_mean: f64,
    pub cv_std: f64,
}

/// A validation curve over one booster hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCurve {
    pub param: String,
    pub points: Vec<CurvePoint>,
}

/// Accuracy of a model on a dataset.
fn accuracy_on(model: &TrainedModel, ds: &Dataset) -> Result<f64, HarnessError> {
    let preds = model.predict_batch(ds)?;
    let correct = preds.iter().zip(ds.labels()).filter(|(p, y)| p == y).count();
    Ok(correct as f64 / ds.n_rows() as f64)
}

/// Sweeps one booster hyperparameter across `values`, cross-validating
/// each setting on identical folds. Training accuracy is measured on the
/// same (possibly oversampled) data each fold fit on.
pub fn validation_curve(
    ds: &Dataset,
    base: &GbdtConfig,
    param: CurveParam,
    values: &[f64],
    cfg: &CvConfig,
) -> Result<ValidationCurve, HarnessError> {
    let folds = materialize_folds(ds, cfg)?;
    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let gbdt_cfg = param.apply(base, value)?;
        let spec = ModelSpec::Gbdt(gbdt_cfg);
        let mut train_scores = Vec::with_capacity(folds.len());
        let mut cv_scores = Vec::with_capacity(folds.len());
        for fold in &folds {
            let model = TrainedModel::fit(&spec, &fold.train)?;
            train_scores.push(accuracy_on(&model, &fold.train)?);
            cv_scores.push(accuracy_on(&model, &fold.test)?);
        }
        let stats = |xs: &[f64]| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        let (train_mean, train_std) = stats(&train_scores);
        let (cv_mean, cv_std) = stats(&cv_scores);
        points.push(CurvePoint { value, train_mean, train_std, cv_mean, cv_std });
    }
    Ok(ValidationCurve { param: param.name().to_string(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{CartConfig, KnnConfig};
    use crate::synthetic::{blobs, ctg_like_with_counts};
    use std::collections::HashSet;

    fn no_smote(folds: usize) -> CvConfig {
        CvConfig { folds, smote_scope: SmoteScope::Off, ..CvConfig::default() }
    }

    #[test]
    fn fold_assignments_stratify_within_one_row() {
        let ds = ctg_like_with_counts([41, 23, 11], 3);
        let assign = fold_assignments(&ds, 5, 7).unwrap();
        for class in 0..3u8 {
            let mut per_fold = vec![0usize; 5];
            for i in 0..ds.n_rows() {
                if ds.labels()[i] == class {
                    per_fold[assign[i]] += 1;
                }
            }
            let (lo, hi) =
                (per_fold.iter().min().unwrap(), per_fold.iter().max().unwrap());
            assert!(hi - lo <= 1, "class {class}: {per_fold:?}");
        }
    }

    #[test]
    fn fold_assignments_are_deterministic_and_seed_sensitive() {
        let ds = ctg_like_with_counts([30, 20, 10], 9);
        let a = fold_assignments(&ds, 4, 1).unwrap();
        let b = fold_assignments(&ds, 4, 1).unwrap();
        let c = fold_assignments(&ds, 4, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c, "a different seed should shuffle differently");
    }

    #[test]
    fn fold_validation_rejects_impossible_requests() {
        let ds = ctg_like_with_counts([12, 8, 3], 1);
        assert!(matches!(fold_assignments(&ds, 1, 0), Err(HarnessError::TooFewFolds(1))));
        match fold_assignments(&ds, 4, 0) {
            Err(HarnessError::FoldsExceedClassCount { class: 2, count: 3, folds: 4 }) => {}
            other => panic!("expected class-count error, got {other:?}"),
        }
        // The boundary case folds == smallest class count is allowed.
        assert!(fold_assignments(&ds, 3, 0).is_ok());
    }

    #[test]
    fn cv_matches_a_naive_reimplementation_on_a_tiny_dataset() {
        // folds == smallest class count: each fold's test part holds one
        // row per class. The naive loop below shares only the assignment
        // function with the implementation under test.
        let ds = blobs(&[4, 4, 4], 3, 3.0, 5);
        let cfg = no_smote(4);
        let spec = ModelSpec::Knn(KnnConfig { k: 3 });
        let got = kfold_cv(&ds, &spec, &cfg).unwrap();

        let assign = fold_assignments(&ds, 4, cfg.seed).unwrap();
        let mut naive_acc = Vec::new();
        for fold in 0..4 {
            let train_idx: Vec<usize> =
                (0..ds.n_rows()).filter(|&i| assign[i] != fold).collect();
            let test_idx: Vec<usize> =
                (0..ds.n_rows()).filter(|&i| assign[i] == fold).collect();
            let model = TrainedModel::fit(&spec, &ds.subset(&train_idx)).unwrap();
            let test = ds.subset(&test_idx);
            let preds = model.predict_batch(&test).unwrap();
            let correct =
                preds.iter().zip(test.labels()).filter(|(p, y)| p == y).count();
            naive_acc.push(correct as f64 / test.n_rows() as f64);
        }
        assert_eq!(got.per_fold.len(), 4);
        for (fold, want) in naive_acc.iter().enumerate() {
            assert_eq!(got.per_fold[fold].accuracy, *want, "fold {fold}");
        }
        let want_mean = naive_acc.iter().sum::<f64>() / 4.0;
        assert!((got.mean.accuracy - want_mean).abs() < 1e-15);
    }

    #[test]
    fn dummy_cv_exposes_the_oversampling_scope() {
        // 30/18/12 with 6 folds: every fold's test part is 5/3/2.
        let ds = ctg_like_with_counts([30, 18, 12], 21);
        let spec = ModelSpec::Dummy;

        // Fold scope: training parts are rebalanced, test parts keep the
        // original mix, and the dummy's majority tie resolves to class 0;
        // accuracy is exactly the class-0 share of each test fold.
        let fold_scope = kfold_cv(&ds, &spec, &CvConfig { folds: 6, ..CvConfig::default() })
            .unwrap();
        assert_eq!(fold_scope.mean.accuracy, 0.5);

        // Global scope: the whole dataset is balanced first, so the test
        // parts are balanced too and the dummy scores exactly 1/3.
        let global = kfold_cv(
            &ds,
            &spec,
            &CvConfig { folds: 6, smote_scope: SmoteScope::Global, ..CvConfig::default() },
        )
        .unwrap();
        assert!((global.mean.accuracy - 1.0 / 3.0).abs() < 1e-12);

        // No oversampling: same test mix, majority learned from the raw
        // imbalance is still class 0.
        let off = kfold_cv(&ds, &spec, &no_smote(6)).unwrap();
        assert_eq!(off.mean.accuracy, 0.5);
    }

    #[test]
    fn fold_scope_never_leaks_evaluation_rows_into_training() {
        let ds = ctg_like_with_counts([40, 25, 10], 13);
        let cfg = CvConfig { folds: 5, ..CvConfig::default() };
        let original_ids: HashSet<u32> = ds.row_ids().iter().copied().collect();
        let folds = materialize_folds(&ds, &cfg).unwrap();
        assert_eq!(folds.len(), 5);

        let mut seen_test_ids = Vec::new();
        for (i, fold) in folds.iter().enumerate() {
            let test_ids: HashSet<u32> = fold.test.row_ids().iter().copied().collect();
            // Evaluation rows are always original rows.
            assert!(test_ids.is_subset(&original_ids), "fold {i}: synthetic test row");
            // No evaluation row may appear among the verbatim originals of
            // the training part (rows past n_original are synthetic points,
            // whose fold-local ids carry no cross-fold identity).
            assert!(fold.n_original < fold.train.n_rows(), "fold {i}: nothing synthesized");
            for (j, id) in fold.train.row_ids().iter().enumerate() {
                if j < fold.n_original {
                    assert!(!test_ids.contains(id), "fold {i}: row {id} leaked");
                    assert!(original_ids.contains(id), "fold {i}: unknown original {id}");
                }
            }
            // The verbatim portion is exactly the rows not assigned to
            // this fold, in original order.
            let expected_train: Vec<u32> = ds
                .row_ids()
                .iter()
                .copied()
                .filter(|id| !test_ids.contains(id))
                .collect();
            assert_eq!(&fold.train.row_ids()[..fold.n_original], &expected_train[..]);
            // Training parts are exactly balanced after oversampling.
            let counts = class_counts(&fold.train);
            assert!(counts.iter().all(|&c| c == counts[0]), "fold {i}: {counts:?}");
            seen_test_ids.extend(test_ids);
        }
        // The test parts partition the original rows.
        assert_eq!(seen_test_ids.len(), ds.n_rows());
        assert_eq!(
            seen_test_ids.iter().copied().collect::<HashSet<u32>>(),
            original_ids
        );
    }

    #[test]
    fn compare_models_scores_every_spec_on_identical_folds() {
        let ds = ctg_like_with_counts([40, 24, 16], 3);
        let specs = [
            ModelSpec::Dummy,
            ModelSpec::Cart(CartConfig::default()),
            ModelSpec::Knn(KnnConfig { k: 3 }),
        ];
        let cfg = no_smote(4);
        let reports = compare_models(&ds, &specs, &cfg).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].model, "dummy");
        assert_eq!(reports[1].model, "cart");
        assert_eq!(reports[2].model, "knn");

        // Each must equal its own standalone CV run (shared folds are a
        // pure optimization, never a behavioural change).
        for (spec, report) in specs.iter().zip(&reports) {
            let solo = kfold_cv(&ds, spec, &cfg).unwrap();
            assert_eq!(solo.per_fold, report.per_fold, "{}", report.model);
        }

        // Per-fold evaluated row counts agree across models.
        for fold in 0..4 {
            let n0 = reports[0].per_fold[fold].n_evaluated;
            assert!(reports.iter().all(|r| r.per_fold[fold].n_evaluated == n0));
        }
    }

    #[test]
    fn cv_reports_are_reproducible() {
        let ds = ctg_like_with_counts([30, 20, 10], 17);
        let cfg = CvConfig { folds: 3, ..CvConfig::default() };
        let spec = ModelSpec::Cart(CartConfig::default());
        let a = kfold_cv(&ds, &spec, &cfg).unwrap();
        let b = kfold_cv(&ds, &spec, &cfg).unwrap();
        assert_eq!(a.per_fold, b.per_fold);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.std, b.std);
    }

    #[test]
    fn headline_std_is_the_population_deviation() {
        let ds = ctg_like_with_counts([24, 18, 12], 29);
        let report = kfold_cv(&ds, &ModelSpec::Dummy, &no_smote(3)).unwrap();
        let accs: Vec<f64> = report.per_fold.iter().map(|r| r.accuracy).collect();
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let var = accs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / accs.len() as f64;
        assert!((report.mean.accuracy - mean).abs() < 1e-15);
        assert!((report.std.accuracy - var.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation_curve_sweeps_and_validates_parameters() {
        let ds = ctg_like_with_counts([30, 21, 12], 11);
        let base = GbdtConfig { n_estimators: 5, min_samples_leaf: 2, ..GbdtConfig::default() };
        let cfg = no_smote(3);
        let curve = validation_curve(
            &ds,
            &base,
            CurveParam::NEstimators,
            &[1.0, 5.0, 10.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(curve.param, "n_estimators");
        assert_eq!(curve.points.len(), 3);
        for p in &curve.points {
            assert!(p.train_mean >= 0.0 && p.train_mean <= 1.0);
            assert!(p.cv_mean >= 0.0 && p.cv_mean <= 1.0);
        }
        // More boosting never hurts training accuracy on this data.
        assert!(curve.points[2].train_mean >= curve.points[0].train_mean);

        // Unknown names and fractional counts are rejected.
        assert!(matches!(CurveParam::parse("max_bins"), Err(HarnessError::UnknownParam(_))));
        assert!(matches!(
            validation_curve(&ds, &base, CurveParam::NumLeaves, &[2.5], &cfg),
            Err(HarnessError::InvalidParamValue { .. })
        ));
        // Learning-rate sweeps take fractional values.
        let lr = validation_curve(&ds, &base, CurveParam::LearningRate, &[0.05, 0.2], &cfg)
            .unwrap();
        assert_eq!(lr.points.len(), 2);
    }

    #[test]
    fn curve_param_apply_sets_exactly_one_field() {
        let base = GbdtConfig::default();
        let a = CurveParam::NEstimators.apply(&base, 7.0).unwrap();
        assert_eq!(a.n_estimators, 7);
        assert_eq!(GbdtConfig { n_estimators: 7, ..base.clone() }, a);
        let b = CurveParam::NumLeaves.apply(&base, 8.0).unwrap();
        assert_eq!(b.num_leaves, 8);
        let c = CurveParam::LearningRate.apply(&base, 0.3).unwrap();
        assert_eq!(c.learning_rate, 0.3);
    }
}
