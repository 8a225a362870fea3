//! Gradient-boosted decision trees for multiclass classification.
//!
//! The booster follows the histogram + leaf-wise design popularized by
//! LightGBM: features are quantized into at most 255 bins up front, each
//! boosting iteration fits one tree per class on the softmax gradients,
//! and trees grow by repeatedly splitting whichever leaf offers the
//! largest gain. Training is deterministic — identical inputs produce a
//! bitwise-identical model regardless of thread count, because all
//! parallel sections reduce in a fixed order.
//!
//! # Example
//!
//! ```
//! use ctg_boost::gbdt::{train, GbdtConfig};
//! use ctg_boost::synthetic::blobs;
//!
//! let ds = blobs(&[40, 30, 20], 5, 4.0, 7);
//! let cfg = GbdtConfig { n_estimators: 20, ..GbdtConfig::default() };
//! let model = train(&ds, &cfg).unwrap();
//! let proba = model.predict_proba(ds.row(0)).unwrap();
//! assert!((proba.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod binning;
pub mod histogram;
pub mod loss;
pub mod split;
pub mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{class_counts, Dataset};
use binning::{fit_bins, BinMapper};
use loss::{cross_entropy, softmax, softmax_gradients};
use tree::{grow_tree_leafwise, grow_tree_leafwise_audited, SplitAudit, Tree};

/// Errors from configuring, training, or querying a booster.
#[derive(Debug, Error)]
pub enum GbdtError {
    /// A hyperparameter is out of its supported range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Training was asked to run on zero rows.
    #[error("training requires at least one row")]
    EmptyDataset,
    /// A prediction row's width disagrees with the trained model.
    #[error("input has {got} features but the model expects {want}")]
    FeatureMismatch { got: usize, want: usize },
}

/// Booster hyperparameters. `Default` reproduces the stock LightGBM
/// classifier settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtConfig {
    /// Shrinkage applied to every leaf when accumulating scores.
    pub learning_rate: f64,
    /// Maximum leaves per tree (leaf-wise growth stops here).
    pub num_leaves: usize,
    /// Optional depth cap; `None` leaves depth unconstrained.
    pub max_depth: Option<usize>,
    /// Minimum training rows on each side of a split.
    pub min_samples_leaf: u32,
    /// Minimum summed Hessian on each side of a split.
    pub min_child_weight: f64,
    /// Splits must improve the objective by strictly more than this.
    pub min_split_gain: f64,
    /// Boosting iterations; each grows one tree per class.
    pub n_estimators: usize,
    /// Upper bound on histogram bins per feature (at most 255).
    pub max_bins: usize,
    /// L1 leaf regularization. Only `0.0` is supported.
    pub reg_alpha: f64,
    /// L2 leaf regularization added to Hessian sums.
    pub reg_lambda: f64,
    /// Recorded for provenance; boosting itself is deterministic.
    pub seed: u64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            learning_rate: 0.1,
            num_leaves: 31,
            max_depth: None,
            min_samples_leaf: 20,
            min_child_weight: 1e-3,
            min_split_gain: 0.0,
            n_estimators: 100,
            max_bins: 255,
            reg_alpha: 0.0,
            reg_lambda: 0.0,
            seed: 123,
        }
    }
}

impl GbdtConfig {
    /// Checks every hyperparameter's supported range.
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |msg: &str| Err(GbdtError::InvalidConfig(msg.into()));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be finite and positive");
        }
        if self.num_leaves < 2 {
            return bad("num_leaves must be at least 2");
        }
        if self.max_depth == Some(0) {
            return bad("max_depth must be at least 1 when set");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.min_child_weight.is_finite() && self.min_child_weight >= 0.0) {
            return bad("min_child_weight must be finite and non-negative");
        }
        if !(self.min_split_gain.is_finite() && self.min_split_gain >= 0.0) {
            return bad("min_split_gain must be finite and non-negative");
        }
        if !(2..=255).contains(&self.max_bins) {
            return bad("max_bins must lie in 2..=255");
        }
        if self.reg_alpha != 0.0 {
            return bad("reg_alpha is unsupported and must be 0");
        }
        if !(self.reg_lambda.is_finite() && self.reg_lambda >= 0.0) {
            return bad("reg_lambda must be finite and non-negative");
        }
        Ok(())
    }
}

/// Per-iteration diagnostics captured during training.
#[derive(Debug, Clone)]
pub struct TrainingTrace {
    /// Mean training cross-entropy; entry 0 is the prior-only loss, entry
    /// `m` the loss after iteration `m`.
    pub train_loss: Vec<f64>,
    /// Histogram verification tallies when training ran audited.
    pub audit: Option<SplitAudit>,
}

/// A trained multiclass booster.
#[derive(Debug, Clone)]
pub struct BoostedModel {
    pub(crate) config: GbdtConfig,
    pub(crate) n_classes: usize,
    pub(crate) n_features: usize,
    /// Log class priors; the starting score of every class.
    pub(crate) init_scores: Vec<f64>,
    pub(crate) mapper: BinMapper,
    /// Iteration-major: tree `m * n_classes + k` belongs to class `k`.
    pub(crate) trees: Vec<Tree>,
}

impl BoostedModel {
    /// Number of classes.
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Number of input features.
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Total trees (iterations × classes).
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// The configuration the model was trained with.
    pub fn config(&self) -> &GbdtConfig {
        &self.config
    }

    /// Log class priors used as starting scores.
    pub fn init_scores(&self) -> &[f64] {
        &self.init_scores
    }

    /// The per-feature bin thresholds.
    pub fn mapper(&self) -> &BinMapper {
        &self.mapper
    }

    fn check_width(&self, row: &[f64]) -> Result<(), GbdtError> {
        if row.len() != self.n_features {
            return Err(GbdtError::FeatureMismatch { got: row.len(), want: self.n_features });
        }
        Ok(())
    }

    /// Raw additive scores per class: prior plus the shrunken sum of each
    /// class's tree outputs.
    pub fn predict_raw(&self, row: &[f64]) -> Result<Vec<f64>, GbdtError> {
        self.check_width(row)?;
        let binned = self.mapper.bin_row(row);
        let mut out = self.init_scores.clone();
        for (t, tree) in self.trees.iter().enumerate() {
            out[t % self.n_classes] += self.config.learning_rate * tree.predict_binned(&binned);
        }
        Ok(out)
    }

    /// Class probabilities (softmax of the raw scores; sums to 1).
    pub fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>, GbdtError> {
        Ok(softmax(&self.predict_raw(row)?))
    }

    /// Most probable class; exact ties resolve to the lowest index.
    pub fn predict(&self, row: &[f64]) -> Result<u8, GbdtError> {
        let proba = self.predict_proba(row)?;
        let mut best = 0usize;
        for k in 1..proba.len() {
            if proba[k] > proba[best] {
                best = k;
            }
        }
        Ok(best as u8)
    }

    /// Row-major flattened probabilities for a whole dataset.
    pub fn predict_proba_batch(&self, ds: &Dataset) -> Result<Vec<f64>, GbdtError> {
        if ds.n_features() != self.n_features {
            return Err(GbdtError::FeatureMismatch { got: ds.n_features(), want: self.n_features });
        }
        let rows: Vec<Vec<f64>> = (0..ds.n_rows())
            .into_par_iter()
            .map(|i| self.predict_proba(ds.row(i)).expect("width already checked"))
            .collect();
        Ok(rows.into_iter().flatten().collect())
    }

    /// Predicted class per row of a dataset.
    pub fn predict_batch(&self, ds: &Dataset) -> Result<Vec<u8>, GbdtError> {
        if ds.n_features() != self.n_features {
            return Err(GbdtError::FeatureMismatch { got: ds.n_features(), want: self.n_features });
        }
        Ok((0..ds.n_rows())
            .into_par_iter()
            .map(|i| self.predict(ds.row(i)).expect("width already checked"))
            .collect())
    }
}

/// Mean multiclass cross-entropy of the current scores, summed in row
/// order so the trace is reproducible.
fn mean_loss(scores: &[f64], labels: &[u8], k: usize) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        total += cross_entropy(&scores[i * k..(i + 1) * k], y);
    }
    total / n as f64
}

/// Trains a booster on a dataset.
pub fn train(ds: &Dataset, cfg: &GbdtConfig) -> Result<BoostedModel, GbdtError> {
    train_traced(ds, cfg, false).map(|(model, _)| model)
}

/// Trains a booster, returning the per-iteration loss trace. With
/// `audited` set, every split's histograms are re-counted from raw
/// samples and the comparison tallies land in the trace (slower; meant
/// for verification runs).
pub fn train_traced(
    ds: &Dataset,
    cfg: &GbdtConfig,
    audited: bool,
) -> Result<(BoostedModel, TrainingTrace), GbdtError> {
    cfg.validate()?;
    let n = ds.n_rows();
    if n == 0 {
        return Err(GbdtError::EmptyDataset);
    }
    let k = ds.n_classes();
    let labels = ds.labels();

    // Starting scores are the log priors; a class with no rows gets -inf,
    // which softmax turns into exactly zero probability.
    let counts = class_counts(ds);
    let init_scores: Vec<f64> =
        counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();

    let mapper = fit_bins(ds, cfg.max_bins);
    let binned = mapper.bin_dataset(ds);
    let n_bins: Vec<usize> = (0..ds.n_features()).map(|f| mapper.n_bins(f)).collect();

    let mut scores = vec![0.0; n * k];
    for (i, chunk) in scores.chunks_mut(k).enumerate() {
        let _ = i;
        chunk.copy_from_slice(&init_scores);
    }

    let mut trace = TrainingTrace {
        train_loss: Vec::with_capacity(cfg.n_estimators + 1),
        audit: audited.then(SplitAudit::default),
    };
    trace.train_loss.push(mean_loss(&scores, labels, k));

    let all_samples: Vec<u32> = (0..n as u32).collect();
    let mut trees: Vec<Tree> = Vec::with_capacity(cfg.n_estimators * k);

    for _ in 0..cfg.n_estimators {
        // Gradients for every row and class, computed once per iteration.
        let per_row: Vec<(Vec<f64>, Vec<f64>)> = scores
            .par_chunks(k)
            .zip(labels.par_iter())
            .map(|(row, &y)| softmax_gradients(row, y))
            .collect();
        let mut g = vec![vec![0.0; n]; k];
        let mut h = vec![vec![0.0; n]; k];
        for (i, (gr, hr)) in per_row.iter().enumerate() {
            for kk in 0..k {
                g[kk][i] = gr[kk];
                h[kk][i] = hr[kk];
            }
        }

        let grown: Vec<tree::GrownTree> = if let Some(audit) = trace.audit.as_mut() {
            (0..k)
                .map(|kk| {
                    grow_tree_leafwise_audited(
                        &binned,
                        &n_bins,
                        &g[kk],
                        &h[kk],
                        all_samples.clone(),
                        cfg,
                        audit,
                    )
                })
                .collect()
        } else {
            (0..k)
                .into_par_iter()
                .map(|kk| {
                    grow_tree_leafwise(&binned, &n_bins, &g[kk], &h[kk], all_samples.clone(), cfg)
                })
                .collect()
        };

        for (kk, gt) in grown.into_iter().enumerate() {
            for (leaf, samples) in gt.leaf_samples.iter().enumerate() {
                let delta = cfg.learning_rate * gt.tree.value_of_leaf(leaf);
                for &s in samples {
                    scores[s as usize * k + kk] += delta;
                }
            }
            trees.push(gt.tree);
        }
        trace.train_loss.push(mean_loss(&scores, labels, k));
    }

    let model = BoostedModel {
        config: cfg.clone(),
        n_classes: k,
        n_features: ds.n_features(),
        init_scores,
        mapper,
        trees,
    };
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::class_counts;
    use crate::synthetic::{blobs, ctg_like_dataset};

    fn quick_cfg(n_estimators: usize) -> GbdtConfig {
        GbdtConfig { n_estimators, min_samples_leaf: 5, ..GbdtConfig::default() }
    }

    #[test]
    fn default_config_is_valid_and_as_documented() {
        let cfg = GbdtConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.learning_rate, 0.1);
        assert_eq!(cfg.num_leaves, 31);
        assert_eq!(cfg.max_depth, None);
        assert_eq!(cfg.min_samples_leaf, 20);
        assert_eq!(cfg.min_child_weight, 1e-3);
        assert_eq!(cfg.min_split_gain, 0.0);
        assert_eq!(cfg.n_estimators, 100);
        assert_eq!(cfg.max_bins, 255);
        assert_eq!(cfg.reg_lambda, 0.0);
        assert_eq!(cfg.seed, 123);
    }

    #[test]
    fn config_validation_rejects_bad_ranges() {
        let ok = GbdtConfig::default();
        let cases = [
            GbdtConfig { learning_rate: 0.0, ..ok.clone() },
            GbdtConfig { learning_rate: f64::NAN, ..ok.clone() },
            GbdtConfig { num_leaves: 1, ..ok.clone() },
            GbdtConfig { max_depth: Some(0), ..ok.clone() },
            GbdtConfig { min_samples_leaf: 0, ..ok.clone() },
            GbdtConfig { min_child_weight: -1.0, ..ok.clone() },
            GbdtConfig { min_split_gain: -0.1, ..ok.clone() },
            GbdtConfig { max_bins: 1, ..ok.clone() },
            GbdtConfig { max_bins: 256, ..ok.clone() },
            GbdtConfig { reg_alpha: 0.5, ..ok.clone() },
            GbdtConfig { reg_lambda: f64::INFINITY, ..ok.clone() },
        ];
        for bad in cases {
            assert!(
                matches!(train(&blobs(&[5, 5, 5], 2, 3.0, 1), &bad), Err(GbdtError::InvalidConfig(_))),
                "{bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn zero_iterations_predicts_the_class_priors() {
        let ds = ctg_like_dataset(300, 5);
        let model = train(&ds, &quick_cfg(0)).unwrap();
        assert_eq!(model.n_trees(), 0);
        let counts = class_counts(&ds);
        let proba = model.predict_proba(ds.row(17)).unwrap();
        for (kk, p) in proba.iter().enumerate() {
            let prior = counts[kk] as f64 / ds.n_rows() as f64;
            assert!((p - prior).abs() <= 1e-12, "class {kk}: {p} vs prior {prior}");
        }
    }

    #[test]
    fn balanced_priors_tie_to_the_lowest_class() {
        let ds = blobs(&[4, 4, 4], 3, 2.0, 2);
        let model = train(&ds, &quick_cfg(0)).unwrap();
        for i in 0..ds.n_rows() {
            assert_eq!(model.predict(ds.row(i)).unwrap(), 0);
        }
    }

    #[test]
    fn separable_blobs_reach_perfect_training_accuracy() {
        let ds = blobs(&[50, 35, 25], 6, 6.0, 11);
        let cfg = GbdtConfig { n_estimators: 30, min_samples_leaf: 2, ..GbdtConfig::default() };
        let model = train(&ds, &cfg).unwrap();
        let preds = model.predict_batch(&ds).unwrap();
        let correct =
            preds.iter().zip(ds.labels()).filter(|(p, y)| p == y).count();
        assert_eq!(correct, ds.n_rows(), "separable data must be fit exactly");
    }

    #[test]
    fn training_loss_starts_at_prior_entropy_and_never_increases() {
        let ds = ctg_like_dataset(600, 9);
        let (model, trace) = train_traced(&ds, &quick_cfg(40), false).unwrap();
        assert_eq!(trace.train_loss.len(), 41);
        assert_eq!(model.n_trees(), 40 * 3);

        // Entry 0 equals the entropy of the class priors.
        let n = ds.n_rows() as f64;
        let prior_loss: f64 = class_counts(&ds)
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| -(c as f64 / n).ln() * c as f64 / n)
            .sum();
        assert!((trace.train_loss[0] - prior_loss).abs() < 1e-12);

        for w in trace.train_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "loss rose: {} -> {}", w[0], w[1]);
        }
        assert!(
            *trace.train_loss.last().unwrap() < 0.5 * trace.train_loss[0],
            "40 iterations should at least halve the training loss"
        );
    }

    #[test]
    fn audited_training_confirms_histogram_conservation() {
        let ds = ctg_like_dataset(400, 3);
        let (_, trace) = train_traced(&ds, &quick_cfg(5), true).unwrap();
        let audit = trace.audit.expect("audit requested");
        assert!(audit.splits > 0);
        assert_eq!(audit.count_violations, 0);
        assert!(audit.max_conservation_err <= 1e-9, "{}", audit.max_conservation_err);
        assert!(audit.max_subtraction_err <= 1e-9, "{}", audit.max_subtraction_err);
    }

    #[test]
    fn raw_scores_match_a_recursive_descent_oracle() {
        let ds = ctg_like_dataset(350, 13);
        let model = train(&ds, &quick_cfg(8)).unwrap();
        for i in (0..ds.n_rows()).step_by(29) {
            let row = ds.row(i);
            let got = model.predict_raw(row).unwrap();

            // Re-walk every tree by hand over the stored parts.
            let binned = model.mapper().bin_row(row);
            let mut want = model.init_scores().to_vec();
            for (t, tree) in model.trees.iter().enumerate() {
                let (root, features, bins, left, right, values, _) = tree.parts();
                let mut node = root;
                while node >= 0 {
                    let idx = node as usize;
                    node = if binned[features[idx] as usize] <= bins[idx] {
                        left[idx]
                    } else {
                        right[idx]
                    };
                }
                want[t % 3] += model.config().learning_rate * values[!node as usize];
            }
            assert_eq!(got, want, "row {i}");
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_argmax_matches_predict() {
        let ds = ctg_like_dataset(280, 21);
        let model = train(&ds, &quick_cfg(10)).unwrap();
        let proba = model.predict_proba_batch(&ds).unwrap();
        let preds = model.predict_batch(&ds).unwrap();
        for i in 0..ds.n_rows() {
            let p = &proba[i * 3..(i + 1) * 3];
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let mut best = 0;
            for kk in 1..3 {
                if p[kk] > p[best] {
                    best = kk;
                }
            }
            assert_eq!(preds[i], best as u8);
        }
    }

    #[test]
    fn trees_honor_the_leaf_sample_floor() {
        let ds = ctg_like_dataset(500, 4);
        let cfg = GbdtConfig { n_estimators: 6, ..GbdtConfig::default() };
        let model = train(&ds, &cfg).unwrap();
        for tree in &model.trees {
            assert!(tree.n_leaves() <= cfg.num_leaves);
            if tree.n_leaves() > 1 {
                for l in 0..tree.n_leaves() {
                    assert!(tree.count_of_leaf(l) >= cfg.min_samples_leaf);
                }
            }
        }
    }

    #[test]
    fn training_is_bitwise_deterministic_across_runs_and_thread_counts() {
        let ds = ctg_like_dataset(320, 8);
        let cfg = quick_cfg(6);
        let reference = train(&ds, &cfg).unwrap();
        let reference_proba = reference.predict_proba_batch(&ds).unwrap();

        let again = train(&ds, &cfg).unwrap();
        assert_eq!(again.trees, reference.trees);
        assert_eq!(again.init_scores, reference.init_scores);

        for threads in [1usize, 2, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let (model, proba) = pool.install(|| {
                let m = train(&ds, &cfg).unwrap();
                let p = m.predict_proba_batch(&ds).unwrap();
                (m, p)
            });
            assert_eq!(model.trees, reference.trees, "{threads} threads");
            assert_eq!(proba, reference_proba, "{threads} threads");
        }
    }

    #[test]
    fn prediction_rejects_wrong_widths() {
        let ds = blobs(&[10, 10, 10], 4, 3.0, 5);
        let model = train(&ds, &quick_cfg(2)).unwrap();
        let err = model.predict_proba(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, GbdtError::FeatureMismatch { got: 2, want: 4 }));
        let wide = blobs(&[5, 5, 5], 6, 3.0, 5);
        assert!(model.predict_proba_batch(&wide).is_err());
    }
}
