//! Gradient-boosted classification of cardiotocography (CTG) recordings.
//!
//! This crate implements the full modelling pipeline for the three-class
//! fetal-health problem (Normal / Suspect / Pathological) on the standard
//! 21-predictor CTG table:
//!
//! * [`dataset`] — schema-validated CSV loading, label encoding, and
//!   seeded stratified splitting.
//! * [`resample`] — SMOTE minority oversampling with a pinned random
//!   draw order, so resampled tables are bit-reproducible.
//! * [`gbdt`] — a histogram-based, leaf-wise, second-order gradient
//!   boosting machine with multiclass softmax loss (the primary model).
//! * [`baselines`] — majority-class, CART, and k-NN reference models.
//! * [`metrics`] — confusion-matrix metrics, Cohen's kappa, the Gorodkin
//!   multiclass correlation coefficient, and one-vs-rest ROC/AUC.
//! * [`harness`] — stratified k-fold cross-validation, model comparison
//!   leaderboards, class-prediction-error tables, and validation curves.
//! * [`model_io`] — versioned JSON persistence for trained boosters.
//! * [`report`] — flat JSON / CSV serialization of evaluation reports.
//! * [`synthetic`] — a deterministic generator of CTG-like tables used by
//!   the test suites and benchmarks.
//!
//! Every randomized step takes an explicit seed and every parallel step
//! reduces in a fixed order, so all outputs — splits, resamples, trained
//! models, metric reports — are byte-stable across runs and thread counts.
//!
//! ```
//! use ctg_boost::dataset::{stratified_split, SplitConfig};
//! use ctg_boost::gbdt::{train, GbdtConfig};
//!
//! let ds = ctg_boost::synthetic::ctg_like_dataset(300, 42);
//! let split = stratified_split(&ds, &SplitConfig { test_fraction: 0.2, seed: 123 }).unwrap();
//! let model = train(&split.train, &GbdtConfig { n_estimators: 5, ..GbdtConfig::default() }).unwrap();
//! let proba = model.predict_proba(split.test.row(0)).unwrap();
//! assert!((proba.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod dataset;
pub mod gbdt;
pub mod harness;
pub mod metrics;
pub mod model_io;
pub mod report;
pub mod resample;
pub mod synthetic;
