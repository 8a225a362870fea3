//! Model persistence: a versioned JSON document that round-trips a
//! trained booster exactly.
//!
//! Floats are written in shortest-round-trip form, so every threshold,
//! leaf weight, and prior survives save/load bit for bit. Loading fails
//! closed: the format tag is checked first, then the document shape,
//! then the structural invariants of every embedded tree and threshold
//! table — a file that fails any check yields an error, never a model.
//!
//! One representational limit: JSON has no encoding for infinities, so a
//! model whose training data lacked a class entirely (log prior `-inf`)
//! is rejected at save time rather than written lossily.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gbdt::binning::BinMapper;
use crate::gbdt::tree::Tree;
use crate::gbdt::{BoostedModel, GbdtConfig};

/// The format tag this module writes and accepts.
pub const MODEL_FORMAT: &str = "ctg-boost-model/1";

/// Errors from saving or loading a model.
#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// The file is valid JSON but declares a different format.
    #[error("unsupported model format `{found}` (this build reads {MODEL_FORMAT})")]
    VersionMismatch { found: String },
    /// The file cannot be a model of the declared format.
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    /// The model holds values JSON cannot represent.
    #[error("model cannot be serialized: {0}")]
    Unrepresentable(String),
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    root: i32,
    split_feature: Vec<u32>,
    split_bin: Vec<u8>,
    left: Vec<i32>,
    right: Vec<i32>,
    leaf_value: Vec<f64>,
    leaf_count: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    config: GbdtConfig,
    n_classes: usize,
    n_features: usize,
    init_scores: Vec<f64>,
    thresholds: Vec<Vec<f64>>,
    trees: Vec<TreeFile>,
}

/// Serializes a model to the versioned JSON document.
pub fn to_json(model: &BoostedModel) -> Result<String, ModelIoError> {
    if let Some(k) = model.init_scores().iter().position(|s| !s.is_finite()) {
        return Err(ModelIoError::Unrepresentable(format!(
            "class {k} has a non-finite log prior (no training rows of that class); \
             JSON cannot store it"
        )));
    }
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        config: model.config().clone(),
        n_classes: model.n_classes(),
        n_features: model.n_features(),
        init_scores: model.init_scores().to_vec(),
        thresholds: (0..model.n_features())
            .map(|f| model.mapper().thresholds(f).to_vec())
            .collect(),
        trees: model
            .trees
            .iter()
            .map(|t| {
                let (root, feature, bin, left, right, value, count) = t.parts();
                TreeFile {
                    root,
                    split_feature: feature.to_vec(),
                    split_bin: bin.to_vec(),
                    left: left.to_vec(),
                    right: right.to_vec(),
                    leaf_value: value.to_vec(),
                    leaf_count: count.to_vec(),
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file)
        .map_err(|e| ModelIoError::Unrepresentable(e.to_string()))
}

/// Parses and validates a model from its JSON document.
pub fn from_json(text: &str) -> Result<BoostedModel, ModelIoError> {
    // Stage 1: the text must be JSON with the right format tag. The tag
    // is checked before anything else so a newer file reports a version
    // problem, not a shape problem.
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ModelIoError::Corrupt(format!("not valid JSON: {e}")))?;
    let found = value
        .get("format")
        .and_then(|f| f.as_str())
        .ok_or_else(|| ModelIoError::Corrupt("missing `format` tag".into()))?;
    if found != MODEL_FORMAT {
        return Err(ModelIoError::VersionMismatch { found: found.to_string() });
    }

    // Stage 2: the document must have the declared shape.
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| ModelIoError::Corrupt(e.to_string()))?;

    // Stage 3: the contents must satisfy every structural invariant.
    let corrupt = |msg: String| ModelIoError::Corrupt(msg);
    file.config
        .validate()
        .map_err(|e| corrupt(format!("stored configuration is invalid: {e}")))?;
    if file.n_classes == 0 {
        return Err(corrupt("n_classes must be positive".into()));
    }
    if file.init_scores.len() != file.n_classes {
        return Err(corrupt(format!(
            "{} init scores for {} classes",
            file.init_scores.len(),
            file.n_classes
        )));
    }
    if file.init_scores.iter().any(|s| !s.is_finite()) {
        return Err(corrupt("non-finite init score".into()));
    }
    if file.thresholds.len() != file.n_features {
        return Err(corrupt(format!(
            "{} threshold tables for {} features",
            file.thresholds.len(),
            file.n_features
        )));
    }
    let mapper = BinMapper::from_thresholds(file.thresholds)
        .map_err(|e| corrupt(format!("bin thresholds: {e}")))?;
    if file.trees.len() != file.config.n_estimators * file.n_classes {
        return Err(corrupt(format!(
            "{} trees, but the configuration promises {} iterations x {} classes",
            file.trees.len(),
            file.config.n_estimators,
            file.n_classes
        )));
    }
    let trees = file
        .trees
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let tree = Tree::from_parts(
                t.root,
                t.split_feature,
                t.split_bin,
                t.left,
                t.right,
                t.leaf_value,
                t.leaf_count,
                file.n_features,
            )
            .map_err(|e| corrupt(format!("tree {i}: {e}")))?;
            // Every cut must name a bin the threshold table can realize:
            // a feature with b bins supports cuts at bins 0..=b-2.
            let (_, features, bins, ..) = tree.parts();
            for (f, b) in features.iter().zip(bins) {
                if (*b as usize) + 2 > mapper.n_bins(*f as usize) {
                    return Err(corrupt(format!(
                        "tree {i}: cut at bin {b} of feature {f}, which has only {} bins",
                        mapper.n_bins(*f as usize)
                    )));
                }
            }
            Ok(tree)
        })
        .collect::<Result<Vec<Tree>, ModelIoError>>()?;

    Ok(BoostedModel {
        config: file.config,
        n_classes: file.n_classes,
        n_features: file.n_features,
        init_scores: file.init_scores,
        mapper,
        trees,
    })
}

/// Writes a model to a file.
pub fn save_model(model: &BoostedModel, path: &Path) -> Result<(), ModelIoError> {
    let mut text = to_json(model)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads and validates a model from a file.
pub fn load_model(path: &Path) -> Result<BoostedModel, ModelIoError> {
    from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::gbdt::{train, GbdtConfig};
    use crate::synthetic::ctg_like_dataset;

    fn small_model() -> (crate::dataset::Dataset, BoostedModel) {
        let ds = ctg_like_dataset(240, 77);
        let cfg = GbdtConfig { n_estimators: 4, min_samples_leaf: 5, ..GbdtConfig::default() };
        let model = train(&ds, &cfg).unwrap();
        (ds, model)
    }

    #[test]
    fn round_trip_preserves_the_model_exactly() {
        let (ds, model) = small_model();
        let json = to_json(&model).unwrap();
        let loaded = from_json(&json).unwrap();

        assert_eq!(loaded.config(), model.config());
        assert_eq!(loaded.init_scores(), model.init_scores());
        assert_eq!(loaded.n_classes(), model.n_classes());
        for f in 0..model.n_features() {
            assert_eq!(loaded.mapper().thresholds(f), model.mapper().thresholds(f));
        }
        // Predictions are bitwise identical.
        assert_eq!(
            loaded.predict_proba_batch(&ds).unwrap(),
            model.predict_proba_batch(&ds).unwrap()
        );
        // And a second serialization is byte-identical.
        assert_eq!(to_json(&loaded).unwrap(), json);
    }

    #[test]
    fn file_round_trip_works() {
        let (ds, model) = small_model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(
            loaded.predict_proba_batch(&ds).unwrap(),
            model.predict_proba_batch(&ds).unwrap()
        );
    }

    #[test]
    fn version_mismatch_is_reported_before_shape_problems() {
        // The body is garbage, but the verdict must still be the version.
        let text = r#"{"format": "ctg-boost-model/2", "trees": 17}"#;
        match from_json(text) {
            Err(ModelIoError::VersionMismatch { found }) => {
                assert_eq!(found, "ctg-boost-model/2");
            }
            other => panic!("expected version mismatch, got {other:?}"),
        }
    }

    #[test]
    fn corrupt_documents_fail_closed() {
        let (_, model) = small_model();
        let good = to_json(&model).unwrap();

        let is_corrupt = |text: &str, why: &str| match from_json(text) {
            Err(ModelIoError::Corrupt(_)) => {}
            other => panic!("{why}: expected Corrupt, got {other:?}"),
        };

        is_corrupt("not json at all", "non-JSON");
        is_corrupt("{\"trees\": []}", "missing format tag");
        is_corrupt(
            &good.replace("\"n_classes\": 3", "\"n_classes\": 4"),
            "init scores disagree with n_classes",
        );
        is_corrupt(
            &good.replace("\"n_estimators\": 4", "\"n_estimators\": 5"),
            "tree count disagrees with the configuration",
        );
        is_corrupt(
            &good.replace("\"learning_rate\": 0.1", "\"learning_rate\": -1.0"),
            "stored configuration fails validation",
        );

        // A structurally broken threshold table (not strictly increasing).
        let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
        doc["thresholds"][0] = serde_json::json!([2.0, 1.0]);
        is_corrupt(&doc.to_string(), "non-increasing thresholds");

        // A tree referencing a feature that does not exist.
        let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
        doc["trees"][0]["split_feature"][0] = serde_json::json!(21);
        is_corrupt(&doc.to_string(), "feature out of range");

        // A cut at a bin its feature's threshold table cannot realize.
        let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
        doc["trees"][0]["split_bin"][0] = serde_json::json!(254);
        is_corrupt(&doc.to_string(), "bin out of range");

        // A dangling child reference.
        let mut doc: serde_json::Value = serde_json::from_str(&good).unwrap();
        doc["trees"][0]["left"][0] = serde_json::json!(-100);
        is_corrupt(&doc.to_string(), "dangling leaf reference");
    }

    #[test]
    fn absent_class_priors_are_rejected_at_save_time() {
        // Only two of three classes present: the third prior is ln(0).
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5], vec![1.5, 0.2]];
        let ds = Dataset::from_rows(rows, vec![0, 0, 1, 1], 3).unwrap();
        let cfg = GbdtConfig { n_estimators: 1, min_samples_leaf: 1, ..GbdtConfig::default() };
        let model = train(&ds, &cfg).unwrap();
        match to_json(&model) {
            Err(ModelIoError::Unrepresentable(msg)) => {
                assert!(msg.contains("class 2"), "{msg}");
            }
            other => panic!("expected Unrepresentable, got {other:?}"),
        }
    }

    #[test]
    fn missing_files_surface_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        match load_model(&dir.path().join("nope.json")) {
            Err(ModelIoError::Io(_)) => {}
            other => panic!("expected Io, got {other:?}"),
        }
    }
}
