//! Loading, validating, and splitting the CTG fetal-health table.
//!
//! The canonical table has 21 numeric predictors plus a `fetal_health`
//! target column coded 1.0 / 2.0 / 3.0 (Normal / Suspect / Pathological).
//! Headers are matched case-insensitively with spaces folded to
//! underscores, in any column order, and the widely distributed
//! `prolongued_decelerations` misspelling is accepted alongside the
//! corrected form. Labels are stored zero-based internally.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Human-readable names of the three outcome classes, indexed by label.
pub const CLASS_NAMES: [&str; 3] = ["Normal", "Suspect", "Pathological"];

/// The 21 canonical predictor column names, in schema order.
const PREDICTORS: [&str; 21] = [
    "baseline_value",
    "accelerations",
    "fetal_movement",
    "uterine_contractions",
    "light_decelerations",
    "severe_decelerations",
    "prolongued_decelerations",
    "abnormal_short_term_variability",
    "mean_value_of_short_term_variability",
    "percentage_of_time_with_abnormal_long_term_variability",
    "mean_value_of_long_term_variability",
    "histogram_width",
    "histogram_min",
    "histogram_max",
    "histogram_number_of_peaks",
    "histogram_number_of_zeroes",
    "histogram_mode",
    "histogram_mean",
    "histogram_median",
    "histogram_variance",
    "histogram_tendency",
];

/// Errors raised while loading or splitting a dataset.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: cell in column '{column}' is not a number")]
    UnparsableCell { row: usize, column: String },
    #[error("row {row}: label {value} is not one of 1, 2, 3")]
    InvalidLabel { row: usize, value: f64 },
    #[error("row {row}: column '{column}' holds a non-finite value")]
    NonFiniteValue { row: usize, column: String },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("test_fraction {0} is outside [0, 1]")]
    InvalidTestFraction(f64),
    #[error("malformed dataset: {0}")]
    Malformed(String),
}

/// Column schema: ordered predictor names plus the target column name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    predictors: Vec<String>,
    target: String,
}

impl FeatureSchema {
    /// The canonical 21-predictor CTG schema with target `fetal_health`.
    pub fn canonical() -> Self {
        FeatureSchema {
            predictors: PREDICTORS.iter().map(|s| s.to_string()).collect(),
            target: "fetal_health".to_string(),
        }
    }

    /// Builds a custom schema; names must be non-empty and distinct.
    pub fn new(predictors: Vec<String>, target: String) -> Result<Self, DatasetError> {
        let mut seen = std::collections::HashSet::new();
        for name in predictors.iter().chain(std::iter::once(&target)) {
            if name.is_empty() {
                return Err(DatasetError::Malformed("empty column name".into()));
            }
            if !seen.insert(name.clone()) {
                return Err(DatasetError::Malformed(format!("duplicate column name '{name}'")));
            }
        }
        Ok(FeatureSchema { predictors, target })
    }

    /// Predictor names in schema order.
    pub fn predictors(&self) -> &[String] {
        &self.predictors
    }

    /// Target column name.
    pub fn target(&self) -> &str {
        &self.target
    }
}

/// Folds a header cell to the canonical form: trimmed, lower-cased,
/// spaces replaced by underscores.
fn normalize_header(raw: &str) -> String {
    raw.trim().to_lowercase().replace(' ', "_")
}

/// Known alternate spellings, mapped to the canonical column name.
fn resolve_alias(normalized: &str) -> &str {
    match normalized {
        "prolonged_decelerations" => "prolongued_decelerations",
        other => other,
    }
}

/// An in-memory classification table: row-major features, zero-based
/// labels, and stable per-row provenance ids.
///
/// Invariants (enforced at construction): every feature value is finite,
/// every label is `< n_classes`, and `row_ids` are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    n_classes: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
    row_ids: Vec<u32>,
}

impl Dataset {
    /// Builds a dataset from row-major parts, validating all invariants.
    pub fn new(
        n_features: usize,
        n_classes: usize,
        features: Vec<f64>,
        labels: Vec<u8>,
        row_ids: Vec<u32>,
    ) -> Result<Self, DatasetError> {
        if n_classes == 0 || n_classes > u8::MAX as usize {
            return Err(DatasetError::Malformed(format!("n_classes {n_classes} out of range")));
        }
        if labels.len() != row_ids.len() {
            return Err(DatasetError::Malformed("labels/row_ids length mismatch".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(DatasetError::Malformed("feature matrix shape mismatch".into()));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(DatasetError::Malformed(format!("non-finite feature value {v}")));
        }
        if let Some(l) = labels.iter().find(|&&l| l as usize >= n_classes) {
            return Err(DatasetError::Malformed(format!("label {l} >= n_classes {n_classes}")));
        }
        let mut seen = std::collections::HashSet::new();
        if !row_ids.iter().all(|id| seen.insert(*id)) {
            return Err(DatasetError::Malformed("duplicate row_id".into()));
        }
        Ok(Dataset { n_features, n_classes, features, labels, row_ids })
    }

    /// Convenience constructor from per-row feature vectors; row ids are
    /// assigned sequentially from zero.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        n_classes: usize,
    ) -> Result<Self, DatasetError> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(DatasetError::Malformed("ragged feature rows".into()));
        }
        let features = rows.into_iter().flatten().collect();
        let row_ids = (0..labels.len() as u32).collect();
        Dataset::new(n_features, n_classes, features, labels, row_ids)
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    /// Number of feature columns.
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Number of outcome classes the labels are drawn from.
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Feature vector of row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    /// Zero-based class labels, one per row.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Stable provenance ids, one per row.
    pub fn row_ids(&self) -> &[u32] {
        &self.row_ids
    }

    /// Copies feature column `j` into a vector (rows in table order).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.features[i * self.n_features + j]).collect()
    }

    /// New dataset holding the given rows (in the given order), keeping
    /// their original `row_ids`.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        let mut row_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            row_ids.push(self.row_ids[i]);
        }
        Dataset { n_features: self.n_features, n_classes: self.n_classes, features, labels, row_ids }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Dataset({} rows x {} features, {} classes)",
            self.n_rows(),
            self.n_features,
            self.n_classes
        )
    }
}

/// Rows per class, indexed by zero-based label. An empty dataset yields
/// all zeros.
pub fn class_counts(ds: &Dataset) -> Vec<usize> {
    let mut counts = vec![0usize; ds.n_classes()];
    for &l in ds.labels() {
        counts[l as usize] += 1;
    }
    counts
}

/// Loads a CSV file against `schema`. Column order is free, header names
/// are normalized before matching, and every cell must parse to a finite
/// number; the target must be exactly 1, 2, or 3.
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;

    // Map each schema column to its position in the file header. The first
    // occurrence wins if a name appears twice.
    let header = reader.headers()?.clone();
    let mut positions: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for (idx, raw) in header.iter().enumerate() {
        let name = resolve_alias(&normalize_header(raw)).to_string();
        positions.entry(name).or_insert(idx);
    }
    let locate = |name: &str| -> Result<usize, DatasetError> {
        positions
            .get(resolve_alias(&normalize_header(name)))
            .copied()
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };
    let predictor_cols: Vec<usize> =
        schema.predictors().iter().map(|n| locate(n)).collect::<Result<_, _>>()?;
    let target_col = locate(schema.target())?;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let row = row_idx + 1; // 1-based data row for diagnostics
        let parse = |col: usize, column: &str| -> Result<f64, DatasetError> {
            let cell = record.get(col).unwrap_or("");
            let value: f64 = cell
                .parse()
                .map_err(|_| DatasetError::UnparsableCell { row, column: column.to_string() })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFiniteValue { row, column: column.to_string() });
            }
            Ok(value)
        };
        for (j, &col) in predictor_cols.iter().enumerate() {
            features.push(parse(col, &schema.predictors()[j])?);
        }
        let raw_label = {
            let cell = record.get(target_col).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| DatasetError::UnparsableCell {
                row,
                column: schema.target().to_string(),
            })?;
            value
        };
        let label = match raw_label {
            v if v == 1.0 => 0u8,
            v if v == 2.0 => 1u8,
            v if v == 3.0 => 2u8,
            v => return Err(DatasetError::InvalidLabel { row, value: v }),
        };
        labels.push(label);
    }

    let row_ids = (0..labels.len() as u32).collect();
    Dataset::new(schema.predictors().len(), 3, features, labels, row_ids)
}

/// Writes `ds` as CSV under `schema` headers. Feature values use the
/// shortest decimal form that parses back to the identical float, and
/// labels are written one-based, so `load_csv` reproduces `ds` exactly.
pub fn write_csv(ds: &Dataset, schema: &FeatureSchema, path: &Path) -> Result<(), DatasetError> {
    if ds.n_features() != schema.predictors().len() {
        return Err(DatasetError::Malformed("dataset width does not match schema".into()));
    }
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = schema.predictors().iter().map(String::as_str).collect();
    header.push(schema.target());
    writer.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut record: Vec<String> = ds.row(i).iter().map(|v| format!("{v}")).collect();
        record.push(format!("{}", ds.labels()[i] as u32 + 1));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parameters for [`stratified_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Fraction of each class assigned to the test side, in `[0, 1]`.
    pub test_fraction: f64,
    /// Seed for the per-class shuffles.
    pub seed: u64,
}

/// A train/test partition, remembering how it was made.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Splits `ds` into train and test with per-class proportions preserved.
///
/// Within each class (ascending label order) the rows are shuffled by a
/// PRNG seeded from `cfg.seed` and the first `round(test_fraction * n_c)`
/// go to test. Both halves keep the original table order and row ids, so
/// the same configuration always yields the identical partition.
pub fn stratified_split(ds: &Dataset, cfg: &SplitConfig) -> Result<SplitPair, DatasetError> {
    if ds.n_rows() == 0 {
        return Err(DatasetError::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&cfg.test_fraction) || cfg.test_fraction.is_nan() {
        return Err(DatasetError::InvalidTestFraction(cfg.test_fraction));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut is_test = vec![false; ds.n_rows()];
    for class in 0..ds.n_classes() as u8 {
        let mut members: Vec<usize> =
            (0..ds.n_rows()).filter(|&i| ds.labels()[i] == class).collect();
        members.shuffle(&mut rng);
        let n_test = (cfg.test_fraction * members.len() as f64).round() as usize;
        for &i in members.iter().take(n_test) {
            is_test[i] = true;
        }
    }

    let test_idx: Vec<usize> = (0..ds.n_rows()).filter(|&i| is_test[i]).collect();
    let train_idx: Vec<usize> = (0..ds.n_rows()).filter(|&i| !is_test[i]).collect();
    Ok(SplitPair {
        train: ds.subset(&train_idx),
        test: ds.subset(&test_idx),
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
    })
}
