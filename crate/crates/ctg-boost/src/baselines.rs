//! Reference classifiers the booster is compared against: a
//! majority-class dummy, a Gini-impurity CART tree, and standardized
//! k-nearest-neighbours. All three are deterministic.

use thiserror::Error;

use crate::dataset::{class_counts, Dataset};
use crate::gbdt::{train, BoostedModel, GbdtConfig, GbdtError};

/// Errors from fitting or querying a baseline classifier.
#[derive(Debug, Error)]
pub enum BaselineError {
    /// A hyperparameter is out of its supported range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Fitting was asked to run on zero rows.
    #[error("fitting requires at least one row")]
    EmptyDataset,
    /// A prediction input's width disagrees with the fitted model.
    #[error("input has {got} features but the model expects {want}")]
    FeatureMismatch { got: usize, want: usize },
    /// The booster reported a problem.
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
}

/// CART hyperparameters. Defaults grow the tree until leaves are pure or
/// indivisible.
#[derive(Debug, Clone, PartialEq)]
pub struct CartConfig {
    /// Optional depth cap; `None` leaves depth unconstrained.
    pub max_depth: Option<usize>,
    /// Nodes with fewer rows become leaves.
    pub min_samples_split: usize,
    /// Minimum rows on each side of a split.
    pub min_samples_leaf: usize,
}

impl Default for CartConfig {
    fn default() -> Self {
        CartConfig { max_depth: None, min_samples_split: 2, min_samples_leaf: 1 }
    }
}

/// K-nearest-neighbours hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnConfig {
    /// Neighbours consulted per query.
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 5 }
    }
}

/// Which classifier to fit, with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// The gradient-boosted ensemble.
    Gbdt(GbdtConfig),
    /// Majority-class predictor with prior probabilities.
    Dummy,
    /// Single Gini-impurity decision tree.
    Cart(CartConfig),
    /// Standardized k-nearest-neighbours.
    Knn(KnnConfig),
}

impl ModelSpec {
    /// Stable identifier used in reports and leaderboards.
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Gbdt(_) => "gbdt",
            ModelSpec::Dummy => "dummy",
            ModelSpec::Cart(_) => "cart",
            ModelSpec::Knn(_) => "knn",
        }
    }
}

/// Predicts the majority training class everywhere; probabilities are the
/// training class priors.
#[derive(Debug, Clone)]
pub struct DummyModel {
    n_features: usize,
    majority: u8,
    priors: Vec<f64>,
}

impl DummyModel {
    /// Fits the majority class (exact ties resolve to the lowest class).
    pub fn fit(ds: &Dataset) -> Result<Self, BaselineError> {
        if ds.n_rows() == 0 {
            return Err(BaselineError::EmptyDataset);
        }
        let counts = class_counts(ds);
        let mut majority = 0usize;
        for (k, &c) in counts.iter().enumerate() {
            if c > counts[majority] {
                majority = k;
            }
        }
        let priors = counts.iter().map(|&c| c as f64 / ds.n_rows() as f64).collect();
        Ok(DummyModel { n_features: ds.n_features(), majority: majority as u8, priors })
    }
}

/// One node of a CART tree: either a `feature <= threshold` split or a
/// leaf holding the class distribution of its training rows.
#[derive(Debug, Clone)]
enum CartNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { proba: Vec<f64> },
}

/// A fitted CART decision tree.
#[derive(Debug, Clone)]
pub struct CartModel {
    n_features: usize,
    n_classes: usize,
    nodes: Vec<CartNode>,
}

/// Gini impurity `1 - sum((c_k / n)^2)` of a class tally.
fn gini(counts: &[usize], total: usize) -> f64 {
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

/// Best CART cut of one node: lowest size-weighted child impurity, ties
/// to the lower feature then the lower threshold. Returns the cut and the
/// induced partition (original sample order preserved).
fn best_cart_cut(
    ds: &Dataset,
    samples: &[u32],
    min_samples_leaf: usize,
) -> Option<(usize, f64, Vec<u32>, Vec<u32>)> {
    let n = samples.len();
    let labels = ds.labels();
    let mut best: Option<(f64, usize, f64)> = None; // (weighted gini, feature, threshold)
    for feature in 0..ds.n_features() {
        let mut order: Vec<u32> = samples.to_vec();
        order.sort_by(|&a, &b| {
            ds.row(a as usize)[feature]
                .total_cmp(&ds.row(b as usize)[feature])
                .then(a.cmp(&b))
        });
        let mut left_counts = vec![0usize; ds.n_classes()];
        let mut right_counts = vec![0usize; ds.n_classes()];
        for &s in &order {
            right_counts[labels[s as usize] as usize] += 1;
        }
        for i in 0..n - 1 {
            let s = order[i] as usize;
            left_counts[labels[s] as usize] += 1;
            right_counts[labels[s] as usize] -= 1;
            let v = ds.row(s)[feature];
            let w = ds.row(order[i + 1] as usize)[feature];
            if v == w {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < min_samples_leaf || n_right < min_samples_leaf {
                continue;
            }
            // Midpoint cut; nudged down if rounding lands it on the upper
            // value, so `x <= threshold` selects exactly the first i+1 rows.
            let mut threshold = (v + w) / 2.0;
            if threshold == w {
                threshold = v;
            }
            let weighted = (n_left as f64 * gini(&left_counts, n_left)
                + n_right as f64 * gini(&right_counts, n_right))
                / n as f64;
            if best.as_ref().map_or(true, |&(bw, _, _)| weighted < bw) {
                best = Some((weighted, feature, threshold));
            }
        }
    }
    let (_, feature, threshold) = best?;
    let (left, right) =
        samples.iter().partition(|&&s| ds.row(s as usize)[feature] <= threshold);
    Some((feature, threshold, left, right))
}

impl CartModel {
    /// Fits a tree by recursive binary Gini splitting (explicit stack).
    pub fn fit(ds: &Dataset, cfg: &CartConfig) -> Result<Self, BaselineError> {
        if ds.n_rows() == 0 {
            return Err(BaselineError::EmptyDataset);
        }
        if cfg.min_samples_split < 2 {
            return Err(BaselineError::InvalidConfig("min_samples_split must be at least 2".into()));
        }
        if cfg.min_samples_leaf == 0 {
            return Err(BaselineError::InvalidConfig("min_samples_leaf must be at least 1".into()));
        }
        if cfg.max_depth == Some(0) {
            return Err(BaselineError::InvalidConfig("max_depth must be at least 1 when set".into()));
        }
        let labels = ds.labels();
        let mut nodes = vec![CartNode::Leaf { proba: Vec::new() }];
        let mut stack = vec![(0usize, (0..ds.n_rows() as u32).collect::<Vec<u32>>(), 0usize)];
        while let Some((slot, samples, depth)) = stack.pop() {
            let mut counts = vec![0usize; ds.n_classes()];
            for &s in &samples {
                counts[labels[s as usize] as usize] += 1;
            }
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let splittable = !pure
                && samples.len() >= cfg.min_samples_split
                && cfg.max_depth.map_or(true, |d| depth < d);
            let cut = if splittable {
                best_cart_cut(ds, &samples, cfg.min_samples_leaf)
            } else {
                None
            };
            match cut {
                Some((feature, threshold, left, right)) => {
                    let left_slot = nodes.len();
                    nodes.push(CartNode::Leaf { proba: Vec::new() });
                    let right_slot = nodes.len();
                    nodes.push(CartNode::Leaf { proba: Vec::new() });
                    nodes[slot] =
                        CartNode::Split { feature, threshold, left: left_slot, right: right_slot };
                    stack.push((right_slot, right, depth + 1));
                    stack.push((left_slot, left, depth + 1));
                }
                None => {
                    let total = samples.len() as f64;
                    let proba = counts.iter().map(|&c| c as f64 / total).collect();
                    nodes[slot] = CartNode::Leaf { proba };
                }
            }
        }
        Ok(CartModel { n_features: ds.n_features(), n_classes: ds.n_classes(), nodes })
    }

    /// Total nodes (splits plus leaves).
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn leaf_proba(&self, row: &[f64]) -> &[f64] {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                CartNode::Split { feature, threshold, left, right } => {
                    node = if row[*feature] <= *threshold { *left } else { *right };
                }
                CartNode::Leaf { proba } => return proba,
            }
        }
    }
}

/// A fitted k-nearest-neighbours classifier: training rows standardized
/// to zero mean and unit variance, Euclidean metric, majority vote.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    n_classes: usize,
    means: Vec<f64>,
    scales: Vec<f64>,
    /// Standardized training rows, row-major.
    train_z: Vec<f64>,
    labels: Vec<u8>,
}

impl KnnModel {
    /// Standardizes the training set and stores it verbatim.
    pub fn fit(ds: &Dataset, cfg: &KnnConfig) -> Result<Self, BaselineError> {
        if ds.n_rows() == 0 {
            return Err(BaselineError::EmptyDataset);
        }
        if cfg.k == 0 {
            return Err(BaselineError::InvalidConfig("k must be at least 1".into()));
        }
        if cfg.k > ds.n_rows() {
            return Err(BaselineError::InvalidConfig(format!(
                "k = {} exceeds the {} training rows",
                cfg.k,
                ds.n_rows()
            )));
        }
        let (n, d) = (ds.n_rows(), ds.n_features());
        let mut means = vec![0.0; d];
        for i in 0..n {
            for (j, m) in means.iter_mut().enumerate() {
                *m += ds.row(i)[j];
            }
        }
        for m in &mut means {
            *m /= n as f64;
        }
        // Population standard deviation; constant columns keep scale 1 so
        // they standardize to exactly zero rather than dividing by zero.
        let mut scales = vec![0.0; d];
        for i in 0..n {
            for (j, s) in scales.iter_mut().enumerate() {
                let delta = ds.row(i)[j] - means[j];
                *s += delta * delta;
            }
        }
        for s in &mut scales {
            *s = (*s / n as f64).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        let mut train_z = Vec::with_capacity(n * d);
        for i in 0..n {
            for j in 0..d {
                train_z.push((ds.row(i)[j] - means[j]) / scales[j]);
            }
        }
        Ok(KnnModel {
            k: cfg.k,
            n_classes: ds.n_classes(),
            means,
            scales,
            train_z,
            labels: ds.labels().to_vec(),
        })
    }

    /// Vote shares of the k nearest training rows. Distance ties resolve
    /// to the earlier training row.
    fn vote_proba(&self, row: &[f64]) -> Vec<f64> {
        let d = self.means.len();
        let z: Vec<f64> =
            (0..d).map(|j| (row[j] - self.means[j]) / self.scales[j]).collect();
        let mut cand: Vec<(f64, usize)> = self
            .train_z
            .chunks_exact(d)
            .enumerate()
            .map(|(i, t)| {
                let dist: f64 = t.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum();
                (dist, i)
            })
            .collect();
        let key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        cand.select_nth_unstable_by(self.k - 1, key);
        let mut votes = vec![0usize; self.n_classes];
        for (_, i) in &cand[..self.k] {
            votes[self.labels[*i] as usize] += 1;
        }
        votes.iter().map(|&v| v as f64 / self.k as f64).collect()
    }
}

/// A fitted classifier of any supported kind, with a uniform prediction
/// interface.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Gbdt(BoostedModel),
    Dummy(DummyModel),
    Cart(CartModel),
    Knn(KnnModel),
}

/// Index of the largest probability; exact ties resolve to the lowest.
fn argmax(proba: &[f64]) -> u8 {
    let mut best = 0usize;
    for k in 1..proba.len() {
        if proba[k] > proba[best] {
            best = k;
        }
    }
    best as u8
}

impl TrainedModel {
    /// Fits the classifier a spec describes.
    pub fn fit(spec: &ModelSpec, ds: &Dataset) -> Result<TrainedModel, BaselineError> {
        Ok(match spec {
            ModelSpec::Gbdt(cfg) => TrainedModel::Gbdt(train(ds, cfg)?),
            ModelSpec::Dummy => TrainedModel::Dummy(DummyModel::fit(ds)?),
            ModelSpec::Cart(cfg) => TrainedModel::Cart(CartModel::fit(ds, cfg)?),
            ModelSpec::Knn(cfg) => TrainedModel::Knn(KnnModel::fit(ds, cfg)?),
        })
    }

    fn n_features(&self) -> usize {
        match self {
            TrainedModel::Gbdt(m) => m.n_features(),
            TrainedModel::Dummy(m) => m.n_features,
            TrainedModel::Cart(m) => m.n_features,
            TrainedModel::Knn(m) => m.means.len(),
        }
    }

    /// Row-major flattened class probabilities for a dataset.
    pub fn predict_proba_batch(&self, ds: &Dataset) -> Result<Vec<f64>, BaselineError> {
        if ds.n_features() != self.n_features() {
            return Err(BaselineError::FeatureMismatch {
                got: ds.n_features(),
                want: self.n_features(),
            });
        }
        Ok(match self {
            TrainedModel::Gbdt(m) => m.predict_proba_batch(ds)?,
            TrainedModel::Dummy(m) => {
                (0..ds.n_rows()).flat_map(|_| m.priors.iter().copied()).collect()
            }
            TrainedModel::Cart(m) => (0..ds.n_rows())
                .flat_map(|i| m.leaf_proba(ds.row(i)).to_vec())
                .collect(),
            TrainedModel::Knn(m) => {
                (0..ds.n_rows()).flat_map(|i| m.vote_proba(ds.row(i))).collect()
            }
        })
    }

    /// Predicted class per row.
    pub fn predict_batch(&self, ds: &Dataset) -> Result<Vec<u8>, BaselineError> {
        if let TrainedModel::Dummy(m) = self {
            if ds.n_features() != m.n_features {
                return Err(BaselineError::FeatureMismatch {
                    got: ds.n_features(),
                    want: m.n_features,
                });
            }
            return Ok(vec![m.majority; ds.n_rows()]);
        }
        let proba = self.predict_proba_batch(ds)?;
        let k = match self {
            TrainedModel::Gbdt(m) => m.n_classes(),
            TrainedModel::Cart(m) => m.n_classes,
            TrainedModel::Knn(m) => m.n_classes,
            TrainedModel::Dummy(_) => unreachable!(),
        };
        Ok(proba.chunks_exact(k).map(argmax).collect())
    }
}
