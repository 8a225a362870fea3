//! Feature discretization into at most `max_bins` histogram bins.
//!
//! Per feature: when the training column has no more distinct values than
//! `max_bins`, every distinct value gets its own bin (thresholds at the
//! midpoints between consecutive distinct values). Otherwise thresholds
//! are placed at population quantiles of the sorted column, deduplicated,
//! so bins carry approximately equal numbers of training rows. Bins are
//! half-open with inclusive upper bounds: value `x` falls in the first
//! bin whose threshold is `>= x`.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Per-feature sorted upper-bound thresholds fit on a training table.
/// A feature with `t` thresholds has `t + 1` bins; a constant feature has
/// no thresholds and a single bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMapper {
    thresholds: Vec<Vec<f64>>,
}

/// Column-major binned view of a dataset: `cols[feature][row]`.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    pub cols: Vec<Vec<u8>>,
    pub n_rows: usize,
}

impl BinMapper {
    /// Number of features the mapper was fit on.
    pub fn n_features(&self) -> usize {
        self.thresholds.len()
    }

    /// Number of bins for `feature`.
    pub fn n_bins(&self, feature: usize) -> usize {
        self.thresholds[feature].len() + 1
    }

    /// Thresholds of `feature` (sorted, strictly increasing).
    pub fn thresholds(&self, feature: usize) -> &[f64] {
        &self.thresholds[feature]
    }

    /// Bin index of value `x` for `feature`: the count of thresholds
    /// strictly below `x`. Total over all finite inputs.
    pub fn bin_value(&self, feature: usize, x: f64) -> u8 {
        self.thresholds[feature].partition_point(|&t| t < x) as u8
    }

    /// Bins one raw feature row.
    pub fn bin_row(&self, row: &[f64]) -> Vec<u8> {
        row.iter().enumerate().map(|(j, &x)| self.bin_value(j, x)).collect()
    }

    /// Bins a whole dataset into column-major form.
    pub fn bin_dataset(&self, ds: &Dataset) -> BinnedMatrix {
        let cols = (0..ds.n_features())
            .map(|j| {
                let col = ds.column(j);
                col.iter().map(|&x| self.bin_value(j, x)).collect()
            })
            .collect();
        BinnedMatrix { cols, n_rows: ds.n_rows() }
    }

    /// Rebuilds a mapper from stored thresholds, enforcing the strict
    /// ordering and bin-count invariants. Used by model deserialization.
    pub fn from_thresholds(thresholds: Vec<Vec<f64>>) -> Result<Self, String> {
        for (j, ts) in thresholds.iter().enumerate() {
            if ts.len() > u8::MAX as usize {
                return Err(format!("feature {j}: {} thresholds exceed the bin budget", ts.len()));
            }
            if ts.iter().any(|t| !t.is_finite()) {
                return Err(format!("feature {j}: non-finite threshold"));
            }
            if ts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("feature {j}: thresholds not strictly increasing"));
            }
        }
        Ok(BinMapper { thresholds })
    }
}

/// Fits bin thresholds on the training table. `max_bins` must be in
/// `[2, 255]` so bin indices fit in a byte.
pub fn fit_bins(ds: &Dataset, max_bins: usize) -> BinMapper {
    assert!((2..=255).contains(&max_bins), "max_bins must be in [2, 255]");
    let thresholds = (0..ds.n_features())
        .map(|j| {
            let mut values = ds.column(j);
            values.sort_by(f64::total_cmp);
            fit_feature(&values, max_bins)
        })
        .collect();
    BinMapper { thresholds }
}

/// Thresholds for one sorted column.
fn fit_feature(sorted: &[f64], max_bins: usize) -> Vec<f64> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let mut distinct: Vec<f64> = sorted.to_vec();
    distinct.dedup();

    if distinct.len() <= max_bins {
        // One bin per distinct value; thresholds at midpoints.
        return distinct.windows(2).map(|w| midpoint(w[0], w[1])).collect();
    }

    // Quantile thresholds at ranks i*n/max_bins of the full (duplicated)
    // column, deduplicated, so bin populations stay approximately equal.
    let n = sorted.len();
    let mut thresholds = Vec::with_capacity(max_bins - 1);
    for i in 1..max_bins {
        let rank = i * n / max_bins;
        if rank == 0 || rank >= n {
            continue;
        }
        let t = midpoint(sorted[rank - 1], sorted[rank]);
        if thresholds.last().map_or(true, |&last| t > last) {
            thresholds.push(t);
        }
    }
    thresholds
}

/// Midpoint that never exceeds its bounds (and equals them when both
/// arguments coincide), keeping thresholds inside the observed range.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    m.clamp(a.min(b), a.max(b))
}
