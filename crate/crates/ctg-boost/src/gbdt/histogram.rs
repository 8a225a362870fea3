//! Per-feature gradient histograms and the sibling-subtraction trick.

use super::binning::BinnedMatrix;

/// Per-bin aggregates of one feature over one node's samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureHist {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub n: Vec<u32>,
}

impl FeatureHist {
    /// All-zero histogram with `n_bins` slots.
    pub fn zeros(n_bins: usize) -> Self {
        FeatureHist { g: vec![0.0; n_bins], h: vec![0.0; n_bins], n: vec![0; n_bins] }
    }

    /// Number of bins.
    pub fn n_bins(&self) -> usize {
        self.n.len()
    }
}

/// Accumulates one feature's histogram over `samples` (visited in slice
/// order, so the float sums are reproducible).
pub fn build_histogram(
    binned: &BinnedMatrix,
    feature: usize,
    samples: &[u32],
    g: &[f64],
    h: &[f64],
    n_bins: usize,
) -> FeatureHist {
    let mut hist = FeatureHist::zeros(n_bins);
    let col = &binned.cols[feature];
    for &s in samples {
        let b = col[s as usize] as usize;
        hist.g[b] += g[s as usize];
        hist.h[b] += h[s as usize];
        hist.n[b] += 1;
    }
    hist
}

/// Sibling histogram by subtraction: `parent - child`, bin by bin.
/// Counts are exact; the float aggregates are exactly the subtraction
/// results (the cheap way to get the second child of a split).
pub fn subtract(parent: &FeatureHist, child: &FeatureHist) -> FeatureHist {
    debug_assert_eq!(parent.n_bins(), child.n_bins());
    FeatureHist {
        g: parent.g.iter().zip(&child.g).map(|(p, c)| p - c).collect(),
        h: parent.h.iter().zip(&child.h).map(|(p, c)| p - c).collect(),
        n: parent.n.iter().zip(&child.n).map(|(p, c)| p - c).collect(),
    }
}
