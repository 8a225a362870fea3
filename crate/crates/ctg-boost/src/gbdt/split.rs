//! Second-order best-split search over feature histograms.

use rayon::prelude::*;

use super::histogram::FeatureHist;
use super::GbdtConfig;

/// Gradient/Hessian/count sums of one node (or one side of a split).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeStats {
    pub g: f64,
    pub h: f64,
    pub n: u32,
}

/// A feasible split: left side is `bins <= bin` of `feature`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub bin: u8,
    pub gain: f64,
    pub left: NodeStats,
    pub right: NodeStats,
}

/// Newton leaf weight `-G / (H + lambda + 1e-16)`, unscaled by the
/// learning rate (scaling happens where tree outputs are accumulated).
pub fn leaf_value(stats: &NodeStats, cfg: &GbdtConfig) -> f64 {
    -stats.g / (stats.h + cfg.reg_lambda + 1e-16)
}

/// Variance-gain score of a node: `G^2 / (H + lambda)`.
fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

/// Scans one feature's histogram left to right. Returns the best feasible
/// candidate, preferring the lowest bin on exact gain ties.
fn scan_feature(
    feature: usize,
    hist: &FeatureHist,
    parent: &NodeStats,
    cfg: &GbdtConfig,
) -> Option<SplitCandidate> {
    let lambda = cfg.reg_lambda;
    let parent_score = score(parent.g, parent.h, lambda);
    let mut best: Option<SplitCandidate> = None;
    let mut lg = 0.0;
    let mut lh = 0.0;
    let mut ln: u32 = 0;
    for b in 0..hist.n_bins().saturating_sub(1) {
        lg += hist.g[b];
        lh += hist.h[b];
        ln += hist.n[b];
        if ln == 0 {
            continue;
        }
        let rn = parent.n - ln;
        if rn == 0 {
            break; // everything is on the left from here on
        }
        if ln < cfg.min_samples_leaf {
            continue;
        }
        if rn < cfg.min_samples_leaf {
            break; // the right side only shrinks as b grows
        }
        let rg = parent.g - lg;
        let rh = parent.h - lh;
        if lh < cfg.min_child_weight {
            continue;
        }
        if rh < cfg.min_child_weight {
            break; // the right Hessian mass only shrinks as b grows
        }
        let gain = score(lg, lh, lambda) + score(rg, rh, lambda) - parent_score;
        if gain <= cfg.min_split_gain {
            continue;
        }
        if best.as_ref().map_or(true, |c| gain > c.gain) {
            best = Some(SplitCandidate {
                feature,
                bin: b as u8,
                gain,
                left: NodeStats { g: lg, h: lh, n: ln },
                right: NodeStats { g: rg, h: rh, n: rn },
            });
        }
    }
    best
}

/// Best split across all features. Per-feature scans run in parallel;
/// the winner is reduced in ascending feature order, so exact gain ties
/// resolve to the lower feature index (then the lower bin, from the
/// per-feature scan) regardless of thread count.
pub fn best_split(
    hists: &[FeatureHist],
    parent: &NodeStats,
    cfg: &GbdtConfig,
) -> Option<SplitCandidate> {
    let per_feature: Vec<Option<SplitCandidate>> = hists
        .par_iter()
        .enumerate()
        .map(|(feature, hist)| scan_feature(feature, hist, parent, cfg))
        .collect();
    let mut best: Option<SplitCandidate> = None;
    for candidate in per_feature.into_iter().flatten() {
        if best.as_ref().map_or(true, |c| candidate.gain > c.gain) {
            best = Some(candidate);
        }
    }
    best
}
