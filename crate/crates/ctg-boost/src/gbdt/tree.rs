//! Leaf-wise tree growth over binned features.
//!
//! A pool of growable leaves is kept, each carrying its samples, its
//! gradient/Hessian sums, its per-feature histograms, and its best
//! feasible split. Each round materializes the pool-wide best split
//! (highest gain; ties resolve to lower feature, lower bin, then earlier
//! leaf creation) until the leaf budget is reached or nothing feasible
//! remains. Only the smaller child's histograms are rebuilt from its
//! samples; the sibling's are obtained by subtracting from the parent,
//! which debug builds verify against a direct recount.

use rayon::prelude::*;

use super::binning::BinnedMatrix;
use super::histogram::{build_histogram, subtract, FeatureHist};
use super::split::{best_split, leaf_value, NodeStats, SplitCandidate};
use super::GbdtConfig;

/// A grown decision tree in flattened form. Child references are `i32`:
/// non-negative values index internal nodes, negative values `v` encode
/// leaf `!v` (i.e. `-(v + 1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    root: i32,
    split_feature: Vec<u32>,
    split_bin: Vec<u8>,
    left: Vec<i32>,
    right: Vec<i32>,
    leaf_value: Vec<f64>,
    leaf_count: Vec<u32>,
}

/// Encodes a leaf index as a negative child reference.
fn encode_leaf(leaf: usize) -> i32 {
    !(leaf as i32)
}

impl Tree {
    /// Number of leaves.
    pub fn n_leaves(&self) -> usize {
        self.leaf_value.len()
    }

    /// Number of internal (split) nodes.
    pub fn n_internal(&self) -> usize {
        self.split_feature.len()
    }

    /// Routes a binned row to its leaf index.
    pub fn leaf_for(&self, binned_row: &[u8]) -> usize {
        let mut node = self.root;
        while node >= 0 {
            let i = node as usize;
            let f = self.split_feature[i] as usize;
            node = if binned_row[f] <= self.split_bin[i] { self.left[i] } else { self.right[i] };
        }
        !node as usize
    }

    /// Output of the tree for a binned row (unscaled leaf weight).
    pub fn predict_binned(&self, binned_row: &[u8]) -> f64 {
        self.leaf_value[self.leaf_for(binned_row)]
    }

    /// Leaf weight by leaf index.
    pub fn value_of_leaf(&self, leaf: usize) -> f64 {
        self.leaf_value[leaf]
    }

    /// Training-row count of a leaf.
    pub fn count_of_leaf(&self, leaf: usize) -> u32 {
        self.leaf_count[leaf]
    }

    /// Raw parts, used for serialization.
    pub fn parts(&self) -> (i32, &[u32], &[u8], &[i32], &[i32], &[f64], &[u32]) {
        (
            self.root,
            &self.split_feature,
            &self.split_bin,
            &self.left,
            &self.right,
            &self.leaf_value,
            &self.leaf_count,
        )
    }

    /// Rebuilds a tree from stored parts, verifying structural sanity:
    /// consistent array lengths, in-range references, and every node
    /// reachable exactly once from the root. Used by deserialization.
    pub fn from_parts(
        root: i32,
        split_feature: Vec<u32>,
        split_bin: Vec<u8>,
        left: Vec<i32>,
        right: Vec<i32>,
        leaf_value: Vec<f64>,
        leaf_count: Vec<u32>,
        n_features: usize,
    ) -> Result<Self, String> {
        let n_internal = split_feature.len();
        if split_bin.len() != n_internal || left.len() != n_internal || right.len() != n_internal {
            return Err("internal node arrays disagree in length".into());
        }
        if leaf_value.len() != leaf_count.len() || leaf_value.is_empty() {
            return Err("leaf arrays disagree in length or are empty".into());
        }
        if leaf_value.iter().any(|v| !v.is_finite()) {
            return Err("non-finite leaf value".into());
        }
        if split_feature.iter().any(|&f| f as usize >= n_features) {
            return Err("split feature out of range".into());
        }
        let tree = Tree { root, split_feature, split_bin, left, right, leaf_value, leaf_count };

        // Walk from the root: every internal node and every leaf must be
        // visited exactly once (no cycles, no orphans, no double parents).
        let mut internal_seen = vec![false; n_internal];
        let mut leaf_seen = vec![false; tree.n_leaves()];
        let mut stack = vec![tree.root];
        while let Some(node) = stack.pop() {
            if node >= 0 {
                let i = node as usize;
                if i >= n_internal {
                    return Err(format!("internal reference {i} out of range"));
                }
                if std::mem::replace(&mut internal_seen[i], true) {
                    return Err(format!("internal node {i} reached twice"));
                }
                stack.push(tree.left[i]);
                stack.push(tree.right[i]);
            } else {
                let l = !node as usize;
                if l >= leaf_seen.len() {
                    return Err(format!("leaf reference {l} out of range"));
                }
                if std::mem::replace(&mut leaf_seen[l], true) {
                    return Err(format!("leaf {l} reached twice"));
                }
            }
        }
        if internal_seen.iter().any(|&s| !s) || leaf_seen.iter().any(|&s| !s) {
            return Err("unreachable node".into());
        }
        Ok(tree)
    }
}

/// A tree plus, per leaf, the training samples that landed in it (used to
/// update scores without re-routing every row).
#[derive(Debug)]
pub struct GrownTree {
    pub tree: Tree,
    pub leaf_samples: Vec<Vec<u32>>,
}

/// Tallies of the per-split histogram verification; see
/// [`grow_tree_leafwise_audited`].
#[derive(Debug, Clone, Default)]
pub struct SplitAudit {
    /// Materialized splits inspected.
    pub splits: u64,
    /// (feature, bin) cells inspected across all splits.
    pub bins_checked: u64,
    /// Bins where child counts failed to add up to the parent exactly.
    pub count_violations: u64,
    /// Largest relative error between the parent aggregate and the sum of
    /// the two children's direct recounts.
    pub max_conservation_err: f64,
    /// Largest relative error between the subtraction-derived sibling and
    /// its direct recount.
    pub max_subtraction_err: f64,
}

struct PendingLeaf {
    parent: Option<(usize, bool)>, // (internal index, is-right-child)
    depth: usize,
    order: usize,
    samples: Vec<u32>,
    stats: NodeStats,
    hists: Vec<FeatureHist>,
    best: Option<SplitCandidate>,
}

struct InternalNode {
    feature: u32,
    bin: u8,
    left: i32,
    right: i32,
}

/// Builds all per-feature histograms of a node (parallel over features,
/// collected in feature order).
fn build_all(
    binned: &BinnedMatrix,
    n_bins: &[usize],
    samples: &[u32],
    g: &[f64],
    h: &[f64],
) -> Vec<FeatureHist> {
    (0..binned.cols.len())
        .into_par_iter()
        .map(|f| build_histogram(binned, f, samples, g, h, n_bins[f]))
        .collect()
}

/// Sequential gradient/Hessian sums over a sample list.
fn stats_of(samples: &[u32], g: &[f64], h: &[f64]) -> NodeStats {
    let mut sg = 0.0;
    let mut sh = 0.0;
    for &s in samples {
        sg += g[s as usize];
        sh += h[s as usize];
    }
    NodeStats { g: sg, h: sh, n: samples.len() as u32 }
}

/// Grows one tree on `(g, h)` over `samples`.
pub fn grow_tree_leafwise(
    binned: &BinnedMatrix,
    n_bins: &[usize],
    g: &[f64],
    h: &[f64],
    samples: Vec<u32>,
    cfg: &GbdtConfig,
) -> GrownTree {
    grow(binned, n_bins, g, h, samples, cfg, None)
}

/// As [`grow_tree_leafwise`], additionally recounting both children of
/// every split from their samples and recording conservation and
/// subtraction errors in `audit`.
pub fn grow_tree_leafwise_audited(
    binned: &BinnedMatrix,
    n_bins: &[usize],
    g: &[f64],
    h: &[f64],
    samples: Vec<u32>,
    cfg: &GbdtConfig,
    audit: &mut SplitAudit,
) -> GrownTree {
    grow(binned, n_bins, g, h, samples, cfg, Some(audit))
}

fn grow(
    binned: &BinnedMatrix,
    n_bins: &[usize],
    g: &[f64],
    h: &[f64],
    samples: Vec<u32>,
    cfg: &GbdtConfig,
    mut audit: Option<&mut SplitAudit>,
) -> GrownTree {
    let may_split = |depth: usize| cfg.max_depth.map_or(true, |d| depth < d);

    let root_stats = stats_of(&samples, g, h);
    let root_hists = build_all(binned, n_bins, &samples, g, h);
    let root_best = if may_split(0) { best_split(&root_hists, &root_stats, cfg) } else { None };
    let mut pool = vec![PendingLeaf {
        parent: None,
        depth: 0,
        order: 0,
        samples,
        stats: root_stats,
        hists: root_hists,
        best: root_best,
    }];
    if pool[0].best.is_none() {
        pool[0].hists = Vec::new();
    }

    let mut internals: Vec<InternalNode> = Vec::new();
    let mut next_order = 1usize;
    let mut n_leaves = 1usize;

    while n_leaves < cfg.num_leaves {
        // Pool-wide best candidate: gain desc, then feature asc, bin asc,
        // creation order asc. The pool is kept in creation order.
        let mut chosen: Option<usize> = None;
        for (i, leaf) in pool.iter().enumerate() {
            let Some(cand) = &leaf.best else { continue };
            let better = match chosen {
                None => true,
                Some(j) => {
                    let cur = pool[j].best.as_ref().expect("chosen leaf has a candidate");
                    cand.gain > cur.gain
                        || (cand.gain == cur.gain
                            && (cand.feature, cand.bin, leaf.order)
                                < (cur.feature, cur.bin, pool[j].order))
                }
            };
            if better {
                chosen = Some(i);
            }
        }
        let Some(idx) = chosen else { break };

        let leaf = pool.remove(idx);
        let cand = leaf.best.expect("chosen leaf has a candidate");
        let internal_idx = internals.len();
        match leaf.parent {
            Some((p, true)) => internals[p].right = internal_idx as i32,
            Some((p, false)) => internals[p].left = internal_idx as i32,
            None => {} // root; resolved at assembly time
        }
        internals.push(InternalNode {
            feature: cand.feature as u32,
            bin: cand.bin,
            left: i32::MIN,
            right: i32::MIN,
        });

        // Partition the samples, preserving their order.
        let col = &binned.cols[cand.feature];
        let (left_samples, right_samples): (Vec<u32>, Vec<u32>) =
            leaf.samples.iter().partition(|&&s| col[s as usize] <= cand.bin);
        debug_assert_eq!(left_samples.len() as u32, cand.left.n);
        debug_assert_eq!(right_samples.len() as u32, cand.right.n);

        // Rebuild the smaller child; derive the sibling by subtraction.
        let left_is_small = left_samples.len() <= right_samples.len();
        let small_samples = if left_is_small { &left_samples } else { &right_samples };
        let small_hists = build_all(binned, n_bins, small_samples, g, h);
        let sibling_hists: Vec<FeatureHist> =
            leaf.hists.iter().zip(&small_hists).map(|(p, c)| subtract(p, c)).collect();

        if let Some(a) = audit.as_deref_mut() {
            let large_samples = if left_is_small { &right_samples } else { &left_samples };
            let sibling_direct = build_all(binned, n_bins, large_samples, g, h);
            record_audit(a, &leaf.hists, &small_hists, &sibling_hists, &sibling_direct);
        } else {
            // Always spot-check count conservation on the split feature.
            debug_assert_eq!(
                small_hists[cand.feature].n.iter().sum::<u32>()
                    + sibling_hists[cand.feature].n.iter().sum::<u32>(),
                leaf.hists[cand.feature].n.iter().sum::<u32>(),
            );
        }

        let (left_hists, right_hists) = if left_is_small {
            (small_hists, sibling_hists)
        } else {
            (sibling_hists, small_hists)
        };

        let depth = leaf.depth + 1;
        for (is_right, samples, stats, hists) in [
            (false, left_samples, cand.left, left_hists),
            (true, right_samples, cand.right, right_hists),
        ] {
            let best =
                if may_split(depth) { best_split(&hists, &stats, cfg) } else { None };
            pool.push(PendingLeaf {
                parent: Some((internal_idx, is_right)),
                depth,
                order: next_order,
                samples,
                stats,
                hists: if best.is_some() { hists } else { Vec::new() },
                best,
            });
            next_order += 1;
        }
        n_leaves += 1;
    }

    // Finalize remaining pool entries as leaves, in creation order.
    let mut root = if internals.is_empty() { encode_leaf(0) } else { 0 };
    let mut leaf_values = Vec::with_capacity(pool.len());
    let mut leaf_counts = Vec::with_capacity(pool.len());
    let mut leaf_samples = Vec::with_capacity(pool.len());
    for leaf in pool {
        let leaf_idx = leaf_values.len();
        match leaf.parent {
            Some((p, true)) => internals[p].right = encode_leaf(leaf_idx),
            Some((p, false)) => internals[p].left = encode_leaf(leaf_idx),
            None => root = encode_leaf(leaf_idx),
        }
        leaf_values.push(leaf_value(&leaf.stats, cfg));
        leaf_counts.push(leaf.stats.n);
        leaf_samples.push(leaf.samples);
    }

    let tree = Tree {
        root,
        split_feature: internals.iter().map(|n| n.feature).collect(),
        split_bin: internals.iter().map(|n| n.bin).collect(),
        left: internals.iter().map(|n| n.left).collect(),
        right: internals.iter().map(|n| n.right).collect(),
        leaf_value: leaf_values,
        leaf_count: leaf_counts,
    };
    debug_assert!(tree.left.iter().chain(&tree.right).all(|&c| c != i32::MIN));
    GrownTree { tree, leaf_samples }
}

/// Compares, for every feature and bin: parent vs the two direct child
/// recounts (conservation) and the subtraction-derived sibling vs its
/// direct recount.
fn record_audit(
    audit: &mut SplitAudit,
    parent: &[FeatureHist],
    small: &[FeatureHist],
    sibling_sub: &[FeatureHist],
    sibling_direct: &[FeatureHist],
) {
    audit.splits += 1;
    let rel = |delta: f64, scale: f64| delta.abs() / scale.abs().max(1.0);
    for f in 0..parent.len() {
        for b in 0..parent[f].n_bins() {
            audit.bins_checked += 1;
            if small[f].n[b] + sibling_direct[f].n[b] != parent[f].n[b]
                || sibling_sub[f].n[b] != sibling_direct[f].n[b]
            {
                audit.count_violations += 1;
            }
            let cons_g = rel(small[f].g[b] + sibling_direct[f].g[b] - parent[f].g[b], parent[f].g[b]);
            let cons_h = rel(small[f].h[b] + sibling_direct[f].h[b] - parent[f].h[b], parent[f].h[b]);
            audit.max_conservation_err = audit.max_conservation_err.max(cons_g).max(cons_h);
            let sub_g = rel(sibling_sub[f].g[b] - sibling_direct[f].g[b], sibling_direct[f].g[b]);
            let sub_h = rel(sibling_sub[f].h[b] - sibling_direct[f].h[b], sibling_direct[f].h[b]);
            audit.max_subtraction_err = audit.max_subtraction_err.max(sub_g).max(sub_h);
        }
    }
}
