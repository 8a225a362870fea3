//! SMOTE minority oversampling with a pinned, reproducible draw order.
//!
//! Every class is topped up to the majority-class count by synthesizing
//! rows on segments between existing same-class rows: pick a class row
//! `a` uniformly, pick `b` among its `k` nearest same-class neighbours
//! (Euclidean distance on raw features, ties broken by lower row index),
//! then emit `a + u * (b - a)` with `u` uniform in `[0, 1)`.
//!
//! The PRNG draw order is part of the contract — per synthetic row the
//! draws are (sample choice, neighbour choice, `u`), classes processed in
//! ascending label order — so a given `(dataset, config)` pair always
//! yields the bit-identical resampled table. Original rows come first,
//! verbatim; synthetic rows are appended grouped by class with fresh
//! `row_ids` continuing past the original maximum.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::{class_counts, Dataset};

/// Errors raised by [`smote`].
#[derive(Debug, Error)]
pub enum ResampleError {
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("class {class} needs oversampling but has only {rows} rows (need at least 2 and k >= 1)")]
    TooFewSamples { class: usize, rows: usize },
}

/// Parameters for [`smote`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteConfig {
    /// Neighbour pool size; clipped per class to `class_count - 1`.
    pub k_neighbors: usize,
    /// Seed for the synthesis draws.
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { k_neighbors: 5, seed: 123 }
    }
}

/// Squared Euclidean distance between two feature rows.
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Oversamples every present class up to the majority count.
///
/// Classes with zero rows are skipped (there is nothing to balance
/// toward); a class that needs synthetic rows but cannot offer at least
/// one neighbour per member fails with [`ResampleError::TooFewSamples`].
pub fn smote(ds: &Dataset, cfg: &SmoteConfig) -> Result<Dataset, ResampleError> {
    if ds.n_rows() == 0 {
        return Err(ResampleError::EmptyDataset);
    }
    let counts = class_counts(ds);
    let majority = *counts.iter().max().expect("at least one class");

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut synthetic_rows: Vec<Vec<f64>> = Vec::new();
    let mut synthetic_labels: Vec<u8> = Vec::new();

    for (class, &count) in counts.iter().enumerate() {
        let deficit = majority - count;
        if deficit == 0 || count == 0 {
            continue;
        }
        let k = cfg.k_neighbors.min(count - 1);
        if k == 0 {
            return Err(ResampleError::TooFewSamples { class, rows: count });
        }

        let members: Vec<usize> =
            (0..ds.n_rows()).filter(|&i| ds.labels()[i] as usize == class).collect();

        // Nearest same-class neighbours of each member, excluding itself,
        // ordered by (distance, row index) and truncated to k.
        let neighbours: Vec<Vec<usize>> = members
            .iter()
            .map(|&a| {
                let mut others: Vec<(f64, usize)> = members
                    .iter()
                    .filter(|&&b| b != a)
                    .map(|&b| (squared_distance(ds.row(a), ds.row(b)), b))
                    .collect();
                others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                others.truncate(k);
                others.into_iter().map(|(_, b)| b).collect()
            })
            .collect();

        for _ in 0..deficit {
            let a_pos = rng.gen_range(0..members.len());
            let b_pos = rng.gen_range(0..k);
            let u: f64 = rng.gen();
            let a = ds.row(members[a_pos]);
            let b = ds.row(neighbours[a_pos][b_pos]);
            let row: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| x + u * (y - x)).collect();
            synthetic_rows.push(row);
            synthetic_labels.push(class as u8);
        }
    }

    // Original rows verbatim, then synthetic rows with fresh ids.
    let next_id = ds.row_ids().iter().max().copied().unwrap_or(0) + 1;
    let mut features = Vec::with_capacity((ds.n_rows() + synthetic_rows.len()) * ds.n_features());
    for i in 0..ds.n_rows() {
        features.extend_from_slice(ds.row(i));
    }
    for row in &synthetic_rows {
        features.extend_from_slice(row);
    }
    let mut labels = ds.labels().to_vec();
    labels.extend_from_slice(&synthetic_labels);
    let mut row_ids = ds.row_ids().to_vec();
    row_ids.extend((0..synthetic_labels.len() as u32).map(|i| next_id + i));

    Ok(Dataset::new(ds.n_features(), ds.n_classes(), features, labels, row_ids)
        .expect("synthetic rows preserve dataset invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::class_counts;
    use rand::Rng;

    fn toy(counts: &[usize]) -> Dataset {
        crate::synthetic::blobs(counts, 3, 4.0, 17)
    }

    #[test]
    fn balanced_input_passes_through_unchanged() {
        let ds = toy(&[5, 5, 5]);
        let out = smote(&ds, &SmoteConfig::default()).unwrap();
        assert_eq!(ds, out);
    }

    #[test]
    fn balances_all_classes_to_the_majority() {
        let ds = toy(&[8, 3, 2]);
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 1 }).unwrap();
        assert_eq!(class_counts(&out), vec![8, 8, 8]);
        assert_eq!(out.n_rows(), 24);
    }

    #[test]
    fn original_rows_come_first_verbatim() {
        let ds = toy(&[6, 2, 3]);
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 2 }).unwrap();
        let head = out.subset(&(0..ds.n_rows()).collect::<Vec<_>>());
        assert_eq!(head, ds);
    }

    #[test]
    fn synthetic_rows_are_grouped_by_ascending_class() {
        let ds = toy(&[6, 2, 3]);
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 2 }).unwrap();
        let appended = &out.labels()[ds.n_rows()..];
        assert_eq!(appended, &[1, 1, 1, 1, 2, 2, 2]);
        let mut sorted = appended.to_vec();
        sorted.sort_unstable();
        assert_eq!(appended, &sorted[..]);
    }

    #[test]
    fn synthetic_ids_continue_past_the_original_maximum() {
        let ds = toy(&[4, 2, 2]);
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 3 }).unwrap();
        let max_original = *ds.row_ids().iter().max().unwrap();
        let fresh = &out.row_ids()[ds.n_rows()..];
        let expect: Vec<u32> = (1..=fresh.len() as u32).map(|i| max_original + i).collect();
        assert_eq!(fresh, &expect[..]);
    }

    #[test]
    fn synthetic_rows_stay_inside_their_class_bounding_box() {
        let ds = toy(&[20, 7, 4]);
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 4 }).unwrap();
        for class in 0..3u8 {
            let mut lo = vec![f64::INFINITY; ds.n_features()];
            let mut hi = vec![f64::NEG_INFINITY; ds.n_features()];
            for i in 0..ds.n_rows() {
                if ds.labels()[i] == class {
                    for j in 0..ds.n_features() {
                        lo[j] = lo[j].min(ds.row(i)[j]);
                        hi[j] = hi[j].max(ds.row(i)[j]);
                    }
                }
            }
            for i in ds.n_rows()..out.n_rows() {
                if out.labels()[i] != class {
                    continue;
                }
                for j in 0..ds.n_features() {
                    let v = out.row(i)[j];
                    let slack = 1e-9 * (1.0 + hi[j].abs().max(lo[j].abs()));
                    assert!(
                        v >= lo[j] - slack && v <= hi[j] + slack,
                        "class {class} feature {j}: {v} outside [{}, {}]",
                        lo[j],
                        hi[j]
                    );
                }
            }
        }
    }

    #[test]
    fn two_row_class_interpolates_on_the_segment() {
        // Class 1 has exactly two rows, so k clips to 1 and every
        // synthetic row lies on the segment joining them.
        let rows = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 10.0],
            vec![14.0, 18.0],
            vec![1.0, 0.0],
        ];
        let labels = vec![0, 0, 1, 1, 0];
        let ds = Dataset::from_rows(rows, labels, 2).unwrap();
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 5 }).unwrap();
        assert_eq!(class_counts(&out), vec![3, 3]);
        let synth = out.row(5);
        // On the segment (10,10)-(14,18): y = 2x - 10, x in [10, 14).
        assert!((synth[1] - (2.0 * synth[0] - 10.0)).abs() < 1e-9, "off segment: {synth:?}");
        assert!((10.0..14.0).contains(&synth[0]));
    }

    #[test]
    fn resampling_is_deterministic_per_seed() {
        let ds = toy(&[9, 4, 3]);
        let cfg = SmoteConfig { k_neighbors: 3, seed: 42 };
        assert_eq!(smote(&ds, &cfg).unwrap(), smote(&ds, &cfg).unwrap());
        let other = smote(&ds, &SmoteConfig { k_neighbors: 3, seed: 43 }).unwrap();
        assert_ne!(smote(&ds, &cfg).unwrap(), other);
    }

    #[test]
    fn singleton_deficit_class_is_rejected() {
        let ds = Dataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![9.0]],
            vec![0, 0, 0, 1],
            2,
        )
        .unwrap();
        match smote(&ds, &SmoteConfig::default()) {
            Err(ResampleError::TooFewSamples { class: 1, rows: 1 }) => {}
            other => panic!("expected TooFewSamples, got {other:?}"),
        }
    }

    #[test]
    fn absent_class_is_skipped_not_fabricated() {
        let ds = Dataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![9.0], vec![8.0]],
            vec![0, 0, 0, 1, 1],
            3, // class 2 exists in the schema but has no rows
        )
        .unwrap();
        let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: 7 }).unwrap();
        assert_eq!(class_counts(&out), vec![3, 3, 0]);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let ds = Dataset::from_rows(vec![], vec![], 3).unwrap();
        assert!(matches!(smote(&ds, &SmoteConfig::default()), Err(ResampleError::EmptyDataset)));
    }

    #[test]
    fn random_imbalanced_toys_always_balance_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for round in 0..100 {
            let counts = [
                rng.gen_range(2..30usize),
                rng.gen_range(2..30usize),
                rng.gen_range(2..30usize),
            ];
            let ds = crate::synthetic::blobs(&counts, 2, 3.0, round);
            let out = smote(&ds, &SmoteConfig { k_neighbors: 5, seed: round }).unwrap();
            let majority = *counts.iter().max().unwrap();
            assert_eq!(class_counts(&out), vec![majority; 3]);
            // Original block untouched.
            assert_eq!(out.subset(&(0..ds.n_rows()).collect::<Vec<_>>()), ds);
        }
    }
}
