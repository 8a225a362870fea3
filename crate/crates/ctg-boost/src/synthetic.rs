//! Deterministic synthetic tables for tests, benchmarks, and demos.
//!
//! The real CTG table cannot be redistributed with the source, so the
//! test suites exercise full-scale behaviour (binning with heavy duplicate
//! values, class imbalance, resampling, cross-validation) on generated
//! stand-ins. Everything here is a pure function of its arguments: the
//! same call always returns the bit-identical dataset.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;

/// Approximate class mix of the canonical table: Normal / Suspect /
/// Pathological.
const CTG_CLASS_MIX: [f64; 3] = [0.7785, 0.1388, 0.0827];

/// Rounds `x` to `d` decimal places, used to force duplicate values the
/// way discretized clinical measurements do.
fn round_to(x: f64, d: i32) -> f64 {
    let p = 10f64.powi(d);
    (x * p).round() / p
}

/// Roughly standard-normal noise (Irwin–Hall with 4 uniform draws,
/// rescaled); cheap, bounded, and free of extra dependencies.
fn noise(rng: &mut ChaCha8Rng) -> f64 {
    let s: f64 = (0..4).map(|_| rng.gen::<f64>()).sum();
    (s - 2.0) * 1.732
}

/// Gaussian-ish class blobs: `counts[c]` rows of class `c`, each feature
/// centred at `c * separation` plus unit noise. Labels are interleaved
/// deterministically rather than grouped.
pub fn blobs(counts: &[usize], n_features: usize, separation: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u8> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat(c as u8).take(n))
        .collect();
    use rand::seq::SliceRandom;
    labels.shuffle(&mut rng);

    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&c| {
            (0..n_features)
                .map(|_| c as f64 * separation + noise(&mut rng))
                .collect()
        })
        .collect();
    Dataset::from_rows(rows, labels, counts.len()).unwrap()
}

/// A CTG-like table: 21 features, three classes mixed roughly 78/14/8,
/// a handful of informative columns (some linear, some not, several
/// rounded to coarse grids so duplicate values abound), and pure-noise
/// columns at assorted scales.
///
/// The structure is learnable but deliberately overlapping, so trained
/// models land well above chance without being trivially perfect.
pub fn ctg_like_dataset(n_rows: usize, seed: u64) -> Dataset {
    let n0 = (CTG_CLASS_MIX[0] * n_rows as f64).round() as usize;
    let n1 = (CTG_CLASS_MIX[1] * n_rows as f64).round() as usize;
    let n0 = n0.min(n_rows);
    let n1 = n1.min(n_rows - n0);
    let n2 = n_rows - n0 - n1;
    ctg_like_with_counts([n0, n1, n2], seed)
}

/// As [`ctg_like_dataset`] but with exact per-class row counts.
pub fn ctg_like_with_counts(counts: [usize; 3], seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u8> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat(c as u8).take(n))
        .collect();
    use rand::seq::SliceRandom;
    labels.shuffle(&mut rng);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(labels.len());
    for &label in &labels {
        let c = label as f64;
        let mut v = vec![0.0f64; 21];
        // Strongly informative block, mixed granularities.
        v[0] = round_to(120.0 + c * 12.0 + noise(&mut rng) * 8.0, 0);
        v[1] = round_to((0.004 - c * 0.0015 + noise(&mut rng) * 0.002).max(0.0), 3);
        v[2] = round_to((c * 0.01 + noise(&mut rng).abs() * 0.005) * 10.0, 1);
        v[3] = round_to((0.005 + c * 0.002 + noise(&mut rng) * 0.003).max(0.0), 3);
        v[4] = round_to(20.0 + c * 18.0 + noise(&mut rng) * 10.0, 0);
        v[5] = round_to(0.4 + c * 0.5 + noise(&mut rng) * 0.4, 1);
        v[6] = round_to(5.0 - c * 1.4 + noise(&mut rng) * 1.5, 1);
        // Suspect-only bump: non-monotone in the class index.
        v[7] = if label == 1 { 2.0 } else { 0.0 } + noise(&mut rng) * 0.8;
        // Interactions of earlier columns.
        v[8] = 0.1 * v[0] - 120.0 * v[1] + noise(&mut rng) * 0.5;
        v[9] = (v[0] - 126.0).powi(2) / 50.0 + noise(&mut rng);
        // Weakly informative block.
        for j in 10..14 {
            v[j] = c * 0.4 + noise(&mut rng);
        }
        // Noise block at assorted scales and granularities.
        v[14] = round_to(noise(&mut rng) * 3.0 + 4.0, 0);
        v[15] = round_to(noise(&mut rng).abs() * 0.7, 0);
        v[16] = round_to(137.0 + noise(&mut rng) * 16.0, 0);
        v[17] = 134.0 + noise(&mut rng) * 15.0;
        v[18] = 138.0 + noise(&mut rng) * 14.0;
        v[19] = round_to(noise(&mut rng).powi(2) * 29.0, 0);
        v[20] = round_to(noise(&mut rng) * 0.61, 0).clamp(-1.0, 1.0);
        rows.push(v);
    }
    Dataset::from_rows(rows, labels, 3).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::class_counts;

    #[test]
    fn generator_is_deterministic() {
        let a = ctg_like_dataset(500, 9);
        let b = ctg_like_dataset(500, 9);
        assert_eq!(a, b);
        let c = ctg_like_dataset(500, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn class_mix_tracks_the_canonical_table() {
        let ds = ctg_like_dataset(2126, 1);
        assert_eq!(ds.n_rows(), 2126);
        assert_eq!(ds.n_features(), 21);
        assert_eq!(class_counts(&ds), vec![1655, 295, 176]);
    }

    #[test]
    fn exact_counts_are_honoured() {
        let ds = ctg_like_with_counts([40, 25, 10], 3);
        assert_eq!(class_counts(&ds), vec![40, 25, 10]);
    }

    #[test]
    fn rounded_columns_carry_heavy_duplicates() {
        let ds = ctg_like_dataset(1000, 4);
        let mut distinct: Vec<f64> = ds.column(20);
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert!(distinct.len() <= 3, "tendency column should be three-valued");

        let mut continuous: Vec<f64> = ds.column(17);
        continuous.sort_by(f64::total_cmp);
        continuous.dedup();
        assert!(continuous.len() > 900, "continuous column should rarely repeat");
    }

    #[test]
    fn blobs_shape_and_determinism() {
        let ds = blobs(&[10, 20, 5], 4, 3.0, 7);
        assert_eq!(ds.n_rows(), 35);
        assert_eq!(ds.n_features(), 4);
        assert_eq!(class_counts(&ds), vec![10, 20, 5]);
        assert_eq!(ds, blobs(&[10, 20, 5], 4, 3.0, 7));
    }
}
