use num_bigint::BigUint;

use super::SaliencyMap;

/// Threshold value of histogram level `k`: `k / 255`.
#[inline]
pub fn threshold_of(level: usize) -> f64 {
    level as f64 / 255.0
}

/// Histogram bin of a value in `[0, 1]`: the largest `k` with
/// `threshold_of(k) <= v`.
///
/// This makes `v >= threshold_of(k)` and `level_of(v) >= k` agree exactly,
/// so histogram-based counts and per-pixel comparisons never disagree.
#[inline]
pub fn level_of(v: f64) -> usize {
    if !(v > 0.0) {
        return 0;
    }
    let mut k = ((v * 255.0).floor() as usize).min(255);
    if k < 255 && threshold_of(k + 1) <= v {
        k += 1;
    } else if k > 0 && threshold_of(k) > v {
        k -= 1;
    }
    k
}

pub fn histogram(map: &SaliencyMap) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in map.data() {
        hist[level_of(v)] += 1;
    }
    hist
}

/// Otsu level on a 256-bin histogram.
///
/// Returns the smallest `k` in `1..=255` maximizing the between-class
/// variance of the split `{bins < k}` / `{bins >= k}`. A histogram with a
/// single occupied bin returns that bin. The comparison is exact (integer
/// arithmetic), so ties are real ties.
pub fn otsu_level(hist: &[u64; 256]) -> usize {
    let occupied: Vec<usize> = (0..256).filter(|&k| hist[k] > 0).collect();
    match occupied.as_slice() {
        [] => return 0,
        [only] => return *only,
        _ => {}
    }

    let total_n: u128 = hist.iter().map(|&c| c as u128).sum();
    let total_s: u128 = hist
        .iter()
        .enumerate()
        .map(|(k, &c)| k as u128 * c as u128)
        .sum();

    // Between-class variance up to the constant factor 1/N^2:
    //   (n1 * s0 - n0 * s1)^2 / (n0 * n1)
    // compared as exact big-integer cross products.
    let mut best_level = 1;
    let mut best = (BigUint::ZERO, BigUint::from(1u8));
    let (mut n0, mut s0) = (0u128, 0u128);
    for k in 1..256 {
        n0 += hist[k - 1] as u128;
        s0 += (k as u128 - 1) * hist[k - 1] as u128;
        let n1 = total_n - n0;
        let s1 = total_s - s0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let (a, b) = (BigUint::from(n1) * s0, BigUint::from(n0) * s1);
        let diff = if a > b { a - b } else { b - a };
        let num = &diff * &diff;
        let den = BigUint::from(n0) * n1;
        if &num * &best.1 > &best.0 * &den {
            best = (num, den);
            best_level = k;
        }
    }
    best_level
}

/// Otsu threshold of a saliency map, as a value in `[0, 1]`.
///
/// Foreground is `v >= threshold`. A constant map yields its own bin, so
/// the whole map is foreground.
pub fn otsu_threshold(map: &SaliencyMap) -> f64 {
    threshold_of(otsu_level(&histogram(map)))
}
