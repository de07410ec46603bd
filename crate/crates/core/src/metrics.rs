//! Saliency evaluation metrics: MAE, precision-recall curves, max
//! F-measure, weighted F-measure, S-measure and E-measure.

use crate::error::{Error, Result};
use crate::raster::{level_of, squared_distance_to, BinaryMask, SaliencyMap};

/// Binary ground-truth segmentation; `true` marks the salient object.
pub type GroundTruth = BinaryMask;

/// Weight of precision against recall in [`max_f`].
pub const BETA2: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrPoint {
    pub threshold: u8,
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall at the 256 thresholds `0, 1/255, ..., 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

/// The five scores reported per image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub mae: f64,
    pub max_f: f64,
    pub weighted_f: f64,
    pub s_measure: f64,
    pub e_measure: f64,
}

fn check(s: &SaliencyMap, g: &GroundTruth) -> Result<()> {
    s.check_same_size(g)
}

fn require_foreground(g: &GroundTruth) -> Result<usize> {
    match g.count() {
        0 => Err(Error::EmptyGroundTruth),
        n => Ok(n),
    }
}

/// Mean absolute error.
pub fn mae(s: &SaliencyMap, g: &GroundTruth) -> Result<f64> {
    check(s, g)?;
    let sum: f64 = s
        .data()
        .iter()
        .zip(g.data())
        .map(|(&v, &t)| (v - if t { 1.0 } else { 0.0 }).abs())
        .sum();
    Ok(sum / s.len() as f64)
}

/// Precision and recall of `s >= t/255` for every `t` in `0..=255`.
/// Precision is 1 when nothing is predicted.
pub fn pr_curve(s: &SaliencyMap, g: &GroundTruth) -> Result<PrCurve> {
    check(s, g)?;
    let positives = require_foreground(g)?;
    let mut all = [0u64; 256];
    let mut hits = [0u64; 256];
    for (&v, &t) in s.data().iter().zip(g.data()) {
        let k = level_of(v);
        all[k] += 1;
        if t {
            hits[k] += 1;
        }
    }
    // Cumulative counts from the top: pixels with level >= t.
    let (mut predicted, mut tp) = (0u64, 0u64);
    let mut points = vec![
        PrPoint {
            threshold: 0,
            precision: 0.0,
            recall: 0.0
        };
        256
    ];
    for t in (0..256).rev() {
        predicted += all[t];
        tp += hits[t];
        points[t] = PrPoint {
            threshold: t as u8,
            precision: if predicted == 0 {
                1.0
            } else {
                tp as f64 / predicted as f64
            },
            recall: tp as f64 / positives as f64,
        };
    }
    Ok(PrCurve { points })
}

/// F-measure with `beta^2` = [`BETA2`]; zero when precision and recall are.
pub fn f_beta(precision: f64, recall: f64) -> f64 {
    let den = BETA2 * precision + recall;
    if den > 0.0 {
        (1.0 + BETA2) * precision * recall / den
    } else {
        0.0
    }
}

/// Largest F-measure along the curve.
pub fn max_f(curve: &PrCurve) -> f64 {
    curve
        .points
        .iter()
        .map(|p| f_beta(p.precision, p.recall))
        .fold(0.0, f64::max)
}

/// Standard deviation of the Gaussian that spreads errors in [`weighted_f`].
const WF_SIGMA: f64 = 5.0;
const WF_RADIUS: usize = 20;

/// Weighted F-measure.
///
/// Errors `E = |s - g|` are Gaussian-smoothed (`sigma = 5`, radius 20,
/// weights renormalized over the part of the kernel inside the image).
/// Foreground errors become `min(E, smoothed E)`; background errors are
/// scaled by `2 - exp(ln(0.5) / 5 * d)`, `d` being the distance to the
/// foreground. Weighted precision and recall then combine as F1.
pub fn weighted_f(s: &SaliencyMap, g: &GroundTruth) -> Result<f64> {
    check(s, g)?;
    require_foreground(g)?;
    let (w, h) = s.dimensions();
    let err: Vec<f64> = s
        .data()
        .iter()
        .zip(g.data())
        .map(|(&v, &t)| (v - if t { 1.0 } else { 0.0 }).abs())
        .collect();
    let smooth = gaussian_blur(&err, w, h);
    let dist = squared_distance_to(g);

    let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
    for i in 0..err.len() {
        if g.data()[i] {
            let e = err[i].min(smooth[i]);
            tp += 1.0 - e;
            fn_ += e;
        } else {
            let b = 2.0 - (0.5f64.ln() / 5.0 * dist.data()[i].sqrt()).exp();
            fp += err[i] * b;
        }
    }
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = tp / (tp + fn_);
    Ok(if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    })
}

fn gaussian_blur(data: &[f64], w: usize, h: usize) -> Vec<f64> {
    let kernel: Vec<f64> = (0..=WF_RADIUS)
        .map(|d| (-((d * d) as f64) / (2.0 * WF_SIGMA * WF_SIGMA)).exp())
        .collect();
    let blur_line = |line: &[f64], out: &mut [f64]| {
        let n = line.len();
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(WF_RADIUS);
            let hi = (i + WF_RADIUS).min(n - 1);
            let (mut acc, mut norm) = (0.0, 0.0);
            for (j, &v) in line.iter().enumerate().take(hi + 1).skip(lo) {
                let k = kernel[i.abs_diff(j)];
                acc += k * v;
                norm += k;
            }
            *o = acc / norm;
        }
    };
    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        blur_line(&data[y * w..(y + 1) * w], &mut rows[y * w..(y + 1) * w]);
    }
    let mut out = vec![0.0; w * h];
    let mut column = vec![0.0; h];
    let mut blurred = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        blur_line(&column, &mut blurred);
        for y in 0..h {
            out[y * w + x] = blurred[y];
        }
    }
    out
}

/// Structure measure: the mean of an object-level and a region-level
/// similarity, clamped at 0.
///
/// An all-background truth scores `1 - mean(s)`, an all-foreground truth
/// `mean(s)`.
pub fn s_measure(s: &SaliencyMap, g: &GroundTruth) -> Result<f64> {
    check(s, g)?;
    let y = g.count() as f64 / g.len() as f64;
    if g.count() == 0 {
        return Ok(1.0 - s.mean());
    }
    if g.count() == g.len() {
        return Ok(s.mean());
    }
    let q = 0.5 * s_object(s, g, y) + 0.5 * s_region(s, g);
    Ok(q.max(0.0))
}

fn s_object(s: &SaliencyMap, g: &GroundTruth, u: f64) -> f64 {
    let fg: Vec<f64> = s.data().iter().zip(g.data()).filter(|p| *p.1).map(|p| *p.0).collect();
    let bg: Vec<f64> = s
        .data()
        .iter()
        .zip(g.data())
        .filter(|p| !*p.1)
        .map(|p| 1.0 - *p.0)
        .collect();
    u * object_score(&fg) + (1.0 - u) * object_score(&bg)
}

fn object_score(values: &[f64]) -> f64 {
    let (mean, var) = mean_var(values);
    2.0 * mean / (mean * mean + 1.0 + var.sqrt())
}

/// Mean and sample variance (zero for fewer than two values).
fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var)
}

fn s_region(s: &SaliencyMap, g: &GroundTruth) -> f64 {
    let (w, h) = s.dimensions();
    let total = g.count() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            if g[(x, y)] {
                sx += x as f64;
                sy += y as f64;
            }
        }
    }
    // Widths of the left and top parts; the centroid column belongs to the
    // left part.
    let cx = ((sx / total).round() as usize + 1).min(w);
    let cy = ((sy / total).round() as usize + 1).min(h);
    let area = (w * h) as f64;
    let quadrants = [
        (0, cx, 0, cy),
        (cx, w, 0, cy),
        (0, cx, cy, h),
        (cx, w, cy, h),
    ];
    quadrants
        .iter()
        .filter(|&&(x0, x1, y0, y1)| x1 > x0 && y1 > y0)
        .map(|&(x0, x1, y0, y1)| {
            let weight = ((x1 - x0) * (y1 - y0)) as f64 / area;
            let mut a = Vec::new();
            let mut b = Vec::new();
            for y in y0..y1 {
                for x in x0..x1 {
                    a.push(s[(x, y)]);
                    b.push(if g[(x, y)] { 1.0 } else { 0.0 });
                }
            }
            weight * ssim(&a, &b)
        })
        .sum()
}

fn ssim(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let cov = if n < 2 {
        0.0
    } else {
        a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1) as f64
    };
    let alpha = 4.0 * ma * mb * cov;
    let beta = (ma * ma + mb * mb) * (va + vb);
    if alpha != 0.0 {
        alpha / beta
    } else if beta == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Enhanced-alignment measure averaged over the 256 binarization thresholds.
///
/// An all-background truth scores the fraction of predicted-negative
/// pixels, an all-foreground truth the fraction of predicted-positive ones.
pub fn e_measure(s: &SaliencyMap, g: &GroundTruth) -> Result<f64> {
    check(s, g)?;
    let n = s.len() as f64;
    let positives = g.count();
    let levels: Vec<usize> = s.data().iter().map(|&v| level_of(v)).collect();
    let g_mean = positives as f64 / n;
    let mut total = 0.0;
    for t in 0..256 {
        let predicted = levels.iter().filter(|&&k| k >= t).count();
        let score = if positives == 0 {
            (s.len() - predicted) as f64 / n
        } else if positives == s.len() {
            predicted as f64 / n
        } else {
            let b_mean = predicted as f64 / n;
            // Only four (b, g) combinations occur; score each once.
            let mut counts = [[0usize; 2]; 2];
            for (&k, &gt) in levels.iter().zip(g.data()) {
                counts[usize::from(k >= t)][usize::from(gt)] += 1;
            }
            let mut sum = 0.0;
            for (b, row) in counts.iter().enumerate() {
                for (gv, &count) in row.iter().enumerate() {
                    if count > 0 {
                        sum += count as f64 * alignment(b as f64 - b_mean, gv as f64 - g_mean);
                    }
                }
            }
            sum / n
        };
        total += score;
    }
    Ok(total / 256.0)
}

fn alignment(phi_b: f64, phi_g: f64) -> f64 {
    let xi = 2.0 * phi_g * phi_b / (phi_g * phi_g + phi_b * phi_b);
    (xi + 1.0).powi(2) / 4.0
}

/// All five scores. Fails on an empty ground truth.
pub fn evaluate_all(s: &SaliencyMap, g: &GroundTruth) -> Result<MetricsReport> {
    Ok(MetricsReport {
        mae: mae(s, g)?,
        max_f: max_f(&pr_curve(s, g)?),
        weighted_f: weighted_f(s, g)?,
        s_measure: s_measure(s, g)?,
        e_measure: e_measure(s, g)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Raster;
    use proptest::prelude::*;

    fn square(w: usize, h: usize) -> GroundTruth {
        Raster::from_fn(w, h, |x, y| {
            (w / 4..3 * w / 4).contains(&x) && (h / 4..3 * h / 4).contains(&y)
        })
    }

    #[test]
    fn mae_examples() {
        let g = square(8, 8);
        assert_eq!(mae(&g.to_map(), &g).unwrap(), 0.0);
        let none = Raster::filled(8, 8, false);
        assert_eq!(mae(&Raster::filled(8, 8, 1.0), &none).unwrap(), 1.0);
        assert_eq!(mae(&Raster::filled(8, 8, 0.5), &g).unwrap(), 0.5);
        assert!(mae(&Raster::filled(2, 2, 0.5), &g).is_err());
    }

    #[test]
    fn pr_examples() {
        let g = square(8, 8);
        let curve = pr_curve(&g.to_map(), &g).unwrap();
        for p in &curve.points[1..] {
            assert_eq!((p.precision, p.recall), (1.0, 1.0));
        }
        let zero = pr_curve(&Raster::filled(8, 8, 0.0), &g).unwrap();
        assert_eq!(zero.points[0].recall, 1.0);
        assert_eq!(zero.points[0].precision, 16.0 / 64.0);
        assert_eq!(zero.points[1].precision, 1.0);
        assert_eq!(zero.points[1].recall, 0.0);
        assert!(matches!(
            pr_curve(&Raster::filled(8, 8, 0.0), &Raster::filled(8, 8, false)),
            Err(Error::EmptyGroundTruth)
        ));
    }

    #[test]
    fn max_f_examples() {
        let curve = |p, r| PrCurve {
            points: (0..256)
                .map(|t| PrPoint {
                    threshold: t as u8,
                    precision: p,
                    recall: r,
                })
                .collect(),
        };
        assert_eq!(max_f(&curve(1.0, 1.0)), 1.0);
        assert!((max_f(&curve(0.5, 0.5)) - 0.5).abs() < 1e-15);
        assert!((max_f(&curve(1.0, 0.5)) - 0.8125).abs() < 1e-15);
        assert_eq!(max_f(&curve(0.0, 0.0)), 0.0);
    }

    #[test]
    fn perfect_and_inverted_maps() {
        let g = square(16, 12);
        let r = evaluate_all(&g.to_map(), &g).unwrap();
        assert_eq!((r.mae, r.max_f, r.weighted_f, r.s_measure), (0.0, 1.0, 1.0, 1.0));
        assert!((r.e_measure - (255.0 + 0.25) / 256.0).abs() < 1e-12);

        let inv = g.map(|&b| !b).to_map();
        let r = evaluate_all(&inv, &g).unwrap();
        assert_eq!(r.mae, 1.0);
        assert_eq!(r.weighted_f, 0.0);
        assert!(r.s_measure <= 0.1, "{}", r.s_measure);
        assert!(r.e_measure < 0.01, "{}", r.e_measure);
        assert!(r.max_f < 0.5, "{}", r.max_f);
    }

    #[test]
    fn degenerate_truths() {
        let none = Raster::filled(5, 5, false);
        assert_eq!(s_measure(&Raster::filled(5, 5, 0.0), &none).unwrap(), 1.0);
        assert_eq!(s_measure(&Raster::filled(5, 5, 0.25), &none).unwrap(), 0.75);
        let all = Raster::filled(5, 5, true);
        assert_eq!(s_measure(&Raster::filled(5, 5, 0.25), &all).unwrap(), 0.25);
        assert_eq!(e_measure(&Raster::filled(5, 5, 0.0), &none).unwrap(), 255.0 / 256.0);
        assert_eq!(e_measure(&Raster::filled(5, 5, 1.0), &all).unwrap(), 1.0);
    }

    #[test]
    fn anti_aligned_binarization_scores_zero() {
        let g = square(8, 8);
        assert_eq!(alignment(-0.75, 0.75), 0.0);
        // Inverted binary map: every threshold above 0 is exactly anti-aligned.
        let inv = g.map(|&b| !b).to_map();
        let e = e_measure(&inv, &g).unwrap();
        assert!((e - 0.25 / 256.0).abs() < 1e-15);
    }

    fn flip(map: &SaliencyMap) -> SaliencyMap {
        let (w, h) = map.dimensions();
        Raster::from_fn(w, h, |x, y| map[(w - 1 - x, y)])
    }

    proptest! {
        #[test]
        fn scores_in_range_and_mostly_flip_invariant(
            s in proptest::collection::vec(0.0f64..=1.0, 42),
            g in proptest::collection::vec(any::<bool>(), 42),
        ) {
            let s = Raster::saliency(7, 6, s).unwrap();
            let mut g = Raster::from_vec(7, 6, g).unwrap();
            g.data_mut()[0] = true;
            let r = evaluate_all(&s, &g).unwrap();
            for v in [r.mae, r.max_f, r.weighted_f, r.s_measure, r.e_measure] {
                prop_assert!(v.is_finite() && (0.0..=1.0).contains(&v), "{:?}", r);
            }
            let gf = flip(&g.to_map()).threshold(0.5);
            let rf = evaluate_all(&flip(&s), &gf).unwrap();
            prop_assert!((r.mae - rf.mae).abs() < 1e-12);
            prop_assert_eq!(r.max_f, rf.max_f);
            prop_assert!((r.weighted_f - rf.weighted_f).abs() < 1e-12);
            // The S-measure splits at the centroid column, which always goes
            // to the left quadrants, so it is not exactly mirror symmetric.
            prop_assert!((r.e_measure - rf.e_measure).abs() < 1e-12);

            let inv = s.map(|v| 1.0 - v);
            prop_assert!((mae(&s, &g).unwrap() + mae(&inv, &g).unwrap() - 1.0).abs() < 1e-12);

            let curve = pr_curve(&s, &g).unwrap();
            for pair in curve.points.windows(2) {
                prop_assert!(pair[1].recall <= pair[0].recall);
            }
        }
    }
}
