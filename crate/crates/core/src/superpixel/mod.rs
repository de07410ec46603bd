//! Object-based superpixel segmentation.
//!
//! Seeds are sampled from a saliency map so that a controlled number of them
//! fall inside salient components, then grown into an optimum-path forest
//! over the 8-adjacent pixel graph. The forest is refined by moving each seed
//! to the member pixel closest to its superpixel's centroid and re-running
//! the forest with the superpixel mean colors as root colors.

mod export;
mod ift;
mod seeds;

use crate::error::{Error, Result};
use crate::raster::{LabImage, Raster, SaliencyMap};

pub use export::{save_boundaries, save_labels};
pub use ift::{ift_forest, ift_segment, Forest};
pub use seeds::sample_seeds;

/// A seed pixel and whether it was placed inside the salient mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seed {
    pub x: usize,
    pub y: usize,
    pub object: bool,
}

/// Ordered seeds; seed `i` roots superpixel `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedSet {
    pub seeds: Vec<Seed>,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn object_count(&self) -> usize {
        self.seeds.iter().filter(|s| s.object).count()
    }
}

/// Arc-cost parameters of the spanning forest and the refinement count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpixelParams {
    /// Weight of the color term.
    pub alpha: f64,
    /// Exponent of the color term.
    pub beta: f64,
    /// How strongly saliency differences inflate color distances.
    pub gamma: f64,
    /// Forest/recentering rounds.
    pub iterations: usize,
}

impl Default for SuperpixelParams {
    fn default() -> Self {
        Self {
            alpha: 12.0,
            beta: 0.5,
            gamma: 10.0,
            iterations: 5,
        }
    }
}

impl SuperpixelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, message: &str| {
            Err(Error::InvalidParameter {
                name,
                message: message.to_string(),
            })
        };
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha", "must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta", "must be positive");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma", "must be non-negative");
        }
        if self.iterations == 0 {
            return bad("oisf_iters", "must be at least 1");
        }
        Ok(())
    }
}

/// Per-superpixel summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Superpixel {
    pub mean_color: [f64; 3],
    pub pixel_count: usize,
    /// Mean of the guiding saliency map over the superpixel.
    pub mean_saliency: f64,
    pub seed: Seed,
}

/// Superpixel label raster plus per-superpixel records.
///
/// Labels are `0..len()`; label `i` is the tree rooted at `records[i].seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub labels: Raster<u32>,
    pub records: Vec<Superpixel>,
}

impl Segmentation {
    /// Builds records from a label raster. `seeds[i]` must root label `i`.
    pub fn from_labels(
        labels: Raster<u32>,
        seeds: &SeedSet,
        lab: &LabImage,
        sal: &SaliencyMap,
    ) -> Result<Self> {
        labels.check_same_size(lab)?;
        labels.check_same_size(sal)?;
        let k = seeds.len();
        let colors: [Vec<f64>; 3] =
            std::array::from_fn(|c| region_means(&labels, k, |i| lab.data()[i][c]));
        let saliency = region_means(&labels, k, |i| sal.data()[i]);
        let mut counts = vec![0usize; k];
        for &l in labels.data() {
            counts[l as usize] += 1;
        }
        let records = (0..k)
            .map(|i| Superpixel {
                mean_color: [colors[0][i], colors[1][i], colors[2][i]],
                pixel_count: counts[i],
                mean_saliency: saliency[i],
                seed: seeds.seeds[i],
            })
            .collect();
        Ok(Self { labels, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn seeds(&self) -> SeedSet {
        SeedSet {
            seeds: self.records.iter().map(|r| r.seed).collect(),
        }
    }

    /// Mean of `map` inside each superpixel.
    pub fn mean_per_superpixel(&self, map: &SaliencyMap) -> Result<Vec<f64>> {
        self.labels.check_same_size(map)?;
        Ok(region_means(&self.labels, self.len(), |i| map.data()[i]))
    }

    /// Paints every pixel with its superpixel's value.
    pub fn render(&self, values: &[f64]) -> SaliencyMap {
        assert_eq!(values.len(), self.len(), "one value per superpixel");
        self.labels.map(|&l| values[l as usize])
    }
}

/// Per-label means of `value(pixel)`. A region whose values are all equal
/// gets exactly that value, not a rounded sum/count.
pub(crate) fn region_means(
    labels: &Raster<u32>,
    k: usize,
    value: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut sum = vec![0.0; k];
    let mut count = vec![0usize; k];
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for (i, &l) in labels.data().iter().enumerate() {
        let l = l as usize;
        let v = value(i);
        sum[l] += v;
        count[l] += 1;
        lo[l] = lo[l].min(v);
        hi[l] = hi[l].max(v);
    }
    (0..k)
        .map(|l| match count[l] {
            0 => 0.0,
            _ if lo[l] == hi[l] => lo[l],
            n => (sum[l] / n as f64).clamp(lo[l], hi[l]),
        })
        .collect()
}

/// Moves every seed to the member pixel closest to its superpixel's
/// centroid (ties: first in raster order). Object flags are kept.
pub fn recenter_seeds(seg: &Segmentation) -> SeedSet {
    let k = seg.len();
    let w = seg.labels.width();
    let mut sx = vec![0.0; k];
    let mut sy = vec![0.0; k];
    let mut n = vec![0usize; k];
    for (i, &l) in seg.labels.data().iter().enumerate() {
        let l = l as usize;
        sx[l] += (i % w) as f64;
        sy[l] += (i / w) as f64;
        n[l] += 1;
    }
    let centroids: Vec<(f64, f64)> = (0..k)
        .map(|l| (sx[l] / n[l] as f64, sy[l] / n[l] as f64))
        .collect();

    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, 0); k];
    for (i, &l) in seg.labels.data().iter().enumerate() {
        let l = l as usize;
        let (cx, cy) = centroids[l];
        let dx = (i % w) as f64 - cx;
        let dy = (i / w) as f64 - cy;
        let d = dx * dx + dy * dy;
        if d < best[l].0 {
            best[l] = (d, i);
        }
    }
    SeedSet {
        seeds: best
            .iter()
            .zip(&seg.records)
            .map(|(&(_, i), r)| Seed {
                x: i % w,
                y: i / w,
                object: r.seed.object,
            })
            .collect(),
    }
}

/// Saliency-guided iterative spanning forest.
///
/// Samples `n` seeds (with `n_s` object seeds per salient component), then
/// runs `params.iterations` rounds of forest growth and seed recentering.
/// The first round roots trees at the seed pixel colors; later rounds use
/// the previous round's superpixel means.
pub fn oisf(
    lab: &LabImage,
    sal: &SaliencyMap,
    n: usize,
    n_s: usize,
    params: &SuperpixelParams,
) -> Result<Segmentation> {
    params.validate()?;
    lab.check_same_size(sal)?;
    let mut seeds = sample_seeds(sal, n, n_s)?;
    let mut means: Option<Vec<[f64; 3]>> = None;
    for round in 0..params.iterations {
        let seg = ift_segment(lab, sal, &seeds, means.as_deref(), params)?;
        if round + 1 == params.iterations {
            return Ok(seg);
        }
        means = Some(seg.records.iter().map(|r| r.mean_color).collect());
        seeds = recenter_seeds(&seg);
    }
    unreachable!("params.iterations >= 1 is validated above")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg_from_rows(rows: &[&str]) -> Segmentation {
        let w = rows[0].len();
        let labels = Raster::from_fn(w, rows.len(), |x, y| (rows[y].as_bytes()[x] - b'0') as u32);
        let k = *labels.data().iter().max().unwrap() as usize + 1;
        let mut seeds = SeedSet::default();
        for l in 0..k {
            let i = labels.data().iter().position(|&v| v as usize == l).unwrap();
            seeds.seeds.push(Seed {
                x: i % w,
                y: i / w,
                object: l % 2 == 0,
            });
        }
        let lab = Raster::filled(w, rows.len(), [0.5; 3]);
        let sal = Raster::filled(w, rows.len(), 0.0);
        Segmentation::from_labels(labels, &seeds, &lab, &sal).unwrap()
    }

    #[test]
    fn recenter_square_takes_center() {
        let seg = seg_from_rows(&["00011", "00011", "00011"]);
        let seeds = recenter_seeds(&seg);
        assert_eq!((seeds.seeds[0].x, seeds.seeds[0].y), (1, 1));
        assert!(seeds.seeds[0].object);
        assert!(!seeds.seeds[1].object);
    }

    #[test]
    fn recenter_l_shape_stays_inside() {
        // Centroid of the L falls outside it, at about (1.2, 1.2).
        let seg = seg_from_rows(&["0111", "0111", "0111", "0000"]);
        let seeds = recenter_seeds(&seg);
        let s = seeds.seeds[0];
        assert_eq!(seg.labels[(s.x, s.y)], 0);
        assert_eq!((s.x, s.y), (0, 2));
    }

    #[test]
    fn recenter_is_idempotent_on_fixed_segmentation() {
        let seg = seg_from_rows(&["0011", "0011", "2233", "2233"]);
        assert_eq!(recenter_seeds(&seg), recenter_seeds(&seg));
    }

    #[test]
    fn region_means_are_exact_for_constant_regions() {
        let labels = Raster::from_vec(7, 1, vec![0, 0, 0, 0, 0, 0, 1]).unwrap();
        let means = region_means(&labels, 2, |i| if i < 6 { 0.1 } else { 0.7 });
        assert_eq!(means, vec![0.1, 0.7]);
    }

    #[test]
    fn params_validation() {
        assert!(SuperpixelParams::default().validate().is_ok());
        let p = SuperpixelParams {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SuperpixelParams {
            iterations: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
