use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{SeedSet, Segmentation, SuperpixelParams};
use crate::error::{Error, Result};
use crate::raster::{offset, LabImage, Raster, SaliencyMap, NEIGHBORS_8};

/// Optimum-path forest: root label and path cost of every pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    pub labels: Raster<u32>,
    pub costs: Raster<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    cost: f64,
    order: u64,
    pixel: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed: BinaryHeap is a max-heap and we pop the cheapest, oldest entry.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Grows the spanning forest from `seeds`.
///
/// Path cost is additive: extending a path ending at `s` (rooted at seed
/// `r`) to neighbor `t` adds `(alpha * D(t, r))^beta + |t - s|`, where
/// `D(t, r) = |lab(t) - mu_r| * (1 + gamma * |sal(t) - sal(r)|)` and `mu_r`
/// is `mean_colors[r]`, or the seed pixel's color when absent. Equal costs
/// leave the queue first-in first-out, so the result is deterministic.
pub fn ift_forest(
    lab: &LabImage,
    sal: &SaliencyMap,
    seeds: &SeedSet,
    mean_colors: Option<&[[f64; 3]]>,
    params: &SuperpixelParams,
) -> Result<Forest> {
    params.validate()?;
    lab.check_same_size(sal)?;
    if seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "seeds",
            message: "at least one seed is required".into(),
        });
    }
    if let Some(m) = mean_colors {
        if m.len() != seeds.len() {
            return Err(Error::InvalidParameter {
                name: "mean_colors",
                message: format!("{} colors for {} seeds", m.len(), seeds.len()),
            });
        }
    }

    let (w, h) = lab.dimensions();
    let n = w * h;
    let mut cost = vec![f64::INFINITY; n];
    let mut label = vec![u32::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(n);
    let mut order = 0u64;

    let mut root_color = Vec::with_capacity(seeds.len());
    let mut root_sal = Vec::with_capacity(seeds.len());
    for (i, s) in seeds.seeds.iter().enumerate() {
        if s.x >= w || s.y >= h {
            return Err(Error::InvalidParameter {
                name: "seeds",
                message: format!("seed ({}, {}) outside {w}x{h} image", s.x, s.y),
            });
        }
        let p = s.y * w + s.x;
        if label[p] != u32::MAX {
            return Err(Error::InvalidParameter {
                name: "seeds",
                message: format!("duplicate seed at ({}, {})", s.x, s.y),
            });
        }
        cost[p] = 0.0;
        label[p] = i as u32;
        root_color.push(mean_colors.map_or(lab.data()[p], |m| m[i]));
        root_sal.push(sal.data()[p]);
        heap.push(Entry {
            cost: 0.0,
            order,
            pixel: p as u32,
        });
        order += 1;
    }

    let labd = lab.data();
    let sald = sal.data();
    while let Some(Entry { pixel, .. }) = heap.pop() {
        let p = pixel as usize;
        if done[p] {
            continue;
        }
        done[p] = true;
        let r = label[p] as usize;
        let (x, y) = (p % w, p / w);
        for &d in &NEIGHBORS_8 {
            let Some((nx, ny)) = offset(x, y, d, w, h) else {
                continue;
            };
            let q = ny * w + nx;
            if done[q] {
                continue;
            }
            let c = cost[p] + arc_weight(labd[q], sald[q], root_color[r], root_sal[r], d, params);
            if c < cost[q] {
                cost[q] = c;
                label[q] = r as u32;
                heap.push(Entry {
                    cost: c,
                    order,
                    pixel: q as u32,
                });
                order += 1;
            }
        }
    }

    Ok(Forest {
        labels: Raster::from_vec(w, h, label)?,
        costs: Raster::from_vec(w, h, cost)?,
    })
}

#[inline]
fn arc_weight(
    color: [f64; 3],
    saliency: f64,
    root_color: [f64; 3],
    root_saliency: f64,
    (dx, dy): (isize, isize),
    params: &SuperpixelParams,
) -> f64 {
    let dc = ((color[0] - root_color[0]).powi(2)
        + (color[1] - root_color[1]).powi(2)
        + (color[2] - root_color[2]).powi(2))
    .sqrt();
    let dist = dc * (1.0 + params.gamma * (saliency - root_saliency).abs());
    let step = if dx != 0 && dy != 0 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    };
    (params.alpha * dist).powf(params.beta) + step
}

/// [`ift_forest`] followed by per-superpixel statistics over `lab` and `sal`.
pub fn ift_segment(
    lab: &LabImage,
    sal: &SaliencyMap,
    seeds: &SeedSet,
    mean_colors: Option<&[[f64; 3]]>,
    params: &SuperpixelParams,
) -> Result<Segmentation> {
    let forest = ift_forest(lab, sal, seeds, mean_colors, params)?;
    Segmentation::from_labels(forest.labels, seeds, lab, sal)
}
