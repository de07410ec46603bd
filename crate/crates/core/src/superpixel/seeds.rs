use super::{Seed, SeedSet};
use crate::error::{Error, Result};
use crate::raster::{connected_components, otsu_threshold, squared_distance_to, Raster, SaliencyMap};

/// Samples `n` seeds guided by a saliency map.
///
/// The object mask is `sal >= otsu(sal)` restricted to nonzero saliency, so
/// an all-zero map has no object. With `n_c` 8-connected object components,
/// `n_s * n_c` object seeds are requested, clamped to `[n_c, n - 1]` so at
/// least one background seed always exists. Object seeds are shared among
/// components proportionally to area (at least one each while enough seeds
/// remain); the background gets the rest.
///
/// Inside each region seeds sit on a regular grid of stride
/// `sqrt(area / count)`, keeping grid cells whose center pixel lies in the
/// region. Excess grid points are thinned evenly; a shortfall is filled by
/// farthest-point sampling. Everything is deterministic.
pub fn sample_seeds(sal: &SaliencyMap, n: usize, n_s: usize) -> Result<SeedSet> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "superpixels",
            message: format!("need at least 2 seeds, got {n}"),
        });
    }
    if n_s == 0 {
        return Err(Error::InvalidParameter {
            name: "seeds_per_component",
            message: "must be at least 1".into(),
        });
    }
    if n > sal.len() {
        return Err(Error::SeedCount {
            requested: n,
            available: sal.len(),
        });
    }

    let psi = otsu_threshold(sal);
    let mask = sal.map(|&v| v >= psi && v > 0.0);
    let components = connected_components(&mask);
    let members = components.members();
    let n_c = components.count;
    let object_area = members.iter().map(Vec::len).sum::<usize>();
    let n_os = if n_c == 0 {
        0
    } else {
        (n_s.saturating_mul(n_c)).max(n_c).min(n - 1).min(object_area)
    };

    let areas: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = allocate(n_os, &areas);

    let (w, h) = sal.dimensions();
    let mut taken = Raster::filled(w, h, false);
    let mut seeds = Vec::with_capacity(n);
    for (region, &quota) in members.iter().zip(&quotas) {
        for p in place_in_region(region, quota, &mut taken) {
            seeds.push(Seed {
                x: p % w,
                y: p / w,
                object: true,
            });
        }
    }

    let background: Vec<usize> = (0..sal.len()).filter(|&i| !mask.data()[i]).collect();
    let mut placed = place_in_region(&background, n - seeds.len(), &mut taken);
    if seeds.len() + placed.len() < n {
        // Background too small (e.g. the object covers the image): the rest
        // goes anywhere still free, flagged as background.
        let free: Vec<usize> = (0..sal.len()).filter(|&i| !taken.data()[i]).collect();
        placed.extend(place_in_region(&free, n - seeds.len() - placed.len(), &mut taken));
    }
    seeds.extend(placed.into_iter().map(|p| Seed {
        x: p % w,
        y: p / w,
        object: false,
    }));
    debug_assert_eq!(seeds.len(), n);
    Ok(SeedSet { seeds })
}

/// Splits `total` seeds over regions: one each (largest first when short),
/// the remainder proportionally to area by largest remainder, never more
/// than a region's area.
fn allocate(total: usize, areas: &[usize]) -> Vec<usize> {
    let k = areas.len();
    let mut quota = vec![0usize; k];
    if total == 0 || k == 0 {
        return quota;
    }
    let mut by_size: Vec<usize> = (0..k).collect();
    by_size.sort_by(|&a, &b| areas[b].cmp(&areas[a]).then(a.cmp(&b)));
    if total <= k {
        for &i in &by_size[..total] {
            quota[i] = 1;
        }
        return quota;
    }

    quota.fill(1);
    let rest = (total - k) as u128;
    let sum: u128 = areas.iter().map(|&a| a as u128).sum();
    let mut remainders = Vec::with_capacity(k);
    let mut assigned = 0usize;
    for i in 0..k {
        let share = rest * areas[i] as u128;
        quota[i] += (share / sum) as usize;
        assigned += (share / sum) as usize;
        remainders.push((share % sum, i));
    }
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(rest as usize - assigned) {
        quota[i] += 1;
    }

    // Cap at region area and hand the excess to regions with room.
    let mut excess = 0;
    for i in 0..k {
        if quota[i] > areas[i] {
            excess += quota[i] - areas[i];
            quota[i] = areas[i];
        }
    }
    for &i in &by_size {
        if excess == 0 {
            break;
        }
        let extra = (areas[i] - quota[i]).min(excess);
        quota[i] += extra;
        excess -= extra;
    }
    quota
}

/// Chooses `count` distinct pixels of `region` (raster-ordered indices) not
/// yet in `taken`, marks and returns them.
fn place_in_region(region: &[usize], count: usize, taken: &mut Raster<bool>) -> Vec<usize> {
    let w = taken.width();
    let available: Vec<usize> = region
        .iter()
        .copied()
        .filter(|&p| !taken.data()[p])
        .collect();
    if count == 0 || available.is_empty() {
        return Vec::new();
    }
    if count >= available.len() {
        for &p in &available {
            taken.data_mut()[p] = true;
        }
        return available;
    }

    let mut in_region = vec![false; taken.len()];
    for &p in &available {
        in_region[p] = true;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for &p in &available {
        let (x, y) = (p % w, p / w);
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }

    let stride = (available.len() as f64 / count as f64).sqrt();
    let mut grid = Vec::new();
    let mut gy = 0usize;
    loop {
        let cy = y0 as f64 + (gy as f64 + 0.5) * stride;
        if cy >= (y1 + 1) as f64 {
            break;
        }
        let mut gx = 0usize;
        loop {
            let cx = x0 as f64 + (gx as f64 + 0.5) * stride;
            if cx >= (x1 + 1) as f64 {
                break;
            }
            let p = cy as usize * w + cx as usize;
            if in_region[p] {
                grid.push(p);
            }
            gx += 1;
        }
        gy += 1;
    }

    let mut chosen: Vec<usize> = if grid.len() > count {
        (0..count).map(|i| grid[i * grid.len() / count]).collect()
    } else {
        grid
    };
    if chosen.len() < count {
        farthest_point_fill(&available, &mut chosen, count, taken.dimensions());
    }
    for &p in &chosen {
        taken.data_mut()[p] = true;
    }
    chosen
}

/// Adds region pixels one at a time, each maximizing the distance to the
/// pixels chosen so far (ties: raster order), until `count` are chosen.
fn farthest_point_fill(
    region: &[usize],
    chosen: &mut Vec<usize>,
    count: usize,
    (w, h): (usize, usize),
) {
    let mut dist: Vec<f64> = if chosen.is_empty() {
        vec![f64::INFINITY; region.len()]
    } else {
        let mut marks = Raster::filled(w, h, false);
        for &p in chosen.iter() {
            marks.data_mut()[p] = true;
        }
        let d = squared_distance_to(&marks);
        region.iter().map(|&p| d.data()[p]).collect()
    };
    while chosen.len() < count {
        let mut best = 0;
        for i in 1..region.len() {
            if dist[i] > dist[best] {
                best = i;
            }
        }
        let p = region[best];
        chosen.push(p);
        let (px, py) = ((p % w) as f64, (p / w) as f64);
        for (d, &q) in dist.iter_mut().zip(region) {
            let dx = (q % w) as f64 - px;
            let dy = (q / w) as f64 - py;
            *d = d.min(dx * dx + dy * dy);
        }
    }
}
