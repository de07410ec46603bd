//! Slow, literal reimplementations used to cross-check the library.

use num_bigint::BigInt;
use num_rational::BigRational;
use sess::fusion::CaConfig;
use sess::raster::{BinaryMask, LabImage, Raster, SaliencyMap};
use sess::superpixel::{SeedSet, SuperpixelParams};

/// Otsu level by exhaustive search over exact between-class variances
/// `w0 * w1 * (mu0 - mu1)^2`, class 0 being the bins below the level.
pub fn otsu_level(hist: &[u64; 256]) -> usize {
    let occupied: Vec<usize> = (0..256).filter(|&k| hist[k] > 0).collect();
    if occupied.len() <= 1 {
        return occupied.first().copied().unwrap_or(0);
    }
    let int = |v: u64| BigRational::from_integer(BigInt::from(v));
    let total: u64 = hist.iter().sum();
    let mut best: Option<(BigRational, usize)> = None;
    for level in 1..256 {
        let n0: u64 = hist[..level].iter().sum();
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s0: u64 = (0..level).map(|k| k as u64 * hist[k]).sum();
        let s1: u64 = (level..256).map(|k| k as u64 * hist[k]).sum();
        let w0 = int(n0) / int(total);
        let w1 = int(n1) / int(total);
        let mu0 = int(s0) / int(n0);
        let mu1 = int(s1) / int(n1);
        let diff = mu0 - mu1;
        let var = w0 * w1 * diff.clone() * diff;
        if best.as_ref().is_none_or(|(b, _)| var > *b) {
            best = Some((var, level));
        }
    }
    best.expect("two occupied bins give a valid split").1
}

/// Image foresting transform by a quadratic scan: repeatedly settle the
/// unsettled pixel with the lowest `(cost, stamp)`, where the stamp is the
/// time of its last improvement.
pub fn ift(
    lab: &LabImage,
    sal: &SaliencyMap,
    seeds: &SeedSet,
    params: &SuperpixelParams,
) -> (Vec<u32>, Vec<f64>) {
    let (w, h) = lab.dimensions();
    let n = w * h;
    let mut cost = vec![f64::INFINITY; n];
    let mut label = vec![u32::MAX; n];
    let mut stamp = vec![u64::MAX; n];
    let mut settled = vec![false; n];
    let mut clock = 0u64;
    let mut root = Vec::new();
    for (i, s) in seeds.seeds.iter().enumerate() {
        let p = s.y * w + s.x;
        cost[p] = 0.0;
        label[p] = i as u32;
        stamp[p] = clock;
        clock += 1;
        root.push((lab.data()[p], sal.data()[p]));
    }
    loop {
        let mut pick: Option<usize> = None;
        for p in 0..n {
            if settled[p] || cost[p].is_infinite() {
                continue;
            }
            pick = match pick {
                Some(q) if (cost[q], stamp[q]) <= (cost[p], stamp[p]) => Some(q),
                _ => Some(p),
            };
        }
        let Some(p) = pick else { break };
        settled[p] = true;
        let (x, y) = ((p % w) as i64, (p / w) as i64);
        let (mu, s_root) = root[label[p] as usize];
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let q = (ny as usize) * w + nx as usize;
                if settled[q] {
                    continue;
                }
                let c = lab.data()[q];
                let color = ((c[0] - mu[0]).powi(2) + (c[1] - mu[1]).powi(2) + (c[2] - mu[2]).powi(2)).sqrt();
                let d = color * (1.0 + params.gamma * (sal.data()[q] - s_root).abs());
                let step = if dx != 0 && dy != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
                let candidate = cost[p] + ((params.alpha * d).powf(params.beta) + step);
                if candidate < cost[q] {
                    cost[q] = candidate;
                    label[q] = label[p];
                    stamp[q] = clock;
                    clock += 1;
                }
            }
        }
    }
    (label, cost)
}

fn similarity(a: [f64; 3], b: [f64; 3], sigma2: f64) -> f64 {
    let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d.sqrt() / sigma2).exp()
}

/// Foreground score of every superpixel: best similarity to a foreground
/// query, queries lowered to the best non-query value.
pub fn foreground_score(colors: &[[f64; 3]], fg: &[bool], sigma2: f64) -> Vec<f64> {
    let k = colors.len();
    let raw: Vec<f64> = (0..k)
        .map(|s| {
            let mut best = 0.0f64;
            for r in 0..k {
                if fg[r] {
                    best = best.max(similarity(colors[s], colors[r], sigma2));
                }
            }
            best
        })
        .collect();
    let mut lowered = 0.0f64;
    let mut any_outside = false;
    for s in 0..k {
        if !fg[s] {
            lowered = lowered.max(raw[s]);
            any_outside = true;
        }
    }
    if !any_outside {
        return vec![1.0; k];
    }
    (0..k).map(|s| if fg[s] { lowered } else { raw[s] }).collect()
}

/// Background score: `1 - sum of similarities to the other background
/// queries / |Q_B|`.
pub fn background_score(colors: &[[f64; 3]], fg: &[bool], sigma2: f64) -> Vec<f64> {
    let k = colors.len();
    let size = fg.iter().filter(|&&f| !f).count() as f64;
    (0..k)
        .map(|s| {
            let mut total = 0.0;
            for r in 0..k {
                if !fg[r] && r != s {
                    total += similarity(colors[s], colors[r], sigma2);
                }
            }
            1.0 - total / size
        })
        .collect()
}

fn logistic(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

/// Cell-by-cell simulation of the fusion automaton.
pub fn automaton(layers: &[SaliencyMap], thresholds: &[f64], cfg: &CaConfig) -> SaliencyMap {
    let (w, h) = layers[0].dimensions();
    let depth = layers.len();
    let mut l: Vec<Vec<Vec<f64>>> = layers
        .iter()
        .map(|layer| {
            (0..h)
                .map(|y| {
                    (0..w)
                        .map(|x| {
                            let s = layer[(x, y)].clamp(cfg.epsilon, 1.0 - cfg.epsilon);
                            (s / (1.0 - s)).ln()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let offsets: [(i64, i64); 5] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)];
    for _ in 0..cfg.steps {
        let previous = l.clone();
        for z in 0..depth {
            for y in 0..h {
                for x in 0..w {
                    let mut votes = 0i64;
                    for (zq, layer) in previous.iter().enumerate() {
                        for &(dx, dy) in &offsets {
                            let (qx, qy) = (x as i64 + dx, y as i64 + dy);
                            if qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
                                continue;
                            }
                            if zq == z && dx == 0 && dy == 0 {
                                continue;
                            }
                            let p = logistic(layer[qy as usize][qx as usize]);
                            votes += if p >= thresholds[zq] { 1 } else { -1 };
                        }
                    }
                    l[z][y][x] = previous[z][y][x] + cfg.lambda * votes as f64;
                }
            }
        }
    }
    Raster::from_fn(w, h, |x, y| {
        let mut sum = 0.0;
        for layer in &l {
            sum += logistic(layer[y][x]);
        }
        (sum / depth as f64).clamp(0.0, 1.0)
    })
}

fn truth(g: bool) -> f64 {
    if g {
        1.0
    } else {
        0.0
    }
}

/// `(precision, recall)` of `s >= t / 255` for each `t`, by direct counting.
pub fn pr_curve(s: &SaliencyMap, g: &BinaryMask) -> Vec<(f64, f64)> {
    (0..256)
        .map(|t| {
            let tau = t as f64 / 255.0;
            let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
            for (&v, &gt) in s.data().iter().zip(g.data()) {
                match (v >= tau, gt) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fneg += 1,
                    (false, false) => {}
                }
            }
            let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
            (precision, tp as f64 / (tp + fneg) as f64)
        })
        .collect()
}

/// Weighted F-measure with a direct 2-D Gaussian window and brute-force
/// distances.
pub fn weighted_f(s: &SaliencyMap, g: &BinaryMask) -> f64 {
    let (w, h) = s.dimensions();
    let e = |x: usize, y: usize| (s[(x, y)] - truth(g[(x, y)])).abs();
    let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
    for y in 0..h {
        for x in 0..w {
            if g[(x, y)] {
                let (mut acc, mut norm) = (0.0, 0.0);
                for qy in y.saturating_sub(20)..(y + 21).min(h) {
                    for qx in x.saturating_sub(20)..(x + 21).min(w) {
                        let d2 = (qx as f64 - x as f64).powi(2) + (qy as f64 - y as f64).powi(2);
                        let k = (-d2 / 50.0).exp();
                        acc += k * e(qx, qy);
                        norm += k;
                    }
                }
                let err = e(x, y).min(acc / norm);
                tp += 1.0 - err;
                fneg += err;
            } else {
                let mut nearest = f64::INFINITY;
                for qy in 0..h {
                    for qx in 0..w {
                        if g[(qx, qy)] {
                            let d = ((qx as f64 - x as f64).powi(2) + (qy as f64 - y as f64).powi(2)).sqrt();
                            nearest = nearest.min(d);
                        }
                    }
                }
                fp += e(x, y) * (2.0 - (0.5f64.ln() / 5.0 * nearest).exp());
            }
        }
    }
    let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let r = tp / (tp + fneg);
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// E-measure evaluated pixel by pixel at every threshold.
pub fn e_measure(s: &SaliencyMap, g: &BinaryMask) -> f64 {
    let n = s.len() as f64;
    let gm = g.data().iter().map(|&b| truth(b)).sum::<f64>() / n;
    let all_bg = g.data().iter().all(|&b| !b);
    let all_fg = g.data().iter().all(|&b| b);
    let mut total = 0.0;
    for t in 0..256 {
        let tau = t as f64 / 255.0;
        let b: Vec<f64> = s.data().iter().map(|&v| truth(v >= tau)).collect();
        let bm = b.iter().sum::<f64>() / n;
        let mut sum = 0.0;
        for (i, &bv) in b.iter().enumerate() {
            let value = if all_bg {
                1.0 - bv
            } else if all_fg {
                bv
            } else {
                let pg = truth(g.data()[i]) - gm;
                let pb = bv - bm;
                let xi = 2.0 * pg * pb / (pg * pg + pb * pb);
                (xi + 1.0) * (xi + 1.0) / 4.0
            };
            sum += value;
        }
        total += sum / n;
    }
    total / 256.0
}
