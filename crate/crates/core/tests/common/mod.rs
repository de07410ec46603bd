//! Shared fixtures for the integration tests: synthetic scenes and
//! independent reference implementations.
#![allow(dead_code)]

pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sess::raster::{BinaryMask, Raster, RgbImage, SaliencyMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn disk(cx: f64, cy: f64, r: f64) -> impl Fn(usize, usize) -> bool {
    move |x, y| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r
}

pub const BACKGROUND: [u8; 3] = [196, 204, 178];
pub const OBJECT: [u8; 3] = [190, 44, 48];
pub const SPURIOUS: [u8; 3] = [40, 120, 200];

/// A synthetic scene: an image, the input saliency map and a ground truth.
pub struct Scene {
    pub image: RgbImage,
    pub s0: SaliencyMap,
    pub gt: BinaryMask,
}

/// Two disks of one color on a plain background; only the smaller disk
/// (`a`) is salient in the input map.
pub fn two_disks() -> (Scene, BinaryMask, BinaryMask) {
    let a = disk(70.0, 128.0, 30.0);
    let b = disk(178.0, 128.0, 45.0);
    let image = Raster::from_fn(256, 256, |x, y| if a(x, y) || b(x, y) { OBJECT } else { BACKGROUND });
    let s0 = Raster::from_fn(256, 256, |x, y| if a(x, y) { 1.0 } else { 0.0 });
    let gt = Raster::from_fn(256, 256, |x, y| a(x, y) || b(x, y));
    let mask_a = Raster::from_fn(256, 256, &a);
    let mask_b = Raster::from_fn(256, 256, &b);
    (Scene { image, s0, gt }, mask_a, mask_b)
}

/// [`two_disks`] plus a small disk of a unique color that the input map
/// wrongly marks with saliency 0.3. Returns the scene and the blob mask.
pub fn two_disks_with_blob() -> (Scene, BinaryMask) {
    let (mut scene, ..) = two_disks();
    let blob = disk(128.0, 36.0, 14.0);
    for y in 0..256 {
        for x in 0..256 {
            if blob(x, y) {
                scene.image[(x, y)] = SPURIOUS;
                scene.s0[(x, y)] = 0.3;
            }
        }
    }
    (scene, Raster::from_fn(256, 256, blob))
}

/// One disk whose input saliency covers only its left half.
pub fn half_disk() -> (Scene, BinaryMask) {
    let d = disk(128.0, 128.0, 60.0);
    let image = Raster::from_fn(256, 256, |x, y| if d(x, y) { OBJECT } else { BACKGROUND });
    let s0 = Raster::from_fn(256, 256, |x, y| if d(x, y) && x < 128 { 1.0 } else { 0.0 });
    let gt = Raster::from_fn(256, 256, &d);
    let mask = gt.clone();
    (Scene { image, s0, gt }, mask)
}

/// A disk with a thin bar of the same color sticking out of it. The input
/// map covers the disk but misses the bar. Returns the scene and the bar
/// mask.
pub fn disk_with_thin_bar() -> (Scene, BinaryMask) {
    let d = disk(80.0, 128.0, 40.0);
    let bar = |x: usize, y: usize| (118..240).contains(&x) && (127..130).contains(&y);
    let image = Raster::from_fn(256, 256, |x, y| if d(x, y) || bar(x, y) { OBJECT } else { BACKGROUND });
    let s0 = Raster::from_fn(256, 256, |x, y| if d(x, y) { 1.0 } else { 0.0 });
    let gt = Raster::from_fn(256, 256, |x, y| d(x, y) || bar(x, y));
    let bar_mask = Raster::from_fn(256, 256, |x, y| bar(x, y) && !d(x, y));
    (Scene { image, s0, gt }, bar_mask)
}

/// A procedurally textured color image with a smooth saliency map: smooth
/// color fields, a few shapes and pixel noise.
pub fn textured(seed: u64, w: usize, h: usize) -> (RgbImage, SaliencyMap) {
    let mut rng = rng(seed);
    let waves: Vec<[f64; 4]> = (0..9)
        .map(|_| {
            [
                rng.gen_range(0.01..0.12),
                rng.gen_range(0.01..0.12),
                rng.gen_range(0.0..6.3),
                rng.gen_range(20.0..60.0),
            ]
        })
        .collect();
    let shapes: Vec<(f64, f64, f64, [f64; 3])> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.0..w as f64),
                rng.gen_range(0.0..h as f64),
                rng.gen_range(8.0..(w.min(h) as f64 / 3.0)),
                [rng.gen_range(0.0..255.0), rng.gen_range(0.0..255.0), rng.gen_range(0.0..255.0)],
            )
        })
        .collect();
    let mut noise = || rng.gen_range(-12.0..12.0);
    let image = Raster::from_fn(w, h, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let mut px = [0u8; 3];
        for (c, out) in px.iter_mut().enumerate() {
            let mut v = 128.0;
            for wave in &waves[c * 3..c * 3 + 3] {
                v += wave[3] * (wave[0] * xf + wave[1] * yf + wave[2]).sin();
            }
            for &(cx, cy, r, color) in &shapes {
                if (xf - cx).powi(2) + (yf - cy).powi(2) <= r * r {
                    v = 0.3 * v + 0.7 * color[c];
                }
            }
            *out = (v + noise()).clamp(0.0, 255.0) as u8;
        }
        px
    });
    let (cx, cy, r, _) = shapes[0];
    let s0 = Raster::from_fn(w, h, |x, y| {
        let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
        (-(d2 / (r * r))).exp().clamp(0.0, 1.0)
    });
    (image, s0)
}

/// Mean of `map` over the pixels of `mask`.
pub fn mean_over(map: &SaliencyMap, mask: &BinaryMask) -> f64 {
    let (sum, n) = map
        .data()
        .iter()
        .zip(mask.data())
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, n), (&v, _)| (s + v, n + 1));
    sum / n as f64
}

/// Fraction of `mask` pixels where `map >= threshold`.
pub fn coverage(map: &SaliencyMap, mask: &BinaryMask, threshold: f64) -> f64 {
    let (hit, n) = map
        .data()
        .iter()
        .zip(mask.data())
        .filter(|(_, &m)| m)
        .fold((0usize, 0usize), |(h, n), (&v, _)| (h + usize::from(v >= threshold), n + 1));
    hit as f64 / n as f64
}
