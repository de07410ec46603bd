use super::{BinaryMask, Raster};

/// Exact squared Euclidean distance from every pixel to the nearest `true`
/// pixel of `mask` (`0` on the mask itself, `inf` if the mask is empty).
///
/// Two-pass lower-envelope transform of Felzenszwalb & Huttenlocher.
pub fn squared_distance_to(mask: &BinaryMask) -> Raster<f64> {
    let (w, h) = mask.dimensions();
    let mut out = mask.map(|&b| if b { 0.0 } else { f64::INFINITY });
    let mut line = vec![0.0; w.max(h)];
    let mut scratch = Envelope::new(w.max(h));

    for x in 0..w {
        for y in 0..h {
            line[y] = out[(x, y)];
        }
        scratch.transform(&line[..h]);
        for y in 0..h {
            out[(x, y)] = scratch.result[y];
        }
    }
    for y in 0..h {
        let row = y * w;
        line[..w].copy_from_slice(&out.data()[row..row + w]);
        scratch.transform(&line[..w]);
        out.data_mut()[row..row + w].copy_from_slice(&scratch.result[..w]);
    }
    out
}

struct Envelope {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
    result: Vec<f64>,
}

impl Envelope {
    fn new(n: usize) -> Self {
        Self {
            vertices: vec![0; n],
            bounds: vec![0.0; n + 1],
            result: vec![0.0; n],
        }
    }

    /// 1-D squared distance transform of the sampled function `f`.
    fn transform(&mut self, f: &[f64]) {
        let n = f.len();
        let finite: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
        if finite.is_empty() {
            self.result[..n].fill(f64::INFINITY);
            return;
        }
        let intersect = |p: usize, q: usize| {
            ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
        };

        let mut k = 0;
        self.vertices[0] = finite[0];
        self.bounds[0] = f64::NEG_INFINITY;
        self.bounds[1] = f64::INFINITY;
        for &q in &finite[1..] {
            let mut s = intersect(self.vertices[k], q);
            while s <= self.bounds[k] {
                k -= 1;
                s = intersect(self.vertices[k], q);
            }
            k += 1;
            self.vertices[k] = q;
            self.bounds[k] = s;
            self.bounds[k + 1] = f64::INFINITY;
        }

        k = 0;
        for q in 0..n {
            while self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let v = self.vertices[k];
            let d = q as f64 - v as f64;
            self.result[q] = d * d + f[v];
        }
    }
}
