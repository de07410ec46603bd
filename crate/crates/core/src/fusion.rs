//! Saliency integration: cellular-automaton fusion of the enhancement
//! iterations, a final color pass, reintroduction of the deep map and
//! low-saliency suppression.

use crate::config::SessConfig;
use crate::error::{Error, Result};
use crate::raster::{otsu_threshold, LabImage, SaliencyMap};
use crate::saliency::{foreground_score, partition_queries, render_scores, sem_loop, SemConfig};
use crate::superpixel::{oisf, Segmentation};

/// Enhancement iterations stacked along a z-axis, with the Otsu threshold
/// of every layer.
#[derive(Clone, Debug, PartialEq)]
pub struct MapStack {
    layers: Vec<SaliencyMap>,
    thresholds: Vec<f64>,
}

impl MapStack {
    pub fn new(layers: Vec<SaliencyMap>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidRaster("map stack needs at least one layer".into()))?;
        for layer in &layers[1..] {
            first.check_same_size(layer)?;
        }
        let thresholds = layers.iter().map(otsu_threshold).collect();
        Ok(Self { layers, thresholds })
    }

    pub fn layers(&self) -> &[SaliencyMap] {
        &self.layers
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.layers[0].dimensions()
    }
}

/// Settings of the cellular automaton.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaConfig {
    pub lambda: f64,
    pub steps: usize,
    /// Inputs are clamped to `[epsilon, 1 - epsilon]` before taking log-odds.
    pub epsilon: f64,
}

impl Default for CaConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0001,
            steps: 3,
            epsilon: 0.001,
        }
    }
}

impl CaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                message: format!("must be >= 0, got {}", self.lambda),
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                message: format!("must lie in (0, 0.5), got {}", self.epsilon),
            });
        }
        Ok(())
    }
}

pub(crate) fn logit(s: f64, epsilon: f64) -> f64 {
    let s = s.clamp(epsilon, 1.0 - epsilon);
    (s / (1.0 - s)).ln()
}

pub(crate) fn logistic(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

/// Fuses the stack into one map.
///
/// Every pixel of every layer is a cell holding log-odds. A cell's
/// neighbors are the pixel itself and its 4-neighbors in every layer,
/// excluding the cell. Each step, all cells synchronously add `lambda`
/// times the sum of their neighbors' votes, a vote being `+1` when the
/// neighbor's probability reaches its own layer's threshold and `-1`
/// otherwise. The result is the per-pixel mean probability over layers.
pub fn integrate(stack: &MapStack, cfg: &CaConfig) -> Result<SaliencyMap> {
    cfg.validate()?;
    let (w, h) = stack.dimensions();
    let n = w * h;
    let depth = stack.depth();
    let mut state: Vec<f64> = stack
        .layers
        .iter()
        .flat_map(|layer| layer.data().iter().map(|&s| logit(s, cfg.epsilon)))
        .collect();

    let mut votes = vec![0i8; depth * n];
    let mut column = vec![0i64; n];
    for _ in 0..cfg.steps {
        column.fill(0);
        for z in 0..depth {
            let thr = stack.thresholds[z];
            for i in 0..n {
                let v = if logistic(state[z * n + i]) >= thr { 1 } else { -1 };
                votes[z * n + i] = v;
                column[i] += i64::from(v);
            }
        }
        // Every cell at (x, y) sees the same five columns; only its own
        // vote has to be taken out again.
        let mut around = vec![0i64; n];
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let mut sum = column[i];
                if x > 0 {
                    sum += column[i - 1];
                }
                if x + 1 < w {
                    sum += column[i + 1];
                }
                if y > 0 {
                    sum += column[i - w];
                }
                if y + 1 < h {
                    sum += column[i + w];
                }
                around[i] = sum;
            }
        }
        for z in 0..depth {
            for i in 0..n {
                let count = around[i] - i64::from(votes[z * n + i]);
                state[z * n + i] += cfg.lambda * count as f64;
            }
        }
    }

    let mut out = vec![0.0; n];
    for z in 0..depth {
        for (o, &l) in out.iter_mut().zip(&state[z * n..(z + 1) * n]) {
            *o += logistic(l);
        }
    }
    for o in &mut out {
        *o = (*o / depth as f64).clamp(0.0, 1.0);
    }
    SaliencyMap::from_vec(w, h, out)
}

/// Output of [`final_color_pass`].
#[derive(Clone, Debug)]
pub struct ColorPass {
    pub map: SaliencyMap,
    pub segmentation: Segmentation,
}

/// One last foreground-only scoring round guided by the integrated map,
/// using `cfg.superpixels` superpixels.
///
/// When the integrated map yields no foreground or no background queries
/// the map passes through unchanged.
pub fn final_color_pass(lab: &LabImage, integrated: &SaliencyMap, cfg: &SemConfig) -> Result<ColorPass> {
    cfg.validate()?;
    let seg = oisf(
        lab,
        integrated,
        cfg.superpixels,
        cfg.seeds_per_component,
        &cfg.superpixel_params,
    )?;
    let q = partition_queries(&seg, integrated);
    let map = if q.is_degenerate() {
        integrated.clone()
    } else {
        render_scores(&seg, &foreground_score(&seg, &q, cfg.sigma2)?)
    };
    Ok(ColorPass {
        map,
        segmentation: seg,
    })
}

/// Averages `s0` inside every superpixel of `seg`.
pub fn reintroduce_deep(s0: &SaliencyMap, seg: &Segmentation) -> Result<SaliencyMap> {
    let means = seg.mean_per_superpixel(s0)?;
    Ok(seg.render(&means))
}

/// Pixel-wise maximum.
pub fn merge_final(sd: &SaliencyMap, sc: &SaliencyMap) -> Result<SaliencyMap> {
    sd.check_same_size(sc)?;
    let data = sd.data().iter().zip(sc.data()).map(|(a, b)| a.max(*b)).collect();
    SaliencyMap::from_vec(sd.width(), sd.height(), data)
}

/// Zeroes every pixel below half the map's Otsu threshold.
pub fn suppress_low(map: &SaliencyMap) -> SaliencyMap {
    let half = otsu_threshold(map) / 2.0;
    map.map(|&v| if v < half { 0.0 } else { v })
}

/// Every intermediate product of one [`sess_trace`] run.
#[derive(Clone, Debug)]
pub struct SessTrace {
    pub iterations: Vec<SaliencyMap>,
    pub integrated: SaliencyMap,
    pub color: ColorPass,
    /// `None` when deep reintroduction is disabled.
    pub deep: Option<SaliencyMap>,
    pub output: SaliencyMap,
}

/// The full enhancement pipeline, keeping intermediate maps.
pub fn sess_trace(lab: &LabImage, s0: &SaliencyMap, cfg: &SessConfig) -> Result<SessTrace> {
    cfg.validate()?;
    lab.check_same_size(s0)?;
    let sem = cfg.sem();
    let iterations = sem_loop(lab, s0, &sem)?;
    let integrated = integrate(&MapStack::new(iterations.clone())?, &cfg.ca())?;

    let mut final_sem = sem;
    if cfg.keep_reduced_superpixels {
        if let Some(&last) = sem.superpixel_schedule().last() {
            final_sem.superpixels = last;
        }
    }
    let color = final_color_pass(lab, &integrated, &final_sem)?;
    let (deep, merged) = if cfg.no_deep_reintro {
        (None, color.map.clone())
    } else {
        let sd = reintroduce_deep(s0, &color.segmentation)?;
        let merged = merge_final(&sd, &color.map)?;
        (Some(sd), merged)
    };
    Ok(SessTrace {
        iterations,
        integrated,
        color,
        deep,
        output: suppress_low(&merged),
    })
}

/// Enhances the deep saliency map `s0` of the image `lab`.
pub fn sess(lab: &LabImage, s0: &SaliencyMap, cfg: &SessConfig) -> Result<SaliencyMap> {
    Ok(sess_trace(lab, s0, cfg)?.output)
}
