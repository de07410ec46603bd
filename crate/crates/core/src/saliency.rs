//! Superpixel-similarity saliency estimation.
//!
//! One enhancement iteration segments the image guided by the previous map,
//! splits superpixels into foreground and background queries at the
//! previous map's Otsu threshold, and scores every superpixel by its color
//! similarity to both query sets.

use crate::error::{Error, Result};
use crate::raster::{otsu_threshold, LabImage, SaliencyMap};
use crate::superpixel::{oisf, Segmentation, SuperpixelParams};

/// Foreground (`Q_F`) and background (`Q_B`) query superpixels.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryPartition {
    pub foreground: Vec<usize>,
    pub background: Vec<usize>,
    /// Otsu threshold of the map the queries came from.
    pub psi: f64,
    in_foreground: Vec<bool>,
}

impl QueryPartition {
    pub fn is_foreground(&self, superpixel: usize) -> bool {
        self.in_foreground[superpixel]
    }

    /// True when one of the query sets is empty.
    pub fn is_degenerate(&self) -> bool {
        self.foreground.is_empty() || self.background.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    Foreground,
    Background,
    Combined,
    Color,
    Deep,
}

/// One score per superpixel.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub kind: ScoreKind,
}

/// Settings of the enhancement loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemConfig {
    /// Number of enhancement iterations.
    pub iterations: usize,
    /// Superpixel count of the first iteration.
    pub superpixels: usize,
    /// Object seeds requested per salient component.
    pub seeds_per_component: usize,
    /// Dispersion of the color similarity.
    pub sigma2: f64,
    pub superpixel_params: SuperpixelParams,
    /// Per-iteration superpixel count multiplier.
    pub decay: f64,
    /// The count never decays below this.
    pub floor: usize,
}

impl Default for SemConfig {
    fn default() -> Self {
        Self {
            iterations: 12,
            superpixels: 2500,
            seeds_per_component: 10,
            sigma2: 0.01,
            superpixel_params: SuperpixelParams::default(),
            decay: 0.8,
            floor: 200,
        }
    }
}

impl SemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, message: &str| {
            Err(Error::InvalidParameter {
                name,
                message: message.to_string(),
            })
        };
        if self.iterations == 0 {
            return bad("iterations", "must be at least 1");
        }
        if self.superpixels < 2 {
            return bad("superpixels", "must be at least 2");
        }
        if self.seeds_per_component == 0 {
            return bad("seeds_per_component", "must be at least 1");
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2", "must be positive");
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return bad("decay", "must be in (0, 1]");
        }
        if self.floor == 0 {
            return bad("floor", "must be at least 1");
        }
        self.superpixel_params.validate()
    }

    /// Superpixel count used at each iteration.
    ///
    /// Each step keeps `round(decay * n)` but never drops below `floor`; a
    /// count that starts below the floor stays where it is.
    pub fn superpixel_schedule(&self) -> Vec<usize> {
        let mut n = self.superpixels;
        let mut counts = Vec::with_capacity(self.iterations);
        for _ in 0..self.iterations {
            counts.push(n);
            let decayed = (self.decay * n as f64).round() as usize;
            n = decayed.max(self.floor.min(n));
        }
        counts
    }
}

/// Splits superpixels at `psi = otsu(prev)`: `S` is a foreground query iff
/// its mean saliency is `>= psi`.
pub fn partition_queries(seg: &Segmentation, prev: &SaliencyMap) -> QueryPartition {
    let psi = otsu_threshold(prev);
    let in_foreground: Vec<bool> = seg.records.iter().map(|r| r.mean_saliency >= psi).collect();
    let (foreground, background) = (0..seg.len()).partition(|&i| in_foreground[i]);
    QueryPartition {
        foreground,
        background,
        psi,
        in_foreground,
    }
}

/// `exp(-|a - b| / sigma2)` with the plain (unsquared) Euclidean distance.
#[inline]
pub fn similarity(a: [f64; 3], b: [f64; 3], sigma2: f64) -> f64 {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    (-d / sigma2).exp()
}

/// Foreground score: similarity to the most similar foreground query.
///
/// Queries themselves would all score 1, so they are lowered to the best
/// score among non-queries. With no non-query at all every score is 1.
pub fn foreground_score(seg: &Segmentation, q: &QueryPartition, sigma2: f64) -> Result<ScoreVector> {
    if q.foreground.is_empty() {
        return Err(Error::EmptyQueries("foreground"));
    }
    let kind = ScoreKind::Foreground;
    if q.background.is_empty() {
        return Ok(ScoreVector {
            values: vec![1.0; seg.len()],
            kind,
        });
    }
    let mut values = vec![0.0; seg.len()];
    let mut best_outside = 0.0f64;
    for &s in &q.background {
        let color = seg.records[s].mean_color;
        let best = q
            .foreground
            .iter()
            .map(|&r| similarity(color, seg.records[r].mean_color, sigma2))
            .fold(0.0, f64::max);
        values[s] = best;
        best_outside = best_outside.max(best);
    }
    for &s in &q.foreground {
        values[s] = best_outside;
    }
    Ok(ScoreVector { values, kind })
}

/// Background score: one minus the summed similarity to the other
/// background queries, divided by the full `|Q_B|`.
pub fn background_score(seg: &Segmentation, q: &QueryPartition, sigma2: f64) -> Result<ScoreVector> {
    if q.background.is_empty() {
        return Err(Error::EmptyQueries("background"));
    }
    let size = q.background.len() as f64;
    let values = (0..seg.len())
        .map(|s| {
            let color = seg.records[s].mean_color;
            let total: f64 = q
                .background
                .iter()
                .filter(|&&r| r != s)
                .map(|&r| similarity(color, seg.records[r].mean_color, sigma2))
                .sum();
            (1.0 - total / size).clamp(0.0, 1.0)
        })
        .collect();
    Ok(ScoreVector {
        values,
        kind: ScoreKind::Background,
    })
}

/// Pixel-weighted mean squared deviation of `scores` from 0.5.
pub fn distance_to_half(scores: &ScoreVector, seg: &Segmentation) -> f64 {
    let total: usize = seg.records.iter().map(|r| r.pixel_count).sum();
    let weighted: f64 = scores
        .values
        .iter()
        .zip(&seg.records)
        .map(|(&v, r)| (v - 0.5).powi(2) * r.pixel_count as f64)
        .sum();
    weighted / total as f64
}

/// Threshold on [`distance_to_half`] below which the background score is
/// considered uninformative.
pub const GUARD_THRESHOLD: f64 = 0.1;

/// Replaces an uninformative background score by the previous map's mean
/// per superpixel.
pub fn background_guard(
    sb: ScoreVector,
    seg: &Segmentation,
    prev: &SaliencyMap,
) -> Result<ScoreVector> {
    if distance_to_half(&sb, seg) < GUARD_THRESHOLD {
        Ok(ScoreVector {
            values: seg.mean_per_superpixel(prev)?,
            kind: ScoreKind::Background,
        })
    } else {
        Ok(sb)
    }
}

/// Per-superpixel product.
pub fn combine_scores(sf: &ScoreVector, sb: &ScoreVector) -> ScoreVector {
    assert_eq!(sf.values.len(), sb.values.len(), "score vectors differ in length");
    ScoreVector {
        values: sf.values.iter().zip(&sb.values).map(|(a, b)| a * b).collect(),
        kind: ScoreKind::Combined,
    }
}

/// Paints scores onto pixels and min-max normalizes the result.
pub fn render_scores(seg: &Segmentation, scores: &ScoreVector) -> SaliencyMap {
    seg.render(&scores.values).normalized()
}

/// Runs the enhancement loop and returns one map per iteration.
///
/// Iteration `k` segments with the `k`-th count of
/// [`SemConfig::superpixel_schedule`] guided by the previous map (`s0`
/// first). When either query set is empty the previous map passes through
/// unchanged.
pub fn sem_loop(lab: &LabImage, s0: &SaliencyMap, cfg: &SemConfig) -> Result<Vec<SaliencyMap>> {
    cfg.validate()?;
    lab.check_same_size(s0)?;
    let mut prev = s0.clone();
    let mut maps = Vec::with_capacity(cfg.iterations);
    for (k, n) in cfg.superpixel_schedule().into_iter().enumerate() {
        let seg = oisf(lab, &prev, n, cfg.seeds_per_component, &cfg.superpixel_params)?;
        let map = enhance_once(&seg, &prev, cfg.sigma2)?.unwrap_or_else(|| prev.clone());
        log::debug!("enhancement iteration {} with {n} superpixels", k + 1);
        maps.push(map.clone());
        prev = map;
    }
    Ok(maps)
}

/// Scores one segmentation; `None` when the queries are degenerate.
fn enhance_once(seg: &Segmentation, prev: &SaliencyMap, sigma2: f64) -> Result<Option<SaliencyMap>> {
    let q = partition_queries(seg, prev);
    if q.is_degenerate() {
        return Ok(None);
    }
    let sf = foreground_score(seg, &q, sigma2)?;
    let sb = background_score(seg, &q, sigma2)?;
    let sb = background_guard(sb, seg, prev)?;
    Ok(Some(render_scores(seg, &combine_scores(&sf, &sb))))
}
