//! File-level drivers behind the `sess` command line: single-image
//! enhancement, batch runs over a dataset directory and metric evaluation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::SessConfig;
use crate::error::{Error, Result};
use crate::fusion::sess_trace;
use crate::metrics::{evaluate_all, pr_curve, MetricsReport, PrCurve, PrPoint};
use crate::raster::{load_image, load_mask, load_saliency, rgb_to_lab, save_map, write_atomically};

/// File extensions recognized when scanning directories.
pub const IMAGE_EXTENSIONS: [&str; 7] = ["png", "jpg", "jpeg", "bmp", "pgm", "ppm", "pnm"];

/// Enhances one image/saliency pair and writes the result to `out`.
///
/// With `dump_dir`, the enhancement iterations are also written there as
/// `iter_01.png`, `iter_02.png`, ... together with `integrated.png`.
pub fn enhance_file(
    image: &Path,
    saliency: &Path,
    out: &Path,
    cfg: &SessConfig,
    dump_dir: Option<&Path>,
) -> Result<()> {
    let rgb = load_image(image)?;
    let s0 = load_saliency(saliency)?;
    rgb.check_same_size(&s0)?;
    let trace = sess_trace(&rgb_to_lab(&rgb), &s0, cfg)?;
    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (k, map) in trace.iterations.iter().enumerate() {
            save_map(map, dir.join(format!("iter_{:02}.png", k + 1)))?;
        }
        save_map(&trace.integrated, dir.join("integrated.png"))?;
    }
    save_map(&trace.output, out)
}

/// Directory layout of a batch run. Files pair up by identical stem.
#[derive(Clone, Debug)]
pub struct DatasetLayout {
    pub images_dir: PathBuf,
    pub saliency_dir: PathBuf,
    pub gt_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
}

/// One image of a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub stem: String,
    pub image: PathBuf,
    pub saliency: PathBuf,
    pub gt: Option<PathBuf>,
}

/// Image files of `dir` keyed by stem. When two files share a stem the
/// first in name order wins.
pub fn files_by_stem(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(dir.to_path_buf())
        } else {
            Error::io(dir, e)
        }
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let known = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if known && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    let mut map = BTreeMap::new();
    for path in paths {
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if map.contains_key(stem) {
            log::warn!("ignoring {}: stem already taken", path.display());
            continue;
        }
        map.insert(stem.to_owned(), path);
    }
    Ok(map)
}

impl DatasetLayout {
    /// Pairs every saliency map with its image (and ground truth, when a
    /// ground-truth directory is configured), sorted by stem.
    pub fn pairs(&self) -> Result<Vec<Pair>> {
        let images = files_by_stem(&self.images_dir)?;
        let maps = files_by_stem(&self.saliency_dir)?;
        let gts = match &self.gt_dir {
            Some(dir) => Some(files_by_stem(dir)?),
            None => None,
        };
        let mut pairs = Vec::new();
        for (stem, saliency) in maps {
            let Some(image) = images.get(&stem) else {
                log::warn!("{}: no image named {stem}.*", saliency.display());
                continue;
            };
            pairs.push(Pair {
                image: image.clone(),
                saliency,
                gt: gts.as_ref().and_then(|g| g.get(&stem).cloned()),
                stem,
            });
        }
        if pairs.is_empty() {
            return Err(Error::NoPairs(format!(
                "image/saliency pairs in {} and {}",
                self.images_dir.display(),
                self.saliency_dir.display()
            )));
        }
        Ok(pairs)
    }
}

/// Outcome of [`run_batch`].
#[derive(Debug)]
pub struct BatchSummary {
    pub processed: usize,
    /// Stem and error message of every pair that failed.
    pub failed: Vec<(String, String)>,
    /// Evaluation of the outputs, when ground truth was available.
    pub evaluation: Option<Evaluation>,
}

/// Enhances every pair of `layout` on `jobs` threads, writing
/// `<out_dir>/<stem>.png`. A failing pair is logged and skipped. With a
/// ground-truth directory the outputs are evaluated into
/// `<out_dir>/metrics.csv` and `<out_dir>/pr.csv`.
pub fn run_batch(layout: &DatasetLayout, cfg: &SessConfig, jobs: usize) -> Result<BatchSummary> {
    cfg.validate()?;
    let pairs = layout.pairs()?;
    std::fs::create_dir_all(&layout.out_dir).map_err(|e| Error::io(&layout.out_dir, e))?;
    let outcomes: Vec<Result<()>> = in_pool(jobs, || {
        pairs
            .par_iter()
            .map(|p| {
                let out = layout.out_dir.join(format!("{}.png", p.stem));
                let result = enhance_file(&p.image, &p.saliency, &out, cfg, None);
                match &result {
                    Ok(()) => log::info!("{}: done", p.stem),
                    Err(e) => log::warn!("{}: {e}", p.stem),
                }
                result
            })
            .collect()
    })?;

    let mut failed = Vec::new();
    let mut done = Vec::new();
    for (pair, outcome) in pairs.iter().zip(outcomes) {
        match outcome {
            Ok(()) => done.push(pair),
            Err(e) => failed.push((pair.stem.clone(), e.to_string())),
        }
    }

    let evaluation = if layout.gt_dir.is_some() {
        let items: Vec<(String, PathBuf, PathBuf)> = done
            .iter()
            .filter_map(|p| {
                let gt = p.gt.clone()?;
                Some((p.stem.clone(), layout.out_dir.join(format!("{}.png", p.stem)), gt))
            })
            .collect();
        if items.is_empty() {
            log::warn!("no ground truth matches the enhanced maps");
            None
        } else {
            let evaluation = evaluate_items(&items, jobs)?;
            evaluation.write_report(&layout.out_dir.join("metrics.csv"))?;
            evaluation.write_pr(&layout.out_dir.join("pr.csv"))?;
            Some(evaluation)
        }
    } else {
        None
    };

    Ok(BatchSummary {
        processed: done.len(),
        failed,
        evaluation,
    })
}

/// Per-image scores and dataset aggregates.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `(stem, scores)`, sorted by stem.
    pub rows: Vec<(String, MetricsReport)>,
    pub mean: MetricsReport,
    /// Per-threshold mean precision and recall over the images.
    pub pr: PrCurve,
    /// Stems skipped because their ground truth has no foreground.
    pub skipped: Vec<String>,
    /// Stems that could not be evaluated, with the reason.
    pub failed: Vec<(String, String)>,
}

impl Evaluation {
    /// Per-image CSV: `image,mae,max_f,weighted_f,s_measure,e_measure`,
    /// followed by a `mean` row.
    pub fn report_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut rows: Vec<[String; 6]> = vec![[
            "image".into(),
            "mae".into(),
            "max_f".into(),
            "weighted_f".into(),
            "s_measure".into(),
            "e_measure".into(),
        ]];
        let record = |name: &str, r: &MetricsReport| {
            [
                name.to_owned(),
                r.mae.to_string(),
                r.max_f.to_string(),
                r.weighted_f.to_string(),
                r.s_measure.to_string(),
                r.e_measure.to_string(),
            ]
        };
        rows.extend(self.rows.iter().map(|(stem, r)| record(stem, r)));
        rows.push(record("mean", &self.mean));
        for row in &rows {
            w.write_record(row).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| csv_error(e.into_error().into()))
    }

    /// PR CSV: `threshold,precision,recall`, one row per threshold.
    pub fn pr_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["threshold", "precision", "recall"]).map_err(csv_error)?;
        for p in &self.pr.points {
            w.write_record([p.threshold.to_string(), p.precision.to_string(), p.recall.to_string()])
                .map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| csv_error(e.into_error().into()))
    }

    pub fn write_report(&self, path: &Path) -> Result<()> {
        write_atomically(path, &self.report_csv()?)
    }

    pub fn write_pr(&self, path: &Path) -> Result<()> {
        write_atomically(path, &self.pr_csv()?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Report(e.to_string())
}

/// Evaluates every prediction of `pred_dir` against the same-stem mask in
/// `gt_dir`.
pub fn evaluate_dirs(pred_dir: &Path, gt_dir: &Path, jobs: usize) -> Result<Evaluation> {
    let preds = files_by_stem(pred_dir)?;
    let gts = files_by_stem(gt_dir)?;
    let items: Vec<(String, PathBuf, PathBuf)> = preds
        .into_iter()
        .filter_map(|(stem, pred)| {
            let gt = gts.get(&stem)?.clone();
            Some((stem, pred, gt))
        })
        .collect();
    if items.is_empty() {
        return Err(Error::NoPairs(format!(
            "prediction/ground-truth pairs in {} and {}",
            pred_dir.display(),
            gt_dir.display()
        )));
    }
    evaluate_items(&items, jobs)
}

enum Scored {
    Done(MetricsReport, PrCurve),
    Skipped,
    Failed(String),
}

fn evaluate_items(items: &[(String, PathBuf, PathBuf)], jobs: usize) -> Result<Evaluation> {
    let scored: Vec<Scored> = in_pool(jobs, || {
        items
            .par_iter()
            .map(|(stem, pred, gt)| {
                let run = || -> Result<(MetricsReport, PrCurve)> {
                    let s = load_saliency(pred)?;
                    let g = load_mask(gt)?;
                    Ok((evaluate_all(&s, &g)?, pr_curve(&s, &g)?))
                };
                match run() {
                    Ok((r, c)) => Scored::Done(r, c),
                    Err(Error::EmptyGroundTruth) => {
                        log::info!("{stem}: skipped, ground truth is empty");
                        Scored::Skipped
                    }
                    Err(e) => {
                        log::warn!("{stem}: {e}");
                        Scored::Failed(e.to_string())
                    }
                }
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut skipped = Vec::new();
    let mut failed = Vec::new();
    for ((stem, ..), s) in items.iter().zip(scored) {
        match s {
            Scored::Done(r, c) => {
                rows.push((stem.clone(), r));
                curves.push(c);
            }
            Scored::Skipped => skipped.push(stem.clone()),
            Scored::Failed(msg) => failed.push((stem.clone(), msg)),
        }
    }
    if rows.is_empty() {
        return Err(Error::NoPairs("images with a non-empty ground truth".into()));
    }

    let n = rows.len() as f64;
    let avg = |f: fn(&MetricsReport) -> f64| rows.iter().map(|(_, r)| f(r)).sum::<f64>() / n;
    let mean = MetricsReport {
        mae: avg(|r| r.mae),
        max_f: avg(|r| r.max_f),
        weighted_f: avg(|r| r.weighted_f),
        s_measure: avg(|r| r.s_measure),
        e_measure: avg(|r| r.e_measure),
    };
    let points = (0..256)
        .map(|t| PrPoint {
            threshold: t as u8,
            precision: curves.iter().map(|c| c.points[t].precision).sum::<f64>() / n,
            recall: curves.iter().map(|c| c.points[t].recall).sum::<f64>() / n,
        })
        .collect();
    Ok(Evaluation {
        rows,
        mean,
        pr: PrCurve { points },
        skipped,
        failed,
    })
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "jobs",
            message: e.to_string(),
        })?;
    Ok(pool.install(f))
}
