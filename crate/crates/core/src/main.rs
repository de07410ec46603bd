use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sess::harness::{enhance_file, evaluate_dirs, run_batch, DatasetLayout};
use sess::{Preset, SessConfig};

/// Enhance salient object detection maps with superpixel color similarity,
/// and evaluate saliency maps against ground truth.
#[derive(Parser)]
#[command(name = "sess", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance one saliency map.
    Enhance(EnhanceArgs),
    /// Enhance every map of a dataset directory.
    Batch(BatchArgs),
    /// Score predicted maps against ground-truth masks.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled tuning: u2net, basnet or msfnet.
    #[arg(long)]
    preset: Option<Preset>,
    /// Do not average the input map back in at the end.
    #[arg(long)]
    no_deep_reintro: bool,
    /// Keep the decayed superpixel count for the final color pass.
    #[arg(long)]
    keep_reduced_superpixels: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> sess::Result<SessConfig> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(path), _) => SessConfig::from_file(path)?,
            (None, Some(p)) => p.config(),
            (None, None) => SessConfig::default(),
        };
        cfg.no_deep_reintro |= self.no_deep_reintro;
        cfg.keep_reduced_superpixels |= self.keep_reduced_superpixels;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct EnhanceArgs {
    /// Color image.
    #[arg(long, required_unless_present = "print_config")]
    image: Option<PathBuf>,
    /// Grayscale saliency map of the image.
    #[arg(long, required_unless_present = "print_config")]
    saliency: Option<PathBuf>,
    /// Where to write the enhanced map.
    #[arg(long, required_unless_present = "print_config")]
    out: Option<PathBuf>,
    /// Also write every enhancement iteration and the integrated map here.
    #[arg(long, value_name = "DIR")]
    dump_iterations: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, value_name = "DIR", required_unless_present = "print_config")]
    images: Option<PathBuf>,
    #[arg(long, value_name = "DIR", required_unless_present = "print_config")]
    saliency: Option<PathBuf>,
    #[arg(long, value_name = "DIR", required_unless_present = "print_config")]
    out: Option<PathBuf>,
    /// Ground-truth masks; when given, the outputs are evaluated too.
    #[arg(long, value_name = "DIR")]
    gt: Option<PathBuf>,
    /// Images processed in parallel.
    #[arg(long, env = "SESS_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_name = "DIR")]
    pred: PathBuf,
    #[arg(long, value_name = "DIR")]
    gt: PathBuf,
    /// Per-image metrics CSV.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Mean precision-recall curve CSV.
    #[arg(long, value_name = "FILE")]
    pr: PathBuf,
    #[arg(long, env = "SESS_JOBS", default_value_t = 1)]
    jobs: usize,
}

fn required(path: Option<PathBuf>) -> PathBuf {
    path.expect("clap enforces required arguments")
}

fn run(cli: Cli) -> sess::Result<()> {
    match cli.command {
        Command::Enhance(args) => {
            let cfg = args.config.resolve()?;
            if args.config.print_config {
                print!("{}", cfg.to_config_string());
                return Ok(());
            }
            enhance_file(
                &required(args.image),
                &required(args.saliency),
                &required(args.out),
                &cfg,
                args.dump_iterations.as_deref(),
            )
        }
        Command::Batch(args) => {
            let cfg = args.config.resolve()?;
            if args.config.print_config {
                print!("{}", cfg.to_config_string());
                return Ok(());
            }
            let layout = DatasetLayout {
                images_dir: required(args.images),
                saliency_dir: required(args.saliency),
                gt_dir: args.gt,
                out_dir: required(args.out),
            };
            let summary = run_batch(&layout, &cfg, args.jobs)?;
            println!("processed {}, failed {}", summary.processed, summary.failed.len());
            for (stem, message) in &summary.failed {
                eprintln!("warning: {stem}: {message}");
            }
            if let Some(eval) = &summary.evaluation {
                print_mean(&eval.mean);
            }
            Ok(())
        }
        Command::Eval(args) => {
            let eval = evaluate_dirs(&args.pred, &args.gt, args.jobs)?;
            eval.write_report(&args.report)?;
            eval.write_pr(&args.pr)?;
            println!(
                "evaluated {}, skipped {}, failed {}",
                eval.rows.len(),
                eval.skipped.len(),
                eval.failed.len()
            );
            for stem in &eval.skipped {
                eprintln!("skipped {stem}: empty ground truth");
            }
            for (stem, message) in &eval.failed {
                eprintln!("warning: {stem}: {message}");
            }
            print_mean(&eval.mean);
            Ok(())
        }
    }
}

fn print_mean(m: &sess::metrics::MetricsReport) {
    println!(
        "mean: mae {:.4}  max_f {:.4}  weighted_f {:.4}  s_measure {:.4}  e_measure {:.4}",
        m.mae, m.max_f, m.weighted_f, m.s_measure, m.e_measure
    );
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
