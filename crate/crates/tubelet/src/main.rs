use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use tubelet::corpus::{build_corpus, generate_corpus, load_corpus};
use tubelet::pairs::{generate_pairs, read_pairs, write_pairs};
use tubelet::pipeline::{ablate, check_clip_fits, evaluate, probe_pairs, train_on_pairs, train_on_the_fly};
use tubelet::storage::{
    parse_config, read_checkpoint, render_coverage_strip, render_trajectory_plot, write_checkpoint,
    write_history,
};
use tubelet_core::compositor::check_shared_tubelet;
use tubelet_core::config::{Mode, RunConfig};
use tubelet_core::seed;
use tubelet_core::trajectory::{generate, MotionConfig, MotionKind};
use tubelet_core::Clip;

/// Synthetic motion tubelets for contrastive video representation learning.
///
/// Settings resolve as: command-line flag, then the --config file, then the
/// built-in defaults. Set TUBELET_LOG to quiet, info (default) or debug.
#[derive(Parser)]
#[command(name = "tubelet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags given here override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed [default: `seed` from the config, else 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs fully sequentially [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a background video corpus and its manifest.
    Corpus {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
        /// Number of videos [default: corpus.count = 256].
        #[arg(long)]
        count: Option<usize>,
    },
    /// Sample trajectories and plot them as a PPM image.
    Traj {
        #[command(flatten)]
        common: Common,
        /// static, linear or nonlinear [default: motion.kind = nonlinear].
        #[arg(long)]
        kind: Option<String>,
        /// Raw samples before smoothing [default: motion.oversample = 48].
        #[arg(long)]
        n: Option<usize>,
        /// Smoothing standard deviation in samples [default: motion.sigma = 8].
        #[arg(long)]
        sigma: Option<f64>,
        /// Number of trajectories.
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a dataset of positive pairs.
    Pairs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairArgs,
        /// Number of pairs.
        #[arg(long, default_value_t = 64)]
        count: usize,
        /// Background corpus directory [default: generate from the config].
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "pairs")]
        out: PathBuf,
    },
    /// Train an encoder from a pair dataset or with fresh pairs every epoch.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Train on this pair dataset instead of generating pairs.
        #[arg(long = "pairs", value_name = "DIR")]
        dataset: Option<PathBuf>,
        /// Background corpus directory [default: generate from the config].
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
        /// Output directory for checkpoint.tbck and history.csv.
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Retrieval top-1/top-5 of a checkpoint on held-out pairs.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairArgs,
        /// Encoder checkpoint.
        #[arg(long, value_name = "PATH")]
        checkpoint: PathBuf,
        /// Held-out pair dataset [default: probes generated from the config].
        #[arg(long = "pairs", value_name = "DIR")]
        dataset: Option<PathBuf>,
        /// Also write eval.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train and score static, linear, nonlinear, nonlinear+rotation and
    /// scaled-crop-control on one corpus and seed.
    Ablate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        /// Tubelets per pair [default: tubelet.count = 2].
        #[arg(long)]
        m: Option<usize>,
        /// Background corpus directory [default: generate from the config].
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
        /// Output directory for ablation.csv.
        #[arg(long, default_value = "ablation")]
        out: PathBuf,
    },
    /// Render trajectory plots and coverage filmstrips for a pair dataset.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Pair dataset directory.
        #[arg(long = "pairs", value_name = "DIR")]
        dataset: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "plots")]
        out: PathBuf,
        /// Plot at most this many pairs.
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Args)]
struct PairArgs {
    /// tubelet (as configured), static, linear, nonlinear,
    /// nonlinear+rotation or scaled-crop-control.
    #[arg(long, default_value = "tubelet")]
    mode: String,
    /// Tubelets per pair [default: tubelet.count = 2].
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// Training epochs [default: train.epochs = 30].
    #[arg(long)]
    epochs: Option<usize>,
    /// Negative queue capacity [default: train.queue = 256].
    #[arg(long)]
    queue: Option<usize>,
    /// InfoNCE temperature [default: train.temperature = 0.2].
    #[arg(long)]
    tau: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(jobs) = self.jobs {
            if jobs == 0 {
                bail!("--jobs must be at least 1");
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .context("configuring worker threads")?;
        }
        Ok(cfg)
    }
}

impl PairArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<Mode> {
        if let Some(m) = self.m {
            cfg.tubelet.count = m;
        }
        Ok(Mode::from_name(&self.mode)?)
    }
}

impl TrainArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(e) = self.epochs {
            cfg.train.epochs = e;
        }
        if let Some(q) = self.queue {
            cfg.train.queue = q;
        }
        if let Some(t) = self.tau {
            cfg.train.temperature = t;
        }
    }
}

fn validated(cfg: RunConfig) -> Result<RunConfig> {
    cfg.validate().context("invalid settings")?;
    Ok(cfg)
}

fn background(cfg: &RunConfig, dir: Option<&Path>) -> Result<Vec<Clip>> {
    let clips = match dir {
        Some(d) => load_corpus(d)?,
        None => generate_corpus(&cfg.corpus_spec())?,
    };
    if let Some(c) = clips.first() {
        check_clip_fits(c, &cfg.train.encoder)?;
    }
    Ok(clips)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Corpus { common, out, count } => {
            let mut cfg = common.load()?;
            if let Some(c) = count {
                cfg.corpus.count = c;
            }
            let cfg = validated(cfg)?;
            let m = build_corpus(&cfg.corpus_spec(), &out)?;
            println!("wrote {} clips to {}", m.entries.len(), out.display());
        }
        Command::Traj {
            common,
            kind,
            n,
            sigma,
            count,
            out,
        } => {
            let mut cfg = common.load()?;
            if let Some(k) = kind {
                cfg.motion.kind = match k.as_str() {
                    "static" => MotionKind::Static,
                    "linear" => MotionKind::Linear,
                    "nonlinear" => MotionKind::Nonlinear,
                    other => bail!("unknown trajectory kind `{other}`"),
                };
            }
            if let Some(n) = n {
                cfg.motion.oversample = n;
            }
            if let Some(s) = sigma {
                cfg.motion.sigma = s;
            }
            let cfg = validated(cfg)?;
            let pc = cfg.pair_config(Mode::Tubelet);
            let motion: MotionConfig = pc.motion;
            let trajs = (0..count)
                .map(|i| generate(&motion, seed::split_index(cfg.seed, "traj", i as u64)))
                .collect::<tubelet_core::Result<Vec<_>>>()?;
            create_dir(&out)?;
            let name = match motion.kind {
                MotionKind::Static => "static",
                MotionKind::Linear => "linear",
                MotionKind::Nonlinear => "nonlinear",
            };
            let path = out.join(format!("trajectories-{name}.ppm"));
            render_trajectory_plot(&trajs, (cfg.corpus.width, cfg.corpus.height), &path)?;
            println!("wrote {}", path.display());
        }
        Command::Pairs {
            common,
            pairs,
            count,
            corpus,
            out,
        } => {
            let mut cfg = common.load()?;
            let mode = pairs.apply(&mut cfg)?;
            let cfg = validated(cfg)?;
            let clips = background(&cfg, corpus.as_deref())?;
            let generated = generate_pairs(&clips, &cfg.pair_config(mode), count, seed::split(cfg.seed, "pairs"))?;
            for (i, p) in generated.iter().enumerate() {
                if let Err(v) = check_shared_tubelet(&p.sample) {
                    bail!("pair {i} breaks the shared-tubelet invariant: {v:?}");
                }
            }
            create_dir(&out)?;
            write_pairs(&out, mode, &generated)?;
            println!("wrote {count} {mode} pairs to {}", out.display());
        }
        Command::Train {
            common,
            pairs,
            train,
            dataset,
            corpus,
            out,
        } => {
            let mut cfg = common.load()?;
            let mode = pairs.apply(&mut cfg)?;
            train.apply(&mut cfg);
            let cfg = validated(cfg)?;
            info!("{}", cfg.describe_scaling());
            let start = Instant::now();
            let outcome = match dataset {
                Some(dir) => {
                    let loaded = read_pairs(&dir)?;
                    let samples: Vec<_> = loaded.iter().map(|p| p.sample()).collect();
                    train_on_pairs(&cfg, &samples)?
                }
                None => {
                    let clips = background(&cfg, corpus.as_deref())?;
                    train_on_the_fly(&cfg, mode, &clips, |s| {
                        info!("epoch {} loss {:.4} lr {:.5}", s.epoch, s.mean_loss, s.lr)
                    })?
                }
            };
            create_dir(&out)?;
            write_checkpoint(&outcome.params, out.join("checkpoint.tbck"))?;
            write_history(out.join("history.csv"), &outcome.history)?;
            let last = outcome.history.last().map_or(f64::NAN, |s| s.mean_loss);
            println!(
                "trained {} epochs in {:.1}s, final loss {last:.4}; wrote {}",
                outcome.history.len(),
                start.elapsed().as_secs_f64(),
                out.display()
            );
        }
        Command::Eval {
            common,
            pairs,
            checkpoint,
            dataset,
            out,
        } => {
            let mut cfg = common.load()?;
            let mode = pairs.apply(&mut cfg)?;
            let cfg = validated(cfg)?;
            let params = read_checkpoint(&checkpoint)?;
            let probes = match dataset {
                Some(dir) => read_pairs(&dir)?.iter().map(|p| p.sample()).collect(),
                None => probe_pairs(&cfg, mode)?,
            };
            if probes.len() < 2 {
                bail!("retrieval needs at least two probe pairs");
            }
            let r = evaluate(&params, &probes)?;
            println!(
                "gallery {}: top-1 {:.4} top-5 {:.4} (chance {:.4})",
                r.count,
                r.top1,
                r.top5,
                1.0 / r.count as f64
            );
            if let Some(dir) = out {
                create_dir(&dir)?;
                let json = serde_json::json!({"count": r.count, "top1": r.top1, "top5": r.top5});
                let path = dir.join("eval.json");
                fs::write(&path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Ablate {
            common,
            train,
            m,
            corpus,
            out,
        } => {
            let mut cfg = common.load()?;
            train.apply(&mut cfg);
            if let Some(m) = m {
                cfg.tubelet.count = m;
            }
            let cfg = validated(cfg)?;
            let clips = background(&cfg, corpus.as_deref())?;
            let probes = probe_pairs(&cfg, cfg.eval.mode)?;
            println!("{:<20} {:>7} {:>7} {:>10} {:>8}", "mode", "top1", "top5", "loss", "seconds");
            let rows = ablate(&cfg, &Mode::ABLATION, &clips, &probes, |r| {
                println!(
                    "{:<20} {:>7.4} {:>7.4} {:>10.4} {:>8.1}",
                    r.mode.name(),
                    r.top1,
                    r.top5,
                    r.final_loss,
                    r.seconds
                )
            })?;
            create_dir(&out)?;
            let mut csv = String::from("mode,top1,top5,final_loss,seconds\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{},{},{:.3}\n", r.mode.name(), r.top1, r.top5, r.final_loss, r.seconds));
            }
            let path = out.join("ablation.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        }
        Command::Plot {
            common,
            dataset,
            out,
            count,
        } => {
            let _cfg = common.load()?;
            let loaded = read_pairs(&dataset)?;
            create_dir(&out)?;
            let n = count.unwrap_or(loaded.len()).min(loaded.len());
            for p in &loaded[..n] {
                let (_, h, w) = p.clip_a.shape();
                let id = &p.record.id;
                render_trajectory_plot(&p.record.trajectories(), (w, h), out.join(format!("pair-{id}.traj.ppm")))?;
                render_coverage_strip(&p.union_a, out.join(format!("pair-{id}.mask.ppm")))?;
            }
            println!("plotted {n} pairs to {}", out.display());
        }
    }
    Ok(())
}

fn init_logging() {
    let raw = std::env::var("TUBELET_LOG").unwrap_or_default();
    let level = match raw.as_str() {
        "quiet" => log::LevelFilter::Off,
        "debug" => log::LevelFilter::Debug,
        _ => log::LevelFilter::Info,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    if !matches!(raw.as_str(), "" | "quiet" | "info" | "debug") {
        warn!("TUBELET_LOG={raw} is not one of quiet, info, debug; using info");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
