//! The `decompsum` command line.
//!
//! Exit status is 0 on success, 2 on usage errors and 1 on data errors.

mod pipeline;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::binary_ingest::{align, ingest_decompiled, AlignOptions};
use crate::corpus_ops::{
    deduplicate_variants, split, stats, subsample_train, SimilarityConfig, SplitConfig,
};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_detailed, MetricConfig, Scorer, SynonymDict};
use crate::record::{
    read_json, read_records, write_json, write_records, CorpusSplit, Prediction, Sample,
    SourceFunction, SplitRatios, Variant,
};
use crate::source_docs::{scan_project_tree, ExtractionMode, FilterToggles, SummaryFilter};
use crate::transforms::{transform_samples, DemiStripOptions};

pub use pipeline::{load_config, run_pipeline, Manifest, PipelineConfig, PipelineStats, OUTPUT_FILES};
use pipeline::resolve;

#[derive(Debug, Parser)]
#[command(name = "decompsum", version, about = "Build and score decompiled-code summarization corpora")]
struct Cli {
    /// Base directory for relative paths.
    #[arg(long, global = true, env = "DECOMPSUM_WORKDIR")]
    workdir: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "DECOMPSUM_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan C sources and write functions with their doc comments.
    Extract {
        /// Directory holding one sub-directory per project.
        #[arg(long)]
        src: PathBuf,
        #[arg(long, default_value = "sources.jsonl")]
        out: PathBuf,
        #[command(flatten)]
        summary: SummaryArgs,
    },
    /// Validate a decompiler export and normalize optimization levels.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "decompiled.jsonl")]
        out: PathBuf,
    },
    /// Join decompiled functions with documented sources into samples.
    Align {
        #[arg(long, default_value = "sources.jsonl")]
        sources: PathBuf,
        #[arg(long, default_value = "decompiled.jsonl")]
        decompiled: PathBuf,
        #[arg(long, default_value = "samples.jsonl")]
        out: PathBuf,
        /// Write the loss accounting here as well as to stdout.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "decompiled", env = "DECOMPSUM_VARIANTS")]
        variants: Vec<Variant>,
        #[command(flatten)]
        summary: SummaryArgs,
    },
    /// Derive demi-stripped or no-function-name samples from decompiled ones.
    Transform {
        #[arg(long = "in", default_value = "samples.jsonl")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "demi_stripped,no_funname")]
        variants: Vec<Variant>,
        /// Leave decompiler-generated names such as param_1 untouched.
        #[arg(long)]
        keep_generated: bool,
    },
    /// Remove near-duplicate samples.
    Dedup {
        #[arg(long = "in", default_value = "samples.jsonl")]
        input: PathBuf,
        #[arg(long, default_value = "samples.dedup.jsonl")]
        out: PathBuf,
        #[arg(long)]
        clusters: Option<PathBuf>,
        /// Multiset and set Jaccard thresholds.
        #[arg(long, value_parser = parse_thresholds, env = "DECOMPSUM_THRESHOLDS")]
        thresholds: Option<SimilarityConfig>,
        #[arg(long, default_value_t = 0, env = "DECOMPSUM_SEED")]
        seed: u64,
    },
    /// Assign whole projects to train, valid and test.
    Split {
        #[arg(long = "in", default_value = "samples.jsonl")]
        input: PathBuf,
        #[arg(long, default_value = "split.json")]
        out: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        /// Reuse the test and valid projects of an earlier split.
        #[arg(long)]
        pin_from: Option<PathBuf>,
        #[arg(long, default_value_t = 0, env = "DECOMPSUM_SEED")]
        seed: u64,
    },
    /// Keep a seeded fraction of the train set.
    Subsample {
        #[arg(long = "in", default_value = "samples.jsonl")]
        input: PathBuf,
        #[arg(long, default_value = "split.json")]
        split: PathBuf,
        #[arg(long, env = "DECOMPSUM_FRACTION")]
        fraction: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0, env = "DECOMPSUM_SEED")]
        seed: u64,
    },
    /// Describe a sample file.
    Stats {
        #[arg(long = "in", default_value = "samples.jsonl")]
        input: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against sample summaries.
    Evaluate {
        #[arg(long, default_value = "samples.jsonl")]
        refs: PathBuf,
        #[arg(long, default_value = "predictions.jsonl")]
        preds: PathBuf,
        /// Restrict to one set of this split.
        #[arg(long, requires = "set")]
        split: Option<PathBuf>,
        #[arg(long, value_parser = ["train", "valid", "test"])]
        set: Option<String>,
        /// Compare lowercased text.
        #[arg(long, env = "DECOMPSUM_LOWERCASE")]
        lowercase: bool,
        /// Synonym sets for METEOR, one set per line.
        #[arg(long)]
        synonyms: Option<PathBuf>,
        #[arg(long, default_value_t = 1.2)]
        rouge_beta: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-sample scores as JSON lines.
        #[arg(long)]
        per_sample: Option<PathBuf>,
    },
    /// Run extract, ingest, align, transform, dedup, split and stats.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct SummaryArgs {
    /// `strict` applies the extraction rules; `first-sentence` ignores them.
    #[arg(long, value_parser = parse_mode, env = "DECOMPSUM_MODE")]
    mode: Option<ExtractionMode>,
    /// Disable every summary filter.
    #[arg(long)]
    unfiltered: bool,
    #[arg(long)]
    no_length_filter: bool,
    #[arg(long)]
    no_special_token_filter: bool,
    #[arg(long)]
    no_language_filter: bool,
}

impl SummaryArgs {
    fn toggles(&self, base: FilterToggles) -> FilterToggles {
        if self.unfiltered {
            return FilterToggles::none();
        }
        FilterToggles {
            length: base.length && !self.no_length_filter,
            special_tokens: base.special_tokens && !self.no_special_token_filter,
            language: base.language && !self.no_language_filter,
        }
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Train, valid and test proportions.
    #[arg(long, value_parser = parse_ratios, env = "DECOMPSUM_RATIOS")]
    ratios: Option<SplitRatios>,
    #[arg(long, value_delimiter = ',', env = "DECOMPSUM_PIN_TEST")]
    pin_test: Vec<String>,
    #[arg(long, value_delimiter = ',', env = "DECOMPSUM_PIN_VALID")]
    pin_valid: Vec<String>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Directory with `src/<project>/...` and `decompiled.jsonl`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Start from this config or manifest; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "DECOMPSUM_SEED")]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', env = "DECOMPSUM_VARIANTS")]
    variants: Vec<Variant>,
    #[arg(long, value_parser = parse_thresholds, env = "DECOMPSUM_THRESHOLDS")]
    thresholds: Option<SimilarityConfig>,
    #[arg(long, env = "DECOMPSUM_FRACTION")]
    fraction: Option<f64>,
    #[arg(long)]
    keep_generated: bool,
    #[command(flatten)]
    summary: SummaryArgs,
    #[command(flatten)]
    split: SplitArgs,
}

fn parse_mode(s: &str) -> std::result::Result<ExtractionMode, String> {
    match s {
        "strict" | "strict-rules" => Ok(ExtractionMode::StrictRules),
        "first-sentence" => Ok(ExtractionMode::FirstSentence),
        _ => Err(format!("expected `strict` or `first-sentence`, got `{s}`")),
    }
}

fn parse_floats<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(out)
}

fn parse_thresholds(s: &str) -> std::result::Result<SimilarityConfig, String> {
    let [m, set] = parse_floats::<2>(s)?;
    let cfg = SimilarityConfig {
        multiset_jaccard_threshold: m,
        set_jaccard_threshold: set,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse_ratios(s: &str) -> std::result::Result<SplitRatios, String> {
    let [train, valid, test] = parse_floats::<3>(s)?;
    if [train, valid, test].iter().any(|r| r.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err("ratios must be positive".into());
    }
    Ok(SplitRatios { train, valid, test })
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Error::Config(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let path = |p: &Path| resolve(&cli.workdir, p);
    match &cli.command {
        Command::Extract { src, out, summary } => {
            let (functions, mut report) = scan_project_tree(&path(src))?;
            let filter = SummaryFilter::new(summary.toggles(FilterToggles::default()));
            report.tally_summaries(&functions, summary.mode.unwrap_or_default(), &filter);
            write_records(&functions, path(out))?;
            print!("{report}");
        }
        Command::Ingest { input, out } => {
            let (functions, report) = ingest_decompiled(path(input))?;
            write_records(&functions, path(out))?;
            print!("{report}");
        }
        Command::Align {
            sources,
            decompiled,
            out,
            diagnostics,
            variants,
            summary,
        } => {
            let sources: Vec<SourceFunction> = read_records(path(sources))?;
            let decompiled = read_records(path(decompiled))?;
            let opts = AlignOptions {
                mode: summary.mode.unwrap_or_default(),
                filter: SummaryFilter::new(summary.toggles(FilterToggles::default())),
                variants: variants.clone(),
            };
            let (samples, diag) = align(&decompiled, &sources, &opts);
            write_records(&samples, path(out))?;
            if let Some(d) = diagnostics {
                let p = path(d);
                std::fs::write(&p, diag.to_string()).map_err(|e| Error::io(p, e))?;
            }
            print!("{diag}");
        }
        Command::Transform {
            input,
            out,
            variants,
            keep_generated,
        } => {
            let samples: Vec<Sample> = read_records(path(input))?;
            let opts = DemiStripOptions {
                keep_generated: *keep_generated,
            };
            let (derived, report) = transform_samples(&samples, variants, opts);
            write_records(&derived, path(out))?;
            println!("decompiled inputs {}", report.inputs);
            for (v, n) in &report.emitted {
                println!("emitted {v} {n}");
            }
            for (v, n) in &report.name_absent {
                println!("name absent {v} {n}");
            }
        }
        Command::Dedup {
            input,
            out,
            clusters,
            thresholds,
            seed,
        } => {
            let samples: Vec<Sample> = read_records(path(input))?;
            let cfg = thresholds.unwrap_or_default();
            let (kept, cl) = deduplicate_variants(&samples, &cfg, *seed);
            write_records(&kept, path(out))?;
            if let Some(c) = clusters {
                write_records(&cl, path(c))?;
            }
            println!("samples {} clusters {} kept {}", samples.len(), cl.len(), kept.len());
        }
        Command::Split {
            input,
            out,
            split: args,
            pin_from,
            seed,
        } => {
            let samples: Vec<Sample> = read_records(path(input))?;
            let mut cfg = match pin_from {
                Some(p) => SplitConfig::pinned_from(&read_json::<CorpusSplit>(path(p))?),
                None => SplitConfig::default(),
            };
            cfg.seed = *seed;
            if let Some(r) = args.ratios {
                cfg.ratios = r;
            }
            cfg.pinned_test.extend(args.pin_test.iter().cloned());
            cfg.pinned_valid.extend(args.pin_valid.iter().cloned());
            let s = split(&samples, &cfg)?;
            write_json(&s, path(out))?;
            println!(
                "train {} ({} projects), valid {} ({}), test {} ({})",
                s.train.len(),
                s.train_projects.len(),
                s.valid.len(),
                s.valid_projects.len(),
                s.test.len(),
                s.test_projects.len()
            );
        }
        Command::Subsample {
            input,
            split,
            fraction,
            out,
            seed,
        } => {
            let samples: Vec<Sample> = read_records(path(input))?;
            let s: CorpusSplit = read_json(path(split))?;
            let kept = subsample_train(&s, &samples, *fraction, *seed)?;
            write_records(&kept, path(out))?;
            println!("kept {} of {}", kept.len(), samples.len());
        }
        Command::Stats { input, out } => {
            let samples: Vec<Sample> = read_records(path(input))?;
            let report = stats(&samples);
            if let Some(o) = out {
                write_json(&report, path(o))?;
            }
            print!("{report}");
        }
        Command::Evaluate {
            refs,
            preds,
            split,
            set,
            lowercase,
            synonyms,
            rouge_beta,
            out,
            per_sample,
        } => {
            let mut samples: Vec<Sample> = read_records(path(refs))?;
            let predictions: Vec<Prediction> = read_records(path(preds))?;
            if let (Some(split), Some(set)) = (split, set) {
                let s: CorpusSplit = read_json(path(split))?;
                let ids = match set.as_str() {
                    "train" => s.train,
                    "valid" => s.valid,
                    _ => s.test,
                };
                let ids: std::collections::HashSet<String> = ids.into_iter().collect();
                samples.retain(|x| ids.contains(&x.id));
            }
            if rouge_beta.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Config("--rouge-beta must be positive".into()));
            }
            let mut scorer = Scorer::new(MetricConfig {
                rouge_beta: *rouge_beta,
                lowercase: *lowercase,
                ..Default::default()
            });
            if let Some(p) = synonyms {
                scorer = scorer.with_synonyms(SynonymDict::load(path(p))?);
            }
            let (report, detail) = evaluate_detailed(&samples, &predictions, &scorer)?;
            if let Some(o) = out {
                write_json(&report, path(o))?;
            }
            if let Some(p) = per_sample {
                let p = path(p);
                let mut text = String::new();
                for (id, scores) in &detail {
                    let line = serde_json::json!({ "sample_id": id, "scores": scores });
                    text.push_str(&line.to_string());
                    text.push('\n');
                }
                std::fs::write(&p, text).map_err(|e| Error::io(p, e))?;
            }
            print!("{report}");
        }
        Command::Pipeline(args) => {
            let mut cfg = match &args.config {
                Some(p) => load_config(&path(p))?,
                None => PipelineConfig::default(),
            };
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if !args.variants.is_empty() {
                cfg.variants = args.variants.clone();
            }
            if let Some(t) = args.thresholds {
                cfg.similarity = t;
            }
            if let Some(f) = args.fraction {
                cfg.fraction = Some(f);
            }
            if let Some(m) = args.summary.mode {
                cfg.mode = m;
            }
            if args.keep_generated {
                cfg.keep_generated = true;
            }
            cfg.filter = args.summary.toggles(cfg.filter);
            if let Some(r) = args.split.ratios {
                cfg.ratios = r;
            }
            if !args.split.pin_test.is_empty() {
                cfg.pinned_test = args.split.pin_test.clone();
            }
            if !args.split.pin_valid.is_empty() {
                cfg.pinned_valid = args.split.pin_valid.clone();
            }
            let out = path(&args.out);
            let manifest = run_pipeline(&path(&args.input), &out, &cfg)?;
            println!("wrote {} files to {}", manifest.outputs.len() + 1, out.display());
            for (name, hash) in &manifest.outputs {
                println!("{} {name}", &hash[..16]);
            }
        }
    }
    Ok(())
}
