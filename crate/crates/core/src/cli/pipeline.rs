use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::binary_ingest::{align, ingest_decompiled, AlignOptions};
use crate::corpus_ops::{
    deduplicate_variants, split, stats, subsample_train, CorpusStats, SimilarityConfig,
    SplitConfig,
};
use crate::error::{Error, Result};
use crate::record::{write_json, write_records, Sample, SplitRatios, Variant};
use crate::source_docs::{scan_project_tree, ExtractionMode, FilterToggles, SummaryFilter};
use crate::transforms::{transform_samples, DemiStripOptions};

/// Everything that determines pipeline output besides the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub mode: ExtractionMode,
    pub filter: FilterToggles,
    pub similarity: SimilarityConfig,
    pub ratios: SplitRatios,
    pub pinned_test: Vec<String>,
    pub pinned_valid: Vec<String>,
    pub variants: Vec<Variant>,
    /// Train fraction kept by subsampling; `None` skips the step.
    pub fraction: Option<f64>,
    pub keep_generated: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            mode: ExtractionMode::default(),
            filter: FilterToggles::default(),
            similarity: SimilarityConfig::default(),
            ratios: SplitRatios::default(),
            pinned_test: Vec::new(),
            pinned_valid: Vec::new(),
            variants: vec![
                Variant::SourceC,
                Variant::Decompiled,
                Variant::DemiStripped,
                Variant::NoFunname,
            ],
            fraction: None,
            keep_generated: false,
        }
    }
}

/// Written next to the outputs; replaying its config on the same inputs
/// reproduces every listed output hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    /// Relative path to SHA-256, for every file under the input directory.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

/// Aligned corpus and deduplicated corpus statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub samples: CorpusStats,
    pub deduplicated: CorpusStats,
}

/// Reads either a bare [`PipelineConfig`] or a [`Manifest`].
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let config = match value.get("config") {
        Some(c) => c.clone(),
        None => value,
    };
    serde_json::from_value(config).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hash_tree(root: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        if entry.file_type().is_file() {
            let rel = entry.path().strip_prefix(root).expect("under root");
            let key = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            out.insert(key, sha256_file(entry.path())?);
        }
    }
    Ok(out)
}

pub const OUTPUT_FILES: &[&str] = &[
    "sources.jsonl",
    "decompiled.jsonl",
    "samples.jsonl",
    "samples.dedup.jsonl",
    "clusters.jsonl",
    "split.json",
    "split.dedup.json",
    "stats.json",
    "stats.txt",
    "diagnostics.txt",
];

/// Runs every stage on `input` (`src/<project>/...` plus `decompiled.jsonl`)
/// and writes the artifacts to `out`. Returns the manifest it wrote.
pub fn run_pipeline(input: &Path, out: &Path, cfg: &PipelineConfig) -> Result<Manifest> {
    cfg.similarity.validate()?;
    if let Some(f) = cfg.fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidFraction(f));
        }
    }
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut diagnostics = String::new();
    let filter = SummaryFilter::new(cfg.filter);

    // extract
    let src_root = input.join("src");
    if !src_root.is_dir() {
        return Err(Error::Config(format!(
            "{} has no src/ directory",
            input.display()
        )));
    }
    let (sources, mut extract_report) = scan_project_tree(&src_root)?;
    extract_report.tally_summaries(&sources, cfg.mode, &filter);
    write_records(&sources, out.join("sources.jsonl"))?;
    writeln!(diagnostics, "== extract\n{extract_report}").unwrap();

    // ingest
    let (decompiled, ingest_report) = ingest_decompiled(input.join("decompiled.jsonl"))?;
    write_records(&decompiled, out.join("decompiled.jsonl"))?;
    writeln!(diagnostics, "== ingest\n{ingest_report}").unwrap();

    // align
    let wants = |v: Variant| cfg.variants.contains(&v);
    let derived: Vec<Variant> = [Variant::DemiStripped, Variant::NoFunname]
        .into_iter()
        .filter(|&v| wants(v))
        .collect();
    let mut align_variants = Vec::new();
    if wants(Variant::SourceC) {
        align_variants.push(Variant::SourceC);
    }
    if wants(Variant::Decompiled) || !derived.is_empty() {
        align_variants.push(Variant::Decompiled);
    }
    let opts = AlignOptions {
        mode: cfg.mode,
        filter: filter.clone(),
        variants: align_variants,
    };
    let (aligned, align_diag) = align(&decompiled, &sources, &opts);
    writeln!(diagnostics, "== align\n{align_diag}").unwrap();

    // transform
    let (transformed, transform_report) = transform_samples(
        &aligned,
        &derived,
        DemiStripOptions {
            keep_generated: cfg.keep_generated,
        },
    );
    writeln!(diagnostics, "== transform").unwrap();
    for (v, n) in &transform_report.emitted {
        writeln!(diagnostics, "emitted {:<13} {n}", v.as_str()).unwrap();
    }
    for (v, n) in &transform_report.name_absent {
        writeln!(diagnostics, "name absent {:<9} {n}", v.as_str()).unwrap();
    }
    writeln!(diagnostics).unwrap();

    let mut samples: Vec<Sample> = aligned
        .into_iter()
        .chain(transformed)
        .filter(|s| wants(s.variant))
        .collect();
    samples.sort_by(|a, b| a.id.cmp(&b.id));
    write_records(&samples, out.join("samples.jsonl"))?;

    // dedup
    let (deduped, clusters) = deduplicate_variants(&samples, &cfg.similarity, cfg.seed);
    write_records(&deduped, out.join("samples.dedup.jsonl"))?;
    write_records(&clusters, out.join("clusters.jsonl"))?;
    writeln!(
        diagnostics,
        "== dedup\nclusters             {}\nkept                 {}\nremoved              {}\n",
        clusters.len(),
        deduped.len(),
        samples.len() - deduped.len()
    )
    .unwrap();

    // split: the dedup corpus reuses the test and valid projects
    let split_cfg = SplitConfig {
        ratios: cfg.ratios,
        seed: cfg.seed,
        pinned_test: cfg.pinned_test.clone(),
        pinned_valid: cfg.pinned_valid.clone(),
    };
    let corpus_split = split(&samples, &split_cfg)?;
    write_json(&corpus_split, out.join("split.json"))?;
    let dedup_split = split(&deduped, &SplitConfig::pinned_from(&corpus_split))?;
    write_json(&dedup_split, out.join("split.dedup.json"))?;
    writeln!(
        diagnostics,
        "== split\ntrain projects       {}\nvalid projects       {}\ntest projects        {}\n",
        corpus_split.train_projects.join(" "),
        corpus_split.valid_projects.join(" "),
        corpus_split.test_projects.join(" ")
    )
    .unwrap();

    let mut outputs: Vec<&str> = OUTPUT_FILES.to_vec();
    if let Some(fraction) = cfg.fraction {
        let sub = subsample_train(&dedup_split, &deduped, fraction, cfg.seed)?;
        write_records(&sub, out.join("samples.subsample.jsonl"))?;
        outputs.push("samples.subsample.jsonl");
        writeln!(diagnostics, "== subsample\nfraction {fraction} kept {}\n", sub.len()).unwrap();
    }

    // stats
    let report = PipelineStats {
        samples: stats(&samples),
        deduplicated: stats(&deduped),
    };
    write_json(&report, out.join("stats.json"))?;
    let text = format!(
        "== samples.jsonl\n{}\n== samples.dedup.jsonl\n{}",
        report.samples, report.deduplicated
    );
    std::fs::write(out.join("stats.txt"), text).map_err(|e| Error::io(out.join("stats.txt"), e))?;
    std::fs::write(out.join("diagnostics.txt"), &diagnostics)
        .map_err(|e| Error::io(out.join("diagnostics.txt"), e))?;

    let mut hashes = BTreeMap::new();
    for name in outputs {
        hashes.insert(name.to_string(), sha256_file(&out.join(name))?);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        inputs: hash_tree(input)?,
        outputs: hashes,
    };
    write_json(&manifest, out.join("manifest.json"))?;
    Ok(manifest)
}

pub(crate) fn resolve(workdir: &Option<PathBuf>, path: &Path) -> PathBuf {
    match workdir {
        Some(w) if path.is_relative() => w.join(path),
        _ => path.to_path_buf(),
    }
}
