//! End-to-end runs over the fixture corpus.

mod common;

use std::collections::BTreeSet;

use decompsum::cli::{load_config, run_pipeline, PipelineConfig, PipelineStats, OUTPUT_FILES};
use decompsum::record::{read_json, read_records};
use decompsum::{CorpusSplit, Sample, Variant};

fn cfg(seed: u64) -> PipelineConfig {
    PipelineConfig {
        seed,
        ..Default::default()
    }
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ma = run_pipeline(&common::fixture_corpus(), &a, &cfg(7)).unwrap();
    let mb = run_pipeline(&common::fixture_corpus(), &b, &cfg(7)).unwrap();
    assert_eq!(ma, mb);
    for f in OUTPUT_FILES.iter().chain(["manifest.json"].iter()) {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let first = run_pipeline(
        &common::fixture_corpus(),
        &a,
        &PipelineConfig {
            seed: 11,
            fraction: Some(0.5),
            keep_generated: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(first.outputs.contains_key("samples.subsample.jsonl"));
    assert_eq!(first.inputs.len(), 7);
    assert!(first.inputs.contains_key("decompiled.jsonl"));

    let replayed = load_config(&a.join("manifest.json")).unwrap();
    assert_eq!(replayed, first.config);
    let second = run_pipeline(&common::fixture_corpus(), &dir.path().join("b"), &replayed).unwrap();
    assert_eq!(first.outputs, second.outputs);
}

#[test]
fn outputs_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_pipeline(&common::fixture_corpus(), out, &cfg(7)).unwrap();
    let samples: Vec<Sample> = read_records(out.join("samples.jsonl")).unwrap();
    let deduped: Vec<Sample> = read_records(out.join("samples.dedup.jsonl")).unwrap();
    let split: CorpusSplit = read_json(out.join("split.json")).unwrap();
    let dsplit: CorpusSplit = read_json(out.join("split.dedup.json")).unwrap();

    let variants: BTreeSet<Variant> = samples.iter().map(|s| s.variant).collect();
    assert_eq!(
        variants,
        BTreeSet::from([Variant::SourceC, Variant::Decompiled, Variant::DemiStripped, Variant::NoFunname])
    );
    let ids: BTreeSet<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids.len(), samples.len());
    for s in &deduped {
        assert!(ids.contains(s.id.as_str()));
    }
    assert!(deduped.len() < samples.len());

    let mut all: Vec<&String> = split.train.iter().chain(&split.valid).chain(&split.test).collect();
    all.sort();
    let mut want: Vec<&String> = samples.iter().map(|s| &s.id).collect();
    want.sort();
    assert_eq!(all, want);
    assert_eq!(dsplit.test_projects, split.test_projects);
    assert_eq!(dsplit.valid_projects, split.valid_projects);

    // derived variants follow their decompiled parent through dedup
    let kept: BTreeSet<(Option<String>, String, Variant)> = deduped
        .iter()
        .map(|s| (s.provenance.binary.clone(), s.provenance.function.clone(), s.variant))
        .collect();
    for s in deduped.iter().filter(|s| s.variant == Variant::Decompiled) {
        for v in [Variant::DemiStripped, Variant::NoFunname] {
            assert!(kept.contains(&(s.provenance.binary.clone(), s.provenance.function.clone(), v)));
        }
    }
}

#[test]
fn stats_match_a_recount() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    run_pipeline(&common::fixture_corpus(), out, &cfg(7)).unwrap();
    let report: PipelineStats = read_json(out.join("stats.json")).unwrap();
    for (file, st) in [("samples.jsonl", &report.samples), ("samples.dedup.jsonl", &report.deduplicated)] {
        let text = std::fs::read_to_string(out.join(file)).unwrap();
        common::check_stats(st, &text).unwrap();
    }
}

#[test]
fn variant_selection_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let only = PipelineConfig {
        variants: vec![Variant::NoFunname],
        ..Default::default()
    };
    run_pipeline(&common::fixture_corpus(), dir.path(), &only).unwrap();
    let samples: Vec<Sample> = read_records(dir.path().join("samples.jsonl")).unwrap();
    assert!(!samples.is_empty());
    assert!(samples.iter().all(|s| s.variant == Variant::NoFunname));
    assert!(samples.iter().all(|s| s.code.contains("FUN_0")));

    let bad = PipelineConfig {
        fraction: Some(0.0),
        ..Default::default()
    };
    assert!(run_pipeline(&common::fixture_corpus(), &dir.path().join("x"), &bad).is_err());
    assert!(run_pipeline(&dir.path().join("missing"), &dir.path().join("y"), &cfg(0)).is_err());
}
