//! Loads a decompiler export, normalizes optimization flags and aligns the
//! functions with documented source functions.
//!
//! cargo run --example ingest_align

use std::path::PathBuf;

use decompsum::binary_ingest::{align, ingest_decompiled, normalize_opt_level, AlignOptions};
use decompsum::source_docs::scan_project_tree;
use decompsum::Variant;

fn main() -> decompsum::Result<()> {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");

    for flag in ["-O0", "-O", "-Og", "-Os", "-O3", "-O8", "-Oz"] {
        match normalize_opt_level(flag) {
            Ok(level) => println!("{flag:<4} -> {}", level.as_str()),
            Err(e) => println!("{flag:<4} -> error: {e}"),
        }
    }
    println!();

    let (decompiled, ingest) = ingest_decompiled(corpus.join("decompiled.jsonl"))?;
    println!("{ingest}");
    let (sources, _) = scan_project_tree(&corpus.join("src"))?;

    let opts = AlignOptions {
        variants: vec![Variant::SourceC, Variant::Decompiled],
        ..Default::default()
    };
    let (samples, diag) = align(&decompiled, &sources, &opts);
    println!("{diag}");
    assert_eq!(diag.accounted(), decompiled.len());

    for s in samples.iter().filter(|s| s.variant == Variant::Decompiled).take(5) {
        println!(
            "{} {:<16} {:<20} {}",
            s.id,
            s.provenance.binary.as_deref().unwrap_or("-"),
            s.provenance.function,
            s.summary
        );
    }
    Ok(())
}
