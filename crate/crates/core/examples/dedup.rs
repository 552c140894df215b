//! Clusters near-duplicate decompiled functions and picks one
//! representative per cluster.
//!
//! cargo run --example dedup [-- <multiset-threshold> <set-threshold>]

use std::path::PathBuf;

use decompsum::binary_ingest::{align, ingest_decompiled, AlignOptions};
use decompsum::corpus_ops::{cluster_duplicates, deduplicate, similarity, SimilarityConfig};
use decompsum::source_docs::scan_project_tree;

fn main() -> decompsum::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>());
    let mut cfg = SimilarityConfig::default();
    if let (Some(Ok(m)), Some(Ok(s))) = (args.next(), args.next()) {
        cfg.multiset_jaccard_threshold = m;
        cfg.set_jaccard_threshold = s;
    }
    cfg.validate()?;

    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let (decompiled, _) = ingest_decompiled(corpus.join("decompiled.jsonl"))?;
    let (sources, _) = scan_project_tree(&corpus.join("src"))?;
    let (samples, _) = align(&decompiled, &sources, &AlignOptions::default());

    let by_id = |id: &str| samples.iter().find(|s| s.id == id).expect("member of corpus");
    let clusters = cluster_duplicates(&samples, &cfg, 0);
    for c in clusters.iter().filter(|c| c.member_ids.len() > 1) {
        println!("cluster, keeping {}", c.representative);
        let first = by_id(&c.member_ids[0]);
        for id in &c.member_ids {
            let s = by_id(id);
            let (multiset, set) = similarity(first, s);
            println!(
                "  {id} {:<18} {:<20} J_multiset={multiset:.3} J_set={set:.3}",
                s.provenance.binary.as_deref().unwrap_or("-"),
                s.provenance.function,
            );
        }
    }

    let kept = deduplicate(&samples, &cfg, 0);
    println!(
        "\n{} samples, {} clusters, {} kept",
        samples.len(),
        clusters.len(),
        kept.len()
    );
    Ok(())
}
