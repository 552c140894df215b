//! Cross-project split, reuse of the test projects for a second corpus, and
//! nested train subsamples.
//!
//! cargo run --example split_subsample

use decompsum::corpus_ops::{split, subsample_ids, SplitConfig};
use decompsum::{Provenance, Sample, Variant};

fn corpus(variant: Variant, sizes: &[(&str, usize)]) -> Vec<Sample> {
    let mut out = Vec::new();
    for &(project, n) in sizes {
        for k in 0..n {
            out.push(Sample::new(
                project,
                variant,
                format!("int f{k}(void) {{ return {k}; }}"),
                "Return a constant value",
                None,
                Provenance {
                    function: format!("f{k}"),
                    source_file: None,
                    binary: Some(format!("{project}.so")),
                    address: None,
                },
            ));
        }
    }
    out
}

fn main() -> decompsum::Result<()> {
    let sizes = [
        ("libre", 120),
        ("openssl", 90),
        ("zlib", 40),
        ("dirtyjtag", 25),
        ("strbuf", 12),
        ("lz4", 10),
        ("inih", 6),
        ("cjson", 5),
    ];
    let decompiled = corpus(Variant::Decompiled, &sizes);
    let cfg = SplitConfig {
        seed: 7,
        ..Default::default()
    };
    let s = split(&decompiled, &cfg)?;
    println!("train {:?} ({} samples)", s.train_projects, s.train.len());
    println!("valid {:?} ({} samples)", s.valid_projects, s.valid.len());
    println!("test  {:?} ({} samples)", s.test_projects, s.test.len());

    // the same functions as source code, some lost during alignment
    let source: Vec<Sample> = corpus(Variant::SourceC, &sizes)
        .into_iter()
        .enumerate()
        .filter(|(k, _)| k % 7 != 0)
        .map(|(_, s)| s)
        .collect();
    let again = split(&source, &SplitConfig::pinned_from(&s))?;
    println!("\nsource_c test {:?}, valid {:?}", again.test_projects, again.valid_projects);
    assert_eq!(again.test_projects, s.test_projects);

    println!();
    let mut previous: Vec<String> = Vec::new();
    for fraction in [0.01, 0.1, 0.25, 0.5, 1.0] {
        let ids = subsample_ids(&s, fraction, 7)?;
        let nested = previous.iter().all(|id| ids.binary_search(id).is_ok());
        println!("fraction {fraction:<5} keeps {:>3} train samples, nested: {nested}", ids.len());
        previous = ids;
    }
    Ok(())
}
