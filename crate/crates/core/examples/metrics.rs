//! Scores candidate summaries with EM, BLEU-4, METEOR and ROUGE-L, then
//! evaluates a predictions file against a sample set.
//!
//! cargo run --example metrics

use decompsum::metrics::{evaluate_detailed, MetricConfig, Scorer, SynonymDict};
use decompsum::{Prediction, Provenance, Sample, Variant};

fn main() -> decompsum::Result<()> {
    let pairs = [
        (
            "Get the Synchronizing source for an RTP/RTCP Socket",
            "Get the Synchronizing source for an RTP/RTCP Socket",
        ),
        (
            "Toggle usage of SIMD instructions",
            "Enable or disable SIMD instructions",
        ),
        (
            "Create an empty string buffer",
            "Creates a new empty buffer for strings",
        ),
        ("Release the memory owned by a string buffer", "Free the buffer"),
        ("Set a GPIO pin high", "Drive the selected pin low"),
    ];

    let mut synonyms = SynonymDict::new();
    synonyms.add_group(["release", "free"]);
    let scorer = Scorer::new(MetricConfig::default()).with_synonyms(synonyms);

    println!("{:>6} {:>7} {:>7} {:>7}", "EM", "BLEU-4", "METEOR", "ROUGE-L");
    for (reference, candidate) in pairs {
        let s = scorer.score(reference, candidate);
        println!(
            "{:>6.1} {:>7.2} {:>7.2} {:>7.2}  {candidate}",
            s.em, s.bleu4, s.meteor, s.rouge_l
        );
    }

    let samples: Vec<Sample> = pairs
        .iter()
        .enumerate()
        .map(|(k, (reference, _))| {
            Sample::new(
                "demo",
                Variant::Decompiled,
                "void f(void){}",
                *reference,
                None,
                Provenance {
                    function: format!("f{k}"),
                    source_file: None,
                    binary: None,
                    address: None,
                },
            )
        })
        .collect();
    // the last sample has no prediction and scores zero
    let predictions: Vec<Prediction> = samples
        .iter()
        .zip(pairs)
        .take(pairs.len() - 1)
        .map(|(s, (_, candidate))| Prediction {
            sample_id: s.id.clone(),
            candidate: candidate.to_string(),
        })
        .collect();
    let (report, _) = evaluate_detailed(&samples, &predictions, &scorer)?;
    println!("\n{report}");
    Ok(())
}
