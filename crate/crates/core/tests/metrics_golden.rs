mod common;

use decompsum::metrics::{
    bleu4, evaluate, exact_match, meteor, rouge_l, MeteorParams, MetricConfig,
};
use decompsum::{Prediction, Provenance, Sample, Variant};

const TOL: f64 = 0.01;

#[test]
fn golden_pairs_match_the_oracle() {
    let golden = common::golden_metrics();
    assert_eq!(golden.pairs.len(), 20);
    let params = MeteorParams::default();
    for p in &golden.pairs {
        let got = [
            100.0 * f64::from(exact_match(&p.reference, &p.candidate)),
            bleu4(&p.reference, &p.candidate),
            rouge_l(&p.reference, &p.candidate, 1.2),
            meteor(&p.reference, &p.candidate, &params),
        ];
        let want = [p.exact_match, p.bleu4, p.rouge_l, p.meteor];
        for (name, (g, w)) in ["EM", "BLEU-4", "ROUGE-L", "METEOR"].iter().zip(got.iter().zip(want)) {
            assert!(
                (g - w).abs() <= TOL,
                "{name} {g} vs {w} for {:?} / {:?}",
                p.reference,
                p.candidate
            );
        }
    }
}

#[test]
fn evaluate_averages_the_golden_pairs() {
    let golden = common::golden_metrics();
    let samples: Vec<Sample> = golden
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            Sample::new(
                "golden",
                Variant::Decompiled,
                "void f(void){}",
                p.reference.clone(),
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
    let preds: Vec<Prediction> = samples
        .iter()
        .zip(&golden.pairs)
        .map(|(s, p)| Prediction {
            sample_id: s.id.clone(),
            candidate: p.candidate.clone(),
        })
        .collect();
    let report = evaluate(&samples, &preds, &MetricConfig::default()).unwrap();
    let n = golden.pairs.len() as f64;
    let mean = |f: fn(&common::GoldenPair) -> f64| golden.pairs.iter().map(f).sum::<f64>() / n;
    assert_eq!(report.n, 20);
    assert_eq!(report.missing, 0);
    assert!((report.em - mean(|p| p.exact_match)).abs() <= TOL);
    assert!((report.bleu4 - mean(|p| p.bleu4)).abs() <= TOL);
    assert!((report.rouge_l - mean(|p| p.rouge_l)).abs() <= TOL);
    assert!((report.meteor - mean(|p| p.meteor)).abs() <= TOL);
}

#[test]
fn disjoint_phrase_bleu_scores_zero() {
    let got = bleu4(
        "Toggle usage of SIMD instructions",
        "Enable or Disable the Simd Channel",
    );
    assert!(got.abs() <= TOL, "{got}");
}
