//! Summary evaluation: exact match, smoothed sentence BLEU-4, ROUGE-L and
//! METEOR.
//!
//! Tokens are whitespace-separated and case-sensitive unless
//! [`MetricConfig::lowercase`] is set, so "SIMD" and "Simd" do not match.
//! Scores are on a 0 to 100 scale and averaged per sentence.

mod meteor;
mod ngram;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{Prediction, Sample};

pub use meteor::{
    align as meteor_align, meteor_from_alignment, meteor_tokens, IdentityStemmer,
    MeteorAlignment, MeteorParams, SnowballStemmer, Stemmer, SynonymDict, SEARCH_BUDGET,
};
pub use ngram::{bleu4_tokens, lcs_len, rouge_l_tokens};

pub fn metric_tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// 1 if the token sequences are equal, else 0.
pub fn exact_match(reference: &str, candidate: &str) -> u8 {
    u8::from(metric_tokens(reference) == metric_tokens(candidate))
}

pub fn bleu4(reference: &str, candidate: &str) -> f64 {
    bleu4_tokens(&metric_tokens(reference), &metric_tokens(candidate))
}

pub fn rouge_l(reference: &str, candidate: &str, beta: f64) -> f64 {
    rouge_l_tokens(&metric_tokens(reference), &metric_tokens(candidate), beta)
}

/// METEOR with the Snowball stemmer and no synonyms.
pub fn meteor(reference: &str, candidate: &str, params: &MeteorParams) -> f64 {
    meteor_tokens(
        &metric_tokens(reference),
        &metric_tokens(candidate),
        params,
        &SnowballStemmer::default(),
        None,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub rouge_beta: f64,
    pub meteor: MeteorParams,
    /// Lowercase both sides before tokenizing.
    pub lowercase: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            rouge_beta: 1.2,
            meteor: MeteorParams::default(),
            lowercase: false,
        }
    }
}

/// Scores of one (reference, candidate) pair, each in [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairScores {
    pub em: f64,
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor: f64,
}

/// Scores every metric for one pair.
pub struct Scorer {
    pub config: MetricConfig,
    stemmer: Box<dyn Stemmer>,
    synonyms: Option<SynonymDict>,
}

impl fmt::Debug for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scorer")
            .field("config", &self.config)
            .field("synonyms", &self.synonyms.as_ref().map(|_| ".."))
            .finish_non_exhaustive()
    }
}

impl Default for Scorer {
    fn default() -> Self {
        Scorer::new(MetricConfig::default())
    }
}

impl Scorer {
    pub fn new(config: MetricConfig) -> Self {
        Scorer {
            config,
            stemmer: Box::new(SnowballStemmer::default()),
            synonyms: None,
        }
    }

    pub fn with_stemmer(mut self, stemmer: Box<dyn Stemmer>) -> Self {
        self.stemmer = stemmer;
        self
    }

    pub fn with_synonyms(mut self, synonyms: SynonymDict) -> Self {
        self.synonyms = Some(synonyms);
        self
    }

    pub fn score(&self, reference: &str, candidate: &str) -> PairScores {
        let (r, c) = if self.config.lowercase {
            (reference.to_lowercase(), candidate.to_lowercase())
        } else {
            (reference.to_string(), candidate.to_string())
        };
        let (r, c) = (metric_tokens(&r), metric_tokens(&c));
        PairScores {
            em: if r == c { 100.0 } else { 0.0 },
            bleu4: bleu4_tokens(&r, &c),
            rouge_l: rouge_l_tokens(&r, &c, self.config.rouge_beta),
            meteor: meteor_tokens(
                &r,
                &c,
                &self.config.meteor,
                self.stemmer.as_ref(),
                self.synonyms.as_ref(),
            ),
        }
    }
}

/// Averages over the scored samples, each in [0, 100].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub em: f64,
    pub bleu4: f64,
    pub meteor: f64,
    pub rouge_l: f64,
    /// Samples without a prediction; scored 0 and included in `n`.
    pub missing: usize,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples   {}", self.n)?;
        writeln!(f, "missing   {}", self.missing)?;
        writeln!(f, "EM        {:.2}", self.em)?;
        writeln!(f, "BLEU-4    {:.2}", self.bleu4)?;
        writeln!(f, "METEOR    {:.2}", self.meteor)?;
        writeln!(f, "ROUGE-L   {:.2}", self.rouge_l)
    }
}

/// Per-sample scores keyed by sample id, plus the report that averages them.
pub fn evaluate_detailed(
    samples: &[Sample],
    predictions: &[Prediction],
    scorer: &Scorer,
) -> Result<(MetricReport, BTreeMap<String, Option<PairScores>>)> {
    let refs: HashMap<&str, &Sample> = samples.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    let mut unknown = BTreeSet::new();
    for p in predictions {
        if !refs.contains_key(p.sample_id.as_str()) {
            unknown.insert(p.sample_id.clone());
            continue;
        }
        if by_id.insert(&p.sample_id, &p.candidate).is_some() {
            return Err(Error::DuplicatePrediction(p.sample_id.clone()));
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownSampleIds(unknown.into_iter().collect()));
    }

    let mut ordered: Vec<&Sample> = refs.values().copied().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let scored: Vec<(String, Option<PairScores>)> = ordered
        .par_iter()
        .map(|s| {
            let scores = by_id
                .get(s.id.as_str())
                .map(|cand| scorer.score(&s.summary, cand));
            (s.id.clone(), scores)
        })
        .collect();

    let mut report = MetricReport {
        n: scored.len(),
        ..Default::default()
    };
    // summed in id order so the result does not depend on scheduling
    for (_, s) in &scored {
        match s {
            Some(s) => {
                report.em += s.em;
                report.bleu4 += s.bleu4;
                report.meteor += s.meteor;
                report.rouge_l += s.rouge_l;
            }
            None => report.missing += 1,
        }
    }
    if report.n > 0 {
        let n = report.n as f64;
        report.em /= n;
        report.bleu4 /= n;
        report.meteor /= n;
        report.rouge_l /= n;
    }
    Ok((report, scored.into_iter().collect()))
}

/// Scores `predictions` against the summaries of `samples`. Every sample is
/// counted; one without a prediction scores 0. Predictions for ids not in
/// `samples` are an error, as are two predictions for one sample.
pub fn evaluate(
    samples: &[Sample],
    predictions: &[Prediction],
    config: &MetricConfig,
) -> Result<MetricReport> {
    evaluate_detailed(samples, predictions, &Scorer::new(*config)).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Provenance, Variant};

    fn sample(name: &str, summary: &str) -> Sample {
        Sample::new(
            "p",
            Variant::Decompiled,
            "void f(void){}",
            summary,
            None,
            Provenance {
                function: name.into(),
                source_file: None,
                binary: None,
                address: None,
            },
        )
    }

    fn pred(s: &Sample, c: &str) -> Prediction {
        Prediction {
            sample_id: s.id.clone(),
            candidate: c.into(),
        }
    }

    #[test]
    fn tokens() {
        assert_eq!(metric_tokens("Toggle usage of SIMD instructions").len(), 5);
        assert!(metric_tokens("").is_empty());
        assert_eq!(metric_tokens("  a  b "), ["a", "b"]);
    }

    #[test]
    fn exact_match_cases() {
        assert_eq!(exact_match("open file", "open file"), 1);
        assert_eq!(exact_match("Open file", "open file"), 0);
        assert_eq!(exact_match("a  b", "a b"), 1);
    }

    #[test]
    fn lowercase_option() {
        let s = Scorer::new(MetricConfig {
            lowercase: true,
            ..Default::default()
        });
        let got = s.score("Toggle SIMD", "toggle simd");
        assert_eq!(got.em, 100.0);
        assert_eq!(Scorer::default().score("Toggle SIMD", "toggle simd").em, 0.0);
    }

    #[test]
    fn echo_predictions_score_full_marks() {
        let a = sample("a", "Open the file for reading");
        let b = sample("b", "Close the socket");
        let preds = [pred(&a, &a.summary), pred(&b, &b.summary)];
        let r = evaluate(&[a, b], &preds, &MetricConfig::default()).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.em, 100.0);
        assert!((r.bleu4 - 100.0).abs() < 1e-9);
        assert!((r.rouge_l - 100.0).abs() < 1e-9);
    }

    #[test]
    fn mean_of_hundred_and_zero() {
        let a = sample("a", "Open the file for reading");
        let b = sample("b", "Close the socket");
        let preds = [pred(&a, &a.summary), pred(&b, "unrelated words only")];
        let r = evaluate(&[a, b], &preds, &MetricConfig::default()).unwrap();
        assert!((r.bleu4 - 50.0).abs() < 1e-9);
        assert_eq!(r.em, 50.0);
    }

    #[test]
    fn missing_prediction_scores_zero() {
        let a = sample("a", "Open the file for reading");
        let b = sample("b", "Close the socket");
        let preds = [pred(&a, &a.summary)];
        let r = evaluate(&[a, b], &preds, &MetricConfig::default()).unwrap();
        assert_eq!((r.n, r.missing), (2, 1));
        assert_eq!(r.em, 50.0);
    }

    #[test]
    fn unknown_and_duplicate_ids_are_errors() {
        let a = sample("a", "Open the file for reading");
        let stray = Prediction {
            sample_id: "deadbeefdeadbeef".into(),
            candidate: "x".into(),
        };
        match evaluate(std::slice::from_ref(&a), &[stray], &MetricConfig::default()) {
            Err(Error::UnknownSampleIds(ids)) => assert_eq!(ids, ["deadbeefdeadbeef"]),
            other => panic!("{other:?}"),
        }
        let dup = [pred(&a, "x"), pred(&a, "y")];
        assert!(matches!(
            evaluate(&[a], &dup, &MetricConfig::default()),
            Err(Error::DuplicatePrediction(_))
        ));
    }

    #[test]
    fn empty_corpus() {
        let r = evaluate(&[], &[], &MetricConfig::default()).unwrap();
        assert_eq!(r, MetricReport::default());
    }
}
