use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeteorParams {
    /// Weight of recall in the harmonic mean: Fmean = (1+w)PR / (R + wP).
    pub recall_weight: f64,
    pub penalty_coeff: f64,
    pub penalty_exp: f64,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams {
            recall_weight: 9.0,
            penalty_coeff: 0.5,
            penalty_exp: 3.0,
        }
    }
}

pub trait Stemmer: Send + Sync {
    fn stem(&self, word: &str) -> String;
}

/// English Snowball stemmer applied to the lowercased word.
pub struct SnowballStemmer(rust_stemmers::Stemmer);

impl Default for SnowballStemmer {
    fn default() -> Self {
        SnowballStemmer(rust_stemmers::Stemmer::create(
            rust_stemmers::Algorithm::English,
        ))
    }
}

impl fmt::Debug for SnowballStemmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SnowballStemmer(english)")
    }
}

impl Stemmer for SnowballStemmer {
    fn stem(&self, word: &str) -> String {
        self.0.stem(&word.to_lowercase()).into_owned()
    }
}

/// Leaves words unchanged, which turns the stem stage into a second exact
/// stage that never finds anything new.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem(&self, word: &str) -> String {
        word.to_string()
    }
}

/// Synonym sets for the third matching stage.
///
/// Text format: one set per line, words separated by whitespace or commas;
/// `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymDict {
    groups: HashMap<String, Vec<usize>>,
    n_groups: usize,
}

impl SynonymDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_group<I, S>(&mut self, words: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = self.n_groups;
        self.n_groups += 1;
        for w in words {
            let ids = self.groups.entry(w.into()).or_default();
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
    }

    pub fn parse(text: &str) -> Self {
        let mut dict = SynonymDict::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            let words: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|w| !w.is_empty())
                .collect();
            if words.len() > 1 {
                dict.add_group(words);
            }
        }
        dict
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn is_empty(&self) -> bool {
        self.n_groups == 0
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        match (self.groups.get(a), self.groups.get(b)) {
            (Some(x), Some(y)) => x.iter().any(|g| y.contains(g)),
            _ => false,
        }
    }
}

/// Outcome of the staged unigram alignment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeteorAlignment {
    pub exact: usize,
    pub stem: usize,
    pub synonym: usize,
    pub chunks: usize,
    /// (candidate index, reference index), ascending by candidate index.
    pub pairs: Vec<(usize, usize)>,
    /// False if the search budget ran out before optimality was proven.
    pub optimal: bool,
}

impl MeteorAlignment {
    pub fn matches(&self) -> usize {
        self.exact + self.stem + self.synonym
    }
}

/// Search nodes visited before settling for the best alignment found.
pub const SEARCH_BUDGET: usize = 200_000;

/// Staged alignment: as many exact matches as possible, then as many stem
/// matches as possible among the remaining words, then synonym matches; among
/// alignments with those counts, the one with fewest chunks.
pub fn align(
    reference: &[&str],
    candidate: &[&str],
    stemmer: &dyn Stemmer,
    synonyms: Option<&SynonymDict>,
) -> MeteorAlignment {
    if reference.is_empty() || candidate.is_empty() {
        return MeteorAlignment {
            optimal: true,
            ..Default::default()
        };
    }
    let r_stems: Vec<String> = reference.iter().map(|w| stemmer.stem(w)).collect();
    let c_stems: Vec<String> = candidate.iter().map(|w| stemmer.stem(w)).collect();

    // Stage maxima. Exact matches are a per-word count; after removing any
    // maximal exact matching the leftover multisets are fixed, so the stem
    // stage is a per-stem count over them.
    let mut word_balance: HashMap<&str, i64> = HashMap::new();
    for w in candidate {
        *word_balance.entry(w).or_default() += 1;
    }
    let mut m1 = 0;
    for w in reference {
        let b = word_balance.entry(w).or_default();
        if *b > 0 {
            m1 += 1;
        }
        *b -= 1;
    }
    let mut stem_balance: HashMap<String, (usize, usize)> = HashMap::new();
    for (w, &b) in &word_balance {
        let s = stemmer.stem(w);
        let e = stem_balance.entry(s).or_default();
        if b > 0 {
            e.0 += b as usize;
        } else {
            e.1 += (-b) as usize;
        }
    }
    let m2 = stem_balance.values().map(|&(c, r)| c.min(r)).sum();

    let edges: Vec<Vec<(usize, u8)>> = (0..candidate.len())
        .map(|i| {
            (0..reference.len())
                .filter_map(|j| {
                    let stage = if candidate[i] == reference[j] {
                        1
                    } else if c_stems[i] == r_stems[j] {
                        2
                    } else if synonyms.is_some_and(|d| d.are_synonyms(candidate[i], reference[j]))
                    {
                        3
                    } else {
                        return None;
                    };
                    Some((j, stage))
                })
                .collect()
        })
        .collect();
    let mut syn_suffix = vec![0usize; candidate.len() + 1];
    for i in (0..candidate.len()).rev() {
        syn_suffix[i] = syn_suffix[i + 1] + usize::from(edges[i].iter().any(|e| e.1 == 3));
    }

    let mut search = Search {
        edges: &edges,
        m1,
        m2,
        syn_suffix: &syn_suffix,
        used: vec![false; reference.len()],
        pairs: Vec::new(),
        best: None,
        nodes: 0,
        exhausted: false,
        done: false,
    };
    search.dfs(0, 0, 0, 0, 0);
    let (n3, chunks, pairs) = search.best.expect("the all-skip path is always feasible");
    MeteorAlignment {
        exact: m1,
        stem: m2,
        synonym: n3,
        chunks,
        pairs,
        optimal: !search.exhausted,
    }
}

/// (synonym matches, chunks, pairs) of the best alignment so far.
type Best = (usize, usize, Vec<(usize, usize)>);

struct Search<'a> {
    edges: &'a [Vec<(usize, u8)>],
    m1: usize,
    m2: usize,
    syn_suffix: &'a [usize],
    used: Vec<bool>,
    pairs: Vec<(usize, usize)>,
    best: Option<Best>,
    nodes: usize,
    exhausted: bool,
    done: bool,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, n1: usize, n2: usize, n3: usize, chunks: usize) {
        if self.done {
            return;
        }
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET && self.best.is_some() {
            self.exhausted = true;
            self.done = true;
            return;
        }
        let n = self.edges.len();
        if (self.m1 - n1) + (self.m2 - n2) > n - i {
            return;
        }
        let syn_bound = n3 + self.syn_suffix[i];
        if let Some((b3, bch, _)) = &self.best {
            if syn_bound < *b3 || (syn_bound == *b3 && chunks >= *bch) {
                return;
            }
        }
        if i == n {
            // n1 == m1 and n2 == m2 by the feasibility check above
            self.best = Some((n3, chunks, self.pairs.clone()));
            let min_chunks = usize::from(self.m1 + self.m2 + n3 > 0);
            if chunks == min_chunks && n3 == self.syn_suffix[0] {
                self.done = true;
            }
            return;
        }

        let prev = self.pairs.last().copied();
        let continues = |j: usize| prev.is_some_and(|(pi, pj)| pi + 1 == i && pj + 1 == j);
        let mut order: Vec<(usize, u8)> = self.edges[i]
            .iter()
            .copied()
            .filter(|&(j, stage)| {
                !self.used[j]
                    && match stage {
                        1 => n1 < self.m1,
                        2 => n2 < self.m2,
                        _ => true,
                    }
            })
            .collect();
        order.sort_by_key(|&(j, _)| (!continues(j), j));
        for (j, stage) in order {
            self.used[j] = true;
            self.pairs.push((i, j));
            let ch = chunks + usize::from(!continues(j));
            match stage {
                1 => self.dfs(i + 1, n1 + 1, n2, n3, ch),
                2 => self.dfs(i + 1, n1, n2 + 1, n3, ch),
                _ => self.dfs(i + 1, n1, n2, n3 + 1, ch),
            }
            self.pairs.pop();
            self.used[j] = false;
            if self.done {
                return;
            }
        }
        self.dfs(i + 1, n1, n2, n3, chunks);
    }
}

/// METEOR in [0, 100] from an alignment.
pub fn meteor_from_alignment(
    a: &MeteorAlignment,
    ref_len: usize,
    cand_len: usize,
    params: &MeteorParams,
) -> f64 {
    let m = a.matches();
    if m == 0 {
        return 0.0;
    }
    let p = m as f64 / cand_len as f64;
    let r = m as f64 / ref_len as f64;
    let w = params.recall_weight;
    let fmean = (1.0 + w) * p * r / (r + w * p);
    let penalty = params.penalty_coeff * (a.chunks as f64 / m as f64).powf(params.penalty_exp);
    100.0 * fmean * (1.0 - penalty)
}

pub fn meteor_tokens(
    reference: &[&str],
    candidate: &[&str],
    params: &MeteorParams,
    stemmer: &dyn Stemmer,
    synonyms: Option<&SynonymDict>,
) -> f64 {
    let a = align(reference, candidate, stemmer, synonyms);
    meteor_from_alignment(&a, reference.len(), candidate.len(), params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    fn score(r: &str, c: &str) -> f64 {
        meteor_tokens(&t(r), &t(c), &MeteorParams::default(), &SnowballStemmer::default(), None)
    }

    #[test]
    fn identical_three_tokens() {
        let want = 100.0 * (1.0 - 0.5 / 27.0);
        assert!((score("open the file", "open the file") - want).abs() < 1e-9);
        assert!((want - 98.148).abs() < 1e-3);
    }

    #[test]
    fn stem_stage() {
        assert!((score("frees buffers", "free buffer") - 93.75).abs() < 1e-9);
        let a = align(&t("frees buffers"), &t("free buffer"), &SnowballStemmer::default(), None);
        assert_eq!((a.exact, a.stem, a.chunks), (0, 2, 1));
        assert_eq!(score("frees buffers", "free buffer"), score("free buffer", "frees buffers"));
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(score("alpha beta", "gamma delta"), 0.0);
        assert_eq!(score("", "x"), 0.0);
        assert_eq!(score("x", ""), 0.0);
    }

    #[test]
    fn chunk_minimization_prefers_contiguous_duplicate() {
        // the second "the" in the reference keeps "the cat" contiguous
        let a = align(&t("the dog and the cat"), &t("the cat"), &SnowballStemmer::default(), None);
        assert_eq!(a.chunks, 1);
        assert_eq!(a.pairs, vec![(0, 3), (1, 4)]);
    }

    #[test]
    fn identity_stemmer_is_exact_only() {
        let a = align(&t("frees buffers now"), &t("free buffer now"), &IdentityStemmer, None);
        assert_eq!((a.exact, a.stem, a.synonym), (1, 0, 0));
    }

    #[test]
    fn synonym_stage() {
        let dict = SynonymDict::parse("# verbs\nfree, release\nbuffer memory\n");
        let r = t("release memory");
        let c = t("free buffer");
        let a = align(&r, &c, &SnowballStemmer::default(), Some(&dict));
        assert_eq!((a.exact, a.stem, a.synonym, a.chunks), (0, 0, 2, 1));
        let no = align(&r, &c, &SnowballStemmer::default(), Some(&SynonymDict::new()));
        assert_eq!(no.matches(), 0);
    }

    #[test]
    fn exact_matches_take_priority_over_stems() {
        // "run" must match "run" exactly even though "runs" shares its stem
        let a = align(&t("run fast"), &t("runs run"), &SnowballStemmer::default(), None);
        assert_eq!((a.exact, a.stem), (1, 0));
        assert_eq!(a.pairs, vec![(1, 0)]);
    }

    #[test]
    fn long_repetitive_input_terminates() {
        let r = vec!["the"; 120];
        let c = vec!["the"; 100];
        let a = align(&r, &c, &SnowballStemmer::default(), None);
        assert_eq!(a.matches(), 100);
        assert_eq!(a.chunks, 1);
    }
}
