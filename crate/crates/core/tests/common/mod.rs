//! Generators and independent oracles shared by the integration tests and
//! the acceptance target.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use decompsum::corpus_ops::{DuplicateCluster, SimilarityConfig};
use decompsum::transforms::{tokenize, TokenKind};
use decompsum::{OptLevel, Provenance, Sample, Variant};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_corpus() -> PathBuf {
    manifest_dir().join("fixtures/corpus")
}

pub const SSRC_PSEUDO_C: &str = "ulong rtp_sess_ssrc(long param_1){ uint local_14; if (param_1 == 0){ local_14 = 0; } else { local_14 = *(uint *)(param_1 + 4);} return (ulong)local_14; }";
pub const SSRC_DEMI: &str = "ulong FUN_0(long VAR_0){ uint VAR_1; if (VAR_0 == 0){ VAR_1 = 0; } else { VAR_1 = *(uint *)(VAR_0 + 4);} return (ulong)VAR_1; }";

#[derive(Debug, Deserialize)]
pub struct GoldenPair {
    pub reference: String,
    pub candidate: String,
    pub exact_match: f64,
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor: f64,
}

#[derive(Debug, Deserialize)]
pub struct GoldenFile {
    pub provenance: String,
    pub pairs: Vec<GoldenPair>,
}

pub fn golden_metrics() -> GoldenFile {
    let path = manifest_dir().join("tests/fixtures/golden_metrics.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const WORDS: &[&str] = &[
    "open", "close", "the", "file", "buffer", "socket", "read", "write", "a", "of", "to",
    "return", "value", "list", "node", "free", "memory", "check", "if", "is", "valid", "packet",
    "header", "from", "into", "stream", "set", "get", "clock", "source", "pin", "high", "low",
    "Initialize", "Compute", "RTP", "GPIO", "SIMD", "x86_64", "count", "bytes", "string",
];

/// A sentence of 1..=max_len words drawn from a fixed vocabulary.
pub fn random_sentence(rng: &mut impl Rng, max_len: usize) -> String {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn sample(project: &str, variant: Variant, function: &str, code: &str) -> Sample {
    Sample::new(
        project,
        variant,
        code,
        "Summary of the function",
        Some(OptLevel::O0),
        Provenance {
            function: function.to_string(),
            source_file: None,
            binary: Some(format!("{project}.so")),
            address: None,
        },
    )
}

const POOL: &[&str] = &[
    "param_1", "param_2", "local_14", "iVar1", "uVar2", "buf", "len", "memcpy", "0x10", "0",
    "\"err\"", "DAT_00102010", "sb_grow", "ctx",
];

/// A corpus with many near-duplicates: fresh token bags plus perturbed
/// copies of earlier ones. Some bags are empty.
pub fn random_dedup_corpus(rng: &mut impl Rng, n: usize) -> Vec<Sample> {
    let mut bodies: Vec<Vec<&str>> = Vec::new();
    for _ in 0..n {
        let body = if !bodies.is_empty() && rng.gen_bool(0.5) {
            let mut b = bodies.choose(rng).unwrap().clone();
            for _ in 0..rng.gen_range(0..3) {
                match rng.gen_range(0..3) {
                    0 => b.push(POOL.choose(rng).unwrap()),
                    1 if !b.is_empty() => {
                        let k = rng.gen_range(0..b.len());
                        b.remove(k);
                    }
                    _ if !b.is_empty() => {
                        let k = rng.gen_range(0..b.len());
                        b[k] = POOL.choose(rng).unwrap();
                    }
                    _ => {}
                }
            }
            b
        } else {
            let len = rng.gen_range(0..12);
            (0..len).map(|_| *POOL.choose(rng).unwrap()).collect()
        };
        bodies.push(body);
    }
    bodies
        .iter()
        .enumerate()
        .map(|(k, body)| {
            let code = format!("void f(void) {{ {} ; }}", body.join(" + "));
            sample(&format!("p{}", k % 4), Variant::Decompiled, &format!("f{k}"), &code)
        })
        .collect()
}

/// Brute-force reference for `cluster_duplicates`: every pair compared,
/// components found by flood fill.
pub fn oracle_clusters(samples: &[Sample], cfg: &SimilarityConfig, seed: u64) -> Vec<DuplicateCluster> {
    let bags: Vec<HashMap<String, u64>> = samples
        .iter()
        .map(|s| {
            let mut m = HashMap::new();
            for t in tokenize(&s.code) {
                let keep = matches!(
                    t.kind,
                    TokenKind::Identifier | TokenKind::Number | TokenKind::StringLit | TokenKind::CharLit
                );
                if keep {
                    *m.entry(t.text.to_string()).or_insert(0) += 1;
                }
            }
            m
        })
        .collect();
    let jaccard = |a: &HashMap<String, u64>, b: &HashMap<String, u64>| -> (f64, f64) {
        let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
        if keys.is_empty() {
            return (1.0, 1.0);
        }
        let (mut lo, mut hi, mut both) = (0u64, 0u64, 0usize);
        for k in &keys {
            let (x, y) = (a.get(*k).copied().unwrap_or(0), b.get(*k).copied().unwrap_or(0));
            lo += x.min(y);
            hi += x.max(y);
            both += usize::from(x > 0 && y > 0);
        }
        (lo as f64 / hi as f64, both as f64 / keys.len() as f64)
    };
    let n = samples.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let (m, s) = jaccard(&bags[i], &bags[j]);
            if m >= cfg.multiset_jaccard_threshold && s >= cfg.set_jaccard_threshold {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut clusters = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut ids = Vec::new();
        while let Some(x) = stack.pop() {
            ids.push(samples[x].id.clone());
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        ids.sort();
        let representative = if ids.len() == 1 {
            ids[0].clone()
        } else {
            let digest = Sha256::digest(ids[0].as_bytes());
            let salt = u64::from_le_bytes(digest[..8].try_into().unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            ids[rng.gen_range(0..ids.len())].clone()
        };
        clusters.push(DuplicateCluster {
            member_ids: ids,
            representative,
        });
    }
    clusters.sort_by(|a, b| a.member_ids[0].cmp(&b.member_ids[0]));
    clusters
}

const IDENTS: &[&str] = &[
    "param_1", "param_2", "local_10", "local_res8", "iVar1", "uVar2", "pcVar3", "DAT_00104010",
    "FUN_00101139", "memcpy", "strlen", "ctx", "buf", "n", "_start", "VAR_0", "VAR_7", "FUN_0",
    "x1",
];
const KEYWORDS: &[&str] = &["if", "else", "while", "return", "for", "do", "sizeof", "int", "char", "void", "long"];
const TYPES: &[&str] = &["ulong", "uint", "undefined8", "undefined4", "byte", "bool", "size_t"];
const LITERALS: &[&str] = &[
    "0", "0x10", "0xffffffff", "1u", "3.5e-2", "'\\0'", "'a'", "\"param_1\"", "\"a \\\"quoted\\\" FUN\"",
];
const OPS: &[&str] = &[
    "=", "==", "!=", "+", "-", "*", "&", "->", ".", "<<", ">>=", "&&", "||", "?", ":", "++", "!",
];
const PUNCT: &[&str] = &["(", ")", "{", "}", "[", "]", ";", ","];
const GAPS: &[&str] = &[" ", "", "\n", "\n  ", "\t", " /* local_10 comment */ ", " // param_1\n"];

/// Pseudo-C shaped token soup that defines `name`. Returns (code, name).
pub fn random_pseudo_c(rng: &mut impl Rng) -> (String, String) {
    let name = format!("fn_{}", rng.gen_range(0..1000));
    let mut code = format!(
        "{} {}({} param_1)\n{{",
        TYPES.choose(rng).unwrap(),
        name,
        TYPES.choose(rng).unwrap()
    );
    for _ in 0..rng.gen_range(0..60) {
        let pieces: &[&str] = match rng.gen_range(0..10) {
            0..=3 => IDENTS,
            4 => KEYWORDS,
            5 => TYPES,
            6 => LITERALS,
            7 | 8 => OPS,
            _ => PUNCT,
        };
        let gap = GAPS.choose(rng).unwrap();
        // keep adjacent words from fusing into one token
        let gap = if gap.is_empty() { " " } else { gap };
        code.push_str(gap);
        code.push_str(pieces.choose(rng).unwrap());
        if rng.gen_bool(0.1) {
            code.push(' ');
            code.push_str(&name);
        }
    }
    code.push_str("\n}\n");
    (code, name)
}

#[derive(Debug, Default)]
pub struct Recount {
    pub count: usize,
    pub mean_summary_tokens: f64,
    pub median_summary_tokens: f64,
    pub mean_loc: f64,
    pub opt_levels: BTreeMap<String, usize>,
}

/// Per-variant statistics recomputed from the raw JSON lines, without the
/// crate's types.
pub fn recount(samples_jsonl: &str) -> BTreeMap<String, Recount> {
    let mut rows: BTreeMap<String, Vec<(usize, usize, Option<String>)>> = BTreeMap::new();
    for line in samples_jsonl.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let summary_tokens = v["summary"].as_str().unwrap().split_whitespace().count();
        let loc = v["code"]
            .as_str()
            .unwrap()
            .lines()
            .filter(|l| !l.trim().is_empty())
            .count();
        let opt = v["opt_level"].as_str().map(str::to_string);
        rows.entry(v["variant"].as_str().unwrap().to_string())
            .or_default()
            .push((summary_tokens, loc, opt));
    }
    rows.into_iter()
        .map(|(variant, rows)| {
            let n = rows.len();
            let mut lens: Vec<usize> = rows.iter().map(|r| r.0).collect();
            lens.sort();
            let median = if n % 2 == 1 {
                lens[n / 2] as f64
            } else {
                (lens[n / 2 - 1] + lens[n / 2]) as f64 / 2.0
            };
            let mut opt_levels = BTreeMap::new();
            for r in &rows {
                if let Some(o) = &r.2 {
                    *opt_levels.entry(o.clone()).or_default() += 1;
                }
            }
            let r = Recount {
                count: n,
                mean_summary_tokens: lens.iter().sum::<usize>() as f64 / n as f64,
                median_summary_tokens: median,
                mean_loc: rows.iter().map(|r| r.1).sum::<usize>() as f64 / n as f64,
                opt_levels,
            };
            (variant, r)
        })
        .collect()
}

/// Compares a stats report with [`recount`]; returns the first mismatch.
pub fn check_stats(report: &decompsum::corpus_ops::CorpusStats, samples_jsonl: &str) -> Result<(), String> {
    let recount = recount(samples_jsonl);
    let total: usize = recount.values().map(|r| r.count).sum();
    if report.total != total {
        return Err(format!("total {} vs {total}", report.total));
    }
    if report.variants.len() != recount.len() {
        return Err(format!("{} variants vs {}", report.variants.len(), recount.len()));
    }
    for (variant, vs) in &report.variants {
        let r = recount
            .get(variant.as_str())
            .ok_or_else(|| format!("no recount for {variant}"))?;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        let opt: BTreeMap<String, usize> = vs
            .opt_levels
            .iter()
            .map(|(k, v)| (serde_json::to_value(k).unwrap().as_str().unwrap().to_string(), *v))
            .collect();
        if vs.count != r.count
            || !close(vs.mean_summary_tokens, r.mean_summary_tokens)
            || !close(vs.median_summary_tokens, r.median_summary_tokens)
            || !close(vs.mean_loc, r.mean_loc)
            || opt != r.opt_levels
        {
            return Err(format!("{variant}: {vs:?} vs {r:?}"));
        }
    }
    Ok(())
}

/// Projects named p00.. with heavy-tailed sizes, `n_projects` in total.
pub fn project_sizes(rng: &mut impl Rng, n_projects: usize) -> Vec<(String, usize)> {
    (0..n_projects)
        .map(|k| {
            let size = if rng.gen_bool(0.2) {
                rng.gen_range(40..120)
            } else {
                rng.gen_range(1..30)
            };
            (format!("p{k:02}"), size)
        })
        .collect()
}

pub fn corpus_of(variant: Variant, sizes: &[(String, usize)]) -> Vec<Sample> {
    let mut out = Vec::new();
    for (project, n) in sizes {
        for k in 0..*n {
            out.push(sample(project, variant, &format!("f{k}"), "int f(void) { return 0; }"));
        }
    }
    out
}
