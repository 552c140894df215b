use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::record::{Record, Sample, Variant};
use crate::transforms::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    pub multiset_jaccard_threshold: f64,
    pub set_jaccard_threshold: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            multiset_jaccard_threshold: 0.8,
            set_jaccard_threshold: 0.7,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<()> {
        for t in [self.multiset_jaccard_threshold, self.set_jaccard_threshold] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Config(format!(
                    "similarity thresholds must be in (0, 1], got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// A set of near-duplicate samples and the one kept by deduplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateCluster {
    /// Sorted ascending.
    pub member_ids: Vec<String>,
    pub representative: String,
}

impl Record for DuplicateCluster {
    type Key = String;
    fn sort_key(&self) -> String {
        self.member_ids[0].clone()
    }
}

/// Token bag of identifiers and literals, as sorted (token, count) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Fingerprint {
    counts: Vec<(String, u32)>,
    total: u64,
}

impl Fingerprint {
    pub fn of(code: &str) -> Self {
        let mut map: BTreeMap<&str, u32> = BTreeMap::new();
        for t in tokenize(code) {
            if t.kind == crate::transforms::TokenKind::Identifier || t.is_literal() {
                *map.entry(t.text).or_default() += 1;
            }
        }
        let total = map.values().map(|&c| u64::from(c)).sum();
        Fingerprint {
            counts: map.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            total,
        }
    }

    /// Multiset size.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// (multiset Jaccard, set Jaccard). Two empty bags are identical.
    pub fn jaccard(&self, other: &Fingerprint) -> (f64, f64) {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.counts, &other.counts);
        let (mut min_sum, mut max_sum, mut inter, mut union) = (0u64, 0u64, 0usize, 0usize);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            union += 1;
            match ord {
                std::cmp::Ordering::Less => {
                    max_sum += u64::from(a[i].1);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    max_sum += u64::from(b[j].1);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    min_sum += u64::from(a[i].1.min(b[j].1));
                    max_sum += u64::from(a[i].1.max(b[j].1));
                    inter += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        if union == 0 {
            return (1.0, 1.0);
        }
        (
            min_sum as f64 / max_sum as f64,
            inter as f64 / union as f64,
        )
    }
}

/// (multiset Jaccard, set Jaccard) over the identifier and literal tokens of
/// the two code bodies.
pub fn similarity(a: &Sample, b: &Sample) -> (f64, f64) {
    Fingerprint::of(&a.code).jaccard(&Fingerprint::of(&b.code))
}

pub fn is_near_duplicate(sim: (f64, f64), cfg: &SimilarityConfig) -> bool {
    sim.0 >= cfg.multiset_jaccard_threshold && sim.1 >= cfg.set_jaccard_threshold
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index wins, so roots do not depend on merge order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Connected components of the near-duplicate graph. Clusters are ordered by
/// their smallest member id; each representative is a seeded uniform pick
/// that depends only on the seed and the cluster's members.
pub fn cluster_duplicates(
    samples: &[Sample],
    cfg: &SimilarityConfig,
    seed: u64,
) -> Vec<DuplicateCluster> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].id.cmp(&samples[b].id));
    let fps: Vec<Fingerprint> = order
        .par_iter()
        .map(|&k| Fingerprint::of(&samples[k].code))
        .collect();

    // Visit pairs by bag size: multiset Jaccard is at most |small| / |large|,
    // so once that ratio drops under the threshold no later pair can match.
    let mut by_size: Vec<usize> = (0..fps.len()).collect();
    by_size.sort_by_key(|&k| (fps[k].total(), k));
    let thr = cfg.multiset_jaccard_threshold;
    let edges: Vec<(usize, usize)> = (0..by_size.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let a = by_size[x];
            let mut found = Vec::new();
            for &b in &by_size[x + 1..] {
                let (sa, sb) = (fps[a].total(), fps[b].total());
                if sb > 0 && (sa as f64 / sb as f64) < thr {
                    break;
                }
                if is_near_duplicate(fps[a].jaccard(&fps[b]), cfg) {
                    found.push((a, b));
                }
            }
            found
        })
        .collect();

    let mut uf = UnionFind::new(fps.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..fps.len() {
        let root = uf.find(k);
        groups.entry(root).or_default().push(k);
    }
    groups
        .into_values()
        .map(|members| {
            let member_ids: Vec<String> = members
                .iter()
                .map(|&k| samples[order[k]].id.clone())
                .collect();
            let representative = pick_representative(&member_ids, seed);
            DuplicateCluster {
                member_ids,
                representative,
            }
        })
        .collect()
}

fn pick_representative(sorted_ids: &[String], seed: u64) -> String {
    if sorted_ids.len() == 1 {
        return sorted_ids[0].clone();
    }
    let digest = Sha256::digest(sorted_ids[0].as_bytes());
    let salt = u64::from_le_bytes(digest[..8].try_into().unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    sorted_ids[rng.gen_range(0..sorted_ids.len())].clone()
}

/// Keeps one representative per cluster, in id order.
pub fn deduplicate(samples: &[Sample], cfg: &SimilarityConfig, seed: u64) -> Vec<Sample> {
    let clusters = cluster_duplicates(samples, cfg, seed);
    keep_representatives(samples, &clusters)
}

fn keep_representatives(samples: &[Sample], clusters: &[DuplicateCluster]) -> Vec<Sample> {
    let keep: BTreeSet<&str> = clusters.iter().map(|c| c.representative.as_str()).collect();
    let mut out: Vec<Sample> = samples
        .iter()
        .filter(|s| keep.contains(s.id.as_str()))
        .cloned()
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out.dedup_by(|a, b| a.id == b.id);
    out
}

/// Deduplicates a corpus holding several variants.
///
/// `source_c`, `decompiled` and `stripped` samples are clustered separately,
/// each variant on its own. Derived variants (`demi_stripped`,
/// `no_funname`) follow their `decompiled` parent: a derived sample is kept
/// exactly when the decompiled sample of the same function and binary is.
/// Derived samples without a parent in the corpus are clustered on their own.
pub fn deduplicate_variants(
    samples: &[Sample],
    cfg: &SimilarityConfig,
    seed: u64,
) -> (Vec<Sample>, Vec<DuplicateCluster>) {
    let mut by_variant: BTreeMap<Variant, Vec<Sample>> = BTreeMap::new();
    for s in samples {
        by_variant.entry(s.variant).or_default().push(s.clone());
    }
    let parent_key = |s: &Sample| {
        (
            s.project.clone(),
            s.provenance.binary.clone(),
            s.provenance.function.clone(),
        )
    };

    let mut kept = Vec::new();
    let mut clusters = Vec::new();
    let mut decompiled_status: HashMap<_, bool> = HashMap::new();
    for variant in [Variant::SourceC, Variant::Decompiled, Variant::Stripped] {
        let Some(group) = by_variant.get(&variant) else {
            continue;
        };
        let cl = cluster_duplicates(group, cfg, seed);
        let survivors = keep_representatives(group, &cl);
        if variant == Variant::Decompiled {
            let ids: BTreeSet<&str> = survivors.iter().map(|s| s.id.as_str()).collect();
            for s in group {
                decompiled_status.insert(parent_key(s), ids.contains(s.id.as_str()));
            }
        }
        kept.extend(survivors);
        clusters.extend(cl);
    }
    for variant in [Variant::DemiStripped, Variant::NoFunname] {
        let Some(group) = by_variant.get(&variant) else {
            continue;
        };
        let (with_parent, orphans): (Vec<&Sample>, Vec<&Sample>) = group
            .iter()
            .partition(|s| decompiled_status.contains_key(&parent_key(s)));
        kept.extend(
            with_parent
                .into_iter()
                .filter(|s| decompiled_status[&parent_key(s)])
                .cloned(),
        );
        let orphans: Vec<Sample> = orphans.into_iter().cloned().collect();
        let cl = cluster_duplicates(&orphans, cfg, seed);
        kept.extend(keep_representatives(&orphans, &cl));
        clusters.extend(cl);
    }
    kept.sort_by(|a, b| a.id.cmp(&b.id));
    clusters.sort_by(|a, b| a.member_ids[0].cmp(&b.member_ids[0]));
    (kept, clusters)
}
