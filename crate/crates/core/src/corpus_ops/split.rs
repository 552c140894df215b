use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{CorpusSplit, Sample, SplitRatios};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub ratios: SplitRatios,
    pub seed: u64,
    /// Projects forced into the test set. When non-empty, no other project
    /// goes to test, so every corpus split with the same pins shares its
    /// test projects.
    pub pinned_test: Vec<String>,
    pub pinned_valid: Vec<String>,
}

impl SplitConfig {
    /// Pins the test and valid projects of an earlier split.
    pub fn pinned_from(previous: &CorpusSplit) -> Self {
        SplitConfig {
            ratios: previous.ratios,
            seed: previous.seed,
            pinned_test: previous.test_projects.clone(),
            pinned_valid: previous.valid_projects.clone(),
        }
    }
}

const SETS: [&str; 3] = ["train", "valid", "test"];
const TRAIN: usize = 0;
const VALID: usize = 1;
const TEST: usize = 2;

/// Assigns whole projects to train, valid and test.
///
/// Pinned projects are placed first. The rest are taken in order of
/// descending sample count (then name) and each goes to the set furthest
/// below its target size, ties favouring train, then valid, then test. A set
/// with pinned projects receives no others. When only as many projects are
/// left as there are empty sets, each goes to an empty set.
pub fn split(samples: &[Sample], cfg: &SplitConfig) -> Result<CorpusSplit> {
    let ratios = cfg.ratios.as_array();
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Config(format!(
            "split ratios must be positive, got {ratios:?}"
        )));
    }
    let ratio_sum: f64 = ratios.iter().sum();

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for s in samples {
        *counts.entry(s.project.as_str()).or_default() += 1;
    }
    if counts.len() < 3 {
        return Err(Error::Split(format!(
            "need at least 3 projects, found {}",
            counts.len()
        )));
    }
    let pinned_test: BTreeSet<&str> = cfg.pinned_test.iter().map(String::as_str).collect();
    let pinned_valid: BTreeSet<&str> = cfg.pinned_valid.iter().map(String::as_str).collect();
    if let Some(p) = pinned_test.intersection(&pinned_valid).next() {
        return Err(Error::Split(format!("project `{p}` is pinned to both test and valid")));
    }

    let total = samples.len() as f64;
    let eps = 1e-9 * total.max(1.0);
    let target: Vec<f64> = ratios.iter().map(|r| r / ratio_sum * total).collect();
    let mut assigned = [0usize; 3];
    let mut members: [Vec<&str>; 3] = Default::default();

    let mut order: Vec<(&str, usize)> = counts.iter().map(|(&p, &n)| (p, n)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let mut rest = Vec::new();
    for &(project, n) in &order {
        if pinned_test.contains(project) {
            place(&mut members, &mut assigned, TEST, project, n);
        } else if pinned_valid.contains(project) {
            place(&mut members, &mut assigned, VALID, project, n);
        } else {
            rest.push((project, n));
        }
    }
    let open: Vec<usize> = (0..3)
        .filter(|&k| match k {
            TEST => pinned_test.is_empty(),
            VALID => pinned_valid.is_empty(),
            _ => true,
        })
        .collect();

    for (idx, &(project, n)) in rest.iter().enumerate() {
        let remaining = rest.len() - idx;
        let empty: Vec<usize> = open.iter().copied().filter(|&k| assigned[k] == 0).collect();
        let candidates = if remaining <= empty.len() { &empty } else { &open };
        let deficit = |k: usize| target[k] - assigned[k] as f64;
        let mut best = candidates[0];
        for &k in &candidates[1..] {
            if deficit(k) > deficit(best) + eps {
                best = k;
            }
        }
        place(&mut members, &mut assigned, best, project, n);
    }

    for (k, name) in SETS.iter().enumerate() {
        if assigned[k] == 0 {
            return Err(Error::Split(format!("the {name} set would be empty")));
        }
    }

    let project_set = |k: usize| -> BTreeSet<&str> { members[k].iter().copied().collect() };
    let sets: Vec<BTreeSet<&str>> = (0..3).map(project_set).collect();
    let ids = |k: usize| -> Vec<String> {
        let mut v: Vec<String> = samples
            .iter()
            .filter(|s| sets[k].contains(s.project.as_str()))
            .map(|s| s.id.clone())
            .collect();
        v.sort();
        v
    };
    let names = |k: usize| -> Vec<String> { sets[k].iter().map(|s| s.to_string()).collect() };
    let mut pinned_test: Vec<String> = cfg.pinned_test.clone();
    pinned_test.sort();
    pinned_test.dedup();
    let mut pinned_valid: Vec<String> = cfg.pinned_valid.clone();
    pinned_valid.sort();
    pinned_valid.dedup();
    Ok(CorpusSplit {
        train: ids(TRAIN),
        valid: ids(VALID),
        test: ids(TEST),
        seed: cfg.seed,
        ratios: cfg.ratios,
        train_projects: names(TRAIN),
        valid_projects: names(VALID),
        test_projects: names(TEST),
        pinned_test,
        pinned_valid,
    })
}

fn place<'a>(
    members: &mut [Vec<&'a str>; 3],
    assigned: &mut [usize; 3],
    set: usize,
    project: &'a str,
    n: usize,
) {
    assigned[set] += n;
    members[set].push(project);
}

/// The train ids kept at `fraction`: the first ⌈fraction·n⌉ of a seeded
/// shuffle of the sorted train ids. Smaller fractions give prefixes of larger
/// ones under the same seed.
pub fn subsample_ids(split: &CorpusSplit, fraction: f64, seed: u64) -> Result<Vec<String>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    let mut ids = split.train.clone();
    ids.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let keep = ((fraction * ids.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    ids.truncate(keep.min(split.train.len()));
    ids.sort();
    Ok(ids)
}

/// Drops train samples outside the subsample; valid and test samples, and
/// samples not named by the split, pass through.
pub fn subsample_train(
    split: &CorpusSplit,
    samples: &[Sample],
    fraction: f64,
    seed: u64,
) -> Result<Vec<Sample>> {
    let keep: BTreeSet<String> = subsample_ids(split, fraction, seed)?.into_iter().collect();
    let train: BTreeSet<&str> = split.train.iter().map(String::as_str).collect();
    Ok(samples
        .iter()
        .filter(|s| !train.contains(s.id.as_str()) || keep.contains(&s.id))
        .cloned()
        .collect())
}
