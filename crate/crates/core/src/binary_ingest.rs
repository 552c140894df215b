//! Decompiler exports: loading, optimization-level grouping and alignment
//! with documented source functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{DecompiledFunction, OptLevel, Provenance, Sample, SourceFunction, Variant};
use crate::source_docs::{extract_summary, ExtractionMode, FilterReason, SummaryFilter};

/// Groups a compiler flag into one of four levels.
///
/// `-Oa` joins `-O0`; `-O`, `-Of` and `-Og` join `-O1`; `-Os` joins `-O2`;
/// `-O3` and any larger number join `-O3`.
pub fn normalize_opt_level(raw_flag: &str) -> Result<OptLevel> {
    let unknown = || Error::UnknownOptFlag(raw_flag.to_string());
    let rest = raw_flag.strip_prefix("-O").ok_or_else(unknown)?;
    match rest {
        "" | "f" | "g" => Ok(OptLevel::O1),
        "a" => Ok(OptLevel::O0),
        "s" => Ok(OptLevel::O2),
        digits if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            // saturate: "-O99999999999" is still "more than 3"
            let n: u64 = digits.parse().unwrap_or(u64::MAX);
            Ok(match n {
                0 => OptLevel::O0,
                1 => OptLevel::O1,
                2 => OptLevel::O2,
                _ => OptLevel::O3,
            })
        }
        _ => Err(unknown()),
    }
}

static PLACEHOLDER_NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^FUN_[0-9A-Fa-f]+$").unwrap());

/// True for names the decompiler assigns when no symbol is available.
pub fn is_placeholder_name(name: &str) -> bool {
    PLACEHOLDER_NAME.is_match(name)
}

/// One line of a decompiler export, before validation. `opt_level` and
/// `stripped` are recomputed on ingest, so exporters may omit them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompiledExport {
    pub project: String,
    pub binary: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub address: Option<String>,
    #[serde(default)]
    pub pseudo_c: Option<String>,
    #[serde(alias = "opt_flag")]
    pub opt_level_raw: String,
    #[serde(default)]
    pub stripped: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records: usize,
    pub accepted: usize,
    pub missing_pseudo_c: usize,
    pub unnamed: usize,
    /// Rejected flags and how often each occurred.
    pub unknown_opt_flags: BTreeMap<String, usize>,
    pub stripped: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.missing_pseudo_c + self.unnamed + self.unknown_opt_flags.values().sum::<usize>()
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "export records       {}", self.records)?;
        writeln!(f, "accepted             {}", self.accepted)?;
        writeln!(f, "  of which stripped  {}", self.stripped)?;
        writeln!(f, "missing pseudo-C     {}", self.missing_pseudo_c)?;
        writeln!(f, "no name or address   {}", self.unnamed)?;
        for (flag, n) in &self.unknown_opt_flags {
            writeln!(f, "unknown flag {flag:<8} {n}")?;
        }
        Ok(())
    }
}

/// Validates export records. Records without pseudo-C, without any way to
/// name the function, or with an unrecognized optimization flag are dropped
/// and counted.
pub fn ingest_records(
    exports: impl IntoIterator<Item = DecompiledExport>,
) -> (Vec<DecompiledFunction>, IngestReport) {
    let mut report = IngestReport::default();
    let mut out = Vec::new();
    for e in exports {
        report.records += 1;
        let Some(pseudo_c) = e.pseudo_c.filter(|c| !c.trim().is_empty()) else {
            report.missing_pseudo_c += 1;
            continue;
        };
        let name = match (e.name.filter(|n| !n.is_empty()), &e.address) {
            (Some(n), _) => n,
            (None, Some(addr)) => format!("FUN_{}", addr.trim_start_matches("0x")),
            (None, None) => {
                report.unnamed += 1;
                continue;
            }
        };
        let opt_level = match normalize_opt_level(&e.opt_level_raw) {
            Ok(o) => o,
            Err(_) => {
                *report.unknown_opt_flags.entry(e.opt_level_raw).or_default() += 1;
                continue;
            }
        };
        let stripped = e.stripped.unwrap_or(false) || is_placeholder_name(&name);
        report.stripped += usize::from(stripped);
        report.accepted += 1;
        out.push(DecompiledFunction {
            project: e.project,
            binary: e.binary,
            name,
            address: e.address,
            pseudo_c,
            opt_level_raw: e.opt_level_raw,
            opt_level,
            stripped,
        });
    }
    (out, report)
}

/// Reads a `.jsonl` decompiler export. Malformed JSON is a schema error;
/// invalid but well-formed records are dropped as in [`ingest_records`].
pub fn ingest_decompiled(path: impl AsRef<Path>) -> Result<(Vec<DecompiledFunction>, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut exports = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let e: DecompiledExport = serde_json::from_str(&line).map_err(|e| Error::Schema {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        exports.push(e);
    }
    Ok(ingest_records(exports))
}

#[derive(Debug, Clone)]
pub struct AlignOptions {
    pub mode: ExtractionMode,
    pub filter: SummaryFilter,
    /// Only `source_c` and `decompiled` are produced here; other variants are
    /// derived later by [`crate::transforms`].
    pub variants: Vec<Variant>,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            mode: ExtractionMode::default(),
            filter: SummaryFilter::default(),
            variants: vec![Variant::Decompiled],
        }
    }
}

/// Where each decompiled input record went. The buckets partition the
/// input: see [`AlignDiagnostics::accounted`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignDiagnostics {
    pub decompiled_input: usize,
    pub emitted: usize,
    pub no_doc: usize,
    pub filtered: BTreeMap<FilterReason, usize>,
    /// Stripped records and records with no same-name source function.
    pub unaligned: usize,
    pub ambiguous: usize,
    /// Repeated (project, binary, name) records beyond the first.
    pub duplicate: usize,
    /// `project::name` of each ambiguous source name that was looked up.
    pub ambiguous_names: BTreeSet<String>,
    pub samples: BTreeMap<Variant, usize>,
}

impl AlignDiagnostics {
    pub fn filtered_total(&self) -> usize {
        self.filtered.values().sum()
    }

    /// Sum of all buckets; equals `decompiled_input`.
    pub fn accounted(&self) -> usize {
        self.emitted
            + self.no_doc
            + self.filtered_total()
            + self.unaligned
            + self.ambiguous
            + self.duplicate
    }
}

impl fmt::Display for AlignDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "decompiled functions {}", self.decompiled_input)?;
        writeln!(f, "aligned, emitted     {}", self.emitted)?;
        writeln!(f, "empty documentation  {}", self.no_doc)?;
        writeln!(f, "summary filtered     {}", self.filtered_total())?;
        for (reason, n) in &self.filtered {
            writeln!(f, "  {:<18} {}", reason.as_str(), n)?;
        }
        writeln!(f, "unaligned            {}", self.unaligned)?;
        writeln!(f, "ambiguous name       {}", self.ambiguous)?;
        for name in &self.ambiguous_names {
            writeln!(f, "  {name}")?;
        }
        writeln!(f, "duplicate record     {}", self.duplicate)?;
        for (variant, n) in &self.samples {
            writeln!(f, "samples {:<12} {}", variant.as_str(), n)?;
        }
        Ok(())
    }
}

enum Lookup<'a> {
    Found(&'a SourceFunction),
    Ambiguous,
}

enum Outcome {
    Emitted(Vec<Sample>),
    NoDoc,
    Filtered(FilterReason),
    Unaligned,
    Ambiguous(String),
}

/// Joins unstripped decompiled functions to source functions on
/// (project, name) and emits one sample per requested variant for each pair
/// whose summary passes the filter. A `source_c` sample is emitted once per
/// source function even when several binaries contain it. Output is sorted
/// by id and does not depend on input order.
pub fn align(
    decompiled: &[DecompiledFunction],
    sources: &[SourceFunction],
    opts: &AlignOptions,
) -> (Vec<Sample>, AlignDiagnostics) {
    let mut diag = AlignDiagnostics {
        decompiled_input: decompiled.len(),
        ..Default::default()
    };

    // Keep one record per (project, binary, name).
    let mut unique: BTreeMap<(&str, &str, &str), &DecompiledFunction> = BTreeMap::new();
    for d in decompiled {
        let key = (d.project.as_str(), d.binary.as_str(), d.name.as_str());
        let rank = |r: &DecompiledFunction| {
            (r.address.clone(), r.pseudo_c.clone(), r.opt_level_raw.clone())
        };
        match unique.get_mut(&key) {
            Some(kept) => {
                diag.duplicate += 1;
                if rank(d) < rank(kept) {
                    *kept = d;
                }
            }
            None => {
                unique.insert(key, d);
            }
        }
    }

    let mut by_name: HashMap<(&str, &str), Vec<&SourceFunction>> = HashMap::new();
    for s in sources {
        by_name
            .entry((s.project.as_str(), s.name.as_str()))
            .or_default()
            .push(s);
    }
    let index: HashMap<(&str, &str), Lookup<'_>> = by_name
        .into_iter()
        .map(|(k, v)| {
            let lookup = if v.len() == 1 {
                Lookup::Found(v[0])
            } else {
                let mut documented = v.iter().filter(|s| s.doc.is_some());
                match (documented.next(), documented.next()) {
                    (Some(only), None) => Lookup::Found(only),
                    _ => Lookup::Ambiguous,
                }
            };
            (k, lookup)
        })
        .collect();

    let outcomes: Vec<Outcome> = unique
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|d| align_one(d, &index, opts))
        .collect();

    let mut samples = Vec::new();
    let mut seen = BTreeSet::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Emitted(batch) => {
                diag.emitted += 1;
                for s in batch {
                    if seen.insert(s.id.clone()) {
                        *diag.samples.entry(s.variant).or_default() += 1;
                        samples.push(s);
                    }
                }
            }
            Outcome::NoDoc => diag.no_doc += 1,
            Outcome::Filtered(r) => *diag.filtered.entry(r).or_default() += 1,
            Outcome::Unaligned => diag.unaligned += 1,
            Outcome::Ambiguous(name) => {
                diag.ambiguous += 1;
                diag.ambiguous_names.insert(name);
            }
        }
    }
    samples.sort_by(|a, b| a.id.cmp(&b.id));
    (samples, diag)
}

fn align_one(
    d: &DecompiledFunction,
    index: &HashMap<(&str, &str), Lookup<'_>>,
    opts: &AlignOptions,
) -> Outcome {
    if d.stripped {
        return Outcome::Unaligned;
    }
    let src = match index.get(&(d.project.as_str(), d.name.as_str())) {
        None => return Outcome::Unaligned,
        Some(Lookup::Ambiguous) => return Outcome::Ambiguous(format!("{}::{}", d.project, d.name)),
        Some(Lookup::Found(s)) => *s,
    };
    let Some(doc) = &src.doc else {
        return Outcome::NoDoc;
    };
    let Some(summary) = extract_summary(doc, opts.mode) else {
        return Outcome::Filtered(FilterReason::Empty);
    };
    let verdict = opts.filter.check(&summary);
    if !verdict.passed {
        return Outcome::Filtered(verdict.reason);
    }
    let mut batch = Vec::new();
    for &variant in &opts.variants {
        match variant {
            Variant::SourceC => batch.push(Sample::new(
                &d.project,
                Variant::SourceC,
                src.body_text.clone(),
                summary.clone(),
                None,
                Provenance {
                    function: src.name.clone(),
                    source_file: Some(src.file_path.clone()),
                    binary: None,
                    address: None,
                },
            )),
            Variant::Decompiled => batch.push(Sample::new(
                &d.project,
                Variant::Decompiled,
                d.pseudo_c.clone(),
                summary.clone(),
                Some(d.opt_level),
                Provenance {
                    function: d.name.clone(),
                    source_file: Some(src.file_path.clone()),
                    binary: Some(d.binary.clone()),
                    address: d.address.clone(),
                },
            )),
            _ => {}
        }
    }
    Outcome::Emitted(batch)
}
