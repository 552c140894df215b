//! Domain records and the line-delimited JSON files that carry them between
//! pipeline stages.
//!
//! | file                | record                 |
//! |---------------------|------------------------|
//! | `sources.jsonl`     | [`SourceFunction`]     |
//! | `decompiled.jsonl`  | [`DecompiledFunction`] |
//! | `samples.jsonl`     | [`Sample`]             |
//! | `predictions.jsonl` | [`Prediction`]         |
//! | `split.json`        | [`CorpusSplit`]        |
//!
//! Every `.jsonl` file holds one JSON object per line. Embedded newlines in
//! code or summaries are escaped by the JSON encoder, so a record never spans
//! lines. Writers sort records by [`Record::sort_key`] so that equal inputs
//! give byte-identical files.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Compiler optimization level after grouping aliases (`-Os`, `-Og`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OptLevel {
    O0,
    O1,
    O2,
    O3,
}

impl OptLevel {
    pub const ALL: [OptLevel; 4] = [OptLevel::O0, OptLevel::O1, OptLevel::O2, OptLevel::O3];

    pub fn as_str(self) -> &'static str {
        match self {
            OptLevel::O0 => "O0",
            OptLevel::O1 => "O1",
            OptLevel::O2 => "O2",
            OptLevel::O3 => "O3",
        }
    }
}

impl fmt::Display for OptLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which representation of a function a [`Sample`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Original C definition from the project sources.
    SourceC,
    /// Decompiler pseudo-C of an unstripped binary.
    Decompiled,
    /// Decompiled pseudo-C with every identifier replaced by a placeholder.
    DemiStripped,
    /// Decompiled pseudo-C with only the function name replaced.
    NoFunname,
    /// Pseudo-C of a stripped binary, ingested pre-aligned.
    Stripped,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::SourceC,
        Variant::Decompiled,
        Variant::DemiStripped,
        Variant::NoFunname,
        Variant::Stripped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SourceC => "source_c",
            Variant::Decompiled => "decompiled",
            Variant::DemiStripped => "demi_stripped",
            Variant::NoFunname => "no_funname",
            Variant::Stripped => "stripped",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommentStyle {
    SingleLine,
    MultiLine,
}

/// A comment attached to a function definition, with comment markers and
/// leading `*` decoration removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocComment {
    pub raw_text: String,
    pub style: CommentStyle,
    /// First and last 1-based line of the comment.
    pub line_span: (u32, u32),
}

/// A function definition found in a project source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFunction {
    pub project: String,
    /// Path relative to the project root, `/`-separated.
    pub file_path: String,
    pub name: String,
    /// Declaration text up to and including the closing parenthesis.
    pub signature: String,
    /// The full definition, signature included, through the closing brace.
    pub body_text: String,
    pub start_line: u32,
    pub end_line: u32,
    pub doc: Option<DocComment>,
}

/// One function of decompiler output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompiledFunction {
    pub project: String,
    pub binary: String,
    /// Symbol name, or a decompiler placeholder such as `FUN_00100d30`.
    pub name: String,
    pub address: Option<String>,
    pub pseudo_c: String,
    /// Optimization flag as passed to the compiler, e.g. `-Os`.
    pub opt_level_raw: String,
    pub opt_level: OptLevel,
    pub stripped: bool,
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Name of the function in the unstripped build.
    pub function: String,
    pub source_file: Option<String>,
    pub binary: Option<String>,
    pub address: Option<String>,
}

/// One (code, summary) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub project: String,
    pub variant: Variant,
    pub code: String,
    pub summary: String,
    pub opt_level: Option<OptLevel>,
    pub provenance: Provenance,
}

impl Sample {
    /// Builds a sample whose id is derived from `project`, the provenance
    /// binary and function name, and `variant`.
    pub fn new(
        project: impl Into<String>,
        variant: Variant,
        code: impl Into<String>,
        summary: impl Into<String>,
        opt_level: Option<OptLevel>,
        provenance: Provenance,
    ) -> Self {
        let project = project.into();
        let id = sample_id(
            &project,
            provenance.binary.as_deref().unwrap_or(""),
            &provenance.function,
            variant,
        );
        Sample {
            id,
            project,
            variant,
            code: code.into(),
            summary: summary.into(),
            opt_level,
            provenance,
        }
    }

    /// Copy of this sample as another variant with new code; the id is
    /// re-derived.
    pub fn derive(&self, variant: Variant, code: String) -> Sample {
        Sample::new(
            self.project.clone(),
            variant,
            code,
            self.summary.clone(),
            self.opt_level,
            self.provenance.clone(),
        )
    }
}

/// Stable sample identifier: the first 64 bits of SHA-256 over the
/// NUL-separated provenance tuple, as lowercase hex.
pub fn sample_id(project: &str, binary: &str, name: &str, variant: Variant) -> String {
    let mut hasher = Sha256::new();
    for part in [project, binary, name, variant.as_str()] {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            valid: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.valid, self.test]
    }
}

/// A cross-project train/valid/test partition of sample ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub train: Vec<String>,
    pub valid: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub train_projects: Vec<String>,
    pub valid_projects: Vec<String>,
    pub test_projects: Vec<String>,
    /// Projects forced into the test set; reused across variant corpora.
    pub pinned_test: Vec<String>,
    pub pinned_valid: Vec<String>,
}

/// A candidate summary for one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub sample_id: String,
    pub candidate: String,
}

/// A type stored one-per-line in a `.jsonl` file.
pub trait Record: Serialize + DeserializeOwned {
    type Key: Ord;

    /// Records are written in ascending key order.
    fn sort_key(&self) -> Self::Key;
}

impl Record for Sample {
    type Key = String;
    fn sort_key(&self) -> String {
        self.id.clone()
    }
}

impl Record for SourceFunction {
    type Key = (String, String, u32, String);
    fn sort_key(&self) -> Self::Key {
        (
            self.project.clone(),
            self.file_path.clone(),
            self.start_line,
            self.name.clone(),
        )
    }
}

impl Record for DecompiledFunction {
    type Key = (String, String, String, Option<String>, String);
    fn sort_key(&self) -> Self::Key {
        (
            self.project.clone(),
            self.binary.clone(),
            self.name.clone(),
            self.address.clone(),
            self.opt_level_raw.clone(),
        )
    }
}

impl Record for Prediction {
    type Key = String;
    fn sort_key(&self) -> String {
        self.sample_id.clone()
    }
}

/// Reads every record of `path` in file order. Blank lines are skipped; the
/// first malformed line aborts with its 1-based line number.
pub fn read_records<R: Record>(path: impl AsRef<Path>) -> Result<Vec<R>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Schema {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes `records` one per line, sorted by key.
pub fn write_records<R: Record>(records: &[R], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&R> = records.iter().collect();
    sorted.sort_by_cached_key(|r| r.sort_key());
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in sorted {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a single pretty-printed JSON document such as `split.json`.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
