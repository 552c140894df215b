//! Function and documentation mining from C source trees.

mod filter;
mod lang;
mod scanner;
mod summary;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::record::SourceFunction;

pub use filter::{
    filter_summary, special_token_class, FilterReason, FilterToggles, FilterVerdict,
    SpecialTokenClass, SummaryFilter, MAX_TOKENS, MIN_TOKENS,
};
pub use lang::{
    detect_language, parse_fasttext_line, FastTextCommand, LanguageGuess, LanguageIdentifier,
    StopwordIdentifier,
};
pub use scanner::{
    extract_functions, extract_functions_with_diagnostics, strip_markers, ScanDiagnostics,
};
pub use summary::{
    extract_summary, extract_summary_with_rule, first_sentence, last_sentence, sentences,
    ExtractionMode, SummaryRule,
};

/// Scans `root/<project>/**/*.{c,h}`. Each top-level directory is one
/// project; file paths are reported relative to it. Output is ordered by
/// (project, file, line) regardless of scheduling.
pub fn scan_project_tree(root: &Path) -> Result<(Vec<SourceFunction>, ExtractReport)> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        let path = entry.path();
        let is_c = matches!(path.extension().and_then(|e| e.to_str()), Some("c" | "h"));
        if !entry.file_type().is_file() || !is_c {
            continue;
        }
        let rel = path.strip_prefix(root).expect("walkdir yields paths under root");
        let mut parts = rel.components();
        let project = parts.next().unwrap().as_os_str().to_string_lossy().into_owned();
        let file_path: Vec<String> = parts
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();
        if file_path.is_empty() {
            // Files directly under root belong to no project.
            continue;
        }
        files.push((path.to_path_buf(), project, file_path.join("/")));
    }

    let scanned: Vec<_> = files
        .par_iter()
        .map(|(path, project, file_path)| {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let text = String::from_utf8_lossy(&bytes);
            Ok(extract_functions_with_diagnostics(&text, file_path, project))
        })
        .collect::<Result<_>>()?;

    let mut report = ExtractReport {
        files: files.len(),
        ..Default::default()
    };
    let mut functions = Vec::new();
    for (fns, diag) in scanned {
        report.scan.merge(&diag);
        functions.extend(fns);
    }
    functions.sort_by(|a, b| {
        (&a.project, &a.file_path, a.start_line).cmp(&(&b.project, &b.file_path, b.start_line))
    });
    report.functions = functions.len();
    report.documented = functions.iter().filter(|f| f.doc.is_some()).count();
    Ok((functions, report))
}

/// Tallies for an extraction run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractReport {
    pub files: usize,
    pub functions: usize,
    pub documented: usize,
    pub scan: ScanDiagnostics,
    /// Verdicts for the summaries mined from documented functions.
    pub filter_reasons: BTreeMap<FilterReason, usize>,
    /// Documented functions whose doc comment the language identifier
    /// classifies as English.
    pub english_docs: usize,
}

impl ExtractReport {
    /// Fills `filter_reasons` and `english_docs` from `functions`.
    pub fn tally_summaries(
        &mut self,
        functions: &[SourceFunction],
        mode: ExtractionMode,
        filter: &SummaryFilter,
    ) {
        self.filter_reasons.clear();
        self.english_docs = 0;
        for doc in functions.iter().filter_map(|f| f.doc.as_ref()) {
            let verdict = match extract_summary(doc, mode) {
                Some(s) => filter.check(&s),
                None => filter.check(""),
            };
            *self.filter_reasons.entry(verdict.reason).or_default() += 1;
            if detect_language(&doc.raw_text).is_ok_and(|g| g.is_english(0.5)) {
                self.english_docs += 1;
            }
        }
    }

    pub fn english_fraction(&self) -> f64 {
        if self.documented == 0 {
            0.0
        } else {
            self.english_docs as f64 / self.documented as f64
        }
    }
}

impl std::fmt::Display for ExtractReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "files scanned        {}", self.files)?;
        writeln!(f, "functions            {}", self.functions)?;
        writeln!(f, "documented           {}", self.documented)?;
        writeln!(f, "non-function blocks  {}", self.scan.non_function_blocks)?;
        writeln!(f, "unbalanced regions   {}", self.scan.unbalanced)?;
        writeln!(
            f,
            "english docs         {} ({:.2}%)",
            self.english_docs,
            100.0 * self.english_fraction()
        )?;
        for (reason, n) in &self.filter_reasons {
            writeln!(f, "summary {:<12} {}", reason.as_str(), n)?;
        }
        Ok(())
    }
}
