//! Scans the bundled fixture tree and prints every documented function with
//! the summary mined from its comment and the filter verdict.
//!
//! cargo run --example extract_docs [-- <src-root>]

use std::path::PathBuf;

use decompsum::source_docs::{
    extract_summary_with_rule, scan_project_tree, ExtractionMode, SummaryFilter,
};

fn main() -> decompsum::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus/src")
    });
    let (functions, mut report) = scan_project_tree(&root)?;
    let filter = SummaryFilter::default();

    for f in &functions {
        let Some(doc) = &f.doc else {
            println!("{}::{:<18} (no comment)", f.project, f.name);
            continue;
        };
        let (summary, rule) = extract_summary_with_rule(doc, ExtractionMode::StrictRules);
        let summary = summary.unwrap_or_default();
        let verdict = filter.check(&summary);
        println!(
            "{}::{:<18} {:<14} {:<14} {summary}",
            f.project,
            f.name,
            format!("{rule:?}"),
            verdict.reason.as_str(),
        );
    }

    report.tally_summaries(&functions, ExtractionMode::StrictRules, &filter);
    println!("\n{report}");
    Ok(())
}
