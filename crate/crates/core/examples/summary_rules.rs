//! The summary extraction rules and the summary filter on hand-written
//! comments.
//!
//! cargo run --example summary_rules

use decompsum::source_docs::{extract_summary_with_rule, filter_summary, ExtractionMode};
use decompsum::{CommentStyle, DocComment};

fn doc(text: &str, style: CommentStyle) -> DocComment {
    DocComment {
        raw_text: text.to_string(),
        style,
        line_span: (1, 1),
    }
}

fn main() {
    let comments = [
        doc("Release the memory owned by a string buffer. Safe on NULL.", CommentStyle::SingleLine),
        doc(
            "@brief Select the source of Microcontroller Clock Output\nExact sources available depend on your target.\n@param[in] mcosrc the unshifted source bits",
            CommentStyle::MultiLine,
        ),
        doc(
            "Description:\nEncode an RTP header into a memory buffer. The buffer grows as needed.",
            CommentStyle::MultiLine,
        ),
        doc(
            "Get the Synchronizing source for an RTP/RTCP Socket\n@param rs RTP Socket\n@return Synchronizing source",
            CommentStyle::MultiLine,
        ),
        doc(
            "Shift bits through the scan chain. The last bit raises TMS.",
            CommentStyle::MultiLine,
        ),
        doc("FIXME: reset sequence is not verified on every target", CommentStyle::MultiLine),
        doc("See http://www.rfc-editor.org/rfc/rfc3550.txt for the fields.", CommentStyle::MultiLine),
        doc("Active la sortie USB et configure les broches du port.", CommentStyle::MultiLine),
        doc("Clear.", CommentStyle::MultiLine),
    ];

    for mode in [ExtractionMode::StrictRules, ExtractionMode::FirstSentence] {
        println!("== {mode:?}");
        for c in &comments {
            let (summary, rule) = extract_summary_with_rule(c, mode);
            let summary = summary.unwrap_or_default();
            let verdict = filter_summary(&summary);
            println!("{:<14} {:<14} {summary}", format!("{rule:?}"), verdict.reason.as_str());
        }
        println!();
    }
}
