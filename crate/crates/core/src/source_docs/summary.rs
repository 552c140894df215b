//! Mining a one-sentence summary out of a doc comment.
//!
//! Strict extraction tries these rules in order and uses the first whose
//! trigger is present:
//!
//! 1. single-line comment: its first sentence;
//! 2. `@brief` / `@purpose`: first sentence after the tag;
//! 3. a `Description:` line: the sentence that follows it;
//! 4. `@param` / `@v`: the last sentence of the prose before the first tag;
//! 5. otherwise the first sentence of the block.
//!
//! Sentences end at `.`, `!` or `?` followed by whitespace (except after
//! `e.g.`, `i.e.`, `etc.` and single-letter initials), at blank lines, at
//! any `@tag` word, and at a line break when the line has no terminator and
//! the next line starts with an uppercase letter.

use serde::{Deserialize, Serialize};

use crate::record::{CommentStyle, DocComment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionMode {
    /// Apply the five rules above.
    #[default]
    StrictRules,
    /// Always take the first sentence of the comment.
    FirstSentence,
}

/// The rule that produced (or failed to produce) a summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryRule {
    SingleLine,
    BriefTag,
    Description,
    ParamTag,
    FirstSentence,
}

const ABBREVIATIONS: &[&str] = &["e.g.", "i.e.", "etc.", "vs.", "cf."];
const DESCRIPTION: &str = "Description:";

pub fn extract_summary(doc: &DocComment, mode: ExtractionMode) -> Option<String> {
    extract_summary_with_rule(doc, mode).0
}

/// Like [`extract_summary`] but also reports which rule fired.
pub fn extract_summary_with_rule(
    doc: &DocComment,
    mode: ExtractionMode,
) -> (Option<String>, SummaryRule) {
    let text = doc.raw_text.as_str();
    let (sentence, rule) = match mode {
        ExtractionMode::FirstSentence => (first_sentence(text), SummaryRule::FirstSentence),
        ExtractionMode::StrictRules => strict(text, doc.style),
    };
    (sentence.filter(|s| !s.is_empty()), rule)
}

fn strict(text: &str, style: CommentStyle) -> (Option<String>, SummaryRule) {
    if style == CommentStyle::SingleLine {
        return (first_sentence(text), SummaryRule::SingleLine);
    }
    if let Some(end) = find_tag(text, &["brief", "purpose"]).map(|(_, end)| end) {
        return (first_sentence(&text[end..]), SummaryRule::BriefTag);
    }
    if let Some(pos) = find_word(text, DESCRIPTION) {
        let rest = &text[pos + DESCRIPTION.len()..];
        return (first_sentence(rest), SummaryRule::Description);
    }
    if let Some((start, _)) = find_tag(text, &["param", "v"]) {
        let prose_end = find_tag(text, &[]).map_or(start, |(s, _)| s.min(start));
        return (last_sentence(&text[..prose_end]), SummaryRule::ParamTag);
    }
    (first_sentence(text), SummaryRule::FirstSentence)
}

/// Byte range of the first `@name` tag word whose name is in `names`
/// (any tag when `names` is empty). `@param[in]` counts as `param`.
fn find_tag(text: &str, names: &[&str]) -> Option<(usize, usize)> {
    word_spans(text).find_map(|(start, word)| {
        let name = tag_name(word)?;
        (names.is_empty() || names.contains(&name)).then_some((start, start + word.len()))
    })
}

fn find_word(text: &str, target: &str) -> Option<usize> {
    word_spans(text).find_map(|(start, word)| (word == target).then_some(start))
}

/// `Some(name)` when `word` is a tag such as `@brief` or `@param[out]`.
fn tag_name(word: &str) -> Option<&str> {
    let rest = word.strip_prefix('@')?;
    let end = rest
        .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .unwrap_or(rest.len());
    let name = &rest[..end];
    let tail = &rest[end..];
    let valid_tail = tail.is_empty() || tail.starts_with('[') || tail == ":";
    (name.starts_with(|c: char| c.is_ascii_alphabetic()) && valid_tail).then_some(name)
}

fn is_tag_word(word: &str) -> bool {
    tag_name(word).is_some() || word == DESCRIPTION
}

fn word_spans(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_ascii_whitespace()
        .map(move |w| (w.as_ptr() as usize - text.as_ptr() as usize, w))
}

pub fn first_sentence(text: &str) -> Option<String> {
    sentences(text).into_iter().next()
}

pub fn last_sentence(text: &str) -> Option<String> {
    sentences(text).pop()
}

/// Splits `text` into non-empty sentences with whitespace collapsed.
pub fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let flush = |current: &mut Vec<&str>, out: &mut Vec<String>| {
        if !current.is_empty() {
            out.push(current.join(" "));
            current.clear();
        }
    };
    let mut prev_line_open = false;
    for line in text.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            flush(&mut current, &mut out);
            prev_line_open = false;
            continue;
        }
        if prev_line_open && words[0].starts_with(|c: char| c.is_uppercase()) {
            flush(&mut current, &mut out);
        }
        for word in words {
            if is_tag_word(word) {
                flush(&mut current, &mut out);
                continue;
            }
            current.push(word);
            if ends_sentence(word) {
                flush(&mut current, &mut out);
            }
        }
        prev_line_open = !current.is_empty();
    }
    flush(&mut current, &mut out);
    out
}

fn ends_sentence(word: &str) -> bool {
    let core = word.trim_end_matches(['"', '\'', ')', ']']);
    if !core.ends_with(['.', '!', '?']) {
        return false;
    }
    if core.ends_with('.') {
        let lower = core.to_ascii_lowercase();
        if ABBREVIATIONS.iter().any(|a| lower.ends_with(a) && lower.len() == a.len()) {
            return false;
        }
        let mut chars = core.strip_suffix('.').unwrap_or(core).chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if c.is_uppercase() {
                return false;
            }
        }
        if core.ends_with("..") {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multi(text: &str) -> DocComment {
        DocComment {
            raw_text: text.to_string(),
            style: CommentStyle::MultiLine,
            line_span: (1, 5),
        }
    }

    fn single(text: &str) -> DocComment {
        DocComment {
            raw_text: text.to_string(),
            style: CommentStyle::SingleLine,
            line_span: (3, 3),
        }
    }

    const SSRC_SOURCE: &str =
        "Get the Synchronizing source for an RTP/RTCP Socket\n@param rs RTP Socket\n@return Synchronizing source";
    const MCO_SOURCE: &str = "@brief Select the source of Microcontroller Clock Output\nExact sources available depend on your target.\nOn devices with multiple MCO pins, this function controls MCO1\n@param[in] mcosrc the unshifted source bits";

    #[test]
    fn param_rule_on_rtp_doc() {
        let (s, rule) = extract_summary_with_rule(&multi(SSRC_SOURCE), ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::ParamTag);
        assert_eq!(s.as_deref(), Some("Get the Synchronizing source for an RTP/RTCP Socket"));
    }

    #[test]
    fn brief_rule_on_mco_doc() {
        let (s, rule) = extract_summary_with_rule(&multi(MCO_SOURCE), ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::BriefTag);
        assert_eq!(s.as_deref(), Some("Select the source of Microcontroller Clock Output"));
    }

    #[test]
    fn description_rule() {
        let doc = multi("Description:\nFrees the internal buffer.");
        let (s, rule) = extract_summary_with_rule(&doc, ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::Description);
        assert_eq!(s.as_deref(), Some("Frees the internal buffer."));

        let inline = multi("Name: buf_free\nDescription: Frees the buffer. Safe on NULL.");
        assert_eq!(
            extract_summary(&inline, ExtractionMode::StrictRules).as_deref(),
            Some("Frees the buffer.")
        );
    }

    #[test]
    fn single_line_rule() {
        let doc = single("Frees x. Does not touch y.");
        let (s, rule) = extract_summary_with_rule(&doc, ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::SingleLine);
        assert_eq!(s.as_deref(), Some("Frees x."));
    }

    #[test]
    fn fallback_rule() {
        let doc = multi("Parses a header line. The line must be\nNUL terminated.");
        let (s, rule) = extract_summary_with_rule(&doc, ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::FirstSentence);
        assert_eq!(s.as_deref(), Some("Parses a header line."));
    }

    #[test]
    fn empty_doc_gives_none() {
        assert_eq!(extract_summary(&multi(""), ExtractionMode::StrictRules), None);
        assert_eq!(extract_summary(&single("   "), ExtractionMode::FirstSentence), None);
        assert_eq!(extract_summary(&multi("@brief"), ExtractionMode::StrictRules), None);
    }

    #[test]
    fn first_sentence_mode_ignores_tags_priority() {
        let doc = multi("Some intro text here.\n@brief The real summary.");
        assert_eq!(
            extract_summary(&doc, ExtractionMode::FirstSentence).as_deref(),
            Some("Some intro text here.")
        );
        assert_eq!(
            extract_summary(&doc, ExtractionMode::StrictRules).as_deref(),
            Some("The real summary.")
        );
    }

    #[test]
    fn first_sentence_of_rtp_doc_stops_at_tag() {
        assert_eq!(
            extract_summary(&multi(SSRC_SOURCE), ExtractionMode::FirstSentence).as_deref(),
            Some("Get the Synchronizing source for an RTP/RTCP Socket")
        );
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            first_sentence("Reads options, e.g. verbosity and color. Then exits.").as_deref(),
            Some("Reads options, e.g. verbosity and color.")
        );
        assert_eq!(
            first_sentence("Written by J. Smith for the board. More.").as_deref(),
            Some("Written by J. Smith for the board.")
        );
    }

    #[test]
    fn wrapped_lowercase_line_continues_sentence() {
        assert_eq!(
            first_sentence("Copies the source buffer into\nthe destination buffer.").as_deref(),
            Some("Copies the source buffer into the destination buffer.")
        );
    }

    #[test]
    fn v_tag_is_not_version() {
        let doc = multi("Returns the library version string.\n@version 1.2");
        let (_, rule) = extract_summary_with_rule(&doc, ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::FirstSentence);
        let doc = multi("Sets the gain.\n@v gain the new gain");
        let (s, rule) = extract_summary_with_rule(&doc, ExtractionMode::StrictRules);
        assert_eq!(rule, SummaryRule::ParamTag);
        assert_eq!(s.as_deref(), Some("Sets the gain."));
    }

    #[test]
    fn param_rule_takes_last_sentence_before_tags() {
        let doc = multi("Internal helper. Computes the CRC of a block.\n@return the crc\n@param b block");
        assert_eq!(
            extract_summary(&doc, ExtractionMode::StrictRules).as_deref(),
            Some("Computes the CRC of a block.")
        );
    }
}
