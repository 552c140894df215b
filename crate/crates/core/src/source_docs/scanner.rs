//! Brace-balanced recognition of C function definitions and the comment that
//! documents each one.
//!
//! The source is first masked: comments, string/char literals and
//! preprocessor lines become spaces (newlines are kept, so byte offsets and
//! line numbers are unchanged). Function definitions are then `{` blocks at
//! file scope preceded by `identifier ( ... )`.

use crate::record::{CommentStyle, DocComment, SourceFunction};

/// Counts of source regions the scanner could not use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ScanDiagnostics {
    /// File-scope `{` blocks that are not function bodies (structs,
    /// initializers, K&R definitions, ...).
    pub non_function_blocks: usize,
    /// A block whose closing brace was never found; scanning stops there.
    pub unbalanced: usize,
    /// Definitions skipped because their text was not valid UTF-8 at the
    /// recognized boundaries.
    pub bad_boundaries: usize,
}

impl ScanDiagnostics {
    pub fn merge(&mut self, other: &ScanDiagnostics) {
        self.non_function_blocks += other.non_function_blocks;
        self.unbalanced += other.unbalanced;
        self.bad_boundaries += other.bad_boundaries;
    }
}

#[derive(Debug, Clone)]
struct Comment {
    start: usize,
    end: usize,
    start_line: u32,
    end_line: u32,
    /// Only whitespace precedes the comment on its first line.
    owns_line: bool,
    is_line_comment: bool,
    text: String,
}

struct Masked {
    bytes: Vec<u8>,
    comments: Vec<Comment>,
    /// Byte offset of the start of each line.
    line_starts: Vec<usize>,
}

impl Masked {
    fn line_of(&self, offset: usize) -> u32 {
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i as u32 + 1,
            Err(i) => i as u32,
        }
    }
}

const NON_NAMES: &[&str] = &[
    "if", "while", "for", "switch", "return", "sizeof", "do", "else", "case", "_Alignof",
    "_Generic", "_Static_assert",
];
const ATTRIBUTE_LIKE: &[&str] = &["__attribute__", "__declspec", "__asm__", "asm", "__asm"];

pub fn extract_functions(source: &str, file_path: &str, project: &str) -> Vec<SourceFunction> {
    extract_functions_with_diagnostics(source, file_path, project).0
}

pub fn extract_functions_with_diagnostics(
    source: &str,
    file_path: &str,
    project: &str,
) -> (Vec<SourceFunction>, ScanDiagnostics) {
    let masked = mask(source);
    let comments = group_line_comments(&masked.comments, source);
    let bytes = &masked.bytes;
    let mut diag = ScanDiagnostics::default();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => {
                let Some(close) = matching_brace(bytes, i) else {
                    diag.unbalanced += 1;
                    break;
                };
                match recognize_header(bytes, i) {
                    Some((sig_start, name_start, name_end, paren_close)) => {
                        let ok = [sig_start, name_start, name_end, paren_close + 1, close + 1]
                            .iter()
                            .all(|&o| source.is_char_boundary(o));
                        if ok {
                            let start_line = masked.line_of(sig_start);
                            let doc = attached_doc(&comments, bytes, sig_start, start_line);
                            out.push(SourceFunction {
                                project: project.to_string(),
                                file_path: file_path.to_string(),
                                name: source[name_start..name_end].to_string(),
                                signature: source[sig_start..=paren_close].to_string(),
                                body_text: source[sig_start..=close].to_string(),
                                start_line,
                                end_line: masked.line_of(close),
                                doc,
                            });
                        } else {
                            diag.bad_boundaries += 1;
                        }
                    }
                    None => diag.non_function_blocks += 1,
                }
                i = close + 1;
            }
            _ => i += 1,
        }
    }
    (out, diag)
}

fn matching_brace(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (k, &b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(k);
                }
            }
            _ => {}
        }
    }
    None
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn skip_ws_back(bytes: &[u8], mut k: usize) -> usize {
    // Returns the index one past the last non-whitespace byte before `k`.
    while k > 0 && bytes[k - 1].is_ascii_whitespace() {
        k -= 1;
    }
    k
}

/// For the `{` at `open`, returns `(signature start, name start, name end,
/// closing paren)` when it opens a function body.
fn recognize_header(bytes: &[u8], open: usize) -> Option<(usize, usize, usize, usize)> {
    let mut k = skip_ws_back(bytes, open);
    loop {
        if k == 0 || bytes[k - 1] != b')' {
            return None;
        }
        let paren_close = k - 1;
        let mut depth = 0usize;
        let mut j = paren_close + 1;
        let paren_open = loop {
            if j == 0 {
                return None;
            }
            j -= 1;
            match bytes[j] {
                b')' => depth += 1,
                b'(' => {
                    depth -= 1;
                    if depth == 0 {
                        break j;
                    }
                }
                b';' | b'{' | b'}' => return None,
                _ => {}
            }
        };
        let name_end = skip_ws_back(bytes, paren_open);
        let mut name_start = name_end;
        while name_start > 0 && is_ident_byte(bytes[name_start - 1]) {
            name_start -= 1;
        }
        if name_start == name_end || bytes[name_start].is_ascii_digit() {
            return None;
        }
        let name = std::str::from_utf8(&bytes[name_start..name_end]).ok()?;
        if ATTRIBUTE_LIKE.contains(&name) {
            // `void f(void) __attribute__((x)) {`: keep walking back.
            k = skip_ws_back(bytes, name_start);
            continue;
        }
        if NON_NAMES.contains(&name) {
            return None;
        }
        let sig_start = declaration_start(bytes, name_start);
        // A declaration whose header still contains `=` is an initializer.
        if bytes[sig_start..name_start].contains(&b'=') {
            return None;
        }
        return Some((sig_start, name_start, name_end, header_close(bytes, paren_open)));
    }
}

/// Closing paren matching the `(` at `open`.
fn header_close(bytes: &[u8], open: usize) -> usize {
    let mut depth = 0usize;
    for (k, &b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return k;
                }
            }
            _ => {}
        }
    }
    open
}

fn declaration_start(bytes: &[u8], name_start: usize) -> usize {
    let mut k = name_start;
    while k > 0 && !matches!(bytes[k - 1], b';' | b'{' | b'}') {
        k -= 1;
    }
    while k < name_start && bytes[k].is_ascii_whitespace() {
        k += 1;
    }
    k
}

fn attached_doc(
    comments: &[Comment],
    masked: &[u8],
    sig_start: usize,
    start_line: u32,
) -> Option<DocComment> {
    let idx = comments.partition_point(|c| c.end <= sig_start);
    let c = comments.get(idx.checked_sub(1)?)?;
    if !c.owns_line || c.end_line + 1 < start_line {
        return None;
    }
    if !masked[c.end..sig_start].iter().all(u8::is_ascii_whitespace) {
        return None;
    }
    let raw_text = strip_markers(&c.text, c.is_line_comment);
    if raw_text.is_empty() {
        return None;
    }
    let style = if c.start_line == c.end_line {
        CommentStyle::SingleLine
    } else {
        CommentStyle::MultiLine
    };
    Some(DocComment {
        raw_text,
        style,
        line_span: (c.start_line, c.end_line),
    })
}

/// Removes `/* */`, `//` and leading `*` decoration; trims every line and
/// drops leading/trailing blank lines.
pub fn strip_markers(text: &str, line_comment: bool) -> String {
    let lines: Vec<String> = if line_comment {
        text.lines()
            .map(|l| {
                let l = l.trim_start();
                let l = l.strip_prefix("//").unwrap_or(l);
                l.trim_start_matches(['/', '!']).trim().to_string()
            })
            .collect()
    } else {
        let inner = text.strip_prefix("/*").unwrap_or(text);
        let inner = inner.strip_suffix("*/").unwrap_or(inner);
        let inner = inner.trim_start_matches(['*', '!']);
        let inner = inner.trim_end_matches('*');
        inner
            .lines()
            .map(|l| l.trim().trim_start_matches('*').trim().to_string())
            .collect()
    };
    let first = lines.iter().position(|l| !l.is_empty());
    let last = lines.iter().rposition(|l| !l.is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}

/// Merges runs of `//` comments on consecutive lines into one comment.
fn group_line_comments(comments: &[Comment], source: &str) -> Vec<Comment> {
    let mut out: Vec<Comment> = Vec::with_capacity(comments.len());
    for c in comments {
        if let Some(prev) = out.last_mut() {
            let between = &source.as_bytes()[prev.end..c.start];
            if prev.is_line_comment
                && c.is_line_comment
                && c.owns_line
                && prev.owns_line
                && c.start_line == prev.end_line + 1
                && between.iter().all(u8::is_ascii_whitespace)
            {
                prev.text.push('\n');
                prev.text.push_str(&c.text);
                prev.end = c.end;
                prev.end_line = c.end_line;
                continue;
            }
        }
        out.push(c.clone());
    }
    out
}

fn mask(source: &str) -> Masked {
    let src = source.as_bytes();
    let mut bytes = src.to_vec();
    let mut comments = Vec::new();
    let mut line_starts = vec![0usize];
    for (k, &b) in src.iter().enumerate() {
        if b == b'\n' {
            line_starts.push(k + 1);
        }
    }
    let line_of = |off: usize| -> u32 {
        match line_starts.binary_search(&off) {
            Ok(i) => i as u32 + 1,
            Err(i) => i as u32,
        }
    };
    let blank = |bytes: &mut [u8], from: usize, to: usize| {
        for b in &mut bytes[from..to] {
            if *b != b'\n' {
                *b = b' ';
            }
        }
    };

    let mut i = 0;
    let mut at_line_start = true;
    let mut in_directive = false;
    while i < src.len() {
        let b = src[i];
        if b == b'/' && src.get(i + 1) == Some(&b'*') {
            let end = find(src, i + 2, b"*/").map_or(src.len(), |e| e + 2);
            comments.push(Comment {
                start: i,
                end,
                start_line: line_of(i),
                end_line: line_of(end.saturating_sub(1)),
                owns_line: at_line_start,
                is_line_comment: false,
                text: String::from_utf8_lossy(&src[i..end]).into_owned(),
            });
            blank(&mut bytes, i, end);
            i = end;
            continue;
        }
        if b == b'/' && src.get(i + 1) == Some(&b'/') {
            let end = src[i..]
                .iter()
                .position(|&c| c == b'\n')
                .map_or(src.len(), |p| i + p);
            comments.push(Comment {
                start: i,
                end,
                start_line: line_of(i),
                end_line: line_of(i),
                owns_line: at_line_start,
                is_line_comment: true,
                text: String::from_utf8_lossy(&src[i..end]).into_owned(),
            });
            blank(&mut bytes, i, end);
            i = end;
            continue;
        }
        match b {
            b'\n' => {
                at_line_start = true;
                in_directive = false;
                i += 1;
            }
            b'\\' if in_directive && src.get(i + 1) == Some(&b'\n') => {
                bytes[i] = b' ';
                i += 2;
            }
            b'\\' if in_directive && src.get(i + 1) == Some(&b'\r') => {
                bytes[i] = b' ';
                bytes[i + 1] = b' ';
                i += 2;
            }
            b'#' if at_line_start => {
                in_directive = true;
                at_line_start = false;
                bytes[i] = b' ';
                i += 1;
            }
            b'"' | b'\'' => {
                let end = literal_end(src, i);
                blank(&mut bytes, i, end);
                at_line_start = false;
                i = end;
            }
            _ => {
                if !b.is_ascii_whitespace() {
                    at_line_start = false;
                }
                if in_directive && b != b'\r' {
                    bytes[i] = b' ';
                }
                i += 1;
            }
        }
    }
    Masked {
        bytes,
        comments,
        line_starts,
    }
}

fn find(hay: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    hay.get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| from + p)
}

/// End (exclusive) of the quoted literal opening at `start`; unterminated
/// literals stop at the end of the line.
fn literal_end(src: &[u8], start: usize) -> usize {
    let quote = src[start];
    let mut k = start + 1;
    while k < src.len() {
        match src[k] {
            b'\\' => k += 2,
            b'\n' => return k,
            c if c == quote => return k + 1,
            _ => k += 1,
        }
    }
    src.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SSRC_SOURCE: &str = "/**\n * Get the Synchronizing source for an RTP/RTCP Socket\n * @param rs RTP Socket\n * @return Synchronizing source\n */\nuint32_t rtp_sess_ssrc(const struct rtp_sock *rs){\n\treturn rs ? rs -> enc.ssrc : 0;}\n";

    #[test]
    fn empty_source_has_no_functions() {
        assert!(extract_functions("", "a.c", "p").is_empty());
    }

    #[test]
    fn finds_documented_definition() {
        let fns = extract_functions(SSRC_SOURCE, "src/rtp/sess.c", "re");
        assert_eq!(fns.len(), 1);
        let f = &fns[0];
        assert_eq!(f.name, "rtp_sess_ssrc");
        assert_eq!(f.start_line, 6);
        assert_eq!(f.end_line, 7);
        assert_eq!(f.signature, "uint32_t rtp_sess_ssrc(const struct rtp_sock *rs)");
        assert!(f.body_text.ends_with("0;}"));
        let doc = f.doc.as_ref().unwrap();
        assert_eq!(doc.style, CommentStyle::MultiLine);
        assert_eq!(doc.line_span, (1, 5));
        assert_eq!(
            doc.raw_text,
            "Get the Synchronizing source for an RTP/RTCP Socket\n@param rs RTP Socket\n@return Synchronizing source"
        );
    }

    #[test]
    fn doc_only_on_adjacent_definition() {
        let src = "static int\nalloc_x(int n)\n{\n\treturn n;\n}\n\n/* Frees x. */\nvoid free_x(int *x)\n{\n\tfree(x);\n}\n";
        let fns = extract_functions(src, "x.c", "p");
        assert_eq!(fns.len(), 2);
        assert_eq!(fns[0].name, "alloc_x");
        assert_eq!(fns[0].signature, "static int\nalloc_x(int n)");
        assert!(fns[0].doc.is_none());
        assert_eq!(fns[1].name, "free_x");
        let doc = fns[1].doc.as_ref().unwrap();
        assert_eq!(doc.raw_text, "Frees x.");
        assert_eq!(doc.style, CommentStyle::SingleLine);
    }

    #[test]
    fn blank_line_breaks_attachment() {
        let src = "/* Orphan comment about nothing. */\n\nint f(void) { return 1; }\n";
        let fns = extract_functions(src, "x.c", "p");
        assert_eq!(fns.len(), 1);
        assert!(fns[0].doc.is_none());
    }

    #[test]
    fn prototypes_macros_and_structs_are_not_functions() {
        let src = r#"
#define MAX(a, b) { ((a) > (b) ? (a) : (b)) }
#define LONG_MACRO(x) do { \
    foo(x); \
} while (0)
/* Prototype doc. */
int proto(int a);
struct point { int x; int y; };
static const int table[] = { 1, 2, 3 };
/// Adds two numbers together.
int add(int a, int b) { return a + b; }
"#;
        let (fns, diag) = extract_functions_with_diagnostics(src, "x.c", "p");
        let names: Vec<_> = fns.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["add"]);
        assert_eq!(fns[0].doc.as_ref().unwrap().raw_text, "Adds two numbers together.");
        assert_eq!(diag.non_function_blocks, 2);
    }

    #[test]
    fn braces_in_strings_and_comments_are_ignored() {
        let src = "int f(void) {\n\tputs(\"}{\"); /* } */\n\treturn '}';\n}\n// Second.\nint g(void) { return 0; }\n";
        let fns = extract_functions(src, "x.c", "p");
        assert_eq!(fns.len(), 2);
        assert_eq!(fns[1].name, "g");
        assert_eq!(fns[1].doc.as_ref().unwrap().raw_text, "Second.");
    }

    #[test]
    fn consecutive_line_comments_merge() {
        let src = "// Resets the parser state.\n// Call before reuse.\nvoid reset(struct p *p) { p->n = 0; }\n";
        let fns = extract_functions(src, "x.c", "p");
        let doc = fns[0].doc.as_ref().unwrap();
        assert_eq!(doc.style, CommentStyle::MultiLine);
        assert_eq!(doc.line_span, (1, 2));
        assert_eq!(doc.raw_text, "Resets the parser state.\nCall before reuse.");
    }

    #[test]
    fn trailing_code_comment_does_not_attach() {
        let src = "int counter; /* number of calls */\nint next(void) { return ++counter; }\n";
        let fns = extract_functions(src, "x.c", "p");
        assert!(fns[0].doc.is_none());
    }

    #[test]
    fn comment_inside_previous_body_does_not_attach() {
        let src = "void a(void) {\n\t/* inner */\n}\nvoid b(void) {}\n";
        let fns = extract_functions(src, "x.c", "p");
        assert!(fns[1].doc.is_none());
    }

    #[test]
    fn attribute_after_parameters() {
        let src = "/** Never returns. */\nvoid die(const char *m) __attribute__((noreturn)) {\n\tabort();\n}\n";
        let fns = extract_functions(src, "x.c", "p");
        assert_eq!(fns.len(), 1);
        assert_eq!(fns[0].name, "die");
        assert!(fns[0].doc.is_some());
    }

    #[test]
    fn unbalanced_block_is_counted() {
        let src = "int ok(void) { return 0; }\nint broken(void) {\n\tif (x) {\n";
        let (fns, diag) = extract_functions_with_diagnostics(src, "x.c", "p");
        assert_eq!(fns.len(), 1);
        assert_eq!(diag.unbalanced, 1);
    }

    #[test]
    fn decorative_block_comment_is_stripped() {
        let text = "/***********************\n * Parses the header.\n *\n * Extra.\n ***********************/";
        assert_eq!(strip_markers(text, false), "Parses the header.\n\nExtra.");
        assert_eq!(strip_markers("/**/", false), "");
        assert_eq!(strip_markers("/// Hi there", true), "Hi there");
    }

    #[test]
    fn non_ascii_in_comments_is_fine() {
        let src = "/* Libère le tampon interne. */\nvoid libere(void) {}\n";
        let fns = extract_functions(src, "x.c", "p");
        assert_eq!(fns[0].doc.as_ref().unwrap().raw_text, "Libère le tampon interne.");
    }
}
