//! Maximal-munch lexer for decompiler pseudo-C.
//!
//! Whitespace and comments are not tokens; they are recovered from token
//! offsets, so `detokenize(src, &tokenize(src)) == src` for any input.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    TypeName,
    Number,
    StringLit,
    CharLit,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offset into the lexed string.
    pub offset: usize,
}

impl Token<'_> {
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Number | TokenKind::StringLit | TokenKind::CharLit
        )
    }
}

pub const C11_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Alignas", "_Alignof", "_Atomic", "_Bool",
    "_Complex", "_Generic", "_Imaginary", "_Noreturn", "_Static_assert", "_Thread_local",
];

/// Primitive type names the decompiler prints that are not C keywords.
pub const DECOMPILER_TYPES: &[&str] = &[
    "ulong", "uint", "ushort", "uchar", "byte", "sbyte", "bool", "word", "dword", "qword",
    "longlong", "ulonglong", "float10", "wchar_t", "wchar16", "wchar32", "char16", "char32",
    "code", "undefined", "undefined1", "undefined2", "undefined3", "undefined4", "undefined5",
    "undefined6", "undefined7", "undefined8", "undefined16", "int3", "int5", "int6", "int7",
    "uint3", "uint5", "uint6", "uint7", //
    // libc typedefs the decompiler prints from headers
    "size_t", "ssize_t", "ptrdiff_t", "intptr_t", "uintptr_t", "off_t", "time_t", "pid_t", "FILE",
    "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t",
];

pub fn is_keyword(word: &str) -> bool {
    C11_KEYWORDS.contains(&word)
}

pub fn is_type_name(word: &str) -> bool {
    DECOMPILER_TYPES.contains(&word)
}

const OPERATORS: &[&str] = &[
    // three characters first
    "<<=", ">>=", "...", //
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "^=", "|=", "##", "::", //
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "~", "&", "|", "^", "?", ":", ".", "#",
];
const PUNCTUATION: &[u8] = b"()[]{};,";

pub fn tokenize(src: &str) -> Vec<Token<'_>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'*') {
            i = src[i + 2..].find("*/").map_or(bytes.len(), |p| i + 2 + p + 2);
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'/') {
            i = src[i..].find('\n').map_or(bytes.len(), |p| i + p);
            continue;
        }
        let (kind, end) = if let Some(end) = prefixed_literal(bytes, i) {
            end
        } else if b.is_ascii_alphabetic() || b == b'_' {
            let end = scan_while(bytes, i, |c| c.is_ascii_alphanumeric() || c == b'_');
            let word = &src[i..end];
            let kind = if is_keyword(word) {
                TokenKind::Keyword
            } else if is_type_name(word) {
                TokenKind::TypeName
            } else {
                TokenKind::Identifier
            };
            (kind, end)
        } else if b.is_ascii_digit()
            || (b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit))
        {
            (TokenKind::Number, pp_number_end(bytes, i))
        } else if b == b'"' {
            (TokenKind::StringLit, quoted_end(bytes, i))
        } else if b == b'\'' {
            (TokenKind::CharLit, quoted_end(bytes, i))
        } else if PUNCTUATION.contains(&b) {
            (TokenKind::Punctuation, i + 1)
        } else if let Some(op) = OPERATORS.iter().find(|op| src[i..].starts_with(*op)) {
            (TokenKind::Operator, i + op.len())
        } else {
            // Unknown character: one punctuation token per char.
            let width = src[i..].chars().next().map_or(1, char::len_utf8);
            (TokenKind::Punctuation, i + width)
        };
        out.push(Token {
            kind,
            text: &src[i..end],
            offset: i,
        });
        i = end;
    }
    out
}

/// Rebuilds source text from `tokens`, taking the gaps (whitespace and
/// comments) from `src`.
pub fn detokenize(src: &str, tokens: &[Token<'_>]) -> String {
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    for t in tokens {
        out.push_str(&src[pos..t.offset]);
        out.push_str(t.text);
        pos = t.end();
    }
    out.push_str(&src[pos..]);
    out
}

/// `L"..."`, `u8"..."`, `U'x'` and friends.
fn prefixed_literal(bytes: &[u8], i: usize) -> Option<(TokenKind, usize)> {
    let rest = &bytes[i..];
    let prefix_len = if rest.starts_with(b"u8") {
        2
    } else if matches!(rest.first(), Some(b'L' | b'u' | b'U')) {
        1
    } else {
        return None;
    };
    match rest.get(prefix_len) {
        Some(b'"') => Some((TokenKind::StringLit, quoted_end(bytes, i + prefix_len))),
        Some(b'\'') => Some((TokenKind::CharLit, quoted_end(bytes, i + prefix_len))),
        _ => None,
    }
}

fn scan_while(bytes: &[u8], start: usize, pred: impl Fn(u8) -> bool) -> usize {
    let mut k = start;
    while k < bytes.len() && pred(bytes[k]) {
        k += 1;
    }
    k
}

/// Preprocessing-number rule: digits, letters, `_`, `.`, and signs directly
/// after an exponent marker.
fn pp_number_end(bytes: &[u8], start: usize) -> usize {
    let mut k = start + 1;
    while k < bytes.len() {
        let c = bytes[k];
        let signed_exponent =
            (c == b'+' || c == b'-') && matches!(bytes[k - 1], b'e' | b'E' | b'p' | b'P');
        if signed_exponent || c.is_ascii_alphanumeric() || c == b'_' || c == b'.' {
            k += 1;
        } else {
            break;
        }
    }
    k
}

/// End of a quoted literal; unterminated literals stop before the newline.
fn quoted_end(bytes: &[u8], start: usize) -> usize {
    let quote = bytes[start];
    let mut k = start + 1;
    while k < bytes.len() {
        match bytes[k] {
            b'\\' => k += 2,
            b'\n' => return k,
            c if c == quote => return k + 1,
            _ => k += 1,
        }
    }
    // a trailing backslash can step one past the end
    bytes.len()
}
