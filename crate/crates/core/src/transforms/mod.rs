//! Identifier anonymization of decompiled code.
//!
//! Demi-stripping renames every identifier token: the defined function
//! becomes `FUN_0` and every other identifier `VAR_k`, numbered by first
//! occurrence from 0. Keywords, decompiler type names, literals, comments and
//! whitespace are left as they are.

mod lexer;

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::record::{Sample, Variant};

pub use lexer::{
    detokenize, is_keyword, is_type_name, tokenize, Token, TokenKind, C11_KEYWORDS,
    DECOMPILER_TYPES,
};

pub const FUNCTION_PLACEHOLDER: &str = "FUN_0";

/// Original identifier to placeholder, in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameMap {
    entries: Vec<(String, String)>,
    index: HashMap<String, usize>,
}

impl RenameMap {
    pub fn get(&self, original: &str) -> Option<&str> {
        self.index
            .get(original)
            .map(|&k| self.entries[k].1.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert(&mut self, original: &str, placeholder: String) {
        self.index.insert(original.to_string(), self.entries.len());
        self.entries.push((original.to_string(), placeholder));
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DemiStripOptions {
    /// Leave decompiler-invented names (`param_1`, `local_14`, `uVar2`,
    /// `DAT_00102010`, ...) untouched.
    pub keep_generated: bool,
}

static GENERATED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(concat!(
        r"^(",
        r"param_\d+|local_[0-9a-fA-F]+|[a-z]{1,4}Var\d+|in_[A-Za-z0-9_]+|extraout_[A-Za-z0-9_]+",
        r"|unaff_[A-Za-z0-9_]+|(DAT|PTR|LAB|FUN|SUB|_DAT)_[0-9a-fA-F]{4,}|s_[A-Za-z0-9_]+_[0-9a-fA-F]{6,}",
        r")$",
    ))
    .unwrap()
});

/// True for names the decompiler invents rather than recovers from symbols.
pub fn is_generated_name(name: &str) -> bool {
    GENERATED.is_match(name)
}

pub fn demi_strip(code: &str, function_name: &str) -> Result<(String, RenameMap)> {
    demi_strip_with(code, function_name, DemiStripOptions::default())
}

pub fn demi_strip_with(
    code: &str,
    function_name: &str,
    opts: DemiStripOptions,
) -> Result<(String, RenameMap)> {
    let tokens = tokenize(code);
    require_name(&tokens, function_name)?;
    let mut map = RenameMap::default();
    map.insert(function_name, FUNCTION_PLACEHOLDER.to_string());
    let mut next_var = 0usize;
    let mut out = String::with_capacity(code.len());
    let mut pos = 0;
    for t in &tokens {
        if t.kind != TokenKind::Identifier {
            continue;
        }
        let replacement = match map.get(t.text) {
            Some(p) => p.to_string(),
            None if opts.keep_generated && is_generated_name(t.text) => continue,
            None => {
                let p = format!("VAR_{next_var}");
                next_var += 1;
                map.insert(t.text, p.clone());
                p
            }
        };
        out.push_str(&code[pos..t.offset]);
        out.push_str(&replacement);
        pos = t.end();
    }
    out.push_str(&code[pos..]);
    Ok((out, map))
}

/// Replaces only the defined function's name with `FUN_0`.
pub fn strip_function_name(code: &str, function_name: &str) -> Result<String> {
    let tokens = tokenize(code);
    require_name(&tokens, function_name)?;
    let mut out = String::with_capacity(code.len());
    let mut pos = 0;
    for t in tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier && t.text == function_name)
    {
        out.push_str(&code[pos..t.offset]);
        out.push_str(FUNCTION_PLACEHOLDER);
        pos = t.end();
    }
    out.push_str(&code[pos..]);
    Ok(out)
}

fn require_name(tokens: &[Token<'_>], name: &str) -> Result<()> {
    if tokens
        .iter()
        .any(|t| t.kind == TokenKind::Identifier && t.text == name)
    {
        Ok(())
    } else {
        Err(Error::FunctionNameAbsent(name.to_string()))
    }
}

/// Derives `target` variants from decompiled samples. Samples of other
/// variants, and samples whose function name is missing from the code, are
/// skipped; the latter are counted.
pub fn transform_samples(
    samples: &[Sample],
    targets: &[Variant],
    opts: DemiStripOptions,
) -> (Vec<Sample>, TransformReport) {
    let mut out = Vec::new();
    let mut report = TransformReport::default();
    for s in samples.iter().filter(|s| s.variant == Variant::Decompiled) {
        report.inputs += 1;
        let name = &s.provenance.function;
        for &target in targets {
            let code = match target {
                Variant::DemiStripped => demi_strip_with(&s.code, name, opts).map(|(c, _)| c),
                Variant::NoFunname => strip_function_name(&s.code, name),
                _ => continue,
            };
            match code {
                Ok(code) => {
                    out.push(s.derive(target, code));
                    *report.emitted.entry(target).or_default() += 1;
                }
                Err(_) => *report.name_absent.entry(target).or_default() += 1,
            }
        }
    }
    (out, report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct TransformReport {
    pub inputs: usize,
    pub emitted: BTreeMap<Variant, usize>,
    pub name_absent: BTreeMap<Variant, usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const SSRC_PSEUDO_C: &str = "ulong rtp_sess_ssrc(long param_1){ uint local_14; if (param_1 == 0){ local_14 = 0; } else { local_14 = *(uint *)(param_1 + 4);} return (ulong)local_14; }";

    #[test]
    fn demi_strip_figure_two() {
        let (code, map) = demi_strip(SSRC_PSEUDO_C, "rtp_sess_ssrc").unwrap();
        assert_eq!(
            code,
            "ulong FUN_0(long VAR_0){ uint VAR_1; if (VAR_0 == 0){ VAR_1 = 0; } else { VAR_1 = *(uint *)(VAR_0 + 4);} return (ulong)VAR_1; }"
        );
        assert_eq!(map.get("param_1"), Some("VAR_0"));
        assert_eq!(map.get("local_14"), Some("VAR_1"));
        assert_eq!(map.len(), 3);
    }

    #[test]
    fn fixed_point() {
        let code = "int FUN_0(void){return 0;}";
        assert_eq!(demi_strip(code, "FUN_0").unwrap().0, code);
    }

    #[test]
    fn idempotent_on_figure_two() {
        let (once, _) = demi_strip(SSRC_PSEUDO_C, "rtp_sess_ssrc").unwrap();
        let (twice, _) = demi_strip(&once, FUNCTION_PLACEHOLDER).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn keep_generated_preserves_decompiler_names() {
        let opts = DemiStripOptions {
            keep_generated: true,
        };
        let (code, _) = demi_strip_with(SSRC_PSEUDO_C, "rtp_sess_ssrc", opts).unwrap();
        assert!(code.starts_with("ulong FUN_0(long param_1){ uint local_14;"));
        let (code, _) =
            demi_strip_with("void f(void){ g(DAT_00102010, uVar2); }", "f", opts).unwrap();
        assert_eq!(code, "void FUN_0(void){ VAR_0(DAT_00102010, uVar2); }");
    }

    #[test]
    fn members_and_callees_are_renamed() {
        let (code, _) =
            demi_strip("int get(struct s *p){ return p->len + helper(p.x); }", "get").unwrap();
        assert_eq!(code, "int FUN_0(struct VAR_0 *VAR_1){ return VAR_1->VAR_2 + VAR_3(VAR_1.VAR_4); }");
    }

    #[test]
    fn literals_and_comments_untouched() {
        let (code, _) =
            demi_strip("void f(void){ /* f */ puts(\"f x\"); }", "f").unwrap();
        assert_eq!(code, "void FUN_0(void){ /* f */ VAR_0(\"f x\"); }");
    }

    #[test]
    fn strip_name_only() {
        let got = strip_function_name(SSRC_PSEUDO_C, "rtp_sess_ssrc").unwrap();
        assert_eq!(got, SSRC_PSEUDO_C.replace("rtp_sess_ssrc", "FUN_0"));
    }

    #[test]
    fn strip_name_recursive() {
        let src = "ulong fact(ulong n){ if (n < 2) return 1; return n * fact(n - 1); }";
        assert_eq!(
            strip_function_name(src, "fact").unwrap(),
            "ulong FUN_0(ulong n){ if (n < 2) return 1; return n * FUN_0(n - 1); }"
        );
    }

    #[test]
    fn absent_name_is_an_error() {
        assert!(matches!(
            strip_function_name(SSRC_PSEUDO_C, "missing"),
            Err(Error::FunctionNameAbsent(_))
        ));
        assert!(demi_strip(SSRC_PSEUDO_C, "missing").is_err());
        // appearing only inside a string literal does not count
        assert!(demi_strip("void f(void){ puts(\"g\"); }", "g").is_err());
    }

    #[test]
    fn generated_names() {
        for n in ["param_1", "local_14", "uVar2", "puVar13", "DAT_00102010", "FUN_00100d30", "in_FS_OFFSET", "extraout_RAX"] {
            assert!(is_generated_name(n), "{n}");
        }
        for n in ["buf", "rtp_sess_ssrc", "VAR_0", "FUN_0", "param"] {
            assert!(!is_generated_name(n), "{n}");
        }
    }
}
