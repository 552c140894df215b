//! Language identification for summaries.
//!
//! [`StopwordIdentifier`] is the built-in classifier: script detection for
//! non-Latin text, then distinctive function words and diacritics for a
//! handful of Latin-script languages. Plain ASCII text with no function
//! words at all (terse technical summaries such as "Initialize buffer pool")
//! is reported as English with moderate confidence.
//!
//! [`FastTextCommand`] delegates to an external `fasttext predict-prob`
//! style process.

use std::io::Write;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageGuess {
    /// ISO 639-1 code, or `"und"` when nothing could be determined.
    pub lang: String,
    pub confidence: f64,
}

impl LanguageGuess {
    fn new(lang: &str, confidence: f64) -> Self {
        LanguageGuess {
            lang: lang.to_string(),
            confidence,
        }
    }

    pub fn is_english(&self, min_confidence: f64) -> bool {
        self.lang == "en" && self.confidence >= min_confidence
    }
}

pub trait LanguageIdentifier: Send + Sync {
    fn identify(&self, text: &str) -> Result<LanguageGuess>;
}

/// Identifies `text` with the built-in classifier.
pub fn detect_language(text: &str) -> Result<LanguageGuess> {
    StopwordIdentifier.identify(text)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StopwordIdentifier;

const EN: &[&str] = &[
    "the", "of", "and", "to", "for", "is", "are", "with", "from", "by", "this", "that", "if",
    "it", "its", "be", "as", "at", "an", "or", "on", "not", "into", "which", "when", "given",
    "will", "has", "have", "all", "any", "each", "was", "can", "should", "must", "whether",
    "returns", "sets", "gets", "new", "current", "used", "using", "number", "value", "function",
    "called", "pointer", "after", "before", "without", "only", "then", "than", "does", "do",
    "no", "out", "up", "our", "we", "you", "your", "these", "those", "other", "so", "but",
];
const FR: &[&str] = &[
    "le", "la", "les", "des", "du", "une", "et", "est", "pour", "dans", "sur", "avec", "qui",
    "que", "au", "aux", "ce", "cette", "ces", "sont", "pas", "par", "leur", "fonction", "tampon",
    "valeur", "si", "ou", "où", "être", "sans", "l'", "d'",
];
const DE: &[&str] = &[
    "der", "die", "das", "und", "ist", "für", "mit", "den", "dem", "des", "ein", "eine",
    "einen", "nicht", "auf", "wird", "werden", "von", "zu", "zur", "zum", "aus", "bei", "sich",
    "wenn", "oder", "gibt", "zurück", "funktion", "wert", "puffer", "setzt", "liefert",
];
const ES: &[&str] = &[
    "el", "los", "las", "del", "una", "y", "es", "para", "con", "por", "que", "se", "su",
    "sus", "al", "lo", "como", "más", "devuelve", "función", "valor", "si", "o", "en", "la",
    "de", "un", "búfer", "obtiene", "establece",
];
const IT: &[&str] = &[
    "il", "lo", "gli", "della", "delle", "dei", "di", "e", "è", "per", "con", "che", "non",
    "una", "un", "nel", "nella", "sono", "restituisce", "funzione", "valore", "imposta", "la",
    "le", "da", "alla", "al",
];
const PT: &[&str] = &[
    "o", "os", "as", "da", "do", "dos", "das", "um", "uma", "e", "é", "para", "com", "não",
    "que", "em", "no", "na", "retorna", "função", "valor", "define", "obtém", "se", "de",
];
const NL: &[&str] = &[
    "de", "het", "een", "en", "van", "voor", "met", "niet", "is", "zijn", "wordt", "worden",
    "dat", "die", "op", "naar", "bij", "geeft", "terug", "waarde", "functie", "als",
    "te",
];

const LATIN_LANGS: &[(&str, &[&str])] = &[
    ("en", EN),
    ("fr", FR),
    ("de", DE),
    ("es", ES),
    ("it", IT),
    ("pt", PT),
    ("nl", NL),
];

/// Diacritics and the languages they point to.
fn diacritic_votes(c: char) -> &'static [&'static str] {
    match c {
        'é' | 'è' | 'ê' | 'ë' | 'à' | 'â' | 'ç' | 'î' | 'ï' | 'ô' | 'û' | 'ù' | 'œ' => {
            &["fr", "pt", "it", "es"]
        }
        'ä' | 'ö' | 'ü' | 'ß' => &["de"],
        'ñ' | '¿' | '¡' | 'á' | 'í' | 'ó' | 'ú' => &["es", "pt"],
        'ã' | 'õ' => &["pt"],
        'ì' | 'ò' => &["it"],
        _ => &[],
    }
}

fn script_of(c: char) -> Option<&'static str> {
    let cp = c as u32;
    Some(match cp {
        0x0400..=0x04FF => "ru",
        0x0370..=0x03FF => "el",
        0x0590..=0x05FF => "he",
        0x0600..=0x06FF => "ar",
        0x0900..=0x097F => "hi",
        0x0E00..=0x0E7F => "th",
        0x3040..=0x30FF => "ja",
        0xAC00..=0xD7AF | 0x1100..=0x11FF => "ko",
        0x4E00..=0x9FFF | 0x3400..=0x4DBF => "zh",
        _ => return None,
    })
}

impl LanguageIdentifier for StopwordIdentifier {
    fn identify(&self, text: &str) -> Result<LanguageGuess> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        let mut letters = 0usize;
        let mut scripts: Vec<(&str, usize)> = Vec::new();
        let mut kana = 0usize;
        for c in text.chars().filter(|c| c.is_alphabetic()) {
            letters += 1;
            if let Some(s) = script_of(c) {
                if s == "ja" {
                    kana += 1;
                }
                match scripts.iter_mut().find(|(name, _)| *name == s) {
                    Some((_, n)) => *n += 1,
                    None => scripts.push((s, 1)),
                }
            }
        }
        if letters == 0 {
            return Ok(LanguageGuess::new("und", 0.0));
        }
        let non_latin: usize = scripts.iter().map(|(_, n)| n).sum();
        if non_latin * 2 > letters {
            // Japanese text mixes kana with Han characters.
            let (lang, n) = if kana > 0 {
                ("ja", non_latin)
            } else {
                *scripts.iter().max_by_key(|(_, n)| *n).unwrap()
            };
            return Ok(LanguageGuess::new(lang, n as f64 / letters as f64));
        }

        let mut scores = vec![0.0f64; LATIN_LANGS.len()];
        let lowered = text.to_lowercase();
        for word in lowered.split(|c: char| !(c.is_alphabetic() || c == '\'')) {
            if word.is_empty() {
                continue;
            }
            let elided = word.find('\'').map(|i| &word[..=i]);
            for (k, (_, list)) in LATIN_LANGS.iter().enumerate() {
                if list.contains(&word) || elided.is_some_and(|e| list.contains(&e)) {
                    scores[k] += 1.0;
                }
            }
        }
        let mut accented = 0usize;
        for c in lowered.chars() {
            let votes = diacritic_votes(c);
            if !votes.is_empty() {
                accented += 1;
            }
            for v in votes {
                let k = LATIN_LANGS.iter().position(|(l, _)| l == v).unwrap();
                scores[k] += 0.5;
            }
        }
        let total: f64 = scores.iter().sum();
        if total == 0.0 {
            let ascii = text.is_ascii();
            return Ok(if ascii {
                LanguageGuess::new("en", 0.6)
            } else {
                LanguageGuess::new("und", 0.2)
            });
        }
        // Ties go to English, which comes first.
        let (best, best_score) = scores
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (k, &s)| if s > acc.1 { (k, s) } else { acc });
        let mut confidence = best_score / total;
        if LATIN_LANGS[best].0 == "en" && accented > 0 {
            confidence *= 0.5;
        }
        Ok(LanguageGuess::new(LATIN_LANGS[best].0, confidence.clamp(0.0, 1.0)))
    }
}

/// Runs an external classifier once per text. The process receives the text
/// as a single line on stdin and must print `__label__<code> <probability>`
/// (the format of `fasttext predict-prob <model> - 1`).
#[derive(Debug, Clone)]
pub struct FastTextCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl FastTextCommand {
    pub fn new(program: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        FastTextCommand {
            program: program.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

/// Parses one line of fastText `predict-prob` output.
pub fn parse_fasttext_line(line: &str) -> Option<LanguageGuess> {
    let mut parts = line.split_whitespace();
    let lang = parts.next()?.strip_prefix("__label__")?;
    let prob: f64 = parts.next()?.parse().ok()?;
    Some(LanguageGuess::new(lang, prob.clamp(0.0, 1.0)))
}

impl LanguageIdentifier for FastTextCommand {
    fn identify(&self, text: &str) -> Result<LanguageGuess> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        let backend = |e: std::io::Error| Error::LanguageBackend(format!("{}: {e}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(backend)?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            let line = text.replace(['\n', '\r'], " ");
            // The classifier may exit without reading its input.
            let _ = writeln!(stdin, "{line}");
        }
        let output = child.wait_with_output().map_err(backend)?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        Ok(stdout
            .lines()
            .find_map(parse_fasttext_line)
            .unwrap_or_else(|| LanguageGuess::new("und", 0.0)))
    }
}
