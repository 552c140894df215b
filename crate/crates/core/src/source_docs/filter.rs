use std::fmt;
use std::sync::{Arc, LazyLock};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::lang::{LanguageIdentifier, StopwordIdentifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Ok,
    TooShort,
    TooLong,
    SpecialToken,
    NonEnglish,
    Empty,
}

impl FilterReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::Ok => "ok",
            FilterReason::TooShort => "too_short",
            FilterReason::TooLong => "too_long",
            FilterReason::SpecialToken => "special_token",
            FilterReason::NonEnglish => "non_english",
            FilterReason::Empty => "empty",
        }
    }
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub passed: bool,
    pub reason: FilterReason,
}

impl FilterVerdict {
    fn of(reason: FilterReason) -> Self {
        FilterVerdict {
            passed: reason == FilterReason::Ok,
            reason,
        }
    }
}

/// Which filter rules are active. Blank summaries are always rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterToggles {
    pub length: bool,
    pub special_tokens: bool,
    pub language: bool,
}

impl Default for FilterToggles {
    fn default() -> Self {
        FilterToggles {
            length: true,
            special_tokens: true,
            language: true,
        }
    }
}

impl FilterToggles {
    pub fn none() -> Self {
        FilterToggles {
            length: false,
            special_tokens: false,
            language: false,
        }
    }
}

pub const MIN_TOKENS: usize = 3;
pub const MAX_TOKENS: usize = 256;

/// Summary quality filter with a pluggable language identifier.
#[derive(Clone)]
pub struct SummaryFilter {
    pub toggles: FilterToggles,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Guesses below this confidence count as non-English.
    pub min_english_confidence: f64,
    identifier: Arc<dyn LanguageIdentifier>,
}

impl fmt::Debug for SummaryFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SummaryFilter")
            .field("toggles", &self.toggles)
            .field("min_tokens", &self.min_tokens)
            .field("max_tokens", &self.max_tokens)
            .finish_non_exhaustive()
    }
}

impl Default for SummaryFilter {
    fn default() -> Self {
        SummaryFilter::new(FilterToggles::default())
    }
}

impl SummaryFilter {
    pub fn new(toggles: FilterToggles) -> Self {
        SummaryFilter {
            toggles,
            min_tokens: MIN_TOKENS,
            max_tokens: MAX_TOKENS,
            min_english_confidence: 0.5,
            identifier: Arc::new(StopwordIdentifier),
        }
    }

    pub fn with_identifier(mut self, identifier: Arc<dyn LanguageIdentifier>) -> Self {
        self.identifier = identifier;
        self
    }

    pub fn check(&self, summary: &str) -> FilterVerdict {
        let tokens: Vec<&str> = summary.split_whitespace().collect();
        if tokens.is_empty() {
            return FilterVerdict::of(FilterReason::Empty);
        }
        if self.toggles.length {
            if tokens.len() < self.min_tokens {
                return FilterVerdict::of(FilterReason::TooShort);
            }
            if tokens.len() > self.max_tokens {
                return FilterVerdict::of(FilterReason::TooLong);
            }
        }
        if self.toggles.special_tokens && tokens.iter().any(|t| special_token_class(t).is_some()) {
            return FilterVerdict::of(FilterReason::SpecialToken);
        }
        if self.toggles.language {
            let english = self
                .identifier
                .identify(summary)
                .map(|g| g.is_english(self.min_english_confidence))
                .unwrap_or(false);
            if !english {
                return FilterVerdict::of(FilterReason::NonEnglish);
            }
        }
        FilterVerdict::of(FilterReason::Ok)
    }
}

/// Applies the default filter (all rules on, built-in language identifier).
pub fn filter_summary(summary: &str) -> FilterVerdict {
    static DEFAULT: LazyLock<SummaryFilter> = LazyLock::new(SummaryFilter::default);
    DEFAULT.check(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialTokenClass {
    Web,
    Html,
    Path,
    Developer,
}

static WEB: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(https?|ftp)://").unwrap());
static HTML: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"</?[A-Za-z][A-Za-z0-9]*\s*/?>").unwrap());
static PATH: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(concat!(
        r"^[(\[\x22']*(",
        r"[A-Za-z]:[\\/]",               // drive letter
        r"|(~|\.{1,2})?/[\w.-]+",        // rooted or relative path
        r"|[\w.-]+/[\w.-]+/",            // two or more separators
        r"|[\w.-]+\\[\w.-]+\\",          // backslash path
        r")",
    ))
    .unwrap()
});
static DEVELOPER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[(\[]*(FIXME|TODO|XXX)(:|$)").unwrap());

/// Classifies a whitespace token as a special token, if it is one.
pub fn special_token_class(token: &str) -> Option<SpecialTokenClass> {
    if WEB.is_match(token) {
        Some(SpecialTokenClass::Web)
    } else if HTML.is_match(token) {
        Some(SpecialTokenClass::Html)
    } else if DEVELOPER.is_match(token) {
        Some(SpecialTokenClass::Developer)
    } else if PATH.is_match(token) {
        Some(SpecialTokenClass::Path)
    } else {
        None
    }
}
