use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::record::{OptLevel, Sample, Variant};
use crate::transforms::tokenize;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub count: usize,
    /// Whitespace tokens of the summary.
    pub mean_summary_tokens: f64,
    pub median_summary_tokens: f64,
    /// Lexer tokens of the code.
    pub mean_code_tokens: f64,
    /// Non-blank lines of the code.
    pub mean_loc: f64,
    /// Samples without an optimization level (source code) are not counted.
    pub opt_levels: BTreeMap<OptLevel, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub projects: usize,
    pub variants: BTreeMap<Variant, VariantStats>,
}

pub fn summary_tokens(summary: &str) -> usize {
    summary.split_whitespace().count()
}

pub fn code_tokens(code: &str) -> usize {
    tokenize(code).len()
}

pub fn loc(code: &str) -> usize {
    code.lines().filter(|l| !l.trim().is_empty()).count()
}

pub fn stats(samples: &[Sample]) -> CorpusStats {
    let mut sorted: Vec<&Sample> = samples.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut groups: BTreeMap<Variant, Vec<&Sample>> = BTreeMap::new();
    for s in &sorted {
        groups.entry(s.variant).or_default().push(s);
    }
    let mut projects: Vec<&str> = samples.iter().map(|s| s.project.as_str()).collect();
    projects.sort();
    projects.dedup();

    let variants = groups
        .into_iter()
        .map(|(variant, group)| {
            let n = group.len() as f64;
            let mut summary_lens: Vec<usize> =
                group.iter().map(|s| summary_tokens(&s.summary)).collect();
            let mean_summary_tokens = summary_lens.iter().sum::<usize>() as f64 / n;
            summary_lens.sort_unstable();
            let mid = summary_lens.len() / 2;
            let median_summary_tokens = if summary_lens.len() % 2 == 1 {
                summary_lens[mid] as f64
            } else {
                (summary_lens[mid - 1] + summary_lens[mid]) as f64 / 2.0
            };
            let mut opt_levels = BTreeMap::new();
            for s in &group {
                if let Some(o) = s.opt_level {
                    *opt_levels.entry(o).or_default() += 1;
                }
            }
            let stats = VariantStats {
                count: group.len(),
                mean_summary_tokens,
                median_summary_tokens,
                mean_code_tokens: group.iter().map(|s| code_tokens(&s.code)).sum::<usize>() as f64
                    / n,
                mean_loc: group.iter().map(|s| loc(&s.code)).sum::<usize>() as f64 / n,
                opt_levels,
            };
            (variant, stats)
        })
        .collect();
    CorpusStats {
        total: samples.len(),
        projects: projects.len(),
        variants,
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples  {}", self.total)?;
        writeln!(f, "projects {}", self.projects)?;
        for (variant, s) in &self.variants {
            writeln!(f)?;
            writeln!(f, "[{variant}]")?;
            writeln!(f, "count                  {}", s.count)?;
            writeln!(f, "summary tokens mean    {:.2}", s.mean_summary_tokens)?;
            writeln!(f, "summary tokens median  {:.1}", s.median_summary_tokens)?;
            writeln!(f, "code tokens mean       {:.2}", s.mean_code_tokens)?;
            writeln!(f, "lines of code mean     {:.2}", s.mean_loc)?;
            for (o, n) in &s.opt_levels {
                writeln!(f, "opt level {:<12} {n}", o.as_str())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Provenance;

    fn s(name: &str, code: &str, summary: &str, opt: Option<OptLevel>) -> Sample {
        Sample::new(
            "p",
            if opt.is_some() {
                Variant::Decompiled
            } else {
                Variant::SourceC
            },
            code,
            summary,
            opt,
            Provenance {
                function: name.into(),
                source_file: None,
                binary: None,
                address: None,
            },
        )
    }

    #[test]
    fn empty_corpus() {
        let st = stats(&[]);
        assert_eq!(st.total, 0);
        assert!(st.variants.is_empty());
    }

    #[test]
    fn hand_counted_fixture() {
        // summary tokens 3, 5, 4, 8, 6; code tokens 7, 4, 3, 3, 11; LOC 2, 1, 1, 1, 3
        let corpus = [
            s("a", "int a(void)\n\n{ }", "Open the file", Some(OptLevel::O0)),
            s("b", "x = y;", "Close the socket right now", Some(OptLevel::O2)),
            s("c", "return 0 ;\n", "Reset all the counters", Some(OptLevel::O2)),
            s("d", "f()", "Compute a checksum over the whole packet buffer", Some(OptLevel::O3)),
            s("e", "if (a)\n  b = c;\n  d++;", "Step the state machine once more", Some(OptLevel::O3)),
        ];
        let st = stats(&corpus);
        let v = &st.variants[&Variant::Decompiled];
        assert_eq!(v.count, 5);
        assert!((v.mean_summary_tokens - 26.0 / 5.0).abs() < 1e-12);
        assert_eq!(v.median_summary_tokens, 5.0);
        assert!((v.mean_code_tokens - 28.0 / 5.0).abs() < 1e-12);
        assert!((v.mean_loc - 8.0 / 5.0).abs() < 1e-12);
        assert_eq!(v.opt_levels[&OptLevel::O2], 2);
        assert_eq!(v.opt_levels[&OptLevel::O3], 2);
        assert_eq!(v.opt_levels[&OptLevel::O0], 1);
    }

    #[test]
    fn even_median_and_missing_opt() {
        let corpus = [
            s("a", "x", "one two", None),
            s("b", "x", "one two three four five", None),
        ];
        let v = &stats(&corpus).variants[&Variant::SourceC];
        assert_eq!(v.median_summary_tokens, 3.5);
        assert!(v.opt_levels.is_empty());
    }
}
