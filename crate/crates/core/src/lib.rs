//! Build aligned corpora of C functions, their decompiled pseudo-C and
//! one-sentence summaries, derive identifier-obfuscated variants, and score
//! summary predictions.
//!
//! The crate is organized as pipeline stages that all exchange the
//! line-delimited JSON records defined in [`record`]:
//!
//! - [`source_docs`] scans C sources, attaches doc comments and mines summaries.
//! - [`binary_ingest`] loads decompiler exports and aligns them with sources.
//! - [`transforms`] lexes pseudo-C and produces demi-stripped / no-name variants.
//! - [`corpus_ops`] deduplicates, splits by project, subsamples and reports stats.
//! - [`metrics`] implements EM, smoothed BLEU-4, ROUGE-L and METEOR.
//! - [`cli`] wires the stages into the `decompsum` command.
//!
//! Runnable walkthroughs for each stage live in `examples/`.

pub mod binary_ingest;
pub mod cli;
pub mod corpus_ops;
pub mod error;
pub mod metrics;
pub mod record;
pub mod source_docs;
pub mod transforms;

pub use error::{Error, Result};
pub use record::{
    CommentStyle, CorpusSplit, DecompiledFunction, DocComment, OptLevel, Prediction, Provenance,
    Sample, SourceFunction, Variant,
};
