//! Corpus-level operations: near-duplicate removal, project-disjoint
//! splitting, train-set subsampling and descriptive statistics.

mod dedup;
mod split;
mod stats;

pub use dedup::{
    cluster_duplicates, deduplicate, deduplicate_variants, is_near_duplicate, similarity,
    DuplicateCluster, Fingerprint, SimilarityConfig,
};
pub use split::{split, subsample_ids, subsample_train, SplitConfig};
pub use stats::{code_tokens, loc, stats, summary_tokens, CorpusStats, VariantStats};
