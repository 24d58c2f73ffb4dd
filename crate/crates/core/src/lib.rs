//! Instance extraction and taxonomy-driven semantic matching.
//!
//! The pipeline has two halves. The front half turns free text into
//! *instances*: candidate n-grams whose character-statistics relatedness to
//! some marked object in the [`marking`] file falls under a threshold. The
//! back half scores query instances against vendor instances with Wu-Palmer
//! similarity over a user-supplied [`taxonomy`] and ranks vendors by
//! frequency-weighted match percentage.
//!
//! With the `parallel` feature (on by default) the inner loops run on rayon;
//! without it every [`Execution`] mode evaluates sequentially.

pub mod exec;
pub mod extraction;
pub mod marking;
pub mod matchmaker;
pub mod taxonomy;
pub mod textcore;

pub use exec::Execution;
pub use extraction::{extract_corpus, extract_instances, Extractor, InstanceRecord, InstanceSet};
pub use marking::{MarkedObject, MarkingError, MarkingFile};
pub use matchmaker::{
    match_percentage, rank_vendors, semantic_match, MatchPair, MatchReport, Matchmaker,
    QueryCoverage, Thresholds, ThresholdsError, VendorResult,
};
pub use taxonomy::{PhraseScore, SimilarityScore, Taxonomy, TaxonomyError};
pub use textcore::{
    candidates, encode, euclidean, relatedness, tokenize, variance_pair, CandidateObject,
    ObjectVector, Stopwords, TextError, Token,
};
