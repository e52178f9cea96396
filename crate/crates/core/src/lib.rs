//! Unsupervised extraction of place names from short, noisy microblog posts.
//!
//! A tweet goes through hashtag segmentation, clean-up and tokenization, a
//! rule-based POS tagger, four candidate sources and finally verification
//! against a GeoNames gazetteer. [`pipeline::extract_locations`] runs the
//! whole chain; [`evalkit`] scores extractors against annotated tweets and
//! [`store`] keeps an append-only, queryable log of processed tweets.

pub mod conllu;
pub mod evalkit;
pub mod extract;
pub mod gazetteer;
pub mod lexicon;
pub mod normalize;
pub mod pipeline;
pub mod segment;
pub mod store;
pub mod tagger;
pub mod tweet;

pub use extract::{CandidateMention, Cue, Source};
pub use gazetteer::{GazetteerEntry, GazetteerIndex, LocatedMention, MatchKind};
pub use normalize::{normalize_tweet, Token, TokenKind};
pub use pipeline::{ExtractionResult, Mode, PipelineConfig, Resources};
pub use segment::{segment_word, UnigramModel};
pub use tagger::PosTag;
pub use tweet::RawTweet;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A resource file has a malformed line.
    #[error("line {line}: {message}")]
    Load { line: usize, message: String },
    /// A loaded resource is unusable as a whole (for example empty).
    #[error("invalid model: {0}")]
    Model(String),
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Pipeline configuration or resources are missing or out of range.
    #[error("configuration: {0}")]
    Config(String),
    #[error("invalid record: {0}")]
    Record(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
