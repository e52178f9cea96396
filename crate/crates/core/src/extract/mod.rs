//! Location candidates from tagged tokens.
//!
//! Four independent sources feed the gazetteer: proper-noun chunks with
//! preposition and suffix cues, suffix patterns for lowercase text, tokens
//! close to an emergency word in the dependency graph, and plain noun
//! phrases. Their outputs are unioned by [`merge_candidates`].

mod graph;
mod jaro;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use graph::{graph_distance, DependencyGraph, GraphSource};
pub use jaro::jaro_winkler;

use crate::lexicon::{EmergencyLexicon, SuffixLexicon, TagLexicons};
use crate::tagger::{PosTag, TaggedToken};

pub const DEFAULT_JW_THRESHOLD: f64 = 0.90;
pub const DEFAULT_MAX_DEP_DISTANCE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Source {
    ProperChunk,
    SuffixMatch,
    DepProximity,
    NounPhrase,
    HashtagOriginal,
    HashtagSegment,
}

impl Source {
    pub const ALL: [Source; 6] = [
        Source::ProperChunk,
        Source::SuffixMatch,
        Source::DepProximity,
        Source::NounPhrase,
        Source::HashtagOriginal,
        Source::HashtagSegment,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Cue {
    PrecedingPreposition,
    SuffixTerm,
    FuzzySuffix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMention {
    /// Surface text, case preserved.
    pub phrase: String,
    /// Inclusive token index range.
    pub token_span: (usize, usize),
    pub sources: BTreeSet<Source>,
    pub cues: BTreeSet<Cue>,
    pub fuzzy_suffix_score: Option<f64>,
}

impl CandidateMention {
    fn new(tagged: &[TaggedToken], first: usize, last: usize, source: Source) -> Self {
        Self {
            phrase: join(tagged, first, last),
            token_span: (first, last),
            sources: BTreeSet::from([source]),
            cues: BTreeSet::new(),
            fuzzy_suffix_score: None,
        }
    }

    /// Lowercase, whitespace-collapsed phrase used for deduplication.
    pub fn key(&self) -> String {
        dedup_key(&self.phrase)
    }

    pub fn has_cue(&self) -> bool {
        !self.cues.is_empty()
    }
}

pub fn dedup_key(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn join(tagged: &[TaggedToken], first: usize, last: usize) -> String {
    tagged[first..=last]
        .iter()
        .map(|t| t.token.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn lower(t: &TaggedToken) -> String {
    t.token.surface.to_lowercase()
}

/// Union candidate lists, merging entries with the same [`dedup_key`]. The
/// first occurrence keeps its phrase and span; sources and cues are unioned.
pub fn merge_candidates<I>(lists: I) -> Vec<CandidateMention>
where
    I: IntoIterator<Item = Vec<CandidateMention>>,
{
    let mut order: Vec<String> = Vec::new();
    let mut by_key: BTreeMap<String, CandidateMention> = BTreeMap::new();
    for cand in lists.into_iter().flatten() {
        let key = cand.key();
        if key.is_empty() {
            continue;
        }
        match by_key.get_mut(&key) {
            Some(existing) => {
                existing.sources.extend(cand.sources);
                existing.cues.extend(cand.cues);
                existing.fuzzy_suffix_score =
                    match (existing.fuzzy_suffix_score, cand.fuzzy_suffix_score) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        (a, b) => a.or(b),
                    };
            }
            None => {
                order.push(key.clone());
                by_key.insert(key, cand);
            }
        }
    }
    order
        .into_iter()
        .map(|k| by_key.remove(&k).expect("key recorded on insert"))
        .collect()
}

/// Best Jaro-Winkler score of `word` against any suffix term.
fn best_suffix_similarity(word: &str, suffixes: &SuffixLexicon) -> f64 {
    suffixes
        .terms()
        .map(|s| jaro_winkler(word, s))
        .fold(0.0, f64::max)
}

/// Proper-noun chunks.
///
/// A run starts at a `PROPN` token and extends over `PROPN`, `ADJ` and
/// `DELIM` tokens; it is then split at delimiters. Pieces with at least one
/// proper noun become candidates. The first piece is cued when the run
/// follows a location preposition. A suffix word after the last piece (exact
/// or within `theta_jw` Jaro-Winkler similarity) is absorbed into the phrase
/// and the bare piece is kept as a second candidate.
pub fn chunk_proper_nouns(
    tagged: &[TaggedToken],
    suffixes: &SuffixLexicon,
    lexicons: &TagLexicons,
    theta_jw: f64,
) -> Vec<CandidateMention> {
    let mut out = Vec::new();
    let n = tagged.len();
    let mut i = 0;
    while i < n {
        if tagged[i].tag != PosTag::Propn {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut run_end = i;
        while run_end < n && matches!(tagged[run_end].tag, PosTag::Propn | PosTag::Adj | PosTag::Delim) {
            run_end += 1;
        }
        let preposition = run_start > 0
            && tagged[run_start - 1].tag == PosTag::Adp
            && lexicons.location_prepositions.contains(&lower(&tagged[run_start - 1]));

        let mut piece_start = run_start;
        while piece_start < run_end {
            if tagged[piece_start].tag == PosTag::Delim {
                piece_start += 1;
                continue;
            }
            let mut piece_end = piece_start;
            while piece_end < run_end && tagged[piece_end].tag != PosTag::Delim {
                piece_end += 1;
            }
            let (first, last) = (piece_start, piece_end - 1);
            if tagged[first..=last].iter().any(|t| t.tag == PosTag::Propn) {
                let mut base = CandidateMention::new(tagged, first, last, Source::ProperChunk);
                if preposition && first == run_start {
                    base.cues.insert(Cue::PrecedingPreposition);
                }
                if last > first && suffixes.contains(&lower(&tagged[last])) {
                    // Suffix already inside the chunk, e.g. "Park Street".
                    base.cues.insert(Cue::SuffixTerm);
                    let mut bare = CandidateMention::new(tagged, first, last - 1, Source::ProperChunk);
                    bare.cues = base.cues.clone();
                    out.push(base.clone());
                    out.push(bare);
                } else if piece_end == run_end && run_end < n && tagged[run_end].token.is_word() {
                    let follower = lower(&tagged[run_end]);
                    let (cue, score) = if suffixes.contains(&follower) {
                        (Some(Cue::SuffixTerm), None)
                    } else if follower.chars().count() >= 3 && !lexicons.stoplist.contains(&follower) {
                        let sim = best_suffix_similarity(&follower, suffixes);
                        if sim >= theta_jw {
                            (Some(Cue::FuzzySuffix), Some(sim))
                        } else {
                            (None, None)
                        }
                    } else {
                        (None, None)
                    };
                    match cue {
                        Some(cue) => {
                            let mut with_suffix =
                                CandidateMention::new(tagged, first, run_end, Source::ProperChunk);
                            with_suffix.cues = base.cues.clone();
                            with_suffix.cues.insert(cue);
                            with_suffix.fuzzy_suffix_score = score;
                            base.cues.insert(cue);
                            base.fuzzy_suffix_score = score;
                            out.push(with_suffix);
                            out.push(base);
                        }
                        None => out.push(base),
                    }
                } else {
                    out.push(base);
                }
            }
            piece_start = piece_end;
        }
        i = run_end.max(i + 1);
    }
    out
}

/// Suffix patterns for text where capitalisation carries no signal: every
/// suffix word is joined with the one or two words before it. Prepositions,
/// delimiters, stoplist words, emergency terms and untagged (`OTHER`) words
/// cannot take part.
pub fn suffix_pattern_candidates(
    tagged: &[TaggedToken],
    suffixes: &SuffixLexicon,
    lexicons: &TagLexicons,
    emergencies: &EmergencyLexicon,
) -> Vec<CandidateMention> {
    let admissible = |t: &TaggedToken| {
        t.token.is_word()
            && !matches!(t.tag, PosTag::Adp | PosTag::Delim | PosTag::Other)
            && !lexicons.stoplist.contains(&lower(t))
            && !emergencies.matches(&t.token.surface)
    };
    let mut out = Vec::new();
    for (s, t) in tagged.iter().enumerate() {
        if !t.token.is_word() || !suffixes.contains(&lower(t)) {
            continue;
        }
        for k in 1..=2 {
            if k > s || !tagged[s - k..s].iter().all(admissible) {
                break;
            }
            let mut c = CandidateMention::new(tagged, s - k, s, Source::SuffixMatch);
            c.cues.insert(Cue::SuffixTerm);
            out.push(c);
        }
    }
    out
}

/// Proper nouns, nouns and adjectives within `d_max` hops of an emergency
/// word. Index-adjacent hits are merged into one phrase; proper-noun runs
/// inside a merged phrase are also emitted alone.
pub fn dependency_candidates(
    tagged: &[TaggedToken],
    g: &DependencyGraph,
    emergencies: &EmergencyLexicon,
    d_max: usize,
) -> Vec<CandidateMention> {
    if g.len() != tagged.len() {
        log::warn!("dependency graph has {} nodes for {} tokens", g.len(), tagged.len());
        return Vec::new();
    }
    let is_emergency: Vec<bool> = tagged
        .iter()
        .map(|t| t.token.is_word() && emergencies.matches(&t.token.surface))
        .collect();
    let mut hits = BTreeSet::new();
    for anchor in (0..tagged.len()).filter(|&i| is_emergency[i]) {
        let dist = g.distances_from(anchor).expect("anchor is a token index");
        for (i, d) in dist.iter().enumerate() {
            let near = d.is_some_and(|d| d >= 1 && d <= d_max);
            if near
                && !is_emergency[i]
                && matches!(tagged[i].tag, PosTag::Propn | PosTag::Noun | PosTag::Adj)
            {
                hits.insert(i);
            }
        }
    }
    let mut out = Vec::new();
    let mut iter = hits.into_iter().peekable();
    while let Some(first) = iter.next() {
        let mut last = first;
        while iter.peek() == Some(&(last + 1)) {
            last = iter.next().expect("peeked");
        }
        out.push(CandidateMention::new(tagged, first, last, Source::DepProximity));
        // A proper-noun run inside a mixed phrase is a name of its own.
        let mut i = first;
        while i <= last {
            if tagged[i].tag != PosTag::Propn {
                i += 1;
                continue;
            }
            let start = i;
            while i <= last && tagged[i].tag == PosTag::Propn {
                i += 1;
            }
            if (start, i - 1) != (first, last) {
                out.push(CandidateMention::new(tagged, start, i - 1, Source::DepProximity));
            }
        }
    }
    out
}

/// Maximal runs of adjective, noun and proper-noun tokens that contain at
/// least one noun or proper noun.
pub fn noun_phrase_candidates(tagged: &[TaggedToken]) -> Vec<CandidateMention> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tagged.len() {
        if !matches!(tagged[i].tag, PosTag::Adj | PosTag::Noun | PosTag::Propn) {
            i += 1;
            continue;
        }
        let start = i;
        while i < tagged.len() && matches!(tagged[i].tag, PosTag::Adj | PosTag::Noun | PosTag::Propn) {
            i += 1;
        }
        if tagged[start..i]
            .iter()
            .any(|t| matches!(t.tag, PosTag::Noun | PosTag::Propn))
        {
            out.push(CandidateMention::new(tagged, start, i - 1, Source::NounPhrase));
        }
    }
    out
}

#[cfg(test)]
mod tests;
