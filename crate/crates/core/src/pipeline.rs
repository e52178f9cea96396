//! End-to-end extraction and the unigram/bigram gazetteer baselines.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conllu::{parse_conllu, parses_by_id, ConlluSentence};
use crate::extract::{
    chunk_proper_nouns, dependency_candidates, merge_candidates, noun_phrase_candidates,
    suffix_pattern_candidates, CandidateMention, DependencyGraph, GraphSource, Source,
    DEFAULT_JW_THRESHOLD, DEFAULT_MAX_DEP_DISTANCE,
};
use crate::gazetteer::{
    phrase_candidate, verify_candidates, AmbiguityGuard, Gazetteer, GazetteerIndex, LoadOptions,
    LocatedMention,
};
use crate::lexicon::{EmergencyLexicon, SuffixLexicon, TagLexicons, WordList};
use crate::normalize::{normalize_tweet, reading_view, Token};
use crate::segment::{hashtag_expansions, UnigramModel};
use crate::tagger::tag_tokens;
use crate::tweet::RawTweet;
use crate::Error;

const BUNDLED_UNIGRAMS: &str = include_str!("../data/unigrams.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    Geoloc,
    Uniloc,
    Biloc,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "geoloc" => Ok(Mode::Geoloc),
            "uniloc" => Ok(Mode::Uniloc),
            "biloc" => Ok(Mode::Biloc),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub jw_threshold: f64,
    pub max_dep_distance: usize,
    pub guard_enabled: bool,
    pub dependency_source: GraphSource,
    pub enabled_sources: BTreeSet<Source>,
    pub mode: Mode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            jw_threshold: DEFAULT_JW_THRESHOLD,
            max_dep_distance: DEFAULT_MAX_DEP_DISTANCE,
            guard_enabled: true,
            dependency_source: GraphSource::Supplied,
            enabled_sources: Source::ALL.into_iter().collect(),
            mode: Mode::Geoloc,
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.jw_threshold > 0.0 && self.jw_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "Jaro-Winkler threshold {} outside (0, 1]",
                self.jw_threshold
            )));
        }
        if self.max_dep_distance == 0 {
            return Err(Error::Config("dependency distance must be at least 1".into()));
        }
        if self.mode == Mode::Geoloc && self.enabled_sources.is_empty() {
            return Err(Error::Config("no candidate source enabled".into()));
        }
        Ok(())
    }

    fn enabled(&self, s: Source) -> bool {
        self.enabled_sources.contains(&s)
    }
}

/// Everything the pipeline reads. Immutable once built and shared by all
/// workers.
#[derive(Debug, Clone)]
pub struct Resources {
    pub model: UnigramModel,
    pub lexicons: TagLexicons,
    pub suffixes: SuffixLexicon,
    pub emergencies: EmergencyLexicon,
    pub gazetteer: GazetteerIndex,
    pub guard: AmbiguityGuard,
    /// Supplied dependency parses keyed by tweet id.
    pub parses: HashMap<String, ConlluSentence>,
}

/// Optional file overrides for [`Resources::load`]; `None` means the bundled
/// data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourcePaths {
    /// GeoNames dump or index snapshot.
    pub gazetteer: Option<PathBuf>,
    pub unigrams: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    pub common_words: Option<PathBuf>,
    pub suffixes: Option<PathBuf>,
    pub emergencies: Option<PathBuf>,
    /// Country code applied when reading a GeoNames dump.
    pub country: Option<String>,
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Read a gazetteer from a GeoNames dump or a snapshot, told apart by the
/// snapshot header.
pub fn load_gazetteer(path: &Path, options: &LoadOptions) -> Result<GazetteerIndex, Error> {
    let mut reader = open(path)?;
    let is_snapshot = reader.fill_buf()?.starts_with(b"TOPONYM-INDEX");
    let index = if is_snapshot {
        GazetteerIndex::load_snapshot(reader)
    } else {
        GazetteerIndex::load_geonames(reader, options)
    };
    with_path(path, index)
}

impl Resources {
    pub fn bundled() -> Self {
        let model = UnigramModel::load(BUNDLED_UNIGRAMS.as_bytes()).expect("bundled unigram model is valid");
        Self {
            model,
            lexicons: TagLexicons::bundled(),
            suffixes: SuffixLexicon::bundled(),
            emergencies: EmergencyLexicon::bundled(),
            gazetteer: GazetteerIndex::bundled(),
            guard: AmbiguityGuard::bundled(),
            parses: HashMap::new(),
        }
    }

    pub fn load(paths: &ResourcePaths) -> Result<Self, Error> {
        let mut res = Self::bundled();
        if let Some(p) = &paths.suffixes {
            res.suffixes = with_path(p, SuffixLexicon::load(open(p)?))?;
        }
        if let Some(p) = &paths.gazetteer {
            let options = LoadOptions {
                country: paths.country.clone(),
                bbox: None,
            };
            res.gazetteer = load_gazetteer(p, &options)?.with_suffixes(res.suffixes.clone());
        } else if paths.suffixes.is_some() {
            res.gazetteer = res.gazetteer.with_suffixes(res.suffixes.clone());
        }
        if let Some(p) = &paths.unigrams {
            res.model = with_path(p, UnigramModel::load(open(p)?))?;
        }
        if let Some(p) = &paths.parses {
            res.parses = parses_by_id(with_path(p, parse_conllu(open(p)?))?);
        }
        if let Some(p) = &paths.common_words {
            res.guard = AmbiguityGuard::new(with_path(p, WordList::load(open(p)?))?);
        }
        if let Some(p) = &paths.emergencies {
            res.emergencies = with_path(p, EmergencyLexicon::load(open(p)?))?;
        }
        res.check()?;
        Ok(res)
    }

    pub fn with_parses<R: BufRead>(mut self, reader: R) -> Result<Self, Error> {
        self.parses.extend(parses_by_id(parse_conllu(reader)?));
        Ok(self)
    }

    /// Fails when a resource the pipeline needs is empty.
    pub fn check(&self) -> Result<(), Error> {
        if self.gazetteer.entry_count() == 0 {
            return Err(Error::Config("gazetteer has no entries".into()));
        }
        if self.model.is_empty() {
            return Err(Error::Config("unigram model is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub tweet_id: String,
    pub mentions: Vec<LocatedMention>,
    pub untagged: bool,
    #[serde(with = "micros")]
    pub elapsed: Duration,
}

mod micros {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

impl ExtractionResult {
    fn new(tweet_id: &str, mentions: Vec<LocatedMention>, started: Instant) -> Self {
        Self {
            tweet_id: tweet_id.to_string(),
            untagged: mentions.is_empty(),
            mentions,
            elapsed: started.elapsed(),
        }
    }

    /// Mentioned phrases in output order.
    pub fn phrases(&self) -> Vec<&str> {
        self.mentions.iter().map(|m| m.candidate.phrase.as_str()).collect()
    }
}

/// Hashtag expansions as candidates: the body verbatim, then its splits.
fn hashtag_candidates(tokens: &[Token], model: &UnigramModel) -> Vec<CandidateMention> {
    let mut spans: Vec<(&str, usize, usize)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let Some(origin) = t.hashtag_origin.as_deref() else {
            continue;
        };
        match spans.iter_mut().find(|(o, _, _)| *o == origin) {
            Some(entry) => entry.2 = i,
            None => spans.push((origin, i, i)),
        }
    }
    let mut out = Vec::new();
    for (origin, first, last) in spans {
        for (k, phrase) in hashtag_expansions(model, origin).into_iter().enumerate() {
            let source = if k == 0 {
                Source::HashtagOriginal
            } else {
                Source::HashtagSegment
            };
            out.push(phrase_candidate(&phrase, (first, last), source));
        }
    }
    out
}

/// Candidates from every enabled source, deduplicated.
pub fn collect_candidates(
    tweet: &RawTweet,
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<Vec<CandidateMention>, Error> {
    let tokens = reading_view(&normalize_tweet(&tweet.text));
    let tagged = tag_tokens(&tokens, &res.lexicons, None)?;
    let mut lists = Vec::new();
    if cfg.enabled(Source::ProperChunk) {
        lists.push(chunk_proper_nouns(&tagged, &res.suffixes, &res.lexicons, cfg.jw_threshold));
    }
    if cfg.enabled(Source::SuffixMatch) {
        lists.push(suffix_pattern_candidates(&tagged, &res.suffixes, &res.lexicons, &res.emergencies));
    }
    if cfg.enabled(Source::DepProximity) {
        let parse = match cfg.dependency_source {
            GraphSource::Supplied => res.parses.get(&tweet.id),
            GraphSource::TokenWindowFallback => None,
        };
        let graph = match parse {
            Some(sentence) => DependencyGraph::from_parse(sentence, &tokens),
            None => DependencyGraph::token_window(tokens.len()),
        };
        lists.push(dependency_candidates(&tagged, &graph, &res.emergencies, cfg.max_dep_distance));
    }
    if cfg.enabled(Source::NounPhrase) {
        lists.push(noun_phrase_candidates(&tagged));
    }
    let hashtags = cfg.enabled(Source::HashtagOriginal) || cfg.enabled(Source::HashtagSegment);
    if hashtags {
        let mut cands = hashtag_candidates(&tokens, &res.model);
        cands.retain(|c| c.sources.iter().any(|s| cfg.enabled(*s)));
        lists.push(cands);
    }
    Ok(merge_candidates(lists))
}

/// Run the configured extractor on one tweet.
pub fn extract_locations(
    tweet: &RawTweet,
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<ExtractionResult, Error> {
    cfg.validate()?;
    res.check()?;
    if cfg.mode != Mode::Geoloc {
        return baseline_extract(tweet, cfg, res);
    }
    let started = Instant::now();
    let candidates = collect_candidates(tweet, cfg, res)?;
    let disabled = AmbiguityGuard::disabled();
    let guard = if cfg.guard_enabled { &res.guard } else { &disabled };
    let mentions = verify_candidates(&res.gazetteer, &candidates, guard);
    Ok(ExtractionResult::new(&tweet.id, mentions, started))
}

/// Whole-phrase gazetteer lookups of every word, and in BILOC mode also of
/// every pair of adjacent words. Unigrams come first so a BILOC result always
/// starts with the UNILOC result.
pub fn baseline_extract(
    tweet: &RawTweet,
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<ExtractionResult, Error> {
    cfg.validate()?;
    res.check()?;
    if cfg.mode == Mode::Geoloc {
        return Err(Error::Config("baseline extraction needs UNILOC or BILOC mode".into()));
    }
    let started = Instant::now();
    let tokens = reading_view(&normalize_tweet(&tweet.text));
    let mut candidates = Vec::new();
    for (i, t) in tokens.iter().enumerate().filter(|(_, t)| t.is_word()) {
        candidates.push(phrase_candidate(&t.surface, (i, i), Source::NounPhrase));
    }
    if cfg.mode == Mode::Biloc {
        for (i, pair) in tokens.windows(2).enumerate() {
            if pair[0].is_word() && pair[1].is_word() {
                let phrase = format!("{} {}", pair[0].surface, pair[1].surface);
                candidates.push(phrase_candidate(&phrase, (i, i + 1), Source::NounPhrase));
            }
        }
    }
    let mut mentions: Vec<LocatedMention> = Vec::new();
    for cand in candidates {
        let Some(hit) = res.gazetteer.lookup_exact(&cand.phrase).into_iter().next() else {
            continue;
        };
        if mentions.iter().any(|m| m.entry_id == hit.entry.geoname_id) {
            continue;
        }
        mentions.push(LocatedMention {
            entry_id: hit.entry.geoname_id,
            matched_text: hit.matched_text,
            lat: hit.entry.lat,
            lon: hit.entry.lon,
            match_kind: hit.kind,
            candidate: cand,
        });
    }
    Ok(ExtractionResult::new(&tweet.id, mentions, started))
}

/// Extract a batch on the rayon pool. Configuration and resources are
/// checked once, before any tweet runs. Output order follows input order.
pub fn extract_batch(
    tweets: &[RawTweet],
    cfg: &PipelineConfig,
    res: &Resources,
) -> Result<Vec<ExtractionResult>, Error> {
    cfg.validate()?;
    res.check()?;
    tweets.par_iter().map(|t| extract_locations(t, cfg, res)).collect()
}
