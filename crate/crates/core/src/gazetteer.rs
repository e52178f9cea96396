//! GeoNames-backed place index and candidate verification.
//!
//! Every name, ASCII name and alternate name of an entry is indexed under a
//! normalized key (lowercase, trimmed, inner whitespace collapsed). Lookups
//! try the whole phrase, then the phrase without a trailing suffix word, then
//! its longest sub-n-gram.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::extract::{CandidateMention, Cue, Source};
use crate::lexicon::{SuffixLexicon, WordList, COMMON_WORDS_TXT};
use crate::Error;

const GEONAMES_COLUMNS: usize = 19;
const SNAPSHOT_HEADER: &str = "TOPONYM-INDEX v1";
const SNAPSHOT_COLUMNS: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub geoname_id: u64,
    pub name: String,
    pub ascii_name: String,
    pub alternate_names: Vec<String>,
    pub lat: f64,
    pub lon: f64,
    pub feature_class: char,
    pub feature_code: String,
    pub country_code: String,
    pub admin1: String,
    pub population: u64,
}

impl GazetteerEntry {
    /// Normalized forms of every name this entry is known by.
    pub fn keys(&self) -> impl Iterator<Item = String> + '_ {
        std::iter::once(&self.name)
            .chain(std::iter::once(&self.ascii_name))
            .chain(&self.alternate_names)
            .map(|n| normalize_name(n))
            .filter(|k| !k.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchKind {
    ExactName,
    AlternateName,
    SuffixDropped,
    SubNgram,
}

impl MatchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchKind::ExactName => "EXACT_NAME",
            MatchKind::AlternateName => "ALTERNATE_NAME",
            MatchKind::SuffixDropped => "SUFFIX_DROPPED",
            MatchKind::SubNgram => "SUB_NGRAM",
        }
    }
}

/// One lookup hit. `matched_text` is the part of the query that matched, with
/// the query's original casing.
#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerMatch<'a> {
    pub entry: &'a GazetteerEntry,
    pub kind: MatchKind,
    pub matched_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocatedMention {
    pub candidate: CandidateMention,
    pub entry_id: u64,
    pub matched_text: String,
    pub lat: f64,
    pub lon: f64,
    pub match_kind: MatchKind,
}

/// Lowercase, trim, collapse inner whitespace.
pub fn normalize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for word in name.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    /// Box around India used for the bundled deployment.
    pub const INDIA: BoundingBox = BoundingBox {
        min_lat: 6.0,
        max_lat: 37.5,
        min_lon: 68.0,
        max_lon: 97.5,
    };

    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.min_lat..=self.max_lat).contains(&lat) && (self.min_lon..=self.max_lon).contains(&lon)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadOptions {
    /// Two-letter country code rows must carry.
    pub country: Option<String>,
    pub bbox: Option<BoundingBox>,
}

impl LoadOptions {
    pub fn country(code: &str) -> Self {
        Self {
            country: Some(code.to_string()),
            bbox: None,
        }
    }
}

/// Lookup interface the verifier relies on. [`GazetteerIndex`] is the only
/// implementation shipped.
pub trait Gazetteer {
    fn entry(&self, geoname_id: u64) -> Option<&GazetteerEntry>;
    /// Staged lookup; empty when nothing matches.
    fn lookup(&self, phrase: &str) -> Vec<GazetteerMatch<'_>>;
    /// Whole-phrase lookup only.
    fn lookup_exact(&self, phrase: &str) -> Vec<GazetteerMatch<'_>>;
}

#[derive(Debug, Clone)]
pub struct GazetteerIndex {
    entries: Vec<GazetteerEntry>,
    by_id: HashMap<u64, u32>,
    name_index: HashMap<String, Vec<u32>>,
    max_ngram: usize,
    skipped_rows: usize,
    suffixes: SuffixLexicon,
}

impl Default for GazetteerIndex {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            by_id: HashMap::new(),
            name_index: HashMap::new(),
            max_ngram: 0,
            skipped_rows: 0,
            suffixes: SuffixLexicon::bundled(),
        }
    }
}

fn parse_row(fields: &[&str]) -> Result<GazetteerEntry, String> {
    let geoname_id: u64 = fields[0].parse().map_err(|_| format!("bad geonameid `{}`", fields[0]))?;
    if geoname_id == 0 {
        return Err("geonameid must be positive".into());
    }
    let lat: f64 = fields[4].parse().map_err(|_| format!("bad latitude `{}`", fields[4]))?;
    let lon: f64 = fields[5].parse().map_err(|_| format!("bad longitude `{}`", fields[5]))?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(format!("coordinates ({lat}, {lon}) out of range"));
    }
    let population = match fields[14].trim() {
        "" => 0,
        p => p.parse().map_err(|_| format!("bad population `{p}`"))?,
    };
    Ok(GazetteerEntry {
        geoname_id,
        name: fields[1].to_string(),
        ascii_name: fields[2].to_string(),
        alternate_names: fields[3]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
        lat,
        lon,
        feature_class: fields[6].chars().next().unwrap_or(' '),
        feature_code: fields[7].to_string(),
        country_code: fields[8].to_string(),
        admin1: fields[10].to_string(),
        population,
    })
}

impl GazetteerIndex {
    /// Read a GeoNames dump. A row with the wrong number of columns aborts
    /// the load; rows with unusable values are skipped and counted.
    pub fn load_geonames<R: BufRead>(reader: R, options: &LoadOptions) -> Result<Self, Error> {
        let mut index = Self::default();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::Load {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != GEONAMES_COLUMNS {
                return Err(Error::Load {
                    line: line_no,
                    message: format!("expected {GEONAMES_COLUMNS} columns, found {}", fields.len()),
                });
            }
            if options.country.as_deref().is_some_and(|c| c != fields[8]) {
                continue;
            }
            match parse_row(&fields) {
                Ok(entry) => {
                    if options.bbox.is_some_and(|b| !b.contains(entry.lat, entry.lon)) {
                        continue;
                    }
                    if index.by_id.contains_key(&entry.geoname_id) {
                        log::warn!("line {line_no}: duplicate geonameid {}", entry.geoname_id);
                        index.skipped_rows += 1;
                        continue;
                    }
                    index.insert(entry);
                }
                Err(msg) => {
                    log::warn!("line {line_no}: skipped: {msg}");
                    index.skipped_rows += 1;
                }
            }
        }
        Ok(index)
    }

    /// The India slice bundled with the crate.
    pub fn bundled() -> Self {
        Self::load_geonames(BUNDLED_GEONAMES.as_bytes(), &LoadOptions::country("IN"))
            .expect("bundled gazetteer is valid")
    }

    pub fn from_entries(entries: impl IntoIterator<Item = GazetteerEntry>) -> Result<Self, Error> {
        let mut index = Self::default();
        for e in entries {
            if index.by_id.contains_key(&e.geoname_id) {
                return Err(Error::Contract(format!("duplicate geonameid {}", e.geoname_id)));
            }
            index.insert(e);
        }
        Ok(index)
    }

    pub fn with_suffixes(mut self, suffixes: SuffixLexicon) -> Self {
        self.suffixes = suffixes;
        self
    }

    fn insert(&mut self, entry: GazetteerEntry) {
        let slot = u32::try_from(self.entries.len()).expect("fewer than 2^32 entries");
        let mut keys: Vec<String> = entry.keys().collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            self.max_ngram = self.max_ngram.max(key.split(' ').count());
            self.name_index.entry(key).or_default().push(slot);
        }
        self.by_id.insert(entry.geoname_id, slot);
        self.entries.push(entry);
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Rows dropped during loading because of unusable values.
    pub fn skipped_rows(&self) -> usize {
        self.skipped_rows
    }

    /// Longest indexed name, in words.
    pub fn max_ngram(&self) -> usize {
        self.max_ngram
    }

    pub fn name_count(&self) -> usize {
        self.name_index.len()
    }

    pub fn contains_name(&self, phrase: &str) -> bool {
        self.name_index.contains_key(&normalize_name(phrase))
    }

    /// Entries under an already-normalized key, by population descending
    /// then id ascending.
    fn ranked(&self, key: &str) -> Vec<&GazetteerEntry> {
        let Some(slots) = self.name_index.get(key) else {
            return Vec::new();
        };
        let mut hits: Vec<&GazetteerEntry> = slots.iter().map(|&s| &self.entries[s as usize]).collect();
        hits.sort_by(|a, b| {
            b.population
                .cmp(&a.population)
                .then(a.geoname_id.cmp(&b.geoname_id))
        });
        hits
    }

    fn stage<'a>(
        &'a self,
        key: &str,
        matched_text: &str,
        kind: Option<MatchKind>,
    ) -> Vec<GazetteerMatch<'a>> {
        self.ranked(key)
            .into_iter()
            .map(|entry| {
                let kind = kind.unwrap_or_else(|| {
                    if normalize_name(&entry.name) == key || normalize_name(&entry.ascii_name) == key {
                        MatchKind::ExactName
                    } else {
                        MatchKind::AlternateName
                    }
                });
                GazetteerMatch {
                    entry,
                    kind,
                    matched_text: matched_text.to_string(),
                }
            })
            .collect()
    }

    /// Write a snapshot that [`GazetteerIndex::load_snapshot`] restores
    /// without re-reading the dump.
    pub fn save_snapshot<W: Write>(&self, mut w: W) -> Result<(), Error> {
        writeln!(w, "{SNAPSHOT_HEADER}")?;
        writeln!(w, "{}", self.entries.len())?;
        for e in &self.entries {
            let alternates: Vec<&str> = e.alternate_names.iter().map(String::as_str).collect();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.geoname_id,
                e.name,
                e.ascii_name,
                alternates.join(","),
                e.lat,
                e.lon,
                e.feature_class,
                e.feature_code,
                e.country_code,
                e.admin1,
                e.population
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_snapshot<R: BufRead>(reader: R) -> Result<Self, Error> {
        let mut lines = reader.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String), Error> {
            match lines.next() {
                Some((i, l)) => Ok((i + 1, l?)),
                None => Err(Error::Load {
                    line: 0,
                    message: format!("snapshot ends before {what}"),
                }),
            }
        };
        let (_, header) = next("header")?;
        if header != SNAPSHOT_HEADER {
            return Err(Error::Load {
                line: 1,
                message: format!("expected `{SNAPSHOT_HEADER}` header, found `{header}`"),
            });
        }
        let (line_no, count) = next("entry count")?;
        let count: usize = count.parse().map_err(|_| Error::Load {
            line: line_no,
            message: "bad entry count".into(),
        })?;
        let mut index = Self::default();
        for _ in 0..count {
            let (line_no, line) = next("all entries")?;
            let f: Vec<&str> = line.split('\t').collect();
            let bad = |message: String| Error::Load { line: line_no, message };
            if f.len() != SNAPSHOT_COLUMNS {
                return Err(bad(format!("expected {SNAPSHOT_COLUMNS} columns, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
            let int = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad integer `{s}`")));
            let entry = GazetteerEntry {
                geoname_id: int(f[0])?,
                name: f[1].to_string(),
                ascii_name: f[2].to_string(),
                alternate_names: f[3]
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
                lat: num(f[4])?,
                lon: num(f[5])?,
                feature_class: f[6].chars().next().unwrap_or(' '),
                feature_code: f[7].to_string(),
                country_code: f[8].to_string(),
                admin1: f[9].to_string(),
                population: int(f[10])?,
            };
            if index.by_id.contains_key(&entry.geoname_id) {
                return Err(bad(format!("duplicate geonameid {}", entry.geoname_id)));
            }
            index.insert(entry);
        }
        Ok(index)
    }
}

impl Gazetteer for GazetteerIndex {
    fn entry(&self, geoname_id: u64) -> Option<&GazetteerEntry> {
        self.by_id.get(&geoname_id).map(|&s| &self.entries[s as usize])
    }

    fn lookup(&self, phrase: &str) -> Vec<GazetteerMatch<'_>> {
        let words: Vec<&str> = phrase.split_whitespace().collect();
        if words.is_empty() {
            return Vec::new();
        }
        let key = normalize_name(phrase);
        let exact = self.stage(&key, &words.join(" "), None);
        if !exact.is_empty() {
            return exact;
        }
        let n = words.len();
        if n > 1 && self.suffixes.contains(&words[n - 1].to_lowercase()) {
            let kept = words[..n - 1].join(" ");
            let hits = self.stage(&normalize_name(&kept), &kept, Some(MatchKind::SuffixDropped));
            if !hits.is_empty() {
                return hits;
            }
        }
        let lowered: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
        for len in (1..n).rev().filter(|&len| len <= self.max_ngram) {
            for start in 0..=n - len {
                let key = lowered[start..start + len].join(" ");
                if self.name_index.contains_key(&key) {
                    let text = words[start..start + len].join(" ");
                    return self.stage(&key, &text, Some(MatchKind::SubNgram));
                }
            }
        }
        Vec::new()
    }

    fn lookup_exact(&self, phrase: &str) -> Vec<GazetteerMatch<'_>> {
        let words: Vec<&str> = phrase.split_whitespace().collect();
        self.stage(&normalize_name(phrase), &words.join(" "), None)
    }
}

pub(crate) const BUNDLED_GEONAMES: &str = include_str!("../data/geonames_in.tsv");

/// Rejects single common words written in lowercase unless a cue backs them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityGuard {
    pub enabled: bool,
    pub common_words: WordList,
}

impl AmbiguityGuard {
    pub fn new(common_words: WordList) -> Self {
        Self {
            enabled: true,
            common_words,
        }
    }

    pub fn bundled() -> Self {
        Self::new(WordList::parse(COMMON_WORDS_TXT))
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            common_words: WordList::default(),
        }
    }

    /// Whether a match on `matched_text` from `candidate` is rejected.
    pub fn rejects(&self, candidate: &CandidateMention, matched_text: &str) -> bool {
        if !self.enabled || candidate.has_cue() {
            return false;
        }
        let mut words = matched_text.split_whitespace();
        let (Some(word), None) = (words.next(), words.next()) else {
            return false;
        };
        let lower = word.to_lowercase();
        word == lower && self.common_words.contains(&lower)
    }
}

impl Default for AmbiguityGuard {
    fn default() -> Self {
        Self::bundled()
    }
}

/// Resolve candidates against the gazetteer. Each candidate takes its best
/// lookup hit; hits the guard rejects are dropped. When several candidates
/// land on one entry, the first keeps the mention and absorbs the others'
/// sources and cues.
pub fn verify_candidates<G: Gazetteer + ?Sized>(
    gazetteer: &G,
    candidates: &[CandidateMention],
    guard: &AmbiguityGuard,
) -> Vec<LocatedMention> {
    let mut out: Vec<LocatedMention> = Vec::new();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for cand in candidates {
        let Some(best) = gazetteer.lookup(&cand.phrase).into_iter().next() else {
            continue;
        };
        if guard.rejects(cand, &best.matched_text) {
            continue;
        }
        let id = best.entry.geoname_id;
        if let Some(&pos) = seen.get(&id) {
            let kept = &mut out[pos].candidate;
            kept.sources.extend(cand.sources.iter().copied());
            kept.cues.extend(cand.cues.iter().copied());
            continue;
        }
        seen.insert(id, out.len());
        out.push(LocatedMention {
            candidate: cand.clone(),
            entry_id: id,
            matched_text: best.matched_text,
            lat: best.entry.lat,
            lon: best.entry.lon,
            match_kind: best.kind,
        });
    }
    out
}

/// A bare candidate for `phrase` with the given source; used for hashtag
/// expansions and baselines, which bypass the token-level sources.
pub fn phrase_candidate(phrase: &str, span: (usize, usize), source: Source) -> CandidateMention {
    CandidateMention {
        phrase: phrase.to_string(),
        token_span: span,
        sources: BTreeSet::from([source]),
        cues: BTreeSet::<Cue>::new(),
        fuzzy_suffix_score: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: u64, name: &str, alt: &str, lat: f64, lon: f64, cc: &str, pop: u64) -> String {
        format!(
            "{id}\t{name}\t{name}\t{alt}\t{lat}\t{lon}\tP\tPPL\t{cc}\t\t01\t\t\t\t{pop}\t\t0\tAsia/Kolkata\t\n"
        )
    }

    fn small() -> GazetteerIndex {
        let mut text = String::new();
        text += &row(1, "Delhi", "Dilli,New Delhi", 28.65, 77.23, "IN", 10_000_000);
        text += &row(2, "Tamil Nadu", "", 11.0, 78.0, "IN", 0);
        text += &row(3, "Gujranwala", "", 28.7, 77.1, "IN", 0);
        text += &row(4, "Springfield", "", 39.8, -89.6, "US", 100);
        text += &row(5, "Delhi", "", 44.0, -75.0, "IN", 10_000_000);
        text += &row(6, "Nadu", "", 10.0, 76.0, "IN", 5);
        GazetteerIndex::load_geonames(text.as_bytes(), &LoadOptions::country("IN")).unwrap()
    }

    fn candidate(phrase: &str, cues: &[Cue]) -> CandidateMention {
        let mut c = phrase_candidate(phrase, (0, 0), Source::NounPhrase);
        c.cues.extend(cues.iter().copied());
        c
    }

    #[test]
    fn country_filter_and_counts() {
        let idx = small();
        assert_eq!(idx.entry_count(), 5);
        assert!(idx.lookup("Springfield").is_empty());
        assert_eq!(idx.max_ngram(), 2);
        let empty = GazetteerIndex::load_geonames("".as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(empty.entry_count(), 0);
    }

    #[test]
    fn bad_rows() {
        let err = GazetteerIndex::load_geonames("1\tx\n".as_bytes(), &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Load { line: 1, .. }));
        let text = row(1, "A", "", 0.0, 0.0, "IN", 0).replace("\t0\t0\tP", "\tnorth\t0\tP");
        let idx = GazetteerIndex::load_geonames(text.as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!((idx.entry_count(), idx.skipped_rows()), (0, 1));
    }

    #[test]
    fn stages() {
        let idx = small();
        let hits = idx.lookup("tamil  NADU");
        assert_eq!(hits[0].entry.geoname_id, 2);
        assert_eq!(hits[0].kind, MatchKind::ExactName);
        assert_eq!(idx.lookup("New Delhi")[0].kind, MatchKind::AlternateName);
        let hits = idx.lookup("Gujranwala town");
        assert_eq!((hits[0].entry.geoname_id, hits[0].kind), (3, MatchKind::SuffixDropped));
        assert_eq!(hits[0].matched_text, "Gujranwala");
        let hits = idx.lookup("rains lash Tamil Nadu today");
        assert_eq!((hits[0].entry.geoname_id, hits[0].kind), (2, MatchKind::SubNgram));
        assert!(idx.lookup("zzzzqq").is_empty());
        assert!(idx.lookup("").is_empty());
    }

    #[test]
    fn population_then_id_order() {
        let idx = small();
        let hits = idx.lookup("delhi");
        let ids: Vec<u64> = hits.iter().map(|h| h.entry.geoname_id).collect();
        assert_eq!(ids, [1, 5]);
    }

    #[test]
    fn guard_needs_cue_for_lowercase_common_words() {
        let guard = AmbiguityGuard::new(["song", "delhi"].into_iter().collect());
        assert!(guard.rejects(&candidate("song", &[]), "song"));
        assert!(!guard.rejects(&candidate("song", &[Cue::PrecedingPreposition]), "song"));
        assert!(!guard.rejects(&candidate("Song", &[]), "Song"));
        assert!(!guard.rejects(&candidate("song city", &[]), "song city"));
        assert!(!AmbiguityGuard::disabled().rejects(&candidate("song", &[]), "song"));
    }

    #[test]
    fn verify_dedups_by_entry() {
        let idx = small();
        let guard = AmbiguityGuard::disabled();
        let out = verify_candidates(&idx, &[candidate("Delhi", &[]), candidate("Delhi", &[])], &guard);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].lat, out[0].lon), (28.65, 77.23));
    }

    #[test]
    fn snapshot_round_trip() {
        let idx = small();
        let mut buf = Vec::new();
        idx.save_snapshot(&mut buf).unwrap();
        let back = GazetteerIndex::load_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.entries(), idx.entries());
        assert_eq!(back.name_count(), idx.name_count());
        assert!(GazetteerIndex::load_snapshot("TOPONYM-INDEX v0\n0\n".as_bytes()).is_err());
        assert!(GazetteerIndex::load_snapshot(&buf[..buf.len() - 3]).is_err());
    }
}
