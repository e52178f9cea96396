//! Tweet store: extraction results kept in memory and in an append-only log.
//!
//! One writer appends whole batches; readers work on immutable snapshots and
//! never see half a batch. Reopening a store replays its log and rebuilds the
//! same snapshot.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{NaiveDate, Timelike};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::lexicon::EmergencyLexicon;
use crate::normalize::{normalize_tweet, normalized_text};
use crate::pipeline::{extract_batch, ExtractionResult, PipelineConfig, Resources};
use crate::tweet::{format_timestamp, RawTweet};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet: RawTweet,
    pub result: ExtractionResult,
    pub day_key: NaiveDate,
    pub hour: u8,
    /// Tracked emergency terms present in the text.
    pub matched_terms: BTreeSet<String>,
}

impl TweetRecord {
    pub fn new(tweet: RawTweet, result: ExtractionResult, emergencies: &EmergencyLexicon) -> Self {
        let matched_terms = normalize_tweet(&tweet.text)
            .iter()
            .filter(|t| t.is_word())
            .filter_map(|t| emergencies.term(&t.surface))
            .map(str::to_string)
            .collect();
        Self {
            day_key: tweet.created_at.date_naive(),
            hour: tweet.created_at.hour() as u8,
            matched_terms,
            result,
            tweet,
        }
    }

    pub fn tagged(&self) -> bool {
        !self.result.untagged
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCounts {
    pub tagged: usize,
    pub untagged: usize,
}

#[derive(Debug, Clone, Default)]
pub struct StoreSnapshot {
    pub records: Vec<Arc<TweetRecord>>,
    pub by_day: BTreeMap<NaiveDate, DayCounts>,
    pub generation: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Filter {
    /// Lowercase search terms; a record passes if its text contains any.
    pub terms: Vec<String>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl Filter {
    /// Build from a comma-separated query and optional inclusive date bounds.
    pub fn new(q: Option<&str>, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self, Error> {
        if let (Some(f), Some(t)) = (from, to) {
            if f > t {
                return Err(Error::Contract(format!("date range {f} > {t}")));
            }
        }
        let terms = q
            .unwrap_or("")
            .split(',')
            .map(|t| t.trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        Ok(Self { terms, from, to })
    }

    pub fn accepts(&self, r: &TweetRecord) -> bool {
        if self.from.is_some_and(|f| r.day_key < f) || self.to.is_some_and(|t| r.day_key > t) {
            return false;
        }
        if self.terms.is_empty() {
            return true;
        }
        let text = r.tweet.text.to_lowercase();
        self.terms.iter().any(|t| text.contains(t.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UntaggedItem {
    pub tweet_id: String,
    pub text: String,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UntaggedPage {
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub items: Vec<UntaggedItem>,
}

impl StoreSnapshot {
    fn push(&mut self, record: Arc<TweetRecord>) {
        let day = self.by_day.entry(record.day_key).or_default();
        if record.tagged() {
            day.tagged += 1;
        } else {
            day.untagged += 1;
        }
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn filtered<'a>(&'a self, f: &'a Filter) -> impl Iterator<Item = &'a TweetRecord> + 'a {
        self.records.iter().map(Arc::as_ref).filter(move |r| f.accepts(r))
    }

    /// GeoJSON FeatureCollection with one Point per located mention of every
    /// tagged record passing the filter.
    pub fn features(&self, f: &Filter) -> Value {
        let mut features = Vec::new();
        for r in self.filtered(f).filter(|r| r.tagged()) {
            for m in &r.result.mentions {
                features.push(json!({
                    "type": "Feature",
                    "geometry": {"type": "Point", "coordinates": [m.lon, m.lat]},
                    "properties": {
                        "tweet_id": r.tweet.id,
                        "text": r.tweet.text,
                        "created_at": format_timestamp(&r.tweet.created_at),
                        "hour": r.hour,
                        "phrase": m.candidate.phrase,
                        "geoname_id": m.entry_id,
                    }
                }));
            }
        }
        json!({"type": "FeatureCollection", "features": features})
    }

    /// Untagged records passing the filter, `page_size` per page, pages
    /// numbered from 1.
    pub fn untagged(&self, f: &Filter, page: usize, page_size: usize) -> UntaggedPage {
        let page = page.max(1);
        let page_size = page_size.max(1);
        let all: Vec<&TweetRecord> = self.filtered(f).filter(|r| !r.tagged()).collect();
        let items = all
            .iter()
            .skip((page - 1) * page_size)
            .take(page_size)
            .map(|r| UntaggedItem {
                tweet_id: r.tweet.id.clone(),
                text: r.tweet.text.clone(),
                created_at: format_timestamp(&r.tweet.created_at),
            })
            .collect();
        UntaggedPage {
            page,
            page_size,
            total: all.len(),
            items,
        }
    }

    /// Tagged records per day. With both bounds set, every day in the range
    /// appears, zero counts included.
    pub fn histogram(&self, f: &Filter) -> Vec<(NaiveDate, usize)> {
        let mut counts: BTreeMap<NaiveDate, usize> = BTreeMap::new();
        if let (Some(from), Some(to)) = (f.from, f.to) {
            for day in from.iter_days().take_while(|d| *d <= to) {
                counts.insert(day, 0);
            }
        }
        for r in self.filtered(f).filter(|r| r.tagged()) {
            *counts.entry(r.day_key).or_default() += 1;
        }
        counts.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub duplicates: usize,
    pub errors: usize,
    /// Dropped by the optional English filter.
    pub filtered: usize,
    pub generation: u64,
}

#[derive(Serialize, Deserialize)]
struct LogLine {
    generation: u64,
    record: TweetRecord,
}

#[derive(Debug, Default)]
struct WriterState {
    log: Option<(PathBuf, File)>,
    ids: HashSet<String>,
    texts: HashSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct StoreConfig {
    pub pipeline: PipelineConfig,
    /// When set, tweets whose fraction of known English words is below this
    /// value are dropped at ingest.
    pub english_min_fraction: Option<f64>,
}

pub struct Store {
    resources: Arc<Resources>,
    config: StoreConfig,
    writer: Mutex<WriterState>,
    current: RwLock<Arc<StoreSnapshot>>,
}

fn text_key(text: &str) -> String {
    normalized_text(&normalize_tweet(text))
}

impl Store {
    /// In-memory store with no log.
    pub fn in_memory(resources: Arc<Resources>, config: StoreConfig) -> Result<Self, Error> {
        config.pipeline.validate()?;
        resources.check()?;
        Ok(Self {
            resources,
            config,
            writer: Mutex::new(WriterState::default()),
            current: RwLock::new(Arc::new(StoreSnapshot::default())),
        })
    }

    /// Open or create the log at `path` and replay it.
    pub fn open(path: &Path, resources: Arc<Resources>, config: StoreConfig) -> Result<Self, Error> {
        let store = Self::in_memory(resources, config)?;
        let mut snapshot = StoreSnapshot::default();
        let mut state = WriterState::default();
        if path.exists() {
            let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<Result<_, _>>()?;
            let last = lines.len();
            for (idx, line) in lines.into_iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let entry: LogLine = match serde_json::from_str(&line) {
                    Ok(e) => e,
                    Err(e) if idx + 1 == last => {
                        log::warn!("{}: ignoring torn final line: {e}", path.display());
                        continue;
                    }
                    Err(e) => {
                        return Err(Error::Load {
                            line: idx + 1,
                            message: format!("{}: {e}", path.display()),
                        })
                    }
                };
                state.ids.insert(entry.record.tweet.id.clone());
                state.texts.insert(text_key(&entry.record.tweet.text));
                snapshot.generation = snapshot.generation.max(entry.generation);
                snapshot.push(Arc::new(entry.record));
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        state.log = Some((path.to_path_buf(), file));
        *store.writer.lock().expect("writer lock") = state;
        *store.current.write().expect("snapshot lock") = Arc::new(snapshot);
        Ok(store)
    }

    pub fn snapshot(&self) -> Arc<StoreSnapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    pub fn resources(&self) -> &Arc<Resources> {
        &self.resources
    }

    fn looks_english(&self, text: &str) -> bool {
        let Some(min) = self.config.english_min_fraction else {
            return true;
        };
        let words: Vec<String> = normalize_tweet(text)
            .iter()
            .filter(|t| t.is_word() && !t.camel_split)
            .map(|t| t.surface.to_lowercase())
            .collect();
        if words.is_empty() {
            return false;
        }
        let lex = &self.resources.lexicons;
        let known = words
            .iter()
            .filter(|w| {
                lex.stoplist.contains(w)
                    || lex.prepositions.contains(w)
                    || lex.adjectives.contains(w)
                    || lex.is_common_noun(w)
                    || self.resources.guard.common_words.contains(w)
            })
            .count();
        known as f64 / words.len() as f64 >= min
    }

    /// Extract and append a batch. Items that failed to parse count as
    /// errors. Duplicates, by id or by normalized text, are skipped. Either
    /// the whole batch becomes visible or, if the log write fails, none of it.
    pub fn ingest(&self, batch: Vec<Result<RawTweet, Error>>) -> Result<IngestReport, Error> {
        let mut state = self.writer.lock().expect("writer lock");
        let mut report = IngestReport::default();
        let mut fresh = Vec::new();
        let mut batch_ids = HashSet::new();
        let mut batch_texts = HashSet::new();
        for item in batch {
            let tweet = match item.and_then(|t| t.validate().map(|_| t)) {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("ingest: skipped malformed record: {e}");
                    report.errors += 1;
                    continue;
                }
            };
            let key = text_key(&tweet.text);
            if state.ids.contains(&tweet.id)
                || batch_ids.contains(&tweet.id)
                || state.texts.contains(&key)
                || batch_texts.contains(&key)
            {
                report.duplicates += 1;
                continue;
            }
            if !self.looks_english(&tweet.text) {
                report.filtered += 1;
                continue;
            }
            batch_ids.insert(tweet.id.clone());
            batch_texts.insert(key);
            fresh.push(tweet);
        }

        let results = extract_batch(&fresh, &self.config.pipeline, &self.resources)?;
        let current = self.snapshot();
        if fresh.is_empty() {
            report.generation = current.generation;
            return Ok(report);
        }
        let generation = current.generation + 1;
        let records: Vec<TweetRecord> = fresh
            .into_iter()
            .zip(results)
            .map(|(t, r)| TweetRecord::new(t, r, &self.resources.emergencies))
            .collect();

        if let Some((path, file)) = state.log.as_mut() {
            let mut buf = Vec::new();
            for record in &records {
                serde_json::to_writer(&mut buf, &LogLine { generation, record: record.clone() })
                    .map_err(|e| Error::Record(e.to_string()))?;
                buf.push(b'\n');
            }
            let before = file.metadata()?.len();
            let written = file.write_all(&buf).and_then(|_| file.sync_data());
            if let Err(e) = written {
                // Leave the log as it was so replay never sees a partial batch.
                if let Err(t) = file.set_len(before) {
                    log::error!("{}: could not roll back partial write: {t}", path.display());
                }
                return Err(Error::Io(e));
            }
        }

        let mut next = StoreSnapshot::clone(&current);
        next.generation = generation;
        for record in records {
            state.ids.insert(record.tweet.id.clone());
            state.texts.insert(text_key(&record.tweet.text));
            next.push(Arc::new(record));
            report.accepted += 1;
        }
        *self.current.write().expect("snapshot lock") = Arc::new(next);
        report.generation = generation;
        Ok(report)
    }

    pub fn ingest_tweets(&self, tweets: Vec<RawTweet>) -> Result<IngestReport, Error> {
        self.ingest(tweets.into_iter().map(Ok).collect())
    }
}

/// Split a request body into tweet records: either a JSON array or one JSON
/// object per line.
pub fn parse_batch(body: &str) -> Vec<Result<RawTweet, Error>> {
    let trimmed = body.trim_start();
    if trimmed.starts_with('[') {
        return match serde_json::from_str::<Vec<Value>>(trimmed) {
            Ok(items) => items
                .into_iter()
                .map(|v| {
                    serde_json::from_value::<RawTweet>(v)
                        .map_err(|e| Error::Record(e.to_string()))
                        .and_then(|t| t.validate().map(|_| t))
                })
                .collect(),
            Err(e) => vec![Err(Error::Record(e.to_string()))],
        };
    }
    body.lines()
        .filter(|l| !l.trim().is_empty())
        .map(RawTweet::from_json)
        .collect()
}
