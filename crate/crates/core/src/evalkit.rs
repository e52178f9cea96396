//! Precision, recall and F-score of an extractor against annotated tweets.
//!
//! Counts are pooled over the corpus (micro-averaging). Inside a tweet each
//! retrieved mention can satisfy at most one gold name and vice versa; the
//! matched count is the size of a maximum matching between the two.

use std::collections::HashSet;
use std::io::BufRead;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gazetteer::{normalize_name, Gazetteer};
use crate::pipeline::ExtractionResult;
use crate::tweet::{rfc3339_seconds, RawTweet};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldRecord {
    pub tweet: RawTweet,
    pub gold: Vec<String>,
}

#[derive(Deserialize)]
struct GoldLine {
    id: String,
    text: String,
    #[serde(with = "rfc3339_seconds")]
    created_at: DateTime<Utc>,
    gold: Vec<String>,
}

impl GoldRecord {
    /// Builds a record; gold names are deduplicated after normalization and
    /// must be non-empty.
    pub fn new(tweet: RawTweet, gold: impl IntoIterator<Item = impl Into<String>>) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        let mut names = Vec::new();
        for g in gold {
            let g: String = g.into();
            let key = normalize_name(&g);
            if key.is_empty() {
                return Err(Error::Record(format!("tweet {}: empty gold name", tweet.id)));
            }
            if seen.insert(key) {
                names.push(g);
            }
        }
        Ok(Self { tweet, gold: names })
    }
}

/// Read a gold corpus: one JSON object per line with `id`, `text`,
/// `created_at` and `gold`.
pub fn load_gold<R: BufRead>(reader: R) -> Result<Vec<GoldRecord>, Error> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let bad = |message: String| Error::Load { line: idx + 1, message };
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let g: GoldLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let tweet = RawTweet::new(g.id, g.text, g.created_at);
        tweet.validate().map_err(|e| bad(e.to_string()))?;
        out.push(GoldRecord::new(tweet, g.gold).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub const BUNDLED_GOLD: &str = include_str!("../data/gold_corpus.jsonl");

pub fn bundled_gold() -> Vec<GoldRecord> {
    load_gold(BUNDLED_GOLD.as_bytes()).expect("bundled gold corpus is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchRule {
    /// Phrase, matched text, or any name of the resolved entry.
    #[default]
    Names,
    /// Phrase or matched text only.
    Exact,
}

impl std::str::FromStr for MatchRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "names" => Ok(MatchRule::Names),
            "exact" => Ok(MatchRule::Exact),
            other => Err(Error::Config(format!("unknown match rule `{other}`"))),
        }
    }
}

/// A retrieved location and the normalized strings a gold name may equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved {
    pub label: String,
    pub accepts: HashSet<String>,
}

impl Retrieved {
    pub fn plain(label: &str) -> Self {
        Self {
            label: label.to_string(),
            accepts: HashSet::from([normalize_name(label)]),
        }
    }

    fn from_result(result: &ExtractionResult, rule: MatchRule, gazetteer: &dyn Gazetteer) -> Vec<Self> {
        result
            .mentions
            .iter()
            .map(|m| {
                let mut accepts = HashSet::from([
                    normalize_name(&m.candidate.phrase),
                    normalize_name(&m.matched_text),
                ]);
                if rule == MatchRule::Names {
                    if let Some(entry) = gazetteer.entry(m.entry_id) {
                        accepts.extend(entry.keys());
                    }
                }
                Self {
                    label: m.candidate.phrase.clone(),
                    accepts,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub retrieved: String,
    pub gold: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetScore {
    pub id: String,
    pub retrieved: Vec<String>,
    pub correct: Vec<String>,
    pub matched: Vec<MatchedPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub retrieved_total: usize,
    pub correct_total: usize,
    pub matched_total: usize,
    pub per_tweet: Vec<TweetScore>,
    pub total_elapsed_secs: f64,
    pub tweets_evaluated: usize,
    pub errors: usize,
}

pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Maximum bipartite matching, retrieved index → gold index.
fn max_matching(retrieved: &[Retrieved], gold_keys: &[String]) -> Vec<(usize, usize)> {
    fn augment(
        r: usize,
        edges: &[Vec<usize>],
        visited: &mut [bool],
        gold_owner: &mut [Option<usize>],
    ) -> bool {
        for &g in &edges[r] {
            if visited[g] {
                continue;
            }
            visited[g] = true;
            if gold_owner[g].is_none_or(|other| augment(other, edges, visited, gold_owner)) {
                gold_owner[g] = Some(r);
                return true;
            }
        }
        false
    }
    let edges: Vec<Vec<usize>> = retrieved
        .iter()
        .map(|r| (0..gold_keys.len()).filter(|&g| r.accepts.contains(&gold_keys[g])).collect())
        .collect();
    let mut gold_owner = vec![None; gold_keys.len()];
    for r in 0..retrieved.len() {
        let mut visited = vec![false; gold_keys.len()];
        augment(r, &edges, &mut visited, &mut gold_owner);
    }
    let mut pairs: Vec<(usize, usize)> = gold_owner
        .iter()
        .enumerate()
        .filter_map(|(g, r)| r.map(|r| (r, g)))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Score one tweet.
pub fn score_tweet(id: &str, retrieved: &[Retrieved], correct: &[String]) -> TweetScore {
    let mut seen = HashSet::new();
    let correct: Vec<String> = correct
        .iter()
        .filter(|c| seen.insert(normalize_name(c)))
        .cloned()
        .collect();
    let keys: Vec<String> = correct.iter().map(|c| normalize_name(c)).collect();
    let matched = max_matching(retrieved, &keys)
        .into_iter()
        .map(|(r, g)| MatchedPair {
            retrieved: retrieved[r].label.clone(),
            gold: correct[g].clone(),
        })
        .collect();
    TweetScore {
        id: id.to_string(),
        retrieved: retrieved.iter().map(|r| r.label.clone()).collect(),
        correct,
        matched,
    }
}

/// Pool per-tweet scores into a report.
pub fn pool(per_tweet: Vec<TweetScore>, total_elapsed: Duration, errors: usize) -> EvalReport {
    let retrieved_total: usize = per_tweet.iter().map(|t| t.retrieved.len()).sum();
    let correct_total: usize = per_tweet.iter().map(|t| t.correct.len()).sum();
    let matched_total: usize = per_tweet.iter().map(|t| t.matched.len()).sum();
    let precision = ratio(matched_total, retrieved_total);
    let recall = ratio(matched_total, correct_total);
    EvalReport {
        precision,
        recall,
        f_score: f_score(precision, recall),
        retrieved_total,
        correct_total,
        matched_total,
        tweets_evaluated: per_tweet.len(),
        per_tweet,
        total_elapsed_secs: total_elapsed.as_secs_f64(),
        errors,
    }
}

/// Score plain string sets, one `(retrieved, correct)` pair per tweet, with
/// normalized string equality as the match rule.
pub fn score_sets(tweets: &[(Vec<String>, Vec<String>)]) -> EvalReport {
    let per_tweet = tweets
        .iter()
        .enumerate()
        .map(|(i, (retrieved, correct))| {
            let mut seen = HashSet::new();
            let retrieved: Vec<Retrieved> = retrieved
                .iter()
                .filter(|r| seen.insert(normalize_name(r)))
                .map(|r| Retrieved::plain(r))
                .collect();
            score_tweet(&i.to_string(), &retrieved, correct)
        })
        .collect();
    pool(per_tweet, Duration::ZERO, 0)
}

/// Run `extractor` over the corpus and score it. A tweet the extractor fails
/// on counts as retrieving nothing; the error is logged and counted.
pub fn evaluate<F>(
    corpus: &[GoldRecord],
    extractor: F,
    rule: MatchRule,
    gazetteer: &(dyn Gazetteer + Sync),
) -> Result<EvalReport, Error>
where
    F: Fn(&RawTweet) -> Result<ExtractionResult, Error> + Sync,
{
    if corpus.is_empty() {
        return Err(Error::Contract("evaluation corpus is empty".into()));
    }
    let scored: Vec<(TweetScore, Duration, bool)> = corpus
        .par_iter()
        .map(|rec| match extractor(&rec.tweet) {
            Ok(result) => {
                let retrieved = Retrieved::from_result(&result, rule, gazetteer);
                (score_tweet(&rec.tweet.id, &retrieved, &rec.gold), result.elapsed, false)
            }
            Err(e) => {
                log::error!("tweet {}: extraction failed: {e}", rec.tweet.id);
                (score_tweet(&rec.tweet.id, &[], &rec.gold), Duration::ZERO, true)
            }
        })
        .collect();
    let elapsed = scored.iter().map(|s| s.1).sum();
    let errors = scored.iter().filter(|s| s.2).count();
    Ok(pool(scored.into_iter().map(|s| s.0).collect(), elapsed, errors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean_per_tweet: Duration,
    /// Best total over the repeats.
    pub total: Duration,
    pub runs: Vec<Duration>,
}

/// Time `extractor` over the corpus `repeats` times on the calling thread,
/// keeping the fastest run.
pub fn time_extractor<F, T>(corpus: &[RawTweet], extractor: F, repeats: usize) -> Result<Timing, Error>
where
    F: Fn(&RawTweet) -> T,
{
    if repeats == 0 {
        return Err(Error::Contract("repeats must be at least 1".into()));
    }
    if corpus.is_empty() {
        return Ok(Timing {
            mean_per_tweet: Duration::ZERO,
            total: Duration::ZERO,
            runs: Vec::new(),
        });
    }
    let runs: Vec<Duration> = (0..repeats)
        .map(|_| {
            let start = Instant::now();
            for t in corpus {
                std::hint::black_box(extractor(t));
            }
            start.elapsed()
        })
        .collect();
    let total = *runs.iter().min().expect("at least one run");
    Ok(Timing {
        mean_per_tweet: total / corpus.len() as u32,
        total,
        runs,
    })
}
