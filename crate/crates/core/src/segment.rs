//! Maximum-likelihood word segmentation of hashtag bodies under a unigram
//! frequency model.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::BufRead;

use crate::normalize::split_camel_case;
use crate::Error;

pub const DEFAULT_MAX_WORD_LEN: usize = 20;

#[derive(Debug, Clone)]
pub struct UnigramModel {
    counts: HashMap<String, u64>,
    total: u64,
    max_word_len: usize,
    log_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub words: Vec<String>,
    /// Base-10 log probability of the whole segmentation.
    pub log_score: f64,
}

impl Segmentation {
    pub fn joined(&self) -> String {
        self.words.join(" ")
    }
}

impl UnigramModel {
    /// Build a model from `(word, count)` pairs. Words are lowercased and
    /// duplicate words have their counts summed.
    pub fn from_counts<I, S>(pairs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for (word, count) in pairs {
            if count == 0 {
                return Err(Error::Model("counts must be positive".into()));
            }
            *counts.entry(word.as_ref().to_lowercase()).or_default() += count;
        }
        if counts.is_empty() {
            return Err(Error::Model("unigram model is empty".into()));
        }
        let total = counts.values().sum();
        Ok(Self {
            counts,
            total,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            log_total: (total as f64).log10(),
        })
    }

    /// Read `word<TAB>count` lines. Blank lines are skipped.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, Error> {
        let mut pairs = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::Load {
                line: line_no,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: &str| Error::Load {
                line: line_no,
                message: message.to_owned(),
            };
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected word<TAB>count"))?;
            if word.is_empty() {
                return Err(malformed("empty word"));
            }
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| malformed("count is not a positive integer"))?;
            if count == 0 {
                return Err(malformed("count is not a positive integer"));
            }
            pairs.push((word.to_owned(), count));
        }
        if pairs.is_empty() {
            return Err(Error::Model("unigram model is empty".into()));
        }
        Self::from_counts(pairs)
    }

    pub fn with_max_word_len(mut self, max_word_len: usize) -> Self {
        self.max_word_len = max_word_len.max(1);
        self
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// log10 P(word); unseen words get `10 / (total * 10^len)`.
    pub fn word_log_prob(&self, word: &str) -> f64 {
        match self.counts.get(word) {
            Some(&c) => (c as f64).log10() - self.log_total,
            None => 1.0 - self.log_total - word.chars().count() as f64,
        }
    }
}

#[derive(Clone, Copy)]
struct Cell {
    score: f64,
    words: usize,
    back: usize,
}

fn words_of(chars: &[char], cells: &[Option<Cell>], end: usize) -> Vec<String> {
    let mut bounds = vec![end];
    let mut at = end;
    while at > 0 {
        at = cells[at].expect("reachable prefix").back;
        bounds.push(at);
    }
    bounds.reverse();
    bounds
        .windows(2)
        .map(|w| chars[w[0]..w[1]].iter().collect())
        .collect()
}

/// Best segmentation of `s` (lowercased). Ties prefer fewer words, then the
/// lexicographically smallest word list.
pub fn segment_word(model: &UnigramModel, s: &str) -> Segmentation {
    let lower = s.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let n = chars.len();
    if n == 0 {
        return Segmentation {
            words: Vec::new(),
            log_score: 0.0,
        };
    }
    let mut cells: Vec<Option<Cell>> = vec![None; n + 1];
    cells[0] = Some(Cell {
        score: 0.0,
        words: 0,
        back: 0,
    });
    let mut piece = String::new();
    for end in 1..=n {
        let first = end.saturating_sub(model.max_word_len);
        for start in first..end {
            let Some(prev) = cells[start] else { continue };
            piece.clear();
            piece.extend(&chars[start..end]);
            let cand = Cell {
                score: prev.score + model.word_log_prob(&piece),
                words: prev.words + 1,
                back: start,
            };
            let replace = match cells[end] {
                None => true,
                Some(cur) => match cand.score.total_cmp(&cur.score) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => match cand.words.cmp(&cur.words) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let mut trial = cells.clone();
                            trial[end] = Some(cand);
                            words_of(&chars, &trial, end) < words_of(&chars, &cells, end)
                        }
                    },
                },
            };
            if replace {
                cells[end] = Some(cand);
            }
        }
    }
    let best = cells[n].expect("every prefix is reachable");
    Segmentation {
        words: words_of(&chars, &cells, n),
        log_score: best.score,
    }
}

/// Phrases a hashtag body may stand for: the body verbatim, its CamelCase
/// split, and its best segmentation. The original always comes first. The
/// segmentation is dropped when it repeats the CamelCase split ignoring case,
/// or repeats the original exactly.
pub fn hashtag_expansions(model: &UnigramModel, hashtag_body: &str) -> Vec<String> {
    let mut out = vec![hashtag_body.to_owned()];
    let camel = split_camel_case(hashtag_body);
    if camel.len() > 1 {
        out.push(camel.join(" "));
    }
    let seg = segment_word(model, hashtag_body).joined();
    let repeats_split = out[1..].iter().any(|p| p.to_lowercase() == seg);
    if !repeats_split && !out.contains(&seg) {
        out.push(seg);
    }
    out
}
