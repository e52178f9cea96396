//! Minimal CoNLL-U reader for externally supplied dependency parses.
//!
//! Only ID, FORM, UPOS and HEAD are used. Multiword-token ranges (`1-2`) and
//! empty nodes (`1.1`) are skipped. A sentence is keyed by its `# tweet_id`
//! or `# sent_id` comment.

use std::collections::HashMap;
use std::io::BufRead;

use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConlluWord {
    pub form: String,
    pub upos: String,
    /// Zero-based index of the head word; `None` for the root.
    pub head: Option<usize>,
    pub deprel: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConlluSentence {
    pub id: Option<String>,
    pub text: Option<String>,
    pub words: Vec<ConlluWord>,
}

pub fn parse_conllu<R: BufRead>(reader: R) -> Result<Vec<ConlluSentence>, Error> {
    let mut sentences = Vec::new();
    let mut current = ConlluSentence::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Load {
            line: line_no,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.words.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "tweet_id" | "sent_id" => current.id = Some(value.trim().to_owned()),
                    "text" => current.text = Some(value.trim().to_owned()),
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::Load {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0].parse().map_err(|_| Error::Load {
            line: line_no,
            message: format!("bad word id `{}`", cols[0]),
        })?;
        if id != current.words.len() + 1 {
            return Err(Error::Load {
                line: line_no,
                message: format!("word id {id} out of sequence"),
            });
        }
        let head = match cols[6] {
            "_" | "0" => None,
            h => Some(
                h.parse::<usize>()
                    .map_err(|_| Error::Load {
                        line: line_no,
                        message: format!("bad head `{h}`"),
                    })?
                    - 1,
            ),
        };
        current.words.push(ConlluWord {
            form: cols[1].to_owned(),
            upos: cols[3].to_owned(),
            head,
            deprel: cols[7].to_owned(),
        });
    }
    if !current.words.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

/// Parses keyed by sentence id; sentences without an id are dropped.
pub fn parses_by_id(sentences: Vec<ConlluSentence>) -> HashMap<String, ConlluSentence> {
    sentences
        .into_iter()
        .filter_map(|s| s.id.clone().map(|id| (id, s)))
        .collect()
}
