//! Line records written by `extract` and the table printed by `eval`.

use serde::Serialize;
use toponym::evalkit::EvalReport;
use toponym::{Cue, ExtractionResult, MatchKind, Source};

#[derive(Debug, Serialize)]
pub struct MentionRecord<'a> {
    pub phrase: &'a str,
    pub matched_text: &'a str,
    pub geoname_id: u64,
    pub lat: f64,
    pub lon: f64,
    pub match_kind: MatchKind,
    pub sources: Vec<Source>,
    pub cues: Vec<Cue>,
}

#[derive(Debug, Serialize)]
pub struct ResultRecord<'a> {
    pub tweet_id: &'a str,
    pub untagged: bool,
    pub mentions: Vec<MentionRecord<'a>>,
}

impl<'a> From<&'a ExtractionResult> for ResultRecord<'a> {
    fn from(r: &'a ExtractionResult) -> Self {
        Self {
            tweet_id: &r.tweet_id,
            untagged: r.untagged,
            mentions: r
                .mentions
                .iter()
                .map(|m| MentionRecord {
                    phrase: &m.candidate.phrase,
                    matched_text: &m.matched_text,
                    geoname_id: m.entry_id,
                    lat: m.lat,
                    lon: m.lon,
                    match_kind: m.match_kind,
                    sources: m.candidate.sources.iter().copied().collect(),
                    cues: m.candidate.cues.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

/// One row of the comparison table.
#[derive(Debug, Serialize)]
pub struct EvalRow {
    pub method: String,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    /// Best-of-repeats wall time for the whole corpus, in seconds.
    pub timing_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<EvalReport>,
}

pub fn render_table(rows: &[EvalRow]) -> String {
    let mut out = format!(
        "{:<8} {:>9} {:>9} {:>9} {:>10}\n",
        "Method", "Precision", "Recall", "F-score", "Timing(s)"
    );
    for r in rows {
        out += &format!(
            "{:<8} {:>9.4} {:>9.4} {:>9.4} {:>10.4}\n",
            r.method, r.precision, r.recall, r.f_score, r.timing_secs
        );
    }
    out
}
