//! Python bindings. Results cross the boundary as plain dicts and lists,
//! built from the same JSON the CLI writes.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;
use serde_json::json;
use toponym::evalkit::{bundled_gold, evaluate, load_gold, score_sets, MatchRule};
use toponym::gazetteer::Gazetteer;
use toponym::normalize::{normalize_tweet, normalized_text, reading_view};
use toponym::pipeline::{extract_locations, Mode, PipelineConfig, ResourcePaths, Resources};
use toponym::segment::{hashtag_expansions, segment_word, UnigramModel};
use toponym::{RawTweet, Source};

const EPOCH: &str = "1970-01-01T00:00:00Z";

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn tweet(id: &str, text: &str, created_at: Option<&str>) -> PyResult<RawTweet> {
    let line = json!({ "id": id, "text": text, "created_at": created_at.unwrap_or(EPOCH) });
    RawTweet::from_json(&line.to_string()).map_err(value_error)
}

/// Tokens of the normalised tweet as dicts.
#[pyfunction]
#[pyo3(signature = (text, reading=false))]
fn normalize<'py>(py: Python<'py>, text: &str, reading: bool) -> PyResult<Bound<'py, PyAny>> {
    let tokens = normalize_tweet(text);
    let tokens = if reading { reading_view(&tokens) } else { tokens };
    to_py(py, &tokens)
}

/// The dedup key of a tweet text.
#[pyfunction]
fn normalized(text: &str) -> String {
    normalized_text(&normalize_tweet(text))
}

/// Hashtag segmenter over a unigram model.
#[pyclass(module = "toponym_py")]
struct Segmenter {
    model: UnigramModel,
}

#[pymethods]
impl Segmenter {
    /// Bundled model, or `counts` as a `{word: count}` mapping.
    #[new]
    #[pyo3(signature = (counts=None))]
    fn new(counts: Option<HashMap<String, u64>>) -> PyResult<Self> {
        let model = match counts {
            Some(c) => UnigramModel::from_counts(c).map_err(value_error)?,
            None => Resources::bundled().model,
        };
        Ok(Self { model })
    }

    fn segment(&self, word: &str) -> Vec<String> {
        segment_word(&self.model, word).words
    }

    fn score(&self, word: &str) -> f64 {
        segment_word(&self.model, word).log_score
    }

    fn expansions(&self, hashtag: &str) -> Vec<String> {
        hashtag_expansions(&self.model, hashtag.trim_start_matches('#'))
    }
}

/// Configured extractor with its resources loaded once.
#[pyclass(module = "toponym_py")]
struct Extractor {
    resources: Resources,
    config: PipelineConfig,
}

fn parse_sources(names: Vec<String>) -> PyResult<BTreeSet<Source>> {
    names
        .into_iter()
        .map(|n| {
            serde_json::from_value(serde_json::Value::String(n.trim().to_uppercase()))
                .map_err(|_| value_error(format!("unknown source `{n}`")))
        })
        .collect()
}

#[pymethods]
impl Extractor {
    #[new]
    #[pyo3(signature = (
        mode="geoloc", jw_threshold=None, max_dep_distance=None, guard=true,
        sources=None, gazetteer=None, country=None, parses=None, common_words=None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        mode: &str,
        jw_threshold: Option<f64>,
        max_dep_distance: Option<usize>,
        guard: bool,
        sources: Option<Vec<String>>,
        gazetteer: Option<PathBuf>,
        country: Option<String>,
        parses: Option<PathBuf>,
        common_words: Option<PathBuf>,
    ) -> PyResult<Self> {
        let mut config = PipelineConfig::with_mode(mode.parse::<Mode>().map_err(value_error)?);
        if let Some(t) = jw_threshold {
            config.jw_threshold = t;
        }
        if let Some(d) = max_dep_distance {
            config.max_dep_distance = d;
        }
        config.guard_enabled = guard;
        if let Some(s) = sources {
            config.enabled_sources = parse_sources(s)?;
        }
        config.validate().map_err(value_error)?;
        let paths = ResourcePaths {
            gazetteer,
            country: country.or_else(|| Some("IN".into())),
            parses,
            common_words,
            ..ResourcePaths::default()
        };
        let resources = Resources::load(&paths).map_err(value_error)?;
        Ok(Self { resources, config })
    }

    #[getter]
    fn mode(&self) -> String {
        format!("{:?}", self.config.mode).to_uppercase()
    }

    #[getter]
    fn gazetteer_size(&self) -> usize {
        self.resources.gazetteer.entry_count()
    }

    /// Located mentions for one tweet.
    #[pyo3(signature = (text, id="py", created_at=None))]
    fn extract<'py>(
        &self,
        py: Python<'py>,
        text: &str,
        id: &str,
        created_at: Option<&str>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let t = tweet(id, text, created_at)?;
        let result = py
            .detach(|| extract_locations(&t, &self.config, &self.resources))
            .map_err(value_error)?;
        to_py(py, &result)
    }

    /// Gazetteer hits for a phrase, best first.
    fn lookup<'py>(&self, py: Python<'py>, phrase: &str) -> PyResult<Bound<'py, PyAny>> {
        let hits: Vec<_> = self
            .resources
            .gazetteer
            .lookup(phrase)
            .into_iter()
            .map(|m| {
                json!({
                    "geoname_id": m.entry.geoname_id,
                    "name": m.entry.name,
                    "lat": m.entry.lat,
                    "lon": m.entry.lon,
                    "population": m.entry.population,
                    "match_kind": m.kind.as_str(),
                    "matched_text": m.matched_text,
                })
            })
            .collect();
        to_py(py, &hits)
    }

    /// Score this extractor on a gold corpus (bundled when `corpus` is None).
    #[pyo3(signature = (corpus=None, rule="names"))]
    fn evaluate<'py>(&self, py: Python<'py>, corpus: Option<PathBuf>, rule: &str) -> PyResult<Bound<'py, PyAny>> {
        let rule: MatchRule = rule.parse().map_err(value_error)?;
        let gold = match corpus {
            None => bundled_gold(),
            Some(p) => {
                let file = std::fs::File::open(&p).map_err(value_error)?;
                load_gold(std::io::BufReader::new(file)).map_err(value_error)?
            }
        };
        let report = py
            .detach(|| {
                evaluate(
                    &gold,
                    |t| extract_locations(t, &self.config, &self.resources),
                    rule,
                    &self.resources.gazetteer,
                )
            })
            .map_err(value_error)?;
        to_py(py, &report)
    }
}

/// Micro-averaged scores over `(retrieved, correct)` name lists.
#[pyfunction]
fn score<'py>(py: Python<'py>, pairs: Vec<(Vec<String>, Vec<String>)>) -> PyResult<Bound<'py, PyAny>> {
    let report = score_sets(&pairs);
    to_py(
        py,
        &json!({ "precision": report.precision, "recall": report.recall, "f_score": report.f_score }),
    )
}

#[pymodule]
fn toponym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(normalized, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_class::<Segmenter>()?;
    m.add_class::<Extractor>()?;
    Ok(())
}
