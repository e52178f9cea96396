//! Tweet records as they arrive from files or HTTP.

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geo {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: String,
    pub text: String,
    #[serde(with = "rfc3339_seconds")]
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<Geo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_meta: Option<String>,
}

impl RawTweet {
    /// Tweet with no geo tag or metadata. Sub-second precision is dropped.
    pub fn new(id: impl Into<String>, text: impl Into<String>, created_at: DateTime<Utc>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            created_at: truncate_seconds(created_at),
            geo: None,
            source_meta: None,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.id.trim().is_empty() {
            return Err(Error::Record("empty tweet id".into()));
        }
        if let Some(g) = self.geo {
            if !(-90.0..=90.0).contains(&g.lat) || !(-180.0..=180.0).contains(&g.lon) {
                return Err(Error::Record(format!(
                    "tweet {}: geo ({}, {}) out of range",
                    self.id, g.lat, g.lon
                )));
            }
        }
        Ok(())
    }

    /// Parse and validate one JSON object.
    pub fn from_json(line: &str) -> Result<Self, Error> {
        let t: RawTweet =
            serde_json::from_str(line).map_err(|e| Error::Record(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }
}

fn truncate_seconds(t: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(t.timestamp(), 0).expect("timestamp from a valid DateTime")
}

/// RFC 3339 timestamps at second resolution.
pub mod rfc3339_seconds {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        let t = DateTime::parse_from_rfc3339(&raw).map_err(serde::de::Error::custom)?;
        Ok(super::truncate_seconds(t.with_timezone(&Utc)))
    }
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}
