//! Word lists used by the tagger, the extractors and the ambiguity guard.
//!
//! Files are UTF-8 with one entry per line. `#` starts a comment. Grouped
//! lexicons switch category with a `# category: <name>` line.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Prepositions that usually precede a place name.
pub const LOCATION_PREPOSITIONS: [&str; 9] = [
    "at", "in", "from", "to", "near", "around", "beside", "outside", "inside",
];

pub(crate) const PREPOSITIONS_TXT: &str = include_str!("../data/prepositions.txt");
pub(crate) const ADJECTIVES_TXT: &str = include_str!("../data/adjectives.txt");
pub(crate) const COMMON_NOUNS_TXT: &str = include_str!("../data/common_nouns.txt");
pub(crate) const STOPLIST_TXT: &str = include_str!("../data/stoplist.txt");
pub(crate) const COMMON_WORDS_TXT: &str = include_str!("../data/common_words.txt");
pub(crate) const SUFFIXES_TXT: &str = include_str!("../data/suffixes.txt");
pub(crate) const EMERGENCY_TXT: &str = include_str!("../data/emergency.txt");

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList(HashSet<String>);

impl WordList {
    pub fn load<R: BufRead>(reader: R) -> Result<Self, Error> {
        let mut words = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Load {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let entry = line.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            words.insert(entry.to_lowercase());
        }
        Ok(Self(words))
    }

    pub fn parse(text: &str) -> Self {
        Self::load(text.as_bytes()).expect("reading from memory cannot fail")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    /// Membership of `word` or of `word` without a plural `s`.
    pub fn contains_or_singular(&self, word: &str) -> bool {
        self.contains(word) || word.strip_suffix('s').is_some_and(|w| self.contains(w))
    }

    pub fn insert(&mut self, word: &str) {
        self.0.insert(word.to_lowercase());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: AsRef<str>> FromIterator<S> for WordList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.as_ref().to_lowercase()).collect())
    }
}

fn load_grouped<R: BufRead, C: FromStr + Copy>(reader: R) -> Result<BTreeMap<String, C>, Error> {
    let mut out = BTreeMap::new();
    let mut category: Option<C> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Load {
            line: line_no,
            message: e.to_string(),
        })?;
        let entry = line.trim();
        if let Some(comment) = entry.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("category:") {
                let name = name.trim();
                category = Some(name.parse().map_err(|_| Error::Load {
                    line: line_no,
                    message: format!("unknown category `{name}`"),
                })?);
            }
            continue;
        }
        if entry.is_empty() {
            continue;
        }
        let cat = category.ok_or_else(|| Error::Load {
            line: line_no,
            message: "entry before any `# category:` line".into(),
        })?;
        out.insert(entry.to_lowercase(), cat);
    }
    Ok(out)
}

macro_rules! category_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl FromStr for $name {
            type Err = ();
            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(()),
                }
            }
        }
    };
}

category_enum!(SuffixCategory {
    Landform => "landform",
    Road => "road",
    Building => "building",
    Town => "town",
    Direction => "direction",
});

category_enum!(EmergencyCategory {
    Disease => "disease",
    Disaster => "disaster",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixLexicon {
    entries: BTreeMap<String, SuffixCategory>,
}

impl SuffixLexicon {
    pub fn load<R: BufRead>(reader: R) -> Result<Self, Error> {
        let entries = load_grouped(reader)?;
        if entries.is_empty() {
            return Err(Error::Model("suffix lexicon is empty".into()));
        }
        Ok(Self { entries })
    }

    pub fn bundled() -> Self {
        Self::load(SUFFIXES_TXT.as_bytes()).expect("bundled suffix lexicon is valid")
    }

    pub fn category(&self, word: &str) -> Option<SuffixCategory> {
        self.entries.get(word).copied()
    }

    /// Exact membership of an already-lowercased word.
    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmergencyLexicon {
    entries: BTreeMap<String, EmergencyCategory>,
}

impl EmergencyLexicon {
    pub fn load<R: BufRead>(reader: R) -> Result<Self, Error> {
        let entries = load_grouped(reader)?;
        if entries.is_empty() {
            return Err(Error::Model("emergency lexicon is empty".into()));
        }
        Ok(Self { entries })
    }

    pub fn bundled() -> Self {
        Self::load(EMERGENCY_TXT.as_bytes()).expect("bundled emergency lexicon is valid")
    }

    /// Category of a token, matching its lowercase form or that form without
    /// a plural `s`.
    pub fn category(&self, surface: &str) -> Option<EmergencyCategory> {
        let lower = surface.to_lowercase();
        self.entries.get(&lower).copied().or_else(|| {
            lower
                .strip_suffix('s')
                .and_then(|w| self.entries.get(w).copied())
        })
    }

    pub fn matches(&self, surface: &str) -> bool {
        self.category(surface).is_some()
    }

    /// The lexicon entry a token matches, e.g. "flood" for "Floods".
    pub fn term(&self, surface: &str) -> Option<&str> {
        let lower = surface.to_lowercase();
        let key = if self.entries.contains_key(&lower) {
            lower.as_str()
        } else {
            lower.strip_suffix('s')?
        };
        self.entries.get_key_value(key).map(|(k, _)| k.as_str())
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagLexicons {
    pub prepositions: WordList,
    pub location_prepositions: WordList,
    pub adjectives: WordList,
    pub common_nouns: WordList,
    pub stoplist: WordList,
}

impl TagLexicons {
    /// Assemble lexicons; location prepositions are always the fixed set and
    /// are added to `prepositions` if missing.
    pub fn new(
        mut prepositions: WordList,
        adjectives: WordList,
        common_nouns: WordList,
        stoplist: WordList,
    ) -> Self {
        for p in LOCATION_PREPOSITIONS {
            prepositions.insert(p);
        }
        Self {
            prepositions,
            location_prepositions: LOCATION_PREPOSITIONS.iter().collect(),
            adjectives,
            common_nouns,
            stoplist,
        }
    }

    pub fn bundled() -> Self {
        Self::new(
            WordList::parse(PREPOSITIONS_TXT),
            WordList::parse(ADJECTIVES_TXT),
            WordList::parse(COMMON_NOUNS_TXT),
            WordList::parse(STOPLIST_TXT),
        )
    }

    pub fn is_common_noun(&self, lower: &str) -> bool {
        self.common_nouns.contains_or_singular(lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_list_skips_comments_and_lowercases() {
        let w = WordList::parse("# header\nThe\n\n  in \n");
        assert!(w.contains("the") && w.contains("in"));
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn bundled_suffixes_cover_every_category() {
        let s = SuffixLexicon::bundled();
        for (word, cat) in [
            ("river", SuffixCategory::Landform),
            ("street", SuffixCategory::Road),
            ("hospital", SuffixCategory::Building),
            ("city", SuffixCategory::Town),
            ("west", SuffixCategory::Direction),
        ] {
            assert_eq!(s.category(word), Some(cat), "{word}");
        }
    }

    #[test]
    fn emergency_terms_match_plurals() {
        let e = EmergencyLexicon::bundled();
        for w in ["dengue", "Floods", "earthquake", "tsunami", "rains", "cholera"] {
            assert!(e.matches(w), "{w}");
        }
        assert_eq!(e.category("Dengue"), Some(EmergencyCategory::Disease));
        assert!(!e.matches("flooding"));
    }

    #[test]
    fn grouped_lexicon_errors() {
        assert!(SuffixLexicon::load("river\n".as_bytes()).is_err());
        assert!(SuffixLexicon::load("# category: weather\nrain\n".as_bytes()).is_err());
        assert!(SuffixLexicon::load("# nothing here\n".as_bytes()).is_err());
    }

    #[test]
    fn location_prepositions_are_prepositions() {
        let t = TagLexicons::new(WordList::default(), WordList::default(), WordList::default(), WordList::default());
        for p in t.location_prepositions.iter() {
            assert!(t.prepositions.contains(p));
        }
    }
}
