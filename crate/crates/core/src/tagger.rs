//! Deterministic coarse POS tagging.
//!
//! Rules, first match wins:
//!
//! 1. delimiter token → `DELIM`
//! 2. lowercase form is a preposition → `ADP`
//! 3. starts with an uppercase letter, unless it opens a sentence and its
//!    lowercase form is a common noun or stoplist word → `PROPN`
//! 4. known adjective, or an adjective-like ending (-ern, -ful, -ous, -ish,
//!    -al) on a word that is not a common noun → `ADJ`
//! 5. common noun → `NOUN`
//! 6. any other all-lowercase alphabetic word outside the stoplist → `NOUN`
//! 7. `OTHER`
//!
//! Callers with a better tagger can pass its tags instead; they are returned
//! unchanged.

use serde::{Deserialize, Serialize};

use crate::lexicon::TagLexicons;
use crate::normalize::{Token, TokenKind};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Propn,
    Noun,
    Adj,
    Adp,
    Delim,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Propn => "PROPN",
            PosTag::Noun => "NOUN",
            PosTag::Adj => "ADJ",
            PosTag::Adp => "ADP",
            PosTag::Delim => "DELIM",
            PosTag::Other => "OTHER",
        }
    }

    /// Map a Universal Dependencies UPOS tag onto the coarse set.
    pub fn from_upos(upos: &str) -> Self {
        match upos {
            "PROPN" => PosTag::Propn,
            "NOUN" => PosTag::Noun,
            "ADJ" => PosTag::Adj,
            "ADP" => PosTag::Adp,
            "PUNCT" => PosTag::Delim,
            _ => PosTag::Other,
        }
    }
}

impl std::str::FromStr for PosTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "PROPN" => Ok(PosTag::Propn),
            "NOUN" => Ok(PosTag::Noun),
            "ADJ" => Ok(PosTag::Adj),
            "ADP" => Ok(PosTag::Adp),
            "DELIM" => Ok(PosTag::Delim),
            "OTHER" => Ok(PosTag::Other),
            other => Err(Error::Contract(format!("unknown POS tag `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: PosTag,
}

const ADJECTIVE_ENDINGS: [&str; 5] = ["ern", "ful", "ous", "ish", "al"];

fn tag_one(token: &Token, lex: &TagLexicons) -> PosTag {
    if token.kind == TokenKind::Delim {
        return PosTag::Delim;
    }
    let lower = token.surface.to_lowercase();
    if lex.prepositions.contains(&lower) {
        return PosTag::Adp;
    }
    let common = lex.is_common_noun(&lower);
    if token.surface.chars().next().is_some_and(char::is_uppercase)
        && (!token.sentence_initial || !(common || lex.stoplist.contains(&lower)))
    {
        return PosTag::Propn;
    }
    let alphabetic = lower.chars().all(char::is_alphabetic);
    if lex.adjectives.contains(&lower)
        || (alphabetic
            && !common
            && ADJECTIVE_ENDINGS
                .iter()
                .any(|e| lower.len() > e.len() + 2 && lower.ends_with(e)))
    {
        return PosTag::Adj;
    }
    if common {
        return PosTag::Noun;
    }
    let all_lower = token.surface.chars().all(char::is_lowercase);
    if all_lower && alphabetic && !lex.stoplist.contains(&lower) {
        return PosTag::Noun;
    }
    PosTag::Other
}

/// Tag every token. With `external_tags`, they are paired up verbatim.
pub fn tag_tokens(
    tokens: &[Token],
    lexicons: &TagLexicons,
    external_tags: Option<&[PosTag]>,
) -> Result<Vec<TaggedToken>, Error> {
    if let Some(tags) = external_tags {
        if tags.len() != tokens.len() {
            return Err(Error::Contract(format!(
                "{} external tags for {} tokens",
                tags.len(),
                tokens.len()
            )));
        }
        return Ok(tokens
            .iter()
            .zip(tags)
            .map(|(t, &tag)| TaggedToken {
                token: t.clone(),
                tag,
            })
            .collect());
    }
    Ok(tokens
        .iter()
        .map(|t| TaggedToken {
            token: t.clone(),
            tag: tag_one(t, lexicons),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize_tweet;

    fn tags(text: &str) -> Vec<(String, PosTag)> {
        let tokens = normalize_tweet(text);
        tag_tokens(&tokens, &TagLexicons::bundled(), None)
            .unwrap()
            .into_iter()
            .map(|t| (t.token.surface, t.tag))
            .collect()
    }

    #[test]
    fn preposition_proper_noun_noun() {
        let got: Vec<PosTag> = tags("At Vinayak hospital").into_iter().map(|t| t.1).collect();
        assert_eq!(got, [PosTag::Adp, PosTag::Propn, PosTag::Noun]);
    }

    #[test]
    fn sentence_initial_city_name() {
        assert_eq!(tags("Mumbai lost its mudflats")[0].1, PosTag::Propn);
    }

    #[test]
    fn sentence_initial_function_word() {
        let got = tags("The rains are back");
        assert_eq!(got[0].1, PosTag::Other);
    }

    #[test]
    fn capitalised_mid_sentence_is_proper() {
        let got = tags("rains in the City");
        assert_eq!(got[3].1, PosTag::Propn);
    }

    #[test]
    fn adjectives_and_defaults() {
        let got = tags("heavy monsoonal rains hit 45 gujranwala");
        let t: Vec<PosTag> = got.iter().map(|t| t.1).collect();
        assert_eq!(
            t,
            [PosTag::Adj, PosTag::Adj, PosTag::Noun, PosTag::Noun, PosTag::Other, PosTag::Noun]
        );
    }

    #[test]
    fn delimiters_are_tagged_delim() {
        let got = tags("Delhi, Kolkata");
        assert_eq!(got[1].1, PosTag::Delim);
    }

    #[test]
    fn external_tags_pass_through() {
        let tokens = normalize_tweet("at home");
        let ext = [PosTag::Propn, PosTag::Adj];
        let out = tag_tokens(&tokens, &TagLexicons::bundled(), Some(&ext)).unwrap();
        assert_eq!(out.iter().map(|t| t.tag).collect::<Vec<_>>(), ext);
        assert!(tag_tokens(&tokens, &TagLexicons::bundled(), Some(&ext[..1])).is_err());
    }
}
