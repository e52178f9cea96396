use proptest::prelude::*;

use super::*;
use crate::conllu::parse_conllu;
use crate::normalize::{normalize_tweet, reading_view, Token, TokenKind};
use crate::tagger::tag_tokens;

const WETLANDS: &str = include_str!("../../data/mumbai_wetlands.conllu");

fn tagged(text: &str) -> Vec<TaggedToken> {
    let tokens = reading_view(&normalize_tweet(text));
    tag_tokens(&tokens, &TagLexicons::bundled(), None).unwrap()
}

fn manual(items: &[(&str, PosTag)]) -> Vec<TaggedToken> {
    items
        .iter()
        .enumerate()
        .map(|(i, &(s, tag))| TaggedToken {
            token: Token {
                surface: s.to_string(),
                span: (i * 10, i * 10 + s.chars().count()),
                kind: if tag == PosTag::Delim { TokenKind::Delim } else { TokenKind::Word },
                hashtag_origin: None,
                camel_split: false,
                sentence_initial: i == 0,
            },
            tag,
        })
        .collect()
}

fn phrases(c: &[CandidateMention]) -> Vec<&str> {
    c.iter().map(|c| c.phrase.as_str()).collect()
}

fn find<'a>(c: &'a [CandidateMention], phrase: &str) -> &'a CandidateMention {
    c.iter()
        .find(|c| c.phrase == phrase)
        .unwrap_or_else(|| panic!("no candidate {phrase:?} in {:?}", phrases(c)))
}

fn chunks(t: &[TaggedToken]) -> Vec<CandidateMention> {
    chunk_proper_nouns(t, &SuffixLexicon::bundled(), &TagLexicons::bundled(), DEFAULT_JW_THRESHOLD)
}

#[test]
fn chunks_with_preposition_and_suffix_cues() {
    let c = chunks(&tagged("At Vinayak hospital, Gujranwala town,delhi"));
    let v = find(&c, "Vinayak hospital");
    assert!(v.cues.contains(&Cue::PrecedingPreposition) && v.cues.contains(&Cue::SuffixTerm));
    let g = find(&c, "Gujranwala town");
    assert!(g.cues.contains(&Cue::SuffixTerm));
    assert!(!g.cues.contains(&Cue::PrecedingPreposition));
    find(&c, "Vinayak");
    find(&c, "Gujranwala");
}

#[test]
fn multiword_and_delimited_chunks() {
    let c = chunks(&manual(&[("Tamil", PosTag::Propn), ("Nadu", PosTag::Propn)]));
    assert_eq!(phrases(&c), ["Tamil Nadu"]);
    let c = chunks(&manual(&[
        ("Delhi", PosTag::Propn),
        (",", PosTag::Delim),
        ("Kolkata", PosTag::Propn),
    ]));
    assert_eq!(phrases(&c), ["Delhi", "Kolkata"]);
}

#[test]
fn fuzzy_suffix_cue() {
    let c = chunks(&manual(&[("May", PosTag::Propn), ("Hosp", PosTag::Propn)]));
    // "Hosp" is inside the chunk; as a follower it triggers the fuzzy cue.
    assert_eq!(phrases(&c), ["May Hosp"]);
    let c = chunks(&manual(&[("May", PosTag::Propn), ("hosp", PosTag::Noun)]));
    let m = find(&c, "May hosp");
    assert!(m.cues.contains(&Cue::FuzzySuffix));
    assert!(m.fuzzy_suffix_score.unwrap() >= DEFAULT_JW_THRESHOLD);
}

#[test]
fn suffix_patterns_in_lowercase_text() {
    let t = tagged("urgent b+ platelets at vinayak hospital");
    let c = suffix_pattern_candidates(&t, &SuffixLexicon::bundled(), &TagLexicons::bundled(), &EmergencyLexicon::bundled());
    assert_eq!(phrases(&c), ["vinayak hospital"]);
    assert!(c[0].sources.contains(&Source::SuffixMatch) && c[0].cues.contains(&Cue::SuffixTerm));

    let t = tagged("gujranwala town");
    let c = suffix_pattern_candidates(&t, &SuffixLexicon::bundled(), &TagLexicons::bundled(), &EmergencyLexicon::bundled());
    assert_eq!(phrases(&c), ["gujranwala town"]);

    let t = tagged("the hospital");
    let c = suffix_pattern_candidates(&t, &SuffixLexicon::bundled(), &TagLexicons::bundled(), &EmergencyLexicon::bundled());
    assert!(c.is_empty());
}

#[test]
fn wetlands_dependency_candidate() {
    let text = "Mumbai lost its mudflats and wetlands, now floods with every monsoon.";
    let t = tagged(text);
    let tokens: Vec<Token> = t.iter().map(|t| t.token.clone()).collect();
    let sentence = parse_conllu(WETLANDS.as_bytes()).unwrap().remove(0);
    let g = DependencyGraph::from_parse(&sentence, &tokens);
    let c = dependency_candidates(&t, &g, &EmergencyLexicon::bundled(), DEFAULT_MAX_DEP_DISTANCE);
    let m = find(&c, "Mumbai");
    assert!(m.sources.contains(&Source::DepProximity));
}

#[test]
fn window_fallback_and_no_anchor() {
    let t = tagged("dengue in Kerala");
    let g = DependencyGraph::token_window(t.len());
    assert_eq!(graph_distance(&g, 0, 2).unwrap(), Some(2));
    let c = dependency_candidates(&t, &g, &EmergencyLexicon::bundled(), 3);
    assert_eq!(phrases(&c), ["Kerala"]);
    let t = tagged("sunny day in Kerala");
    let g = DependencyGraph::token_window(t.len());
    assert!(dependency_candidates(&t, &g, &EmergencyLexicon::bundled(), 3).is_empty());
}

#[test]
fn noun_phrases() {
    let c = noun_phrase_candidates(&manual(&[("silicon", PosTag::Adj), ("city", PosTag::Noun)]));
    assert_eq!(phrases(&c), ["silicon city"]);
    let c = noun_phrase_candidates(&manual(&[("in", PosTag::Adp), ("Kerala", PosTag::Propn)]));
    assert_eq!(phrases(&c), ["Kerala"]);
    assert!(noun_phrase_candidates(&[]).is_empty());
    assert!(noun_phrase_candidates(&manual(&[("heavy", PosTag::Adj)])).is_empty());
}

#[test]
fn merge_unions_sources_and_cues() {
    let t = manual(&[("Delhi", PosTag::Propn)]);
    let a = CandidateMention::new(&t, 0, 0, Source::ProperChunk);
    let mut b = CandidateMention::new(&t, 0, 0, Source::NounPhrase);
    b.phrase = "delhi".into();
    b.cues.insert(Cue::PrecedingPreposition);
    let m = merge_candidates([vec![a], vec![b]]);
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].phrase, "Delhi");
    assert_eq!(m[0].sources.len(), 2);
    assert!(m[0].has_cue());
}

const WORDS: [&str; 16] = [
    "Delhi", "floods", "in", "near", "hospital", "town", "Kerala", "heavy", "the", ",", "dengue",
    "Gujranwala", "city", "rain", "at", "Tamil",
];

fn random_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 0..14).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn chunks_contain_a_proper_noun(text in random_text()) {
        let t = tagged(&text);
        for c in chunks(&t) {
            let (a, b) = c.token_span;
            prop_assert!(b < t.len() && a <= b);
            prop_assert!(t[a..=b].iter().any(|x| x.tag == PosTag::Propn), "{}", c.phrase);
            prop_assert!(!c.phrase.trim().is_empty());
            if c.cues.contains(&Cue::FuzzySuffix) {
                prop_assert!(c.fuzzy_suffix_score.unwrap() >= DEFAULT_JW_THRESHOLD);
            }
        }
    }

    #[test]
    fn merging_never_drops_keys(text in random_text()) {
        let t = tagged(&text);
        let np = noun_phrase_candidates(&t);
        let ch = chunks(&t);
        let merged = merge_candidates([np.clone(), ch.clone()]);
        let keys: std::collections::HashSet<String> = merged.iter().map(|c| c.key()).collect();
        for c in np.iter().chain(&ch) {
            prop_assert!(keys.contains(&c.key()));
        }
    }

    #[test]
    fn dependency_threshold_is_monotone(text in random_text()) {
        let t = tagged(&text);
        let g = DependencyGraph::token_window(t.len());
        let e = EmergencyLexicon::bundled();
        let near: std::collections::HashSet<usize> = dependency_candidates(&t, &g, &e, 2)
            .iter()
            .flat_map(|c| c.token_span.0..=c.token_span.1)
            .collect();
        let far: std::collections::HashSet<usize> = dependency_candidates(&t, &g, &e, 3)
            .iter()
            .flat_map(|c| c.token_span.0..=c.token_span.1)
            .collect();
        prop_assert!(near.is_subset(&far));
    }

    #[test]
    fn distance_is_symmetric(n in 1usize..12, edges in prop::collection::vec((0usize..12, 0usize..12), 0..20)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a < &n && b < &n && a != b).collect();
        let g = DependencyGraph::new(n, edges, GraphSource::Supplied).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(graph_distance(&g, i, j).unwrap(), graph_distance(&g, j, i).unwrap());
            }
        }
    }
}
