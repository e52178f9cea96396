use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use toponym::evalkit::score_sets;
use toponym::gazetteer::{verify_candidates, AmbiguityGuard, Gazetteer, GazetteerIndex, MatchKind};
use toponym::normalize::{normalize_tweet, normalized_text};
use toponym::pipeline::{collect_candidates, extract_locations, Mode, PipelineConfig, Resources};
use toponym::segment::{hashtag_expansions, UnigramModel};
use toponym::{RawTweet, Source, TokenKind};

const WORDS: [&str; 24] = [
    "floods", "in", "Kerala", "dengue", "near", "Delhi", "town", "hospital", "song", "Tamil", "Nadu",
    "the", "rain", "at", "Mumbai", "monsoon", "help", "Pune", "from", "Guntur", "school", "road",
    "relief", "camp",
];
const JOINERS: [&str; 8] = [" ", " ", " ", ", ", " - ", ". ", " / ", "  "];

fn word_text() -> impl Strategy<Value = String> {
    prop::collection::vec((0..WORDS.len(), 0..JOINERS.len()), 0..16).prop_map(|parts| {
        let mut s = String::new();
        for (w, j) in parts {
            s.push_str(WORDS[w]);
            s.push_str(JOINERS[j]);
        }
        s
    })
}

/// Tweets with URLs, mentions, hashtags and brackets mixed in.
fn noisy_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        (0..WORDS.len()).prop_map(|i| WORDS[i].to_string()),
        Just("@relief_org".to_string()),
        Just("http://t.co/abc".to_string()),
        Just("#KeralaFloods".to_string()),
        Just("#chennairains".to_string()),
        Just("(update)".to_string()),
        Just("...".to_string()),
        Just("RT".to_string()),
        Just(",".to_string()),
        "[a-zA-Z]{1,8}",
    ];
    prop::collection::vec(piece, 0..14).prop_map(|p| p.join(" "))
}

fn tweet(id: &str, text: &str) -> RawTweet {
    RawTweet::new(id, text, Utc.with_ymd_and_hms(2017, 9, 4, 10, 0, 0).unwrap())
}

fn resources() -> &'static Resources {
    use std::sync::OnceLock;
    static RES: OnceLock<Resources> = OnceLock::new();
    RES.get_or_init(Resources::bundled)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent_on_plain_words(text in word_text()) {
        let once = normalized_text(&normalize_tweet(&text));
        let twice = normalized_text(&normalize_tweet(&once));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn spans_point_at_surfaces(text in noisy_text()) {
        let chars: Vec<char> = text.chars().collect();
        for tok in normalize_tweet(&text) {
            let (a, b) = tok.span;
            prop_assert!(a < b && b <= chars.len());
            let slice: String = chars[a..b].iter().collect();
            if tok.camel_split {
                prop_assert!(slice.contains(&tok.surface), "{:?} not inside {:?}", tok.surface, slice);
            } else {
                prop_assert_eq!(&slice, &tok.surface);
            }
        }
    }

    #[test]
    fn casing_is_preserved(text in noisy_text()) {
        for tok in normalize_tweet(&text).iter().filter(|t| t.kind == TokenKind::Word) {
            prop_assert!(text.contains(&tok.surface));
        }
    }

    #[test]
    fn hashtag_original_comes_first(body in "[A-Za-z]{1,14}") {
        let model = UnigramModel::from_counts([("kerala", 40), ("floods", 30), ("rain", 20), ("chennai", 25)]).unwrap();
        let exp = hashtag_expansions(&model, &body);
        prop_assert_eq!(&exp[0], &body);
        let distinct: BTreeSet<&String> = exp.iter().collect();
        prop_assert_eq!(distinct.len(), exp.len());
    }

    #[test]
    fn extraction_is_deterministic_and_stateless(a in noisy_text(), b in noisy_text()) {
        let res = resources();
        let cfg = PipelineConfig::default();
        let first = extract_locations(&tweet("a", &a), &cfg, res).unwrap();
        extract_locations(&tweet("b", &b), &cfg, res).unwrap();
        let again = extract_locations(&tweet("a", &a), &cfg, res).unwrap();
        prop_assert_eq!(first.mentions, again.mentions);
    }

    #[test]
    fn disabling_a_source_never_adds_candidates(text in noisy_text(), drop in 0..Source::ALL.len()) {
        let res = resources();
        let full = PipelineConfig::default();
        let mut ablated = full.clone();
        ablated.enabled_sources.remove(&Source::ALL[drop]);
        let t = tweet("t", &text);
        let keys = |cfg: &PipelineConfig| -> BTreeSet<String> {
            collect_candidates(&t, cfg, res).unwrap().iter().map(|c| c.phrase.to_lowercase()).collect()
        };
        let (all, fewer) = (keys(&full), keys(&ablated));
        prop_assert!(fewer.is_subset(&all), "{:?} not within {:?}", fewer, all);
    }

    #[test]
    fn guard_only_removes(text in noisy_text()) {
        let res = resources();
        let t = tweet("t", &text);
        let cands = collect_candidates(&t, &PipelineConfig::default(), res).unwrap();
        let ids = |guard: &AmbiguityGuard| -> BTreeSet<u64> {
            verify_candidates(&res.gazetteer, &cands, guard).iter().map(|m| m.entry_id).collect()
        };
        let guarded = ids(&res.guard);
        let open = ids(&AmbiguityGuard::disabled());
        prop_assert!(guarded.is_subset(&open));
    }

    #[test]
    fn uniloc_within_biloc(text in noisy_text()) {
        let res = resources();
        let t = tweet("t", &text);
        let ids = |mode| -> BTreeSet<u64> {
            extract_locations(&t, &PipelineConfig::with_mode(mode), res).unwrap().mentions.iter().map(|m| m.entry_id).collect()
        };
        prop_assert!(ids(Mode::Uniloc).is_subset(&ids(Mode::Biloc)));
    }

    #[test]
    fn scores_stay_in_bounds(
        pairs in prop::collection::vec(
            (prop::collection::vec("[a-e]", 0..5), prop::collection::vec("[a-e]", 0..5)),
            1..8,
        )
    ) {
        let r = score_sets(&pairs);
        for v in [r.precision, r.recall, r.f_score] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(r.f_score <= r.precision.max(r.recall) + 1e-12);
        prop_assert!(r.f_score + 1e-12 >= r.precision.min(r.recall) || r.f_score == 0.0);
        prop_assert!(r.matched_total <= r.retrieved_total.min(r.correct_total));
    }
}

#[test]
fn lookup_orders_by_population_then_id() {
    let idx = GazetteerIndex::bundled();
    let mut checked = 0;
    for entry in idx.entries().iter().step_by(7) {
        let hits = idx.lookup(&entry.name);
        for pair in hits.windows(2) {
            if pair[0].kind != pair[1].kind {
                continue;
            }
            let (a, b) = (pair[0].entry, pair[1].entry);
            assert!(
                a.population > b.population || (a.population == b.population && a.geoname_id < b.geoname_id),
                "{} before {} for `{}`",
                a.geoname_id,
                b.geoname_id,
                entry.name
            );
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn exact_stage_precedes_fallbacks() {
    let idx = GazetteerIndex::bundled();
    let hits = idx.lookup("Gujranwala town");
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|h| h.kind == MatchKind::SuffixDropped));
    let exact = idx.lookup("delhi");
    assert!(matches!(exact[0].kind, MatchKind::ExactName | MatchKind::AlternateName));
}
