#![allow(dead_code)]

use std::fmt::Write as _;

use chrono::{TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toponym::RawTweet;

pub const PLACES: [&str; 20] = [
    "Kerala", "Delhi", "Mumbai", "Chennai", "Pune", "Guwahati", "Patna", "Shillong", "Gangtok",
    "Kolkata", "Tamil Nadu", "Bihar", "Assam", "Nashik", "Guntur", "Velachery", "Ghatkopar",
    "Odisha", "Sikkim", "Bangalore",
];

pub const TERMS: [&str; 8] = [
    "dengue", "malaria", "floods", "earthquake", "cholera", "rain", "landslide", "chikungunya",
];

const FILLER: [&str; 12] = [
    "the", "people", "water", "song", "today", "help", "needed", "road", "school", "monsoon",
    "town", "hospital",
];

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// Deterministic emergency-style tweets. Every text is distinct.
pub fn fixture_tweets(n: usize, seed: u64) -> Vec<RawTweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let place = *PLACES.choose(&mut rng).unwrap();
            let other = *PLACES.choose(&mut rng).unwrap();
            let term = *TERMS.choose(&mut rng).unwrap();
            let text = match rng.random_range(0..7) {
                0 => format!("{} cases reported in {place} today, update {i}", capitalise(term)),
                1 => format!("{} hit by {term} #{}{} {i}", place.to_lowercase(), place.replace(' ', ""), capitalise(term)),
                2 => format!("no news about {term} yet, stay safe friends {i}"),
                3 => format!("heavy {term} near {} town, roads closed {i}", place.to_lowercase()),
                4 => format!("{place}, {other} on alert for {term} ({i})"),
                5 => format!("RT @relief: {} relief camp at {place} needs volunteers http://t.co/x{i}", capitalise(term)),
                _ => format!("my favourite song about the {term} is on repeat {i}"),
            };
            let day = rng.random_range(1..=30);
            let hour = rng.random_range(0..24);
            let minute = rng.random_range(0..60);
            RawTweet::new(
                format!("fx{seed}-{i}"),
                text,
                Utc.with_ymd_and_hms(2017, 9, day, hour, minute, 0).unwrap(),
            )
        })
        .collect()
}

/// Random word soups mixing place names, emergency terms and filler.
pub fn word_soup_tweets(n: usize, seed: u64) -> Vec<RawTweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(0..14);
            let mut words = Vec::new();
            for _ in 0..len {
                let w = match rng.random_range(0..4) {
                    0 => PLACES.choose(&mut rng).unwrap().to_string(),
                    1 => TERMS.choose(&mut rng).unwrap().to_string(),
                    2 => FILLER.choose(&mut rng).unwrap().to_string(),
                    _ => PLACES.choose(&mut rng).unwrap().to_lowercase(),
                };
                words.push(w);
                if rng.random_bool(0.1) {
                    words.push(",".into());
                }
            }
            RawTweet::new(format!("soup-{i}"), words.join(" "), Utc.with_ymd_and_hms(2017, 9, 1, 0, 0, 0).unwrap())
        })
        .collect()
}

/// GeoNames-format rows: the bundled slice followed by synthetic places up
/// to `rows` in total.
pub fn india_scale_geonames(bundled: &str, rows: usize, seed: u64) -> String {
    const SYLLABLES: [&str; 24] = [
        "ka", "ra", "pur", "ga", "na", "li", "ba", "dha", "sa", "ma", "ko", "tti", "ha", "vi", "la",
        "ja", "nda", "ur", "pa", "ti", "sh", "an", "gar", "wa",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(rows * 120);
    let mut count = 0;
    for line in bundled.lines().filter(|l| !l.trim().is_empty()) {
        out.push_str(line);
        out.push('\n');
        count += 1;
    }
    let mut id = 20_000_000u64;
    let name = |rng: &mut ChaCha8Rng| {
        let parts = rng.random_range(2..5);
        let s: String = (0..parts).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
        capitalise(&s)
    };
    while count < rows {
        id += 1;
        let mut n = name(&mut rng);
        if rng.random_bool(0.15) {
            n = format!("{n} {}", name(&mut rng));
        }
        let alternates: Vec<String> = (0..rng.random_range(0..4)).map(|_| name(&mut rng)).collect();
        let lat = rng.random_range(8.0..35.0f64);
        let lon = rng.random_range(69.0..96.0f64);
        let pop: u64 = if rng.random_bool(0.3) { rng.random_range(0..200_000) } else { 0 };
        let _ = writeln!(
            out,
            "{id}\t{n}\t{n}\t{}\t{lat:.5}\t{lon:.5}\tP\tPPL\tIN\t\t{:02}\t\t\t\t{pop}\t\t0\tAsia/Kolkata\t2020-01-01",
            alternates.join(","),
            rng.random_range(1..40)
        );
        count += 1;
    }
    out
}
