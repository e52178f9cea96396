//! Tweet text clean-up and tokenization.
//!
//! Removes URLs, @mentions, a leading `RT`, brackets and ellipses, strips the
//! `#` from hashtags (keeping the body), and splits CamelCase words. Case is
//! never folded and no stemming happens. Every token's span refers to
//! character offsets in the original text.

use serde::{Deserialize, Serialize};

/// Punctuation kept as [`TokenKind::Delim`] tokens. Everything else is dropped.
pub const DELIMITERS: [char; 7] = [',', ';', ':', '|', '/', '-', '.'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TokenKind {
    Word,
    Delim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Half-open character range into the original text.
    pub span: (usize, usize),
    pub kind: TokenKind,
    /// Hashtag body (without `#`) this token came from.
    pub hashtag_origin: Option<String>,
    /// True for the parts of a CamelCase word; they share the parent's span.
    pub camel_split: bool,
    /// First word of the tweet or the first word after `.`, `!` or `?`.
    pub sentence_initial: bool,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

/// Split at every lowercase-to-uppercase boundary.
pub fn split_camel_case(word: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for c in word.chars() {
        if prev_lower && c.is_uppercase() && !current.is_empty() {
            parts.push(std::mem::take(&mut current));
        }
        prev_lower = c.is_lowercase();
        current.push(c);
    }
    if !current.is_empty() {
        parts.push(current);
    }
    parts
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_handle_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Character offset where a URL starts inside a whitespace-free chunk.
fn url_start(chunk: &[char]) -> Option<usize> {
    const PATTERNS: [&str; 3] = ["http://", "https://", "t.co/"];
    let lower: Vec<char> = chunk.iter().map(|c| c.to_ascii_lowercase()).collect();
    (0..lower.len()).find(|&i| {
        PATTERNS.iter().any(|p| {
            let p: Vec<char> = p.chars().collect();
            lower[i..].starts_with(&p)
        })
    })
}

struct Emitter<'a> {
    text: &'a [char],
    tokens: Vec<Token>,
    sentence_start: bool,
}

impl Emitter<'_> {
    fn word(&mut self, start: usize, end: usize, hashtag: Option<&str>) {
        let surface: String = self.text[start..end].iter().collect();
        let initial = std::mem::replace(&mut self.sentence_start, false);
        let parts = split_camel_case(&surface);
        self.tokens.push(Token {
            surface,
            span: (start, end),
            kind: TokenKind::Word,
            hashtag_origin: hashtag.map(str::to_owned),
            camel_split: false,
            sentence_initial: initial,
        });
        if parts.len() > 1 {
            for (i, part) in parts.into_iter().enumerate() {
                self.tokens.push(Token {
                    surface: part,
                    span: (start, end),
                    kind: TokenKind::Word,
                    hashtag_origin: hashtag.map(str::to_owned),
                    camel_split: true,
                    sentence_initial: initial && i == 0,
                });
            }
        }
    }

    fn delim(&mut self, at: usize) {
        let c = self.text[at];
        if c == '.' {
            self.sentence_start = true;
        }
        self.tokens.push(Token {
            surface: c.to_string(),
            span: (at, at + 1),
            kind: TokenKind::Delim,
            hashtag_origin: None,
            camel_split: false,
            sentence_initial: false,
        });
    }

    /// Tokenize one whitespace-free chunk `[start, end)`.
    fn chunk(&mut self, start: usize, end: usize) {
        let end = url_start(&self.text[start..end]).map_or(end, |u| start + u);
        let text = self.text;
        let mut i = start;
        while i < end {
            let c = text[i];
            if c == '@' && i + 1 < end && is_handle_char(text[i + 1]) {
                i += 1;
                while i < end && is_handle_char(text[i]) {
                    i += 1;
                }
            } else if c == '#' && i + 1 < end && is_handle_char(text[i + 1]) {
                let body_start = i + 1;
                let mut j = body_start;
                while j < end && is_handle_char(text[j]) {
                    j += 1;
                }
                let body: String = text[body_start..j].iter().collect();
                // Underscores separate words inside a hashtag body.
                let mut k = body_start;
                while k < j {
                    if text[k] == '_' {
                        k += 1;
                        continue;
                    }
                    let part_start = k;
                    while k < j && text[k] != '_' {
                        k += 1;
                    }
                    self.word(part_start, k, Some(&body));
                }
                i = j;
            } else if is_word_char(c) {
                let word_start = i;
                while i < end && is_word_char(text[i]) {
                    i += 1;
                }
                self.word(word_start, i, None);
            } else if c == '.' {
                let mut j = i;
                while j < end && text[j] == '.' {
                    j += 1;
                }
                if j - i == 1 {
                    self.delim(i);
                }
                i = j;
            } else if DELIMITERS.contains(&c) {
                self.delim(i);
                i += 1;
            } else {
                if matches!(c, '!' | '?') {
                    self.sentence_start = true;
                }
                i += 1;
            }
        }
    }
}

/// Clean and tokenize raw tweet text. Never fails; empty input gives no tokens.
pub fn normalize_tweet(raw_text: &str) -> Vec<Token> {
    let text: Vec<char> = raw_text.chars().collect();
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < text.len() {
        if text[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < text.len() && !text[i].is_whitespace() {
            i += 1;
        }
        chunks.push((start, i));
    }

    let mut emitter = Emitter {
        text: &text,
        tokens: Vec::new(),
        sentence_start: true,
    };
    let mut chunks = chunks.into_iter().peekable();
    if let Some(&(s, e)) = chunks.peek() {
        let first: String = text[s..e].iter().collect();
        if first == "RT" || first == "RT:" {
            chunks.next();
        }
    }
    for (s, e) in chunks {
        emitter.chunk(s, e);
    }
    emitter.tokens
}

/// The token sequence read left to right: a CamelCase word is represented by
/// its parts only, not by the intact word followed by the parts.
pub fn reading_view(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    for (i, t) in tokens.iter().enumerate() {
        let has_parts = !t.camel_split
            && tokens
                .get(i + 1)
                .is_some_and(|n| n.camel_split && n.span == t.span);
        if !has_parts {
            out.push(t.clone());
        }
    }
    out
}

/// Whitespace-joined intact word surfaces; used as the text-level duplicate key.
pub fn normalized_text(tokens: &[Token]) -> String {
    let words: Vec<&str> = tokens
        .iter()
        .filter(|t| t.is_word() && !t.camel_split)
        .map(|t| t.surface.as_str())
        .collect();
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(tokens: &[Token]) -> Vec<&str> {
        tokens
            .iter()
            .filter(|t| t.is_word())
            .map(|t| t.surface.as_str())
            .collect()
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn retweet_with_hashtag_and_url() {
        let tokens = normalize_tweet("RT @user Floods in #ChennaiFloods http://t.co/x");
        assert_eq!(
            words(&tokens),
            ["Floods", "in", "ChennaiFloods", "Chennai", "Floods"]
        );
        let tag = &tokens[2];
        assert_eq!(tag.hashtag_origin.as_deref(), Some("ChennaiFloods"));
        assert!(!tag.camel_split);
        assert!(tokens[3].camel_split && tokens[4].camel_split);
        assert_eq!(tokens[3].hashtag_origin.as_deref(), Some("ChennaiFloods"));
        assert_eq!(tokens[3].span, tag.span);
        assert!(tokens[0].hashtag_origin.is_none());
    }

    #[test]
    fn empty_input() {
        assert!(normalize_tweet("").is_empty());
        assert!(normalize_tweet("   \n ").is_empty());
    }

    #[test]
    fn delimiters_without_spaces() {
        let tokens = normalize_tweet("At Vinayak hospital, Gujranwala town,delhi");
        assert_eq!(
            surfaces(&tokens),
            ["At", "Vinayak", "hospital", ",", "Gujranwala", "town", ",", "delhi"]
        );
        assert_eq!(tokens[3].kind, TokenKind::Delim);
        assert_eq!(tokens[6].kind, TokenKind::Delim);
    }

    #[test]
    fn camel_case_splits() {
        assert_eq!(split_camel_case("NepalQuake"), ["Nepal", "Quake"]);
        assert_eq!(split_camel_case("delhi"), ["delhi"]);
        assert_eq!(split_camel_case("GujaratFloodsNow"), ["Gujarat", "Floods", "Now"]);
        assert_eq!(split_camel_case("NDRF"), ["NDRF"]);
    }

    #[test]
    fn brackets_ellipses_and_stray_punctuation() {
        let tokens = normalize_tweet("Mohali,(Chandigarh) rosy ... either… ok!");
        assert_eq!(
            surfaces(&tokens),
            ["Mohali", ",", "Chandigarh", "rosy", "either", "ok"]
        );
    }

    #[test]
    fn rt_only_at_start() {
        assert_eq!(words(&normalize_tweet("RT @a: hi")), ["hi"]);
        assert_eq!(words(&normalize_tweet("see RT here")), ["see", "RT", "here"]);
    }

    #[test]
    fn underscores_split_hashtag_bodies() {
        let tokens = normalize_tweet("#chennai_floods now");
        assert_eq!(words(&tokens), ["chennai", "floods", "now"]);
        assert_eq!(tokens[0].hashtag_origin.as_deref(), Some("chennai_floods"));
        assert_eq!(tokens[1].hashtag_origin.as_deref(), Some("chennai_floods"));
        assert_eq!(tokens[2].hashtag_origin, None);
    }

    #[test]
    fn sentence_initial_marks() {
        let tokens = normalize_tweet("The rain. More rain! Again");
        let initial: Vec<&str> = tokens
            .iter()
            .filter(|t| t.sentence_initial)
            .map(|t| t.surface.as_str())
            .collect();
        assert_eq!(initial, ["The", "More", "Again"]);
    }

    #[test]
    fn spans_index_characters() {
        let text = "बाढ़ in Patna";
        let tokens = normalize_tweet(text);
        let chars: Vec<char> = text.chars().collect();
        for t in &tokens {
            let s: String = chars[t.span.0..t.span.1].iter().collect();
            assert_eq!(s, t.surface);
        }
        assert_eq!(tokens.last().unwrap().surface, "Patna");
    }

    #[test]
    fn reading_view_drops_intact_camel_words() {
        let tokens = normalize_tweet("#NepalQuake relief");
        let view = reading_view(&tokens);
        assert_eq!(surfaces(&view), ["Nepal", "Quake", "relief"]);
    }

    #[test]
    fn url_inside_chunk() {
        assert_eq!(words(&normalize_tweet("look(https://x.y/z) now")), ["look", "now"]);
        assert_eq!(words(&normalize_tweet("pic t.co/abc")), ["pic"]);
    }
}
