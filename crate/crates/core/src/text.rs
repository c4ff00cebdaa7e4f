//! Shared text primitives: word counting, tokenization, stopwords and the
//! rule-based sentence splitter.

use std::collections::HashSet;
use std::sync::OnceLock;

/// Abbreviations that never end a sentence.
pub const ABBREVIATIONS: [&str; 8] = ["Mr.", "Mrs.", "Dr.", "U.S.", "U.K.", "St.", "No.", "vs."];

/// Number of whitespace-separated tokens.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// A word token with its byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

impl Token<'_> {
    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

/// Maximal runs of alphanumeric characters.
pub fn tokens(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(Token { text: &text[s..i], start: s, end: i });
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &text[s..], start: s, end: text.len() });
    }
    out
}

fn stopword_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.iter().copied().collect())
}

pub fn is_stopword(lower: &str) -> bool {
    stopword_set().contains(lower)
}

/// A content token is a lowercase alphanumeric run of at least two characters
/// that is not a stopword.
pub fn is_content_token(lower: &str) -> bool {
    lower.chars().count() >= 2 && !is_stopword(lower)
}

/// Lowercased content tokens in order of appearance (duplicates kept).
pub fn content_tokens(text: &str) -> Vec<String> {
    tokens(text)
        .into_iter()
        .map(|t| t.lower())
        .filter(|t| is_content_token(t))
        .collect()
}

/// Splits text into sentences.
///
/// A boundary is a run of `.`, `?` or `!` (optionally followed by closing
/// quotes or brackets) that is followed by whitespace and then an uppercase
/// letter, or by the end of the text. A `.` that closes one of
/// [`ABBREVIATIONS`] is never a boundary.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !matches!(c, '.' | '?' | '!') {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < chars.len() && matches!(chars[j + 1].1, '.' | '?' | '!') {
            j += 1;
        }
        while j + 1 < chars.len() && matches!(chars[j + 1].1, '"' | '\'' | '”' | '’' | ')' | ']') {
            j += 1;
        }
        let end = chars.get(j + 1).map_or(text.len(), |&(p, _)| p);
        let at_end = text[end..].trim().is_empty();
        let boundary = if at_end {
            true
        } else {
            let rest = &text[end..];
            let ws_len = rest.len() - rest.trim_start().len();
            ws_len > 0 && starts_sentence(rest.trim_start())
        };
        if boundary && !(c == '.' && ends_with_abbreviation(&text[start..=pos])) {
            push_trimmed(&mut sentences, &text[start..end]);
            start = end;
            if at_end {
                break;
            }
        }
        i = j + 1;
    }
    if start < text.len() {
        push_trimmed(&mut sentences, &text[start..]);
    }
    sentences
}

fn starts_sentence(rest: &str) -> bool {
    let mut it = rest.chars();
    match it.next() {
        Some(c) if c.is_uppercase() => true,
        Some('"' | '“' | '\'' | '‘' | '(') => it.next().is_some_and(char::is_uppercase),
        _ => false,
    }
}

fn ends_with_abbreviation(upto: &str) -> bool {
    let last = upto.split_whitespace().next_back().unwrap_or("");
    let last = last.trim_start_matches(['(', '"', '“', '\'']);
    ABBREVIATIONS.contains(&last)
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let t = s.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}

/// Stable 64-bit FNV-1a hash, used to derive per-story seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between",
    "both", "but", "by", "can", "could", "did", "didn", "do", "does", "doesn", "doing", "don",
    "down", "during", "each", "few", "for", "from", "further", "had", "has", "have", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "if", "in", "into",
    "is", "isn", "it", "its", "itself", "just", "ll", "me", "more", "most", "my", "myself", "no",
    "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
    "ourselves", "out", "over", "own", "re", "said", "same", "says", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "ve", "very", "was", "wasn", "we", "were", "weren", "what", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "won", "would", "you", "your", "yours", "yourself",
];
