//! Direct-quotation detection and pattern-based attribution extraction.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Paragraph, StoryCluster};
use crate::text::{tokens, word_count};

/// Quoted spans shorter than this are scare quotes, not quotations.
pub const MIN_QUOTED_WORDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuoteExtract {
    pub author: String,
    pub descriptor: Option<String>,
    pub quote_text: String,
    pub source_paragraph_id: String,
}

impl QuoteExtract {
    /// Last token of the author's name, used to count mentions.
    pub fn surname(&self) -> &str {
        self.author
            .split_whitespace()
            .next_back()
            .unwrap_or("")
            .trim_matches(|c: char| !c.is_alphanumeric())
    }
}

/// Inner text of every quotation-mark-delimited span.
///
/// Straight and curly double quotes pair with each other. A straight single
/// quote opens only at a word start and closes only at a word end, so
/// apostrophes inside words are ignored.
pub fn quoted_spans(text: &str) -> Vec<&str> {
    #[derive(PartialEq)]
    enum Open {
        Double,
        Single,
    }
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut open: Option<(Open, usize)> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j].1);
        let next = chars.get(i + 1).map(|x| x.1);
        let after = pos + c.len_utf8();
        match (c, &open) {
            ('"' | '“', None) => open = Some((Open::Double, after)),
            ('"' | '”', Some((Open::Double, start))) => {
                spans.push(&text[*start..pos]);
                open = None;
            }
            ('\'', None) => {
                let opens = prev.is_none_or(|p| p.is_whitespace() || matches!(p, '(' | '[' | '—' | '-'))
                    && next.is_some_and(char::is_alphanumeric);
                if opens {
                    open = Some((Open::Single, after));
                }
            }
            ('\'', Some((Open::Single, start))) => {
                let closes = prev.is_some_and(|p| !p.is_whitespace()) && !next.is_some_and(char::is_alphanumeric);
                if closes {
                    spans.push(&text[*start..pos]);
                    open = None;
                }
            }
            _ => {}
        }
    }
    spans
}

/// True when the paragraph quotes at least [`MIN_QUOTED_WORDS`] words.
pub fn detect_quote(paragraph_text: &str) -> bool {
    quoted_spans(paragraph_text).into_iter().any(|s| word_count(s) >= MIN_QUOTED_WORDS)
}

const QUOTE: &str = r#"["“](?P<q>[^"“”]+)["”]"#;
const NAME: &str = r"(?P<name>\p{Lu}[\p{L}.'’-]*(?:\s+\p{Lu}[\p{L}.'’-]*){0,3})";
const DESC: &str = r#"(?P<desc>[^"“”,;]+?)"#;

fn patterns() -> &'static [Regex; 4] {
    static P: OnceLock<[Regex; 4]> = OnceLock::new();
    P.get_or_init(|| {
        let build = |s: String| Regex::new(&s).expect("static quote pattern");
        [
            // "Q," said NAME, DESC
            build(format!(r"{QUOTE}\s*said\s+{NAME}(?:,\s*{DESC})?\s*(?:,|;|[.!?]?\s*$)")),
            // "Q," NAME, DESC, said|told ...
            build(format!(r"{QUOTE}\s*{NAME},\s*{DESC},\s*(?:said|told)\b")),
            // NAME, DESC, said: "Q"
            build(format!(r"{NAME},\s*{DESC},\s*said:?\s*{QUOTE}")),
            // "Q," NAME said
            build(format!(r"{QUOTE}\s*{NAME}\s+said\b")),
        ]
    })
}

/// Matches the attribution patterns in order and returns the first hit.
/// `source_paragraph_id` is left empty; see [`extract_from_paragraph`].
pub fn extract_quote(paragraph_text: &str) -> Option<QuoteExtract> {
    patterns().iter().find_map(|re| {
        let caps = re.captures(paragraph_text)?;
        let quote_text = caps.name("q")?.as_str().trim().to_string();
        let author = caps.name("name")?.as_str().trim().trim_end_matches(['.', ',']).to_string();
        let descriptor = caps
            .name("desc")
            .map(|d| d.as_str().trim().trim_end_matches('.').to_string())
            .filter(|d| !d.is_empty());
        (!quote_text.is_empty() && !author.is_empty()).then(|| QuoteExtract {
            author,
            descriptor,
            quote_text,
            source_paragraph_id: String::new(),
        })
    })
}

pub fn extract_from_paragraph(p: &Paragraph) -> Option<QuoteExtract> {
    extract_quote(&p.text).map(|q| QuoteExtract { source_paragraph_id: p.paragraph_id.clone(), ..q })
}

/// Extracts from every quote paragraph of the cluster, in paragraph order.
pub fn cluster_quotes(cluster: &StoryCluster) -> Vec<QuoteExtract> {
    cluster.paragraphs.iter().filter(|p| p.is_quote).filter_map(extract_from_paragraph).collect()
}

/// Whole-token occurrences of `name` across all article bodies.
pub fn mention_count(cluster: &StoryCluster, name: &str) -> usize {
    if name.is_empty() {
        return 0;
    }
    cluster.articles.iter().map(|a| tokens(&a.body).iter().filter(|t| t.text == name).count()).sum()
}

/// The quote whose speaker's surname is mentioned most across the cluster.
/// Ties go to the longer quote, then to the earlier extract.
pub fn pick_segment_quote(extracts: &[QuoteExtract], cluster: &StoryCluster) -> Option<QuoteExtract> {
    let mut best: Option<(usize, usize, &QuoteExtract)> = None;
    for q in extracts {
        let key = (mention_count(cluster, q.surname()), q.quote_text.chars().count());
        if best.is_none_or(|(c, l, _)| key > (c, l)) {
            best = Some((key.0, key.1, q));
        }
    }
    best.map(|b| b.2.clone())
}
