//! The SSML subset used for rendering: `speak`, `break time="Nms"` and
//! `emphasis level="strong|moderate|reduced"`.

use std::fmt::Write as _;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid ssml: {0}")]
pub struct SsmlError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmphasisLevel {
    Strong,
    Moderate,
    Reduced,
}

impl EmphasisLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            EmphasisLevel::Strong => "strong",
            EmphasisLevel::Moderate => "moderate",
            EmphasisLevel::Reduced => "reduced",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "strong" => Some(EmphasisLevel::Strong),
            "moderate" => Some(EmphasisLevel::Moderate),
            "reduced" => Some(EmphasisLevel::Reduced),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SsmlNode {
    Text(String),
    Break { ms: u64 },
    Emphasis { level: EmphasisLevel, children: Vec<SsmlNode> },
}

/// Body of a `<speak>` element.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SsmlDocument {
    pub nodes: Vec<SsmlNode>,
}

impl SsmlDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(mut self, t: impl Into<String>) -> Self {
        self.nodes.push(SsmlNode::Text(t.into()));
        self
    }

    pub fn pause(mut self, ms: u64) -> Self {
        self.nodes.push(SsmlNode::Break { ms });
        self
    }

    pub fn emphasis(mut self, level: EmphasisLevel, t: impl Into<String>) -> Self {
        self.nodes.push(SsmlNode::Emphasis { level, children: vec![SsmlNode::Text(t.into())] });
        self
    }

    pub fn to_xml(&self) -> String {
        fn write(nodes: &[SsmlNode], out: &mut String) {
            for n in nodes {
                match n {
                    SsmlNode::Text(t) => out.push_str(&quick_xml::escape::partial_escape(t.as_str())),
                    SsmlNode::Break { ms } => {
                        let _ = write!(out, "<break time=\"{ms}ms\"/>");
                    }
                    SsmlNode::Emphasis { level, children } => {
                        let _ = write!(out, "<emphasis level=\"{}\">", level.as_str());
                        write(children, out);
                        out.push_str("</emphasis>");
                    }
                }
            }
        }
        let mut out = String::from("<speak>");
        write(&self.nodes, &mut out);
        out.push_str("</speak>");
        out
    }

    pub fn parse(xml: &str) -> Result<Self, SsmlError> {
        let mut reader = Reader::from_str(xml);
        let err = |e: &dyn std::fmt::Display| SsmlError(e.to_string());
        // Stack of open elements; the bottom entry is `speak`.
        let mut stack: Vec<(Option<EmphasisLevel>, Vec<SsmlNode>)> = Vec::new();
        let mut done: Option<Vec<SsmlNode>> = None;
        loop {
            let ev = reader.read_event().map_err(|e| err(&e))?;
            match ev {
                Event::Start(e) => {
                    let name = e.local_name();
                    match (name.as_ref(), stack.is_empty()) {
                        (b"speak", true) if done.is_none() => stack.push((None, Vec::new())),
                        (b"emphasis", false) => {
                            let mut level = EmphasisLevel::Moderate;
                            for a in e.attributes() {
                                let a = a.map_err(|e| err(&e))?;
                                if a.key.as_ref() == b"level" {
                                    let v = a.unescape_value().map_err(|e| err(&e))?;
                                    level = EmphasisLevel::parse(&v)
                                        .ok_or_else(|| SsmlError(format!("emphasis level `{v}`")))?;
                                }
                            }
                            stack.push((Some(level), Vec::new()));
                        }
                        (other, _) => {
                            return Err(SsmlError(format!("unexpected element <{}>", String::from_utf8_lossy(other))))
                        }
                    }
                }
                Event::End(_) => {
                    let (level, children) = stack.pop().ok_or_else(|| SsmlError("unbalanced end tag".into()))?;
                    match (level, stack.last_mut()) {
                        (Some(level), Some(parent)) => parent.1.push(SsmlNode::Emphasis { level, children }),
                        (None, None) => done = Some(children),
                        _ => return Err(SsmlError("unbalanced end tag".into())),
                    }
                }
                Event::Empty(e) => {
                    let parent = stack.last_mut().ok_or_else(|| SsmlError("content outside <speak>".into()))?;
                    match e.local_name().as_ref() {
                        b"break" => {
                            let mut ms = 0;
                            for a in e.attributes() {
                                let a = a.map_err(|e| err(&e))?;
                                if a.key.as_ref() == b"time" {
                                    ms = parse_time(&a.unescape_value().map_err(|e| err(&e))?)?;
                                }
                            }
                            parent.1.push(SsmlNode::Break { ms });
                        }
                        b"emphasis" => {}
                        other => {
                            return Err(SsmlError(format!("unexpected element <{}/>", String::from_utf8_lossy(other))))
                        }
                    }
                }
                Event::Text(t) => {
                    let text = t.unescape().map_err(|e| err(&e))?;
                    match stack.last_mut() {
                        Some(parent) => {
                            if !text.is_empty() {
                                parent.1.push(SsmlNode::Text(text.into_owned()));
                            }
                        }
                        None if text.trim().is_empty() => {}
                        None => return Err(SsmlError("text outside <speak>".into())),
                    }
                }
                Event::Eof => break,
                Event::Decl(_) | Event::Comment(_) => {}
                other => return Err(SsmlError(format!("unsupported content {other:?}"))),
            }
        }
        if !stack.is_empty() {
            return Err(SsmlError("unclosed element".into()));
        }
        done.map(|nodes| SsmlDocument { nodes }).ok_or_else(|| SsmlError("missing <speak> root".into()))
    }

    /// Spoken text with element boundaries treated as word boundaries.
    pub fn plain_text(&self) -> String {
        fn collect<'a>(nodes: &'a [SsmlNode], out: &mut Vec<&'a str>) {
            for n in nodes {
                match n {
                    SsmlNode::Text(t) => out.push(t),
                    SsmlNode::Break { .. } => {}
                    SsmlNode::Emphasis { children, .. } => collect(children, out),
                }
            }
        }
        let mut parts = Vec::new();
        collect(&self.nodes, &mut parts);
        parts.join(" ").split_whitespace().collect::<Vec<_>>().join(" ")
    }

    pub fn total_break_ms(&self) -> u64 {
        fn sum(nodes: &[SsmlNode]) -> u64 {
            nodes
                .iter()
                .map(|n| match n {
                    SsmlNode::Text(_) => 0,
                    SsmlNode::Break { ms } => *ms,
                    SsmlNode::Emphasis { children, .. } => sum(children),
                })
                .sum()
        }
        sum(&self.nodes)
    }
}

fn parse_time(v: &str) -> Result<u64, SsmlError> {
    let v = v.trim();
    let bad = || SsmlError(format!("break time `{v}`"));
    if let Some(ms) = v.strip_suffix("ms") {
        ms.trim().parse().map_err(|_| bad())
    } else if let Some(s) = v.strip_suffix('s') {
        let s: f64 = s.trim().parse().map_err(|_| bad())?;
        if !(s.is_finite() && s >= 0.0) {
            return Err(bad());
        }
        Ok((s * 1000.0).round() as u64)
    } else {
        Err(bad())
    }
}
