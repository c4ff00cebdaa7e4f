//! Listener interaction events and per-podcast counts.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Play,
    Pause,
    Skip,
    Seek,
    TranscriptOpen,
    TranscriptClose,
    QuestionAsked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub podcast_id: String,
    pub kind: EventKind,
    pub at_line: String,
    pub timestamp: DateTime<Utc>,
}

/// Counts for one podcast.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PodcastStats {
    pub pauses: usize,
    pub skips: usize,
    pub transcript_opens: usize,
    pub questions: usize,
    pub plays: usize,
    pub seeks: usize,
    pub transcript_closes: usize,
}

impl PodcastStats {
    fn add(&mut self, kind: EventKind) {
        let slot = match kind {
            EventKind::Pause => &mut self.pauses,
            EventKind::Skip => &mut self.skips,
            EventKind::TranscriptOpen => &mut self.transcript_opens,
            EventKind::QuestionAsked => &mut self.questions,
            EventKind::Play => &mut self.plays,
            EventKind::Seek => &mut self.seeks,
            EventKind::TranscriptClose => &mut self.transcript_closes,
        };
        *slot += 1;
    }
}

/// Counts per podcast id, in id order.
pub fn stats<'a>(events: impl IntoIterator<Item = &'a InteractionEvent>) -> BTreeMap<String, PodcastStats> {
    let mut out: BTreeMap<String, PodcastStats> = BTreeMap::new();
    for e in events {
        out.entry(e.podcast_id.clone()).or_default().add(e.kind);
    }
    out
}

/// Renders a stats table. `all` adds play, seek and transcript-close counts.
pub struct StatsTable<'a> {
    pub stats: &'a BTreeMap<String, PodcastStats>,
    pub all: bool,
}

impl fmt::Display for StatsTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<24} {:>7} {:>6} {:>11} {:>10}", "podcast", "pauses", "skips", "transcript", "questions")?;
        if self.all {
            write!(f, " {:>6} {:>6} {:>17}", "plays", "seeks", "transcript_close")?;
        }
        writeln!(f)?;
        for (id, s) in self.stats {
            write!(f, "{id:<24} {:>7} {:>6} {:>11} {:>10}", s.pauses, s.skips, s.transcript_opens, s.questions)?;
            if self.all {
                write!(f, " {:>6} {:>6} {:>17}", s.plays, s.seeks, s.transcript_closes)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(podcast: &str, kind: EventKind) -> InteractionEvent {
        InteractionEvent { podcast_id: podcast.into(), kind, at_line: "l".into(), timestamp: DateTime::UNIX_EPOCH }
    }

    #[test]
    fn counts_per_podcast() {
        let log = [
            ev("a", EventKind::Pause),
            ev("a", EventKind::Pause),
            ev("a", EventKind::Skip),
            ev("b", EventKind::QuestionAsked),
            ev("b", EventKind::Play),
        ];
        let s = stats(&log);
        assert_eq!(s["a"], PodcastStats { pauses: 2, skips: 1, ..Default::default() });
        assert_eq!(s["b"].questions, 1);
        let table = StatsTable { stats: &s, all: false }.to_string();
        assert!(table.lines().nth(1).unwrap().split_whitespace().eq(["a", "2", "1", "0", "0"]));
        assert!(!table.contains("plays"));
    }

    #[test]
    fn kinds_are_snake_case() {
        assert_eq!(serde_json::to_string(&EventKind::TranscriptOpen).unwrap(), "\"transcript_open\"");
        assert!(serde_json::from_str::<EventKind>("\"dance\"").is_err());
    }
}
