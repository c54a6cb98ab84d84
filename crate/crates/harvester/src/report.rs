use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Fetched,
    Skipped,
    Failed,
}

/// What kind of resource a URL was queued as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Page,
    /// Triples file referenced by `<link rel="cris-meta">`.
    Meta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UrlRecord {
    pub url: String,
    pub depth: usize,
    pub kind: Kind,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<u16>,
    pub triples_added: usize,
    pub parse_errors: usize,
    /// Outbound links found on the page, and how many were queued.
    pub links_found: usize,
    pub links_queued: usize,
    pub duration_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl UrlRecord {
    pub(crate) fn new(url: String, depth: usize, kind: Kind, outcome: Outcome) -> Self {
        UrlRecord {
            url,
            depth,
            kind,
            outcome,
            status: None,
            triples_added: 0,
            parse_errors: 0,
            links_found: 0,
            links_queued: 0,
            duration_ms: 0,
            reason: None,
        }
    }

    pub(crate) fn skipped(url: String, depth: usize, kind: Kind, reason: &str) -> Self {
        UrlRecord {
            reason: Some(reason.to_string()),
            ..Self::new(url, depth, kind, Outcome::Skipped)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub fetched: usize,
    pub skipped: usize,
    pub failed: usize,
    pub triples_added: usize,
    pub parse_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrawlReport {
    pub records: Vec<UrlRecord>,
    pub totals: Totals,
    pub started: String,
    pub finished: String,
}

impl CrawlReport {
    pub(crate) fn new(records: Vec<UrlRecord>, started: String, finished: String) -> Self {
        let mut totals = Totals::default();
        for r in &records {
            match r.outcome {
                Outcome::Fetched => totals.fetched += 1,
                Outcome::Skipped => totals.skipped += 1,
                Outcome::Failed => totals.failed += 1,
            }
            totals.triples_added += r.triples_added;
            totals.parse_errors += r.parse_errors;
        }
        CrawlReport {
            records,
            totals,
            started,
            finished,
        }
    }

    pub fn fetched(&self) -> impl Iterator<Item = &UrlRecord> {
        self.records
            .iter()
            .filter(|r| r.outcome == Outcome::Fetched)
    }

    /// One JSON object per URL record.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
