//! Breadth-first harvester for pages carrying embedded triple annotations.
//!
//! Pages are fetched wave by wave from the seeds. Inline triple blocks are
//! merged under the page URL, `cris-meta` links are fetched at the same
//! depth and merged under their own URL, and anchors within the host
//! allowlist are queued one level deeper.

mod limiter;
mod report;
mod robots;

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cris_core::model::Iri;
use cris_core::store::{self, MergeMode, SourceId, Store, StoreError};
use cris_core::syntax::{extract_annotations, parse_triples, ParseOutcome, TRIPLES_MEDIA_TYPE};
use futures::stream::{self, StreamExt};
use thiserror::Error;
use tokio::sync::Mutex;
use tracing::{debug, info, warn};
use url::Url;

use limiter::HostLimiter;
pub use report::{CrawlReport, Kind, Outcome, Totals, UrlRecord};
pub use robots::Robots;

pub const DEFAULT_USER_AGENT: &str = concat!("cris-harvester/", env!("CARGO_PKG_VERSION"));
pub const DEFAULT_MAX_BODY: usize = 2 * 1024 * 1024;
pub const DEFAULT_MAX_REDIRECTS: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("no seed URLs given")]
    NoSeeds,
    #[error("seed {0} is not an http(s) URL")]
    UnsupportedSeed(String),
    #[error("seed {0} is outside the host allowlist")]
    SeedOutsideAllowlist(String),
    #[error("max_pages must be positive")]
    ZeroPages,
    #[error("fetch_parallelism must be positive")]
    ZeroParallelism,
    #[error("timeout must be positive")]
    ZeroTimeout,
    #[error("cannot build HTTP client: {0}")]
    Client(String),
}

#[derive(Debug, Clone)]
pub struct CrawlConfig {
    pub seeds: Vec<Iri>,
    /// Empty means the seeds' hosts.
    pub host_allowlist: Vec<String>,
    pub max_depth: usize,
    pub max_pages: usize,
    pub per_host_delay: Duration,
    pub fetch_parallelism: usize,
    pub timeout: Duration,
    pub max_body_bytes: usize,
    pub max_redirects: usize,
    pub respect_robots: bool,
    pub merge_mode: MergeMode,
    pub user_agent: String,
}

impl CrawlConfig {
    pub fn new(seeds: Vec<Iri>) -> Self {
        CrawlConfig {
            seeds,
            host_allowlist: Vec::new(),
            max_depth: 2,
            max_pages: 100,
            per_host_delay: Duration::from_millis(500),
            fetch_parallelism: 4,
            timeout: Duration::from_secs(10),
            max_body_bytes: DEFAULT_MAX_BODY,
            max_redirects: DEFAULT_MAX_REDIRECTS,
            respect_robots: true,
            merge_mode: MergeMode::ReplaceSource,
            user_agent: DEFAULT_USER_AGENT.to_string(),
        }
    }

    /// Checks the invariants and returns the effective host allowlist.
    pub fn validate(&self) -> Result<HashSet<String>, ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        if self.max_pages == 0 {
            return Err(ConfigError::ZeroPages);
        }
        if self.fetch_parallelism == 0 {
            return Err(ConfigError::ZeroParallelism);
        }
        if self.timeout.is_zero() {
            return Err(ConfigError::ZeroTimeout);
        }
        let mut seed_hosts = Vec::new();
        for seed in &self.seeds {
            let host = Url::parse(seed.as_str())
                .ok()
                .filter(|u| matches!(u.scheme(), "http" | "https"))
                .and_then(|u| host_of(&u))
                .ok_or_else(|| ConfigError::UnsupportedSeed(seed.as_str().to_string()))?;
            seed_hosts.push((seed, host));
        }
        if self.host_allowlist.is_empty() {
            return Ok(seed_hosts.into_iter().map(|(_, h)| h).collect());
        }
        let allowed: HashSet<String> = self
            .host_allowlist
            .iter()
            .map(|h| h.trim().to_ascii_lowercase())
            .filter(|h| !h.is_empty())
            .collect();
        for (seed, host) in seed_hosts {
            if !allowed.contains(&host) {
                return Err(ConfigError::SeedOutsideAllowlist(seed.as_str().to_string()));
            }
        }
        Ok(allowed)
    }
}

/// One URL per line; blank lines and `#` comments are ignored.
pub fn parse_seeds(text: &str) -> Result<Vec<Iri>, ConfigError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Iri::new(l).map_err(|_| ConfigError::UnsupportedSeed(l.to_string())))
        .collect()
}

/// Hosts compare case-insensitively and without the port.
fn host_of(url: &Url) -> Option<String> {
    url.host_str().map(str::to_ascii_lowercase)
}

#[derive(Debug, Clone)]
struct Item {
    url: Url,
    depth: usize,
    kind: Kind,
}

enum Fetched {
    Disallowed,
    Failed { status: Option<u16>, reason: String },
    Unsupported { status: u16, content_type: String },
    Html { url: Url, status: u16, body: String },
    Triples { url: Url, status: u16, body: String },
}

struct Fetcher {
    client: reqwest::Client,
    limiter: HostLimiter,
    robots: Mutex<HashMap<String, Arc<Robots>>>,
    config: CrawlConfig,
}

fn build_client(
    config: &CrawlConfig,
    allowed: Arc<HashSet<String>>,
) -> Result<reqwest::Client, ConfigError> {
    let max = config.max_redirects;
    let policy = reqwest::redirect::Policy::custom(move |attempt| {
        if attempt.previous().len() > max {
            attempt.error("too many redirects")
        } else if !host_of(attempt.url()).is_some_and(|h| allowed.contains(&h)) {
            attempt.error("redirect leaves the host allowlist")
        } else {
            attempt.follow()
        }
    });
    reqwest::Client::builder()
        .redirect(policy)
        .timeout(config.timeout)
        .user_agent(config.user_agent.clone())
        .build()
        .map_err(|e| ConfigError::Client(e.to_string()))
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut text = e.to_string();
    let mut cause = e.source();
    while let Some(c) = cause {
        text.push_str(": ");
        text.push_str(&c.to_string());
        cause = c.source();
    }
    text
}

fn media_type(resp: &reqwest::Response) -> String {
    resp.headers()
        .get(reqwest::header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase()
}

impl Fetcher {
    async fn robots_for(&self, url: &Url, host: &str) -> Arc<Robots> {
        if let Some(r) = self.robots.lock().await.get(host) {
            return r.clone();
        }
        let mut robots_url = url.clone();
        robots_url.set_path("/robots.txt");
        robots_url.set_query(None);
        robots_url.set_fragment(None);
        let robots = match self.client.get(robots_url).send().await {
            Ok(resp) if resp.status().is_success() => match resp.text().await {
                Ok(text) => Robots::parse(&text, &self.config.user_agent),
                Err(_) => Robots::allow_all(),
            },
            _ => Robots::allow_all(),
        };
        let robots = Arc::new(robots);
        self.robots
            .lock()
            .await
            .insert(host.to_string(), robots.clone());
        robots
    }

    async fn fetch(&self, item: &Item) -> Fetched {
        let Some(host) = host_of(&item.url) else {
            return Fetched::Failed {
                status: None,
                reason: "URL has no host".into(),
            };
        };
        let mut slot = self.limiter.acquire(&host).await;
        if self.config.respect_robots {
            let known = self.robots.lock().await.contains_key(&host);
            let robots = self.robots_for(&item.url, &host).await;
            if !known {
                // the robots.txt request counts as a request to the host
                slot.mark();
                slot.wait().await;
            }
            if !robots.allows(item.url.path()) {
                return Fetched::Disallowed;
            }
        }
        let result = self.get(item).await;
        slot.mark();
        result
    }

    async fn get(&self, item: &Item) -> Fetched {
        let failed = |status: Option<u16>, reason: String| Fetched::Failed { status, reason };
        let mut resp = match self.client.get(item.url.clone()).send().await {
            Ok(resp) => resp,
            Err(e) if e.is_timeout() => return failed(None, "timeout".into()),
            Err(e) if e.is_redirect() => {
                return failed(None, format!("redirect refused: {}", error_chain(&e)))
            }
            Err(e) => return failed(None, error_chain(&e)),
        };
        let status = resp.status().as_u16();
        if !resp.status().is_success() {
            return failed(Some(status), format!("HTTP {status}"));
        }
        let limit = self.config.max_body_bytes;
        if resp.content_length().is_some_and(|n| n as usize > limit) {
            return failed(Some(status), "body exceeds size limit".into());
        }
        let media = media_type(&resp);
        let url = resp.url().clone();
        let is_triples = media == TRIPLES_MEDIA_TYPE
            || media == "application/n-triples"
            || url.path().ends_with(".nt");
        let is_html = media == "text/html" || media == "application/xhtml+xml";
        if !is_triples && !(is_html && item.kind == Kind::Page) {
            return Fetched::Unsupported {
                status,
                content_type: media,
            };
        }
        let mut body = Vec::new();
        loop {
            match resp.chunk().await {
                Ok(Some(chunk)) => {
                    body.extend_from_slice(&chunk);
                    if body.len() > limit {
                        return failed(Some(status), "body exceeds size limit".into());
                    }
                }
                Ok(None) => break,
                Err(e) if e.is_timeout() => return failed(Some(status), "timeout".into()),
                Err(e) => return failed(Some(status), e.to_string()),
            }
        }
        let body = String::from_utf8_lossy(&body).into_owned();
        if is_triples {
            Fetched::Triples { url, status, body }
        } else {
            Fetched::Html { url, status, body }
        }
    }
}

struct Crawl<'a> {
    store: &'a mut Store,
    allowed: Arc<HashSet<String>>,
    max_depth: usize,
    mode: MergeMode,
    visited: HashSet<String>,
    records: Vec<UrlRecord>,
    next: Vec<Item>,
}

impl Crawl<'_> {
    /// Queues `url` unless it was seen before; off-allowlist and non-http
    /// URLs are recorded as skipped instead.
    fn offer(&mut self, mut url: Url, depth: usize, kind: Kind) -> bool {
        url.set_fragment(None);
        if !self.visited.insert(url.as_str().to_string()) {
            return false;
        }
        if !matches!(url.scheme(), "http" | "https") {
            self.records.push(UrlRecord::skipped(
                url.into(),
                depth,
                kind,
                "unsupported scheme",
            ));
            return false;
        }
        if !host_of(&url).is_some_and(|h| self.allowed.contains(&h)) {
            self.records.push(UrlRecord::skipped(
                url.into(),
                depth,
                kind,
                "outside host allowlist",
            ));
            return false;
        }
        self.next.push(Item { url, depth, kind });
        true
    }

    fn merge(&mut self, parsed: &ParseOutcome, source: &Url) -> usize {
        let Ok(iri) = Iri::new(source.as_str()) else {
            return 0;
        };
        let counts = self
            .store
            .merge(parsed, &SourceId::Url(iri), store::now(), self.mode);
        counts.added
    }

    fn absorb(&mut self, item: Item, fetched: Fetched, elapsed: Duration) {
        let mut record = UrlRecord::new(
            item.url.to_string(),
            item.depth,
            item.kind,
            Outcome::Fetched,
        );
        record.duration_ms = elapsed.as_millis() as u64;
        match fetched {
            Fetched::Disallowed => {
                record.outcome = Outcome::Skipped;
                record.reason = Some("disallowed by robots.txt".into());
            }
            Fetched::Failed { status, reason } => {
                warn!(url = %item.url, %reason, "fetch failed");
                record.outcome = Outcome::Failed;
                record.status = status;
                record.reason = Some(reason);
            }
            Fetched::Unsupported {
                status,
                content_type,
            } => {
                record.outcome = Outcome::Skipped;
                record.status = Some(status);
                record.reason = Some(format!("unsupported content type {content_type:?}"));
            }
            Fetched::Triples { url, status, body } => {
                self.visited.insert(url.as_str().to_string());
                let parsed = parse_triples(&body, url.as_str());
                record.status = Some(status);
                record.parse_errors = parsed.errors.len();
                record.triples_added = self.merge(&parsed, &url);
            }
            Fetched::Html { url, status, body } => {
                self.visited.insert(url.as_str().to_string());
                record.status = Some(status);
                let base = Iri::new(url.as_str()).expect("fetched URL is absolute");
                let extract = extract_annotations(&body, &base);
                let mut parsed = ParseOutcome {
                    blank_scope: url.as_str().to_string(),
                    ..Default::default()
                };
                for (_, block) in &extract.inline_blocks {
                    parsed.extend(parse_triples(block, url.as_str()));
                }
                record.parse_errors = parsed.errors.len();
                record.triples_added = self.merge(&parsed, &url);

                for meta in &extract.linked_refs {
                    if let Ok(u) = Url::parse(meta.as_str()) {
                        self.offer(u, item.depth, Kind::Meta);
                    }
                }
                record.links_found = extract.outbound_links.len();
                if item.depth < self.max_depth {
                    for link in &extract.outbound_links {
                        if let Ok(u) = Url::parse(link.as_str()) {
                            if self.offer(u, item.depth + 1, Kind::Page) {
                                record.links_queued += 1;
                            }
                        }
                    }
                }
            }
        }
        debug!(url = %record.url, outcome = ?record.outcome, added = record.triples_added, "processed");
        self.records.push(record);
    }
}

/// Crawls from the seeds and merges harvested triples into `store`.
/// Only an invalid configuration is an error; fetch failures are recorded
/// in the report.
pub async fn crawl(config: &CrawlConfig, store: &mut Store) -> Result<CrawlReport, ConfigError> {
    let allowed = Arc::new(config.validate()?);
    let fetcher = Fetcher {
        client: build_client(config, allowed.clone())?,
        limiter: HostLimiter::new(config.per_host_delay),
        robots: Mutex::default(),
        config: config.clone(),
    };
    let started = store::format_timestamp(store::now());
    let mut crawl = Crawl {
        store,
        allowed,
        max_depth: config.max_depth,
        mode: config.merge_mode,
        visited: HashSet::new(),
        records: Vec::new(),
        next: Vec::new(),
    };
    for seed in &config.seeds {
        let url = Url::parse(seed.as_str()).expect("validated seed");
        crawl.offer(url, 0, Kind::Page);
    }

    let mut budget = config.max_pages;
    while !crawl.next.is_empty() {
        let mut wave: VecDeque<Item> = std::mem::take(&mut crawl.next).into();
        info!(size = wave.len(), budget, "crawl wave");
        while !wave.is_empty() && budget > 0 {
            let take = budget.min(wave.len());
            let batch: Vec<Item> = wave.drain(..take).collect();
            let fetcher = &fetcher;
            let results: Vec<(Item, Fetched, Duration)> = stream::iter(batch)
                .map(|item| async move {
                    let start = Instant::now();
                    let fetched = fetcher.fetch(&item).await;
                    (item, fetched, start.elapsed())
                })
                .buffered(config.fetch_parallelism)
                .collect()
                .await;
            for (item, fetched, elapsed) in results {
                // robots-denied URLs never reached the host
                if !matches!(fetched, Fetched::Disallowed) {
                    budget -= 1;
                }
                crawl.absorb(item, fetched, elapsed);
            }
        }
        for item in wave {
            crawl.records.push(UrlRecord::skipped(
                item.url.into(),
                item.depth,
                item.kind,
                "page budget exhausted",
            ));
        }
        if budget == 0 {
            for item in std::mem::take(&mut crawl.next) {
                crawl.records.push(UrlRecord::skipped(
                    item.url.into(),
                    item.depth,
                    item.kind,
                    "page budget exhausted",
                ));
            }
        }
    }
    let finished = store::format_timestamp(store::now());
    Ok(CrawlReport::new(crawl.records, started, finished))
}

/// Writes the whole store, instance and schema triples together, plus the
/// provenance sidecar.
pub fn export(store: &Store, dir: &Path) -> Result<(), StoreError> {
    store.save_dir(dir)
}
