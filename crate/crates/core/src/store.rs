//! Deduplicated triple repository with per-source provenance.
//!
//! The store keeps three access-order indexes (subject-first,
//! predicate-first and object-first) over one triple set. Reads go through
//! [`Snapshot`]s, which share the state copy-on-write: a snapshot taken
//! before a write never observes it. Writes need `&mut Store`, so callers
//! sharing a store serialize them (single writer).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{BlankNode, Iri, Term, Triple};
use crate::syntax::{parse_line, serialize, ParseOutcome};

/// UTC seconds since the Unix epoch.
pub type Timestamp = i64;

pub const STORE_FILE: &str = "store.nt";
pub const PROVENANCE_FILE: &str = "store.prov";

pub fn now() -> Timestamp {
    Utc::now().timestamp()
}

pub fn format_timestamp(ts: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .unwrap_or_default()
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|d| d.timestamp())
}

fn serialize_timestamp<S: Serializer>(ts: &Timestamp, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(*ts))
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{file}:{line}: {message}")]
    Corrupt {
        file: String,
        line: usize,
        message: String,
    },
}

/// Where a triple came from: a document URL, or `local` for direct inserts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceId {
    Local,
    Url(Iri),
}

impl SourceId {
    pub fn parse(text: &str) -> Option<SourceId> {
        if text == "local" {
            return Some(SourceId::Local);
        }
        Iri::new(text).ok().map(SourceId::Url)
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceId::Local => f.write_str("local"),
            SourceId::Url(iri) => f.write_str(iri.as_str()),
        }
    }
}

impl Serialize for SourceId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeMode {
    /// Drop everything only this source asserted before merging its new
    /// content.
    #[default]
    ReplaceSource,
    Accumulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MergeCounts {
    pub added: usize,
    pub duplicate: usize,
}

pub type Provenance = BTreeSet<(SourceId, Timestamp)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct State {
    spo: BTreeMap<Term, BTreeMap<Iri, BTreeSet<Term>>>,
    pos: BTreeMap<Iri, BTreeMap<Term, BTreeSet<Term>>>,
    osp: BTreeMap<Term, BTreeMap<Term, BTreeSet<Iri>>>,
    provenance: BTreeMap<Triple, Provenance>,
}

impl State {
    fn add_to_indexes(&mut self, t: &Triple) {
        let (s, p, o) = (t.subject(), t.predicate(), t.object());
        self.spo
            .entry(s.clone())
            .or_default()
            .entry(p.clone())
            .or_default()
            .insert(o.clone());
        self.pos
            .entry(p.clone())
            .or_default()
            .entry(o.clone())
            .or_default()
            .insert(s.clone());
        self.osp
            .entry(o.clone())
            .or_default()
            .entry(s.clone())
            .or_default()
            .insert(p.clone());
    }

    fn remove_from_indexes(&mut self, t: &Triple) {
        let (s, p, o) = (t.subject(), t.predicate(), t.object());
        remove_nested(&mut self.spo, s, p, o);
        remove_nested(&mut self.pos, p, o, s);
        remove_nested(&mut self.osp, o, s, p);
    }
}

fn remove_nested<A: Ord, B: Ord, C: Ord>(
    map: &mut BTreeMap<A, BTreeMap<B, BTreeSet<C>>>,
    a: &A,
    b: &B,
    c: &C,
) {
    if let Some(inner) = map.get_mut(a) {
        if let Some(set) = inner.get_mut(b) {
            set.remove(c);
            if set.is_empty() {
                inner.remove(b);
            }
        }
        if inner.is_empty() {
            map.remove(a);
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    state: Arc<State>,
}

/// Immutable view of a [`Store`] at one instant.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    state: Arc<State>,
}

impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state
    }
}

impl Eq for Store {}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            state: Arc::clone(&self.state),
        }
    }

    pub fn len(&self) -> usize {
        self.state.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.provenance.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.state.provenance.contains_key(t)
    }

    /// Adds `t` with a provenance entry; true iff the triple is new.
    pub fn insert(&mut self, t: Triple, src: SourceId, at: Timestamp) -> bool {
        let state = Arc::make_mut(&mut self.state);
        match state.provenance.get_mut(&t) {
            Some(prov) => {
                prov.insert((src, at));
                false
            }
            None => {
                state.add_to_indexes(&t);
                state.provenance.insert(t, BTreeSet::from([(src, at)]));
                true
            }
        }
    }

    /// Removes every provenance entry of `src`; triples left without any
    /// provenance are deleted. Returns the number of deleted triples.
    pub fn remove_source(&mut self, src: &SourceId) -> usize {
        let affected: Vec<Triple> = self
            .state
            .provenance
            .iter()
            .filter(|(_, prov)| prov.iter().any(|(s, _)| s == src))
            .map(|(t, _)| t.clone())
            .collect();
        if affected.is_empty() {
            return 0;
        }
        let state = Arc::make_mut(&mut self.state);
        let mut removed = 0;
        for t in affected {
            let prov = state.provenance.get_mut(&t).expect("listed above");
            prov.retain(|(s, _)| s != src);
            if prov.is_empty() {
                state.provenance.remove(&t);
                state.remove_from_indexes(&t);
                removed += 1;
            }
        }
        removed
    }

    /// Merges one parsed document under `src`. Blank nodes are relabeled
    /// into the document's scope first. Counts are relative to the store
    /// before the call, so re-merging an unchanged document reports only
    /// duplicates in either mode.
    pub fn merge(
        &mut self,
        parsed: &ParseOutcome,
        src: &SourceId,
        at: Timestamp,
        mode: MergeMode,
    ) -> MergeCounts {
        let triples: Vec<Triple> = parsed
            .triples
            .iter()
            .map(|t| scope_blanks(t, &parsed.blank_scope))
            .collect();
        let mut counts = MergeCounts::default();
        let mut seen = BTreeSet::new();
        for t in &triples {
            if self.contains(t) || !seen.insert(t) {
                counts.duplicate += 1;
            } else {
                counts.added += 1;
            }
        }
        if mode == MergeMode::ReplaceSource {
            self.remove_source(src);
        }
        for t in triples {
            self.insert(t, src.clone(), at);
        }
        counts
    }

    /// Loads `store.nt` and `store.prov` from `dir`. Missing files mean an
    /// empty store; triples without provenance lines are attributed to
    /// `local` at load time.
    pub fn load_dir(dir: &Path) -> Result<Store, StoreError> {
        let mut store = Store::new();
        let nt_path = dir.join(STORE_FILE);
        let text = match fs::read_to_string(&nt_path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(store),
            Err(e) => return Err(e.into()),
        };
        let mut triples = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            match parse_line(line) {
                Ok(Some(t)) => {
                    triples.insert(t);
                }
                Ok(None) => {}
                Err(message) => {
                    return Err(StoreError::Corrupt {
                        file: nt_path.display().to_string(),
                        line: idx + 1,
                        message,
                    })
                }
            }
        }

        let prov_path = dir.join(PROVENANCE_FILE);
        let prov_text = match fs::read_to_string(&prov_path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        for (idx, line) in prov_text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: &str| StoreError::Corrupt {
                file: prov_path.display().to_string(),
                line: idx + 1,
                message: message.to_string(),
            };
            let mut fields = line.splitn(3, '\t');
            let (Some(src), Some(at), Some(triple)) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(corrupt("expected three tab-separated fields"));
            };
            let src = SourceId::parse(src).ok_or_else(|| corrupt("bad source"))?;
            let at = parse_timestamp(at).ok_or_else(|| corrupt("bad timestamp"))?;
            let triple = parse_line(triple)
                .map_err(|m| corrupt(&m))?
                .ok_or_else(|| corrupt("missing triple"))?;
            // Curated deletions from store.nt win over stale provenance.
            if triples.contains(&triple) {
                store.insert(triple, src, at);
            }
        }
        let loaded_at = now();
        for t in triples {
            if !store.contains(&t) {
                store.insert(t, SourceId::Local, loaded_at);
            }
        }
        Ok(store)
    }

    /// Writes `store.nt` and `store.prov` into `dir` (created if needed).
    pub fn save_dir(&self, dir: &Path) -> Result<(), StoreError> {
        fs::create_dir_all(dir)?;
        let snap = self.snapshot();
        write_atomic(&dir.join(STORE_FILE), snap.to_ntriples().as_bytes())?;
        write_atomic(
            &dir.join(PROVENANCE_FILE),
            snap.provenance_lines().as_bytes(),
        )?;
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(tmp, path)
}

/// Relabels blank nodes so labels from different documents cannot collide.
/// The mapping is a pure function of (label, scope).
pub fn scope_blanks(t: &Triple, scope: &str) -> Triple {
    if scope.is_empty() {
        return t.clone();
    }
    let relabel = |term: &Term| match term {
        Term::Blank(b) => Term::Blank(scoped_blank(b, scope)),
        other => other.clone(),
    };
    Triple::new(
        relabel(t.subject()),
        t.predicate().clone(),
        relabel(t.object()),
    )
    .expect("relabeling keeps subjects non-literal")
}

fn scoped_blank(b: &BlankNode, scope: &str) -> BlankNode {
    let digest = Sha256::digest(scope.as_bytes());
    let suffix: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    BlankNode::new(format!("{}s{suffix}", b.label())).expect("alphanumeric label")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceStats {
    pub source: SourceId,
    pub triples: usize,
    #[serde(serialize_with = "serialize_timestamp")]
    pub latest_fetch: Timestamp,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StoreStats {
    pub triples: usize,
    pub distinct_subjects: usize,
    pub distinct_predicates: usize,
    pub sources: Vec<SourceStats>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.state.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.provenance.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.state.provenance.contains_key(t)
    }

    /// All triples in canonical order.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.state.provenance.keys()
    }

    pub fn provenance(&self, t: &Triple) -> Option<&Provenance> {
        self.state.provenance.get(t)
    }

    /// Triples agreeing with every bound position, in canonical order.
    pub fn match_pattern(
        &self,
        s: Option<&Term>,
        p: Option<&Iri>,
        o: Option<&Term>,
    ) -> Vec<Triple> {
        let st = &*self.state;
        let mut out = Vec::new();
        let mut push = |s: &Term, p: &Iri, o: &Term| {
            out.push(
                Triple::new(s.clone(), p.clone(), o.clone()).expect("stored triples are valid"),
            );
        };
        match (s, p, o) {
            (Some(s), _, _) => {
                let Some(by_p) = st.spo.get(s) else {
                    return out;
                };
                let preds: Box<dyn Iterator<Item = (&Iri, &BTreeSet<Term>)>> = match p {
                    Some(p) => Box::new(by_p.get_key_value(p).into_iter()),
                    None => Box::new(by_p.iter()),
                };
                for (pred, objects) in preds {
                    match o {
                        Some(o) if objects.contains(o) => push(s, pred, o),
                        Some(_) => {}
                        None => objects.iter().for_each(|obj| push(s, pred, obj)),
                    }
                }
            }
            (None, Some(p), _) => {
                let Some(by_o) = st.pos.get(p) else {
                    return out;
                };
                let objs: Box<dyn Iterator<Item = (&Term, &BTreeSet<Term>)>> = match o {
                    Some(o) => Box::new(by_o.get_key_value(o).into_iter()),
                    None => Box::new(by_o.iter()),
                };
                for (obj, subjects) in objs {
                    subjects.iter().for_each(|subj| push(subj, p, obj));
                }
                out.sort();
            }
            (None, None, Some(o)) => {
                if let Some(by_s) = st.osp.get(o) {
                    for (subj, preds) in by_s {
                        preds.iter().for_each(|pred| push(subj, pred, o));
                    }
                }
            }
            (None, None, None) => out.extend(st.provenance.keys().cloned()),
        }
        out
    }

    pub fn stats(&self) -> StoreStats {
        let st = &*self.state;
        let mut per_source: BTreeMap<&SourceId, (usize, Timestamp)> = BTreeMap::new();
        for prov in st.provenance.values() {
            let mut latest: BTreeMap<&SourceId, Timestamp> = BTreeMap::new();
            for (src, at) in prov {
                let e = latest.entry(src).or_insert(*at);
                *e = (*e).max(*at);
            }
            for (src, at) in latest {
                let e = per_source.entry(src).or_insert((0, at));
                e.0 += 1;
                e.1 = e.1.max(at);
            }
        }
        StoreStats {
            triples: st.provenance.len(),
            distinct_subjects: st.spo.len(),
            distinct_predicates: st.pos.len(),
            sources: per_source
                .into_iter()
                .map(|(src, (triples, latest_fetch))| SourceStats {
                    source: src.clone(),
                    triples,
                    latest_fetch,
                })
                .collect(),
        }
    }

    pub fn to_ntriples(&self) -> String {
        serialize(self.triples())
    }

    /// `source TAB iso8601 TAB triple-line`, one line per provenance entry.
    pub fn provenance_lines(&self) -> String {
        let mut out = String::new();
        for (t, prov) in &self.state.provenance {
            for (src, at) in prov {
                out.push_str(&format!("{src}\t{}\t{t}\n", format_timestamp(*at)));
            }
        }
        out
    }

    /// Memberships of the subject-first, predicate-first and object-first
    /// indexes, for consistency checks.
    pub fn index_memberships(&self) -> [BTreeSet<Triple>; 3] {
        let st = &*self.state;
        let mk =
            |s: &Term, p: &Iri, o: &Term| Triple::new(s.clone(), p.clone(), o.clone()).unwrap();
        let spo = st
            .spo
            .iter()
            .flat_map(|(s, m)| {
                m.iter()
                    .flat_map(move |(p, os)| os.iter().map(move |o| mk(s, p, o)))
            })
            .collect();
        let pos = st
            .pos
            .iter()
            .flat_map(|(p, m)| {
                m.iter()
                    .flat_map(move |(o, ss)| ss.iter().map(move |s| mk(s, p, o)))
            })
            .collect();
        let osp = st
            .osp
            .iter()
            .flat_map(|(o, m)| {
                m.iter()
                    .flat_map(move |(s, ps)| ps.iter().map(move |p| mk(s, p, o)))
            })
            .collect();
        [spo, pos, osp]
    }
}
