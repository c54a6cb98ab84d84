//! Line-oriented triple exchange format.
//!
//! ```text
//! <subject> <predicate> <object> .
//! _:b1 <predicate> "literal"@en .
//! # comment
//! ```
//!
//! Parsing recovers per line: a malformed line is reported with its
//! 1-based line number and the rest of the document is still read.

use std::collections::BTreeSet;

use crate::model::{BlankNode, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutcome {
    pub triples: Vec<Triple>,
    pub errors: Vec<LineError>,
    /// Identifies the parsed document; blank labels are local to it.
    pub blank_scope: String,
}

impl ParseOutcome {
    /// Appends another document's outcome, keeping this outcome's scope.
    pub fn extend(&mut self, other: ParseOutcome) {
        self.triples.extend(other.triples);
        self.errors.extend(other.errors);
    }
}

pub fn parse_triples(text: &str, scope: &str) -> ParseOutcome {
    let mut outcome = ParseOutcome {
        blank_scope: scope.to_string(),
        ..Default::default()
    };
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match parse_line(line) {
            Ok(Some(triple)) => outcome.triples.push(triple),
            Ok(None) => {}
            Err(message) => outcome.errors.push(LineError {
                line: idx + 1,
                message,
            }),
        }
    }
    outcome
}

/// Parses a single line; `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let mut cur = Cursor { text: line, pos: 0 };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        _ => return Err(cur.expected("subject IRI or blank node")),
    };
    cur.require_ws()?;
    let predicate = match cur.peek() {
        Some('<') => cur.iri()?,
        _ => return Err(cur.expected("predicate IRI")),
    };
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        Some('"') => Term::Literal(cur.literal()?),
        _ => return Err(cur.expected("object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.expected("'.'"));
    }
    cur.pos += 1;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.expected("end of line"));
    }
    Triple::new(subject, predicate, object)
        .map(Some)
        .map_err(|e| e.to_string())
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn require_ws(&mut self) -> Result<(), String> {
        if self.skip_ws() == 0 {
            return Err(self.expected("whitespace"));
        }
        Ok(())
    }

    fn expected(&self, what: &str) -> String {
        match self.peek() {
            Some(c) => format!("expected {what} at column {}, found {c:?}", self.pos + 1),
            None => format!(
                "expected {what} at column {}, found end of line",
                self.pos + 1
            ),
        }
    }

    fn iri(&mut self) -> Result<Iri, String> {
        let body = &self.rest()[1..];
        let close = body
            .find('>')
            .ok_or_else(|| format!("unterminated IRI at column {}", self.pos + 1))?;
        let iri = Iri::new(&body[..close]).map_err(|e| e.to_string())?;
        self.pos += close + 2;
        Ok(iri)
    }

    fn blank(&mut self) -> Result<BlankNode, String> {
        if !self.rest().starts_with("_:") {
            return Err(self.expected("'_:'"));
        }
        self.pos += 2;
        let len = self
            .rest()
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric())
            .count();
        let label = &self.rest()[..len];
        let node = BlankNode::new(label).map_err(|e| e.to_string())?;
        self.pos += len;
        Ok(node)
    }

    fn literal(&mut self) -> Result<Literal, String> {
        let start = self.pos;
        self.pos += 1;
        let mut lexical = String::new();
        let mut chars = self.rest().char_indices();
        let consumed = loop {
            match chars.next() {
                None => return Err(format!("unterminated literal at column {}", start + 1)),
                Some((i, '"')) => break i + 1,
                Some((i, '\\')) => match chars.next() {
                    Some((_, '"')) => lexical.push('"'),
                    Some((_, '\\')) => lexical.push('\\'),
                    Some((_, 'n')) => lexical.push('\n'),
                    Some((_, 't')) => lexical.push('\t'),
                    Some((_, 'r')) => lexical.push('\r'),
                    _ => return Err(format!("invalid escape at column {}", self.pos + i + 1)),
                },
                Some((_, c)) => lexical.push(c),
            }
        };
        self.pos += consumed;
        if self.peek() == Some('@') {
            self.pos += 1;
            let len = self
                .rest()
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'-')
                .count();
            let text = self.text;
            let tag = &text[self.pos..self.pos + len];
            self.pos += len;
            return Literal::with_language(lexical, tag).map_err(|e| e.to_string());
        }
        Ok(Literal::new(lexical))
    }
}

/// Canonical serialization: deduplicated, sorted, one terminated line per
/// triple.
pub fn serialize<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let sorted: BTreeSet<&Triple> = triples.into_iter().collect();
    let mut out = String::new();
    for triple in sorted {
        out.push_str(&triple.to_string());
        out.push('\n');
    }
    out
}
