//! Tag-level HTML scanning for embedded annotations.
//!
//! Annotations travel in `<script type="text/x-cris-triples">` blocks or in
//! external files referenced by `<link rel="cris-meta" href="...">`. The
//! scanner only tokenizes tags; it does not build a DOM and tolerates
//! unbalanced or otherwise malformed markup.

use std::ops::Range;

use url::Url;

use crate::model::Iri;

pub const TRIPLES_MEDIA_TYPE: &str = "text/x-cris-triples";
pub const META_LINK_REL: &str = "cris-meta";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationExtract {
    /// `(block index, raw text)` in document order.
    pub inline_blocks: Vec<(usize, String)>,
    pub linked_refs: Vec<Iri>,
    pub outbound_links: Vec<Iri>,
    /// hrefs that could not be resolved to an absolute IRI.
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Start {
        name: String,
        attrs: Vec<(String, String)>,
        span: Range<usize>,
    },
    /// `script`/`style`: raw text content up to the matching end tag.
    Raw {
        name: String,
        attrs: Vec<(String, String)>,
        content: Range<usize>,
        span: Range<usize>,
    },
    End {
        name: String,
        span: Range<usize>,
    },
}

impl Node {
    pub(crate) fn attr(&self, key: &str) -> Option<&str> {
        let attrs = match self {
            Node::Start { attrs, .. } | Node::Raw { attrs, .. } => attrs,
            Node::End { .. } => return None,
        };
        attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub(crate) fn is_triples_script(&self) -> bool {
        matches!(self, Node::Raw { name, .. } if name == "script")
            && self
                .attr("type")
                .is_some_and(|t| t.trim().eq_ignore_ascii_case(TRIPLES_MEDIA_TYPE))
    }
}

pub(crate) fn scan(html: &str) -> Vec<Node> {
    let bytes = html.as_bytes();
    let mut nodes = Vec::new();
    let mut pos = 0;
    while let Some(off) = html[pos..].find('<') {
        let start = pos + off;
        let rest = &html[start..];
        if let Some(comment) = rest.strip_prefix("<!--") {
            pos = match comment.find("-->") {
                Some(end) => start + 4 + end + 3,
                None => html.len(),
            };
            continue;
        }
        if rest.starts_with("<!") || rest.starts_with("<?") {
            pos = skip_to_gt(html, start + 2);
            continue;
        }
        if let Some(after) = rest.strip_prefix("</") {
            let name_len = name_len(after);
            if name_len == 0 {
                pos = start + 2;
                continue;
            }
            let end = skip_to_gt(html, start + 2 + name_len);
            nodes.push(Node::End {
                name: after[..name_len].to_ascii_lowercase(),
                span: start..end,
            });
            pos = end;
            continue;
        }
        let name_len = name_len(&rest[1..]);
        if name_len == 0 || !bytes[start + 1].is_ascii_alphabetic() {
            pos = start + 1;
            continue;
        }
        let name = rest[1..1 + name_len].to_ascii_lowercase();
        let (attrs, tag_end) = parse_attrs(html, start + 1 + name_len);
        if name == "script" || name == "style" {
            let close = format!("</{name}");
            let content_end = find_ci(html, tag_end, &close).unwrap_or(html.len());
            let end = if content_end < html.len() {
                skip_to_gt(html, content_end + close.len())
            } else {
                html.len()
            };
            nodes.push(Node::Raw {
                name,
                attrs,
                content: tag_end..content_end,
                span: start..end,
            });
            pos = end;
        } else {
            nodes.push(Node::Start {
                name,
                attrs,
                span: start..tag_end,
            });
            pos = tag_end;
        }
    }
    nodes
}

fn name_len(s: &str) -> usize {
    s.bytes()
        .take_while(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b':' | b'_'))
        .count()
}

/// Index just past the next `>` at or after `from` (or end of input).
fn skip_to_gt(html: &str, from: usize) -> usize {
    match html[from..].find('>') {
        Some(i) => from + i + 1,
        None => html.len(),
    }
}

fn find_ci(html: &str, from: usize, needle: &str) -> Option<usize> {
    let hay = html.as_bytes();
    let needle = needle.as_bytes();
    (from..hay.len().saturating_sub(needle.len() - 1))
        .find(|&i| hay[i..i + needle.len()].eq_ignore_ascii_case(needle))
}

/// Parses attributes starting at `pos`; returns them and the index past `>`.
fn parse_attrs(html: &str, mut pos: usize) -> (Vec<(String, String)>, usize) {
    let bytes = html.as_bytes();
    let mut attrs = Vec::new();
    loop {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'/') {
            pos += 1;
        }
        if pos >= bytes.len() {
            return (attrs, pos);
        }
        if bytes[pos] == b'>' {
            return (attrs, pos + 1);
        }
        let key_start = pos;
        while pos < bytes.len()
            && !bytes[pos].is_ascii_whitespace()
            && !matches!(bytes[pos], b'=' | b'>' | b'/')
        {
            pos += 1;
        }
        let key = html[key_start..pos].to_ascii_lowercase();
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let mut value = String::new();
        if pos < bytes.len() && bytes[pos] == b'=' {
            pos += 1;
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && matches!(bytes[pos], b'"' | b'\'') {
                let quote = bytes[pos] as char;
                let vstart = pos + 1;
                let vend = html[vstart..]
                    .find(quote)
                    .map_or(html.len(), |i| vstart + i);
                value = decode_entities(&html[vstart..vend]);
                pos = (vend + 1).min(html.len());
            } else {
                let vstart = pos;
                while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'>' {
                    pos += 1;
                }
                value = decode_entities(&html[vstart..pos]);
            }
        }
        if !key.is_empty() {
            attrs.push((key, value));
        }
    }
}

fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let entity = &rest[1..semi];
            let c = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                _ => entity
                    .strip_prefix("#x")
                    .or_else(|| entity.strip_prefix("#X"))
                    .and_then(|hex| u32::from_str_radix(hex, 16).ok())
                    .or_else(|| entity.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            };
            c.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn resolve(base: Option<&Url>, href: &str, strip_fragment: bool) -> Option<Iri> {
    let mut url = Url::options().base_url(base).parse(href.trim()).ok()?;
    if strip_fragment {
        url.set_fragment(None);
    }
    Iri::new(String::from(url)).ok()
}

pub fn extract_annotations(html: &str, base_url: &Iri) -> AnnotationExtract {
    let base = Url::parse(base_url.as_str()).ok();
    let mut extract = AnnotationExtract::default();
    for node in scan(html) {
        if node.is_triples_script() {
            if let Node::Raw { content, .. } = &node {
                let index = extract.inline_blocks.len();
                extract
                    .inline_blocks
                    .push((index, html[content.clone()].to_string()));
            }
            continue;
        }
        let Node::Start { name, .. } = &node else {
            continue;
        };
        match name.as_str() {
            "link" => {
                let is_meta = node.attr("rel").is_some_and(|rel| {
                    rel.split_ascii_whitespace()
                        .any(|r| r.eq_ignore_ascii_case(META_LINK_REL))
                });
                if let (true, Some(href)) = (is_meta, node.attr("href")) {
                    match resolve(base.as_ref(), href, false) {
                        Some(iri) => extract.linked_refs.push(iri),
                        None => extract.unresolved += 1,
                    }
                }
            }
            "a" => {
                if let Some(href) = node.attr("href") {
                    match resolve(base.as_ref(), href, true) {
                        Some(iri) => extract.outbound_links.push(iri),
                        None => extract.unresolved += 1,
                    }
                }
            }
            _ => {}
        }
    }
    extract
}
