//! Graph vocabulary shared by every other module: IRIs, literals, blank
//! nodes, terms, triples and prefix maps.
//!
//! All values are immutable once built. Terms order by kind first
//! (IRI < blank node < literal) and then by their serialized line form,
//! which is also the order the canonical serializer emits.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed IRI {0:?}: {1}")]
    MalformedIri(String, &'static str),
    #[error("malformed language tag {0:?}")]
    MalformedLanguage(String),
    #[error("malformed blank node label {0:?}")]
    MalformedBlank(String),
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("literal cannot be used as a triple subject")]
    LiteralSubject,
}

/// An absolute IRI, kept verbatim.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        let text = text.into();
        if text.is_empty() {
            return Err(ModelError::MalformedIri(text, "empty"));
        }
        if text
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"'))
        {
            return Err(ModelError::MalformedIri(text, "forbidden character"));
        }
        if !has_scheme(&text) {
            return Err(ModelError::MalformedIri(text, "not absolute"));
        }
        Ok(Iri(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

/// Shorthand for [`Iri::new`].
pub fn make_iri(text: &str) -> Result<Iri, ModelError> {
    Iri::new(text)
}

fn has_scheme(text: &str) -> bool {
    let Some(colon) = text.find(':') else {
        return false;
    };
    let scheme = &text[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl Ord for Iri {
    fn cmp(&self, other: &Self) -> Ordering {
        // Serialized form is `<value>`; the shared `<` drops out.
        self.0
            .bytes()
            .chain(std::iter::once(b'>'))
            .cmp(other.0.bytes().chain(std::iter::once(b'>')))
    }
}

impl PartialOrd for Iri {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A plain string literal with an optional lowercase language tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    language: Option<String>,
}

impl Literal {
    pub fn new(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            language: None,
        }
    }

    /// Builds a language-tagged literal; the tag is lowercased before
    /// validation.
    pub fn with_language(lexical: impl Into<String>, language: &str) -> Result<Self, ModelError> {
        let tag = language.to_ascii_lowercase();
        if !valid_language(&tag) {
            return Err(ModelError::MalformedLanguage(language.to_string()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            language: Some(tag),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    fn serialized_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        let lang = self.language.as_deref().unwrap_or("");
        std::iter::once(b'"')
            .chain(EscapedBytes::new(&self.lexical))
            .chain(std::iter::once(b'"'))
            .chain(std::iter::once(b'@').filter(move |_| !lang.is_empty()))
            .chain(lang.bytes())
    }
}

fn valid_language(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first_ok = parts
        .next()
        .is_some_and(|p| (1..=8).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_lowercase()));
    first_ok
        && parts.all(|p| {
            (1..=8).contains(&p.len())
                && p.bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        })
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        f.write_str(&escape_literal(&self.lexical))?;
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")?;
        }
        Ok(())
    }
}

/// Escapes `"`, `\`, newline, tab and carriage return for the line format.
pub fn escape_literal(text: &str) -> String {
    String::from_utf8(EscapedBytes::new(text).collect()).expect("escaping preserves UTF-8")
}

struct EscapedBytes<'a> {
    bytes: std::slice::Iter<'a, u8>,
    pending: Option<u8>,
}

impl<'a> EscapedBytes<'a> {
    fn new(text: &'a str) -> Self {
        EscapedBytes {
            bytes: text.as_bytes().iter(),
            pending: None,
        }
    }
}

impl Iterator for EscapedBytes<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if let Some(b) = self.pending.take() {
            return Some(b);
        }
        let b = *self.bytes.next()?;
        let escaped = match b {
            b'"' => b'"',
            b'\\' => b'\\',
            b'\n' => b'n',
            b'\t' => b't',
            b'\r' => b'r',
            _ => return Some(b),
        };
        self.pending = Some(escaped);
        Some(b'\\')
    }
}

/// A blank node whose label matches `[A-Za-z0-9]+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, ModelError> {
        let label = label.into();
        if label.is_empty() || !label.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return Err(ModelError::MalformedBlank(label));
        }
        Ok(BlankNode(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    fn rank(&self) -> u8 {
        match self {
            Term::Iri(_) => 0,
            Term::Blank(_) => 1,
            Term::Literal(_) => 2,
        }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => a.cmp(b),
            (Term::Blank(a), Term::Blank(b)) => a.cmp(b),
            (Term::Literal(a), Term::Literal(b)) => a.serialized_bytes().cmp(b.serialized_bytes()),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order over terms: kind first, then serialized form.
pub fn compare_terms(a: &Term, b: &Term) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

/// A (subject, predicate, object) assertion. The subject is never a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl Triple {
    pub fn new(
        subject: impl Into<Term>,
        predicate: Iri,
        object: impl Into<Term>,
    ) -> Result<Self, ModelError> {
        let subject = subject.into();
        if subject.is_literal() {
            return Err(ModelError::LiteralSubject);
        }
        Ok(Triple {
            subject,
            predicate,
            object: object.into(),
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Iri, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    /// The canonical line form, without the trailing newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Prefix tokens plus the default namespace used by `#Name` shorthand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, Iri>,
    default: Iri,
}

impl PrefixMap {
    pub fn new(default: Iri) -> Self {
        PrefixMap {
            entries: BTreeMap::new(),
            default,
        }
    }

    /// Default namespace CERIF, plus `rdf`, `rdfs` and `cerif` prefixes.
    pub fn cerif() -> Self {
        let mut map = PrefixMap::new(vocab::cerif_namespace());
        map.insert("rdf", vocab::iri(vocab::RDF_NS));
        map.insert("rdfs", vocab::iri(vocab::RDFS_NS));
        map.insert("cerif", vocab::cerif_namespace());
        map
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.entries.insert(prefix.into(), namespace);
    }

    pub fn default_namespace(&self) -> &Iri {
        &self.default
    }

    pub fn get(&self, prefix: &str) -> Option<&Iri> {
        self.entries.get(prefix)
    }

    /// Resolves `<IRI>`, `prefix:name` or `#name` to an absolute IRI.
    pub fn expand(&self, token: &str) -> Result<Iri, ModelError> {
        if let Some(inner) = token.strip_prefix('<') {
            let inner = inner
                .strip_suffix('>')
                .ok_or_else(|| ModelError::MalformedIri(token.to_string(), "unterminated"))?;
            return Iri::new(inner);
        }
        if let Some(name) = token.strip_prefix('#') {
            let base = self.default.as_str();
            let base = base.strip_suffix('#').unwrap_or(base);
            return Iri::new(format!("{base}#{name}"));
        }
        match token.split_once(':') {
            Some((prefix, name)) => match self.entries.get(prefix) {
                Some(ns) => Iri::new(format!("{}{}", ns.as_str(), name)),
                None => Err(ModelError::UnknownPrefix(prefix.to_string())),
            },
            None => Err(ModelError::MalformedIri(token.to_string(), "not absolute")),
        }
    }
}

/// Free-function form of [`PrefixMap::expand`].
pub fn expand(token: &str, prefixes: &PrefixMap) -> Result<Iri, ModelError> {
    prefixes.expand(token)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn make_iri_accepts_cerif_class() {
        let text = "http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Person";
        assert_eq!(make_iri(text).unwrap().as_str(), text);
    }

    #[test]
    fn make_iri_rejects_bad_input() {
        assert!(matches!(make_iri(""), Err(ModelError::MalformedIri(_, _))));
        assert!(matches!(
            make_iri("http://a b/c"),
            Err(ModelError::MalformedIri(_, _))
        ));
        assert!(make_iri("relative/path").is_err());
        assert!(make_iri("http://a/<x>").is_err());
        assert!(make_iri("1http://a").is_err());
        assert!(make_iri("urn:isbn:123").is_ok());
    }

    #[test]
    fn expand_forms() {
        let p = PrefixMap::cerif();
        assert_eq!(
            p.expand("#Person").unwrap().as_str(),
            "http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Person"
        );
        assert_eq!(
            p.expand("<http://example.org/x>").unwrap().as_str(),
            "http://example.org/x"
        );
        assert_eq!(
            p.expand("rdfs:Class").unwrap().as_str(),
            "http://www.w3.org/2000/01/rdf-schema#Class"
        );
        assert_eq!(
            p.expand("xyz:Name"),
            Err(ModelError::UnknownPrefix("xyz".into()))
        );
    }

    #[test]
    fn expand_hash_without_trailing_hash_namespace() {
        let p = PrefixMap::new(iri("http://example.org/ns"));
        assert_eq!(p.expand("#A").unwrap().as_str(), "http://example.org/ns#A");
    }

    #[test]
    fn kind_precedence() {
        let a = Term::Iri(iri("http://a"));
        let b = Term::Literal(Literal::new("a"));
        let c = Term::Blank(BlankNode::new("a").unwrap());
        assert_eq!(compare_terms(&a, &b), Ordering::Less);
        assert_eq!(compare_terms(&a, &c), Ordering::Less);
        assert_eq!(compare_terms(&c, &b), Ordering::Less);
        assert_eq!(compare_terms(&a, &a), Ordering::Equal);
    }

    #[test]
    fn iri_order_follows_serialized_form() {
        // "<a!>" sorts before "<a>" because '!' < '>'.
        assert!(iri("http://a!") < iri("http://a"));
        assert!(iri("http://a") < iri("http://ab"));
    }

    #[test]
    fn literal_display_escapes() {
        let l = Literal::with_language("a \"q\"\\\n\t\r", "EN-gb").unwrap();
        assert_eq!(l.to_string(), "\"a \\\"q\\\"\\\\\\n\\t\\r\"@en-gb");
        assert!(Literal::with_language("x", "toolonglanguage").is_err());
        assert!(Literal::with_language("x", "").is_err());
    }

    #[test]
    fn literal_subject_rejected() {
        let r = Triple::new(Literal::new("x"), iri("http://p"), Literal::new("y"));
        assert_eq!(r, Err(ModelError::LiteralSubject));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            "[a-c!~#/]{0,4}".prop_map(|s| Term::Iri(iri(&format!("http://{s}")))),
            "[a-cA-C0-9]{1,3}".prop_map(|s| Term::Blank(BlankNode::new(s).unwrap())),
            ("[a-c\"\\\\\n ]{0,4}", proptest::option::of("[a-c]{1,2}")).prop_map(|(s, l)| {
                match l {
                    Some(l) => Term::Literal(Literal::with_language(s, &l).unwrap()),
                    None => Term::Literal(Literal::new(s)),
                }
            }),
        ]
    }

    fn naive_key(t: &Term) -> (u8, String) {
        (t.rank(), t.to_string())
    }

    proptest! {
        #[test]
        fn order_matches_serialized_keys(a in arb_term(), b in arb_term()) {
            prop_assert_eq!(compare_terms(&a, &b), naive_key(&a).cmp(&naive_key(&b)));
            prop_assert_eq!(compare_terms(&a, &b), compare_terms(&b, &a).reverse());
        }

        #[test]
        fn order_is_transitive(a in arb_term(), b in arb_term(), c in arb_term()) {
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }

        #[test]
        fn sorting_permutations_is_unique(mut terms in proptest::collection::vec(arb_term(), 0..100)) {
            let mut expected = terms.clone();
            expected.sort_by_key(naive_key);
            terms.reverse();
            terms.sort();
            prop_assert_eq!(terms, expected);
        }

        #[test]
        fn hash_shorthand_ends_with_name(name in "[A-Za-z][A-Za-z0-9_]{0,10}") {
            let expanded = PrefixMap::cerif().expand(&format!("#{name}")).unwrap();
            let suffix = format!("#{name}");
            prop_assert!(expanded.as_str().ends_with(&suffix));
        }
    }
}
