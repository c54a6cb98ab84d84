//! Turns structured research records into annotation triples and embeds
//! them into HTML pages.
//!
//! A record file looks like:
//!
//! ```json
//! {
//!   "base_uri": "http://auris.example.org/objects#",
//!   "records": [
//!     {"id": "p1", "type": "Researcher",
//!      "properties": {"expertise_skill": ["Semantic Web"],
//!                     "member_of": [{"@id": "org1"}]}}
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Iri, Literal, ModelError, PrefixMap, Term, Triple};
use crate::schema::Schema;
use crate::syntax::html::{scan, Node};
use crate::syntax::{serialize, TRIPLES_MEDIA_TYPE};
use crate::vocab;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid record file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid base URI {0:?}")]
    BadBase(String),
    #[error("invalid record id {0:?}")]
    BadId(String),
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("record {record}: unknown type {class}")]
    UnknownType { record: String, class: String },
    #[error("record {record}: unknown property {property}")]
    UnknownProperty { record: String, property: String },
    #[error("record {record}: reference {target:?} is neither a record id nor an absolute IRI")]
    DanglingReference { record: String, target: String },
    #[error("record {record}: {source}")]
    Model {
        record: String,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    Ref {
        #[serde(rename = "@id")]
        id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Value),
    Many(Vec<Value>),
}

fn values<'de, D>(de: D) -> Result<BTreeMap<String, Vec<Value>>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw: BTreeMap<String, OneOrMany> = BTreeMap::deserialize(de)?;
    Ok(raw
        .into_iter()
        .map(|(k, v)| match v {
            OneOrMany::One(v) => (k, vec![v]),
            OneOrMany::Many(vs) => (k, vs),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Record {
    pub id: String,
    #[serde(rename = "type")]
    pub class: String,
    #[serde(default, deserialize_with = "values")]
    pub properties: BTreeMap<String, Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RecordFile {
    pub base_uri: String,
    pub records: Vec<Record>,
}

impl RecordFile {
    pub fn from_json(text: &str) -> Result<Self, GenerateError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratedAnnotation {
    pub triples: BTreeSet<Triple>,
    pub subject_uris: BTreeMap<String, Iri>,
    pub warnings: Vec<String>,
}

impl GeneratedAnnotation {
    pub fn to_ntriples(&self) -> String {
        serialize(&self.triples)
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Class and property names default to the CERIF namespace; prefixed or
/// bracketed forms are expanded as written.
fn expand_token(token: &str, prefixes: &PrefixMap) -> Result<Iri, ModelError> {
    if token.starts_with('<') || token.contains(':') || token.starts_with('#') {
        prefixes.expand(token)
    } else {
        prefixes.expand(&format!("#{token}"))
    }
}

pub fn generate(
    rf: &RecordFile,
    schema: &Schema,
    strict: bool,
) -> Result<GeneratedAnnotation, GenerateError> {
    let prefixes = PrefixMap::cerif();
    Iri::new(rf.base_uri.as_str()).map_err(|_| GenerateError::BadBase(rf.base_uri.clone()))?;

    let mut out = GeneratedAnnotation::default();
    for record in &rf.records {
        if !valid_id(&record.id) {
            return Err(GenerateError::BadId(record.id.clone()));
        }
        let uri = Iri::new(format!("{}{}", rf.base_uri, record.id))
            .map_err(|_| GenerateError::BadId(record.id.clone()))?;
        if out.subject_uris.insert(record.id.clone(), uri).is_some() {
            return Err(GenerateError::DuplicateId(record.id.clone()));
        }
    }

    let model_err = |record: &Record| {
        let record = record.id.clone();
        move |source| GenerateError::Model { record, source }
    };
    for record in &rf.records {
        let subject = out.subject_uris[&record.id].clone();
        let class = expand_token(&record.class, &prefixes).map_err(model_err(record))?;
        if !schema.is_class(&class) {
            return Err(GenerateError::UnknownType {
                record: record.id.clone(),
                class: record.class.clone(),
            });
        }
        out.triples.insert(
            Triple::new(subject.clone(), vocab::rdf_type(), class).map_err(model_err(record))?,
        );

        for (name, vals) in &record.properties {
            let property = expand_token(name, &prefixes).map_err(model_err(record))?;
            if !schema.is_property(&property) {
                if strict {
                    return Err(GenerateError::UnknownProperty {
                        record: record.id.clone(),
                        property: name.clone(),
                    });
                }
                out.warnings
                    .push(format!("record {}: unknown property {name}", record.id));
            }
            for value in vals {
                let object: Term = match value {
                    Value::Text(text) => {
                        if text.to_ascii_lowercase().contains("</script") {
                            // the embedded block would end early
                            out.warnings.push(format!(
                                "record {}: value of {name} contains \"</script\" and cannot be embedded",
                                record.id
                            ));
                        }
                        Literal::new(text.as_str()).into()
                    }
                    Value::Ref { id } => match out.subject_uris.get(id) {
                        Some(target) => target.clone().into(),
                        None if id.contains("://") || id.starts_with("urn:") => {
                            Iri::new(id.as_str())
                                .map_err(|_| GenerateError::DanglingReference {
                                    record: record.id.clone(),
                                    target: id.clone(),
                                })?
                                .into()
                        }
                        None => {
                            return Err(GenerateError::DanglingReference {
                                record: record.id.clone(),
                                target: id.clone(),
                            })
                        }
                    },
                };
                out.triples.insert(
                    Triple::new(subject.clone(), property.clone(), object)
                        .map_err(model_err(record))?,
                );
            }
        }
    }
    Ok(out)
}

/// Inserts the annotation as a single triples block before `</head>`,
/// replacing any block embedded earlier.
pub fn embed(annotation: &GeneratedAnnotation, html: &str) -> String {
    let mut cleaned = String::with_capacity(html.len());
    let mut last = 0;
    for node in scan(html) {
        if let Node::Raw { span, .. } = &node {
            if node.is_triples_script() {
                cleaned.push_str(&html[last..span.start]);
                last = span.end;
                if html[last..].starts_with('\n') {
                    last += 1;
                }
            }
        }
    }
    cleaned.push_str(&html[last..]);

    let block = format!(
        "<script type=\"{TRIPLES_MEDIA_TYPE}\">\n{}</script>\n",
        annotation.to_ntriples()
    );
    let head_end = scan(&cleaned).into_iter().find_map(|node| match node {
        Node::End { name, span } if name == "head" => Some(span.start),
        _ => None,
    });
    match head_end {
        Some(at) => format!("{}{block}{}", &cleaned[..at], &cleaned[at..]),
        None => format!("{block}{cleaned}"),
    }
}
