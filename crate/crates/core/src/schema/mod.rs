//! Research ontology: classes, properties, their hierarchies and
//! domain/range declarations, loaded from ordinary schema triples.

mod bundled;
mod closure;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{Iri, Term, Triple};
use crate::vocab;

pub use bundled::{
    bundled_cerif_schema, BUNDLED_CLASS_COUNT, BUNDLED_PROPERTY_COUNT, BUNDLED_SCHEMA_NT,
    CERIF_ROOT_CLASSES, TABLE_TERM_COUNT,
};
pub use closure::{closure, ClosureTable};
pub use validate::{validate, Finding, Severity, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("invalid schema triple {triple}: {reason}")]
    InvalidSchemaTriple {
        triple: String,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RangeTarget {
    Class(Iri),
    /// `rdfs:Literal`: values are literals.
    Literal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub classes: BTreeSet<Iri>,
    pub subclass_edges: BTreeSet<(Iri, Iri)>,
    pub properties: BTreeSet<Iri>,
    pub subproperty_edges: BTreeSet<(Iri, Iri)>,
    pub domain: BTreeMap<Iri, Iri>,
    pub range: BTreeMap<Iri, RangeTarget>,
    pub labels: BTreeMap<Iri, String>,
}

impl Schema {
    pub fn is_class(&self, iri: &Iri) -> bool {
        self.classes.contains(iri)
    }

    pub fn is_property(&self, iri: &Iri) -> bool {
        self.properties.contains(iri)
    }

    /// Direct parents of `class` (excluding itself).
    pub fn parents<'a>(&'a self, class: &'a Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        self.subclass_edges
            .iter()
            .filter(move |(c, p)| c == class && p != class)
            .map(|(_, p)| p)
    }

    pub fn label(&self, iri: &Iri) -> Option<&str> {
        self.labels.get(iri).map(String::as_str)
    }
}

/// Loads a schema, rejecting the dataset on the first malformed schema
/// assertion.
pub fn load_schema<'a>(
    dataset: impl IntoIterator<Item = &'a Triple>,
) -> Result<Schema, SchemaError> {
    let (schema, errors) = load_schema_lenient(dataset);
    match errors.into_iter().next() {
        Some(err) => Err(err),
        None => Ok(schema),
    }
}

/// Loads a schema, skipping malformed schema assertions and returning them.
///
/// Harvested data is untrusted; one bad declaration should not discard the
/// rest of the schema.
pub fn load_schema_lenient<'a>(
    dataset: impl IntoIterator<Item = &'a Triple>,
) -> (Schema, Vec<SchemaError>) {
    let mut schema = Schema::default();
    let mut errors = Vec::new();
    let sorted: BTreeSet<&Triple> = dataset.into_iter().collect();

    for triple in sorted {
        let predicate = triple.predicate().as_str();
        let Some(subject) = triple.subject().as_iri() else {
            continue;
        };
        let object = triple.object();
        if vocab::RESOURCE_VALUED_SCHEMA_PREDICATES.contains(&predicate) && object.is_literal() {
            errors.push(SchemaError::InvalidSchemaTriple {
                triple: triple.to_string(),
                reason: "reserved predicate with literal object",
            });
            continue;
        }
        let object_iri = object.as_iri();
        match predicate {
            vocab::RDF_TYPE => match object_iri.map(Iri::as_str) {
                Some(vocab::RDFS_CLASS) => {
                    schema.classes.insert(subject.clone());
                }
                Some(vocab::RDF_PROPERTY) => {
                    schema.properties.insert(subject.clone());
                }
                _ => {}
            },
            vocab::RDFS_SUBCLASS_OF => {
                if let Some(parent) = object_iri {
                    schema.classes.insert(subject.clone());
                    schema.classes.insert(parent.clone());
                    schema
                        .subclass_edges
                        .insert((subject.clone(), parent.clone()));
                }
            }
            vocab::RDFS_SUBPROPERTY_OF => {
                if let Some(parent) = object_iri {
                    schema.properties.insert(subject.clone());
                    schema.properties.insert(parent.clone());
                    schema
                        .subproperty_edges
                        .insert((subject.clone(), parent.clone()));
                }
            }
            vocab::RDFS_DOMAIN => {
                if let Some(class) = object_iri {
                    schema.properties.insert(subject.clone());
                    schema.classes.insert(class.clone());
                    schema
                        .domain
                        .entry(subject.clone())
                        .or_insert_with(|| class.clone());
                }
            }
            vocab::RDFS_RANGE => {
                if let Some(target) = object_iri {
                    schema.properties.insert(subject.clone());
                    let target = if target.as_str() == vocab::RDFS_LITERAL {
                        RangeTarget::Literal
                    } else {
                        schema.classes.insert(target.clone());
                        RangeTarget::Class(target.clone())
                    };
                    schema.range.entry(subject.clone()).or_insert(target);
                }
            }
            vocab::RDFS_LABEL => {
                if let Term::Literal(lit) = object {
                    schema
                        .labels
                        .entry(subject.clone())
                        .or_insert_with(|| lit.lexical().to_string());
                }
            }
            _ => {}
        }
    }
    (schema, errors)
}

/// True for triples that declare schema rather than describe instances.
pub fn is_schema_triple(triple: &Triple) -> bool {
    if vocab::is_schema_predicate(triple.predicate()) {
        return true;
    }
    triple.predicate().as_str() == vocab::RDF_TYPE
        && matches!(
            triple.object().as_iri().map(Iri::as_str),
            Some(vocab::RDFS_CLASS | vocab::RDF_PROPERTY)
        )
}
