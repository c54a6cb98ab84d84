//! Open-world domain/range checking. Findings are advisory; unknown
//! predicates are never reported.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{Iri, Term, Triple};
use crate::vocab;

use super::{ClosureTable, RangeTarget, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub triple: Triple,
    pub message: String,
    pub severity: Severity,
}

/// Findings ordered by triple, then message.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
    }
}

pub fn validate<'a>(
    dataset: impl IntoIterator<Item = &'a Triple>,
    schema: &Schema,
    ct: &ClosureTable,
) -> ValidationReport {
    let triples: BTreeSet<&Triple> = dataset.into_iter().collect();
    let rdf_type = vocab::rdf_type();

    let mut types: BTreeMap<&Term, Vec<&Iri>> = BTreeMap::new();
    for t in &triples {
        if t.predicate() == &rdf_type {
            if let Some(class) = t.object().as_iri() {
                types.entry(t.subject()).or_default().push(class);
            }
        }
    }
    let fits = |term: &Term, class: &Iri| {
        types
            .get(term)
            .is_some_and(|ts| ts.iter().any(|t| ct.is_subclass(t, class)))
    };

    // Missing type facts only warrant a warning; a literal where a resource
    // belongs (or the reverse) cannot be repaired by adding data.
    let mut findings = BTreeSet::new();
    let mut report = |triple: &Triple, message: String, severity: Severity| {
        findings.insert(Finding {
            triple: triple.clone(),
            message,
            severity,
        });
    };
    let warn = Severity::Warning;
    let error = Severity::Error;

    for t in &triples {
        let predicate = t.predicate();
        if predicate == &rdf_type {
            if let Some(class) = t.object().as_iri() {
                let meta = matches!(class.as_str(), vocab::RDFS_CLASS | vocab::RDF_PROPERTY);
                if !meta && !schema.is_class(class) {
                    report(t, format!("type {class} is not a declared class"), warn);
                }
            }
            continue;
        }
        if !schema.is_property(predicate) {
            continue;
        }
        for property in ct.superproperties_of(predicate) {
            if let Some(domain) = schema.domain.get(&property) {
                if !fits(t.subject(), domain) {
                    report(
                        t,
                        format!("subject is not in domain {domain} of {property}"),
                        warn,
                    );
                }
            }
            match schema.range.get(&property) {
                Some(RangeTarget::Literal) if !t.object().is_literal() => {
                    report(
                        t,
                        format!("object of {property} should be a literal"),
                        error,
                    );
                }
                Some(RangeTarget::Class(range)) if t.object().is_literal() => {
                    report(
                        t,
                        format!("literal object outside range {range} of {property}"),
                        error,
                    );
                }
                Some(RangeTarget::Class(range)) if !fits(t.object(), range) => {
                    report(
                        t,
                        format!("object is not in range {range} of {property}"),
                        warn,
                    );
                }
                _ => {}
            }
        }
    }

    let mut findings: Vec<Finding> = findings.into_iter().collect();
    findings.sort_by(|a, b| (&a.triple, &a.message).cmp(&(&b.triple, &b.message)));
    ValidationReport { findings }
}
