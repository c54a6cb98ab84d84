//! The shipped research-information ontology.
//!
//! Class local names are CamelCase renderings of the ontology terms; the
//! original wording is kept as each class's `rdfs:label`. Where a term
//! occurs twice ("Information system" under both Software and Site) the
//! Site variant is named `InformationSystemSite`, and the Product subtypes
//! "Fundamental"/"Applied" become `FundamentalResult`/`AppliedResult`.

use crate::model::Triple;
use crate::syntax::parse_triples;

pub const BUNDLED_SCHEMA_NT: &str = include_str!("../../data/cerif.nt");

/// Top-level classes of the ontology.
pub const CERIF_ROOT_CLASSES: [&str; 11] = [
    "OrganizationUnit",
    "Project",
    "Person",
    "Product",
    "Event",
    "Publication",
    "Patent",
    "Equipment",
    "MultimediaElement",
    "Site",
    "ResearchTopic",
];

/// Subtype terms tallied by hand from the ontology term table:
/// organization units 14, projects 4, persons 2, products 11, events 7,
/// publications 12, multimedia elements 10, sites 9.
pub const TABLE_TERM_COUNT: usize = 69;

pub const BUNDLED_CLASS_COUNT: usize = TABLE_TERM_COUNT + CERIF_ROOT_CLASSES.len();

pub const BUNDLED_PROPERTY_COUNT: usize = 13;

pub fn bundled_cerif_schema() -> Vec<Triple> {
    let outcome = parse_triples(BUNDLED_SCHEMA_NT, "bundled-schema");
    debug_assert!(outcome.errors.is_empty(), "{:?}", outcome.errors);
    outcome.triples
}
