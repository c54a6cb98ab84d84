//! Reserved vocabulary IRIs and the CERIF namespace.

use crate::model::Iri;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const CERIF_NS: &str = "http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_LITERAL: &str = "http://www.w3.org/2000/01/rdf-schema#Literal";

/// Builds an IRI from a compile-time constant.
pub fn iri(constant: &str) -> Iri {
    Iri::new(constant).expect("vocabulary constants are valid IRIs")
}

pub fn rdf_type() -> Iri {
    iri(RDF_TYPE)
}

pub fn cerif_namespace() -> Iri {
    iri(CERIF_NS)
}

/// `name` in the CERIF namespace.
pub fn cerif(name: &str) -> Iri {
    Iri::new(format!("{CERIF_NS}{name}")).expect("CERIF local names are IRI-safe")
}

/// Predicates whose objects must be resources for a schema to be well formed.
pub const RESOURCE_VALUED_SCHEMA_PREDICATES: [&str; 5] = [
    RDF_TYPE,
    RDFS_SUBCLASS_OF,
    RDFS_SUBPROPERTY_OF,
    RDFS_DOMAIN,
    RDFS_RANGE,
];

/// True for predicates that carry schema (rather than instance) information.
pub fn is_schema_predicate(predicate: &Iri) -> bool {
    matches!(
        predicate.as_str(),
        RDFS_SUBCLASS_OF | RDFS_SUBPROPERTY_OF | RDFS_DOMAIN | RDFS_RANGE | RDFS_LABEL
    )
}
