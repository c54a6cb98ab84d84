//! Core of the research-information metadata system: RDF terms, the
//! bundled ontology and its closure, the triple store, the query engine,
//! and annotation generation.

pub mod generator;
pub mod model;
pub mod query;
pub mod schema;
pub mod store;
pub mod syntax;
pub mod vocab;

pub use model::{BlankNode, Iri, Literal, ModelError, PrefixMap, Term, Triple};
pub use query::{evaluate, parse_query, BindingTable, QueryAst, QueryError};
pub use schema::{closure, load_schema, ClosureTable, Schema};
pub use store::{MergeCounts, MergeMode, Snapshot, SourceId, Store};
