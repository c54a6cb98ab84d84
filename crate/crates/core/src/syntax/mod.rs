//! Exchange formats: the triple line grammar and HTML-embedded annotations.

pub mod html;
pub mod triples;

pub use html::{extract_annotations, AnnotationExtract, META_LINK_REL, TRIPLES_MEDIA_TYPE};
pub use triples::{parse_line, parse_triples, serialize, LineError, ParseOutcome};
