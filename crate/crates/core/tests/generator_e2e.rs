//! generate -> embed -> extract -> parse over a 50-record fixture.

use std::collections::BTreeSet;

use cris_core::generator::{embed, generate, RecordFile};
use cris_core::model::{Iri, Triple};
use cris_core::schema::{bundled_cerif_schema, closure, load_schema, validate};
use cris_core::syntax::{extract_annotations, parse_triples};
use cris_testkit::fixtures::{records_json, PLAIN_PAGE};

#[test]
fn fifty_records_round_trip_through_html() {
    let schema = load_schema(&bundled_cerif_schema()).unwrap();
    let ct = closure(&schema);
    let rf = RecordFile::from_json(&records_json()).unwrap();
    let ann = generate(&rf, &schema, true).unwrap();
    assert_eq!(ann.subject_uris.len(), 50);
    assert!(ann.warnings.is_empty(), "{:?}", ann.warnings);

    let again = generate(&rf, &schema, true).unwrap();
    assert_eq!(again.to_ntriples(), ann.to_ntriples());
    assert_eq!(
        ann.subject_uris["proj3"].as_str(),
        "http://auris.example.org/obj#proj3"
    );

    let html = embed(&ann, PLAIN_PAGE);
    assert_eq!(embed(&ann, &html), html);
    let extract = extract_annotations(
        &html,
        &Iri::new("http://auris.example.org/group.html").unwrap(),
    );
    assert_eq!(extract.inline_blocks.len(), 1);
    let outcome = parse_triples(&extract.inline_blocks[0].1, "group");
    assert!(outcome.errors.is_empty());
    let back: BTreeSet<Triple> = outcome.triples.into_iter().collect();
    assert_eq!(back, ann.triples);

    let report = validate(&back, &schema, &ct);
    assert_eq!(report.errors().count(), 0);
    assert!(report.is_empty(), "{:?}", report.findings);
}
