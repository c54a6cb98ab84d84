//! The five-page fixture site and its hand-enumerated expectations.
//!
//! ```text
//! A -> B, C      B -> D      C -> off-host, mailto:
//! D -> A (cycle), links meta/d.nt
//! E is never linked
//! ```

use std::collections::{BTreeMap, BTreeSet};

use cris_core::model::{Iri, Triple};
use cris_core::store::scope_blanks;
use cris_core::syntax::parse_line;

use crate::http::Resource;

pub const OFF_HOST: &str = "http://offsite.example.org/elsewhere.html";

const A_BLOCK: &str = r#"<http://auris.example.org/obj#proj1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Project> .
<http://auris.example.org/obj#proj1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#title> "Ontology-based retrieval"@en .
<http://auris.example.org/obj#proj1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#expertise_skill> "Semantic Web" .
"#;

const B_BLOCK: &str = r#"<http://auris.example.org/obj#p1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Researcher> .
<http://auris.example.org/obj#proj1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#project_persons> <http://auris.example.org/obj#p1> .
<http://auris.example.org/obj#p1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#member_of> _:lab .
_:lab <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#name> "Knowledge Lab" .
"#;

// second block on the same page; also repeats a triple from A
const B_BLOCK_2: &str = r#"<http://auris.example.org/obj#p1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#name> "Ann Example" .
<http://auris.example.org/obj#proj1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#expertise_skill> "Semantic Web" .
"#;

const C_BLOCK: &str = r#"<http://auris.example.org/obj#s2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Student> .
<http://auris.example.org/obj#proj1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#project_persons> <http://auris.example.org/obj#s2> .
"#;

const D_META: &str = r#"# schema extension published alongside the page
<http://auris.example.org/schema#SoftwareProject> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Project> .
<http://auris.example.org/schema#SoftwareProject> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2000/01/rdf-schema#Class> .
<http://auris.example.org/obj#sw1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://auris.example.org/schema#SoftwareProject> .
<http://auris.example.org/obj#sw1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#expertise_skill> "Semantic Web" .
<http://auris.example.org/obj#sw1> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#project_persons> <http://auris.example.org/obj#p1> .
"#;

const E_BLOCK: &str = r#"<http://auris.example.org/obj#hidden> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Person> .
"#;

fn page(title: &str, blocks: &[&str], head_extra: &str, links: &[&str]) -> String {
    let scripts: String = blocks
        .iter()
        .map(|b| format!("<script type=\"text/x-cris-triples\">\n{b}</script>\n"))
        .collect();
    let anchors: String = links
        .iter()
        .map(|l| format!("<li><a href=\"{l}\">{l}</a></li>\n"))
        .collect();
    format!(
        "<!DOCTYPE html>\n<html><head><title>{title}</title>\n{head_extra}{scripts}</head>\n<body><h1>{title}</h1>\n<ul>\n{anchors}</ul></body></html>\n"
    )
}

/// Routes of the fixture site, relative links only.
pub fn fixture_site() -> BTreeMap<String, Resource> {
    BTreeMap::from([
        (
            "/a.html".to_string(),
            Resource::html(&page(
                "Project A",
                &[A_BLOCK],
                "",
                &["b.html", "c.html", "a.html#top"],
            )),
        ),
        (
            "/b.html".to_string(),
            Resource::html(&page(
                "Person B",
                &[B_BLOCK, B_BLOCK_2],
                "",
                &["d.html", "./a.html"],
            )),
        ),
        (
            "/c.html".to_string(),
            Resource::html(&page(
                "Student C",
                &[C_BLOCK],
                "",
                &[OFF_HOST, "mailto:office@auris.example.org"],
            )),
        ),
        (
            "/d.html".to_string(),
            Resource::html(&page(
                "Software D",
                &[],
                "<link rel=\"cris-meta\" href=\"meta/d.nt\">\n",
                &["a.html"],
            )),
        ),
        (
            "/meta/d.nt".to_string(),
            Resource::new("application/n-triples", D_META),
        ),
        (
            "/e.html".to_string(),
            Resource::html(&page("Unlinked E", &[E_BLOCK], "", &["a.html"])),
        ),
    ])
}

/// Paths a depth-2 crawl from `/a.html` fetches.
pub fn expected_fetched_paths() -> BTreeSet<String> {
    ["/a.html", "/b.html", "/c.html", "/d.html", "/meta/d.nt"]
        .into_iter()
        .map(String::from)
        .collect()
}

fn lines(block: &str, scope: &str) -> Vec<Triple> {
    block
        .lines()
        .filter_map(|l| parse_line(l).expect("fixture line"))
        .map(|t| scope_blanks(&t, scope))
        .collect()
}

/// Hand-enumerated union of every annotation reachable within depth 2,
/// keyed by the source it is attributed to. `base` is the server origin,
/// e.g. `http://127.0.0.1:4000`.
pub fn expected_by_source(base: &str) -> BTreeMap<Iri, BTreeSet<Triple>> {
    let src = |p: &str| Iri::new(format!("{base}{p}")).unwrap();
    let b_url = src("/b.html");
    let mut b: BTreeSet<Triple> = lines(B_BLOCK, b_url.as_str()).into_iter().collect();
    b.extend(lines(B_BLOCK_2, b_url.as_str()));
    BTreeMap::from([
        (
            src("/a.html"),
            lines(A_BLOCK, src("/a.html").as_str())
                .into_iter()
                .collect(),
        ),
        (b_url, b),
        (
            src("/c.html"),
            lines(C_BLOCK, src("/c.html").as_str())
                .into_iter()
                .collect(),
        ),
        (
            src("/meta/d.nt"),
            lines(D_META, src("/meta/d.nt").as_str())
                .into_iter()
                .collect(),
        ),
    ])
}

pub fn expected_triples(base: &str) -> BTreeSet<Triple> {
    expected_by_source(base).into_values().flatten().collect()
}

/// Triples only the unlinked page carries.
pub fn unreachable_triples() -> Vec<Triple> {
    lines(E_BLOCK, "e")
}
