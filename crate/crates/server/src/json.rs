//! JSON shapes of the API responses.

use cris_core::model::{Iri, Term};
use cris_core::schema::Schema;
use cris_core::store::{format_timestamp, Provenance, StoreStats};
use cris_core::syntax::LineError;
use cris_core::BindingTable;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// `{"iri": ..}`, `{"blank": ..}` or `{"literal": .., "lang": ..}`.
pub fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({ "iri": iri.as_str() }),
        Term::Blank(b) => json!({ "blank": b.label() }),
        Term::Literal(lit) => match lit.language() {
            Some(lang) => json!({ "literal": lit.lexical(), "lang": lang }),
            None => json!({ "literal": lit.lexical() }),
        },
    }
}

pub fn table_json(table: &BindingTable) -> Value {
    let rows: Vec<Vec<Value>> = table
        .rows
        .iter()
        .map(|row| row.iter().map(term_json).collect())
        .collect();
    json!({ "columns": table.columns, "rows": rows })
}

#[derive(Debug, Serialize)]
pub struct LineErrorJson {
    pub line: usize,
    pub message: String,
}

impl From<&LineError> for LineErrorJson {
    fn from(e: &LineError) -> Self {
        LineErrorJson {
            line: e.line,
            message: e.message.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatementsJson {
    pub added: usize,
    pub duplicate: usize,
    pub errors: Vec<LineErrorJson>,
}

#[derive(Debug, Serialize)]
pub struct StatsJson {
    #[serde(flatten)]
    pub store: StoreStats,
    pub instance_triples: usize,
    pub schema_classes: usize,
    pub schema_properties: usize,
}

pub fn provenance_json(prov: &Provenance) -> Vec<Value> {
    prov.iter()
        .map(|(src, at)| json!({ "source": src.to_string(), "fetched": format_timestamp(*at) }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    pub iri: String,
    pub label: String,
    pub children: Vec<ClassNode>,
}

fn local_name(iri: &Iri) -> &str {
    let s = iri.as_str();
    s.rsplit(['#', '/'])
        .next()
        .filter(|n| !n.is_empty())
        .unwrap_or(s)
}

/// Forest of schema classes. A class is listed under each of its direct
/// parents; classes without parents are the roots. Classes reachable only
/// through a subclass cycle are rooted at the smallest member.
pub fn class_tree(schema: &Schema) -> Vec<ClassNode> {
    let mut children: std::collections::BTreeMap<&Iri, Vec<&Iri>> = Default::default();
    for (child, parent) in &schema.subclass_edges {
        if child != parent {
            children.entry(parent).or_default().push(child);
        }
    }
    let mut placed = std::collections::BTreeSet::new();
    let mut path = Vec::new();
    let mut roots: Vec<ClassNode> = schema
        .classes
        .iter()
        .filter(|c| schema.parents(c).next().is_none())
        .map(|c| build(c, schema, &children, &mut placed, &mut path))
        .collect();
    for c in &schema.classes {
        if !placed.contains(c) {
            roots.push(build(c, schema, &children, &mut placed, &mut path));
        }
    }
    roots
}

fn build<'a>(
    class: &'a Iri,
    schema: &'a Schema,
    children: &std::collections::BTreeMap<&'a Iri, Vec<&'a Iri>>,
    placed: &mut std::collections::BTreeSet<&'a Iri>,
    path: &mut Vec<&'a Iri>,
) -> ClassNode {
    placed.insert(class);
    path.push(class);
    let kids = children
        .get(class)
        .into_iter()
        .flatten()
        .filter(|k| !path.contains(k))
        .copied()
        .collect::<Vec<_>>()
        .into_iter()
        .map(|k| build(k, schema, children, placed, path))
        .collect();
    path.pop();
    ClassNode {
        iri: class.as_str().to_string(),
        label: schema
            .label(class)
            .map(str::to_string)
            .unwrap_or_else(|| local_name(class).to_string()),
        children: kids,
    }
}

pub fn count_nodes(nodes: &[ClassNode]) -> usize {
    nodes.iter().map(|n| 1 + count_nodes(&n.children)).sum()
}
