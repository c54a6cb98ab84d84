//! Seeded random instances: schema graphs, stores and queries.

use std::collections::BTreeSet;

use cris_core::model::{BlankNode, Iri, Literal, Term, Triple};
use cris_core::vocab;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NS: &str = "http://random.example.org/";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn node(kind: &str, i: usize) -> Iri {
    Iri::new(format!("{NS}{kind}{i}")).unwrap()
}

/// Random directed graph over `n` nodes; back edges make cycles likely.
pub fn random_edges(rng: &mut impl Rng, n: usize, max_edges: usize) -> Vec<(usize, usize)> {
    let count = rng.random_range(0..=max_edges);
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = if rng.random_bool(0.8) && a > 0 {
                rng.random_range(0..a)
            } else {
                rng.random_range(0..n)
            };
            (a, b)
        })
        .collect()
}

pub fn class_iri(i: usize) -> Iri {
    node("C", i)
}

pub fn property_iri(i: usize) -> Iri {
    node("p", i)
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub schema: Vec<Triple>,
    pub data: Vec<Triple>,
    pub classes: Vec<Iri>,
    pub properties: Vec<Iri>,
    pub literals: Vec<String>,
}

impl RandomInstance {
    /// Schema and instance triples together, as a harvested store holds them.
    pub fn all_triples(&self) -> Vec<Triple> {
        let set: BTreeSet<Triple> = self.schema.iter().chain(&self.data).cloned().collect();
        set.into_iter().collect()
    }
}

const LITERALS: [&str; 6] = [
    "Semantic Web",
    "Databases",
    "semantic web",
    "Web",
    "a*b",
    "",
];

/// A schema of at most 30 classes and 6 properties with a store of at most
/// 500 triples typed against it.
pub fn random_instance(rng: &mut impl Rng) -> RandomInstance {
    let n_classes = rng.random_range(1..=30);
    let n_props = rng.random_range(1..=6);
    let classes: Vec<Iri> = (0..n_classes).map(class_iri).collect();
    let properties: Vec<Iri> = (0..n_props).map(property_iri).collect();
    let class_decl = Iri::new(vocab::RDFS_CLASS).unwrap();
    let prop_decl = Iri::new(vocab::RDF_PROPERTY).unwrap();
    let sub_class = Iri::new(vocab::RDFS_SUBCLASS_OF).unwrap();
    let sub_prop = Iri::new(vocab::RDFS_SUBPROPERTY_OF).unwrap();

    let mut schema = Vec::new();
    for c in &classes {
        schema.push(Triple::new(c.clone(), vocab::rdf_type(), class_decl.clone()).unwrap());
    }
    for p in &properties {
        schema.push(Triple::new(p.clone(), vocab::rdf_type(), prop_decl.clone()).unwrap());
    }
    for (a, b) in random_edges(rng, n_classes, n_classes + 5) {
        schema
            .push(Triple::new(classes[a].clone(), sub_class.clone(), classes[b].clone()).unwrap());
    }
    for (a, b) in random_edges(rng, n_props, n_props) {
        schema.push(
            Triple::new(
                properties[a].clone(),
                sub_prop.clone(),
                properties[b].clone(),
            )
            .unwrap(),
        );
    }

    let n_individuals = rng.random_range(1..=50);
    let budget = rng.random_range(0..=(500 - schema.len()));
    let individual = |rng: &mut dyn rand::RngCore| -> Term {
        let i = rng.random_range(0..n_individuals);
        if i % 7 == 6 {
            BlankNode::new(format!("b{i}")).unwrap().into()
        } else {
            node("x", i).into()
        }
    };
    let mut data = Vec::new();
    for _ in 0..budget {
        let subject = individual(rng);
        let t = match rng.random_range(0..10) {
            0..=2 => {
                // occasionally typed by a class the schema never declares
                let class = if rng.random_bool(0.05) {
                    node("Undeclared", 0)
                } else {
                    classes.choose(rng).unwrap().clone()
                };
                Triple::new(subject, vocab::rdf_type(), class)
            }
            3..=7 => Triple::new(
                subject,
                properties.choose(rng).unwrap().clone(),
                individual(rng),
            ),
            _ => {
                let text = *LITERALS.choose(rng).unwrap();
                let lit = if rng.random_bool(0.2) {
                    Literal::with_language(text, "en").unwrap()
                } else {
                    Literal::new(text)
                };
                Triple::new(subject, properties.choose(rng).unwrap().clone(), lit)
            }
        };
        data.push(t.unwrap());
    }
    RandomInstance {
        schema,
        data,
        classes,
        properties,
        literals: LITERALS.iter().map(|s| s.to_string()).collect(),
    }
}

fn quote(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

const VARS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// Query text with at most 3 patterns of at most 3 steps and 2 conditions.
/// Every pattern after the first shares a variable with an earlier one.
pub fn random_query(rng: &mut impl Rng, inst: &RandomInstance) -> String {
    if rng.random_bool(0.2) {
        let strict = if rng.random_bool(0.3) { "^" } else { "" };
        return format!("{strict}{}", inst.classes.choose(rng).unwrap());
    }
    let mut bound: Vec<&str> = Vec::new();
    let mut patterns = Vec::new();
    for k in 0..rng.random_range(1..=3) {
        let steps = rng.random_range(0..=3);
        let mut vars: Vec<&str> = Vec::new();
        while vars.len() < steps + 1 {
            let v = *VARS.choose(rng).unwrap();
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        if k > 0 && !vars.iter().any(|v| bound.contains(v)) {
            let shared = *bound.choose(rng).unwrap();
            let at = rng.random_range(0..vars.len());
            vars[at] = shared;
            // keep variables distinct within the pattern
            vars.dedup();
            let mut seen = BTreeSet::new();
            vars.retain(|v| seen.insert(*v));
        }
        let strict = |rng: &mut dyn rand::RngCore| if rng.random_bool(0.25) { "^" } else { "" };
        let mut text = format!(
            "{}{} {{{}}}",
            strict(rng),
            inst.classes.choose(rng).unwrap(),
            vars[0]
        );
        for v in &vars[1..] {
            text.push_str(&format!(
                " . {}{} {{{v}}}",
                strict(rng),
                inst.properties.choose(rng).unwrap()
            ));
        }
        patterns.push(text);
        for v in vars {
            if !bound.contains(&v) {
                bound.push(v);
            }
        }
    }
    let mut projection: Vec<&str> = Vec::new();
    for _ in 0..rng.random_range(1..=bound.len().min(3)) {
        let v = *bound.choose(rng).unwrap();
        if !projection.contains(&v) {
            projection.push(v);
        }
    }
    let mut conditions = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let a = *bound.choose(rng).unwrap();
        let lit = inst.literals.choose(rng).unwrap();
        conditions.push(match rng.random_range(0..3) {
            0 => format!("{a} = {}", bound.choose(rng).unwrap()),
            1 => format!("{a} = {}", quote(lit)),
            _ => {
                let cut = rng.random_range(0..=lit.len());
                let cut = (0..=cut)
                    .rev()
                    .find(|&i| lit.is_char_boundary(i))
                    .unwrap_or(0);
                if rng.random_bool(0.5) {
                    format!("{a} like {}", quote(&format!("{}*", &lit[..cut])))
                } else {
                    format!("{a} like {}", quote(&format!("*{}", &lit[cut..])))
                }
            }
        });
    }
    let mut q = format!(
        "select {} from {}",
        projection.join(", "),
        patterns.join(", ")
    );
    if !conditions.is_empty() {
        q.push_str(" where ");
        q.push_str(&conditions.join(" and "));
    }
    q
}

/// Class declarations for `0..n` plus subclass and subproperty edges, as
/// schema triples.
pub fn hierarchy_triples(
    n: usize,
    class_edges: &[(usize, usize)],
    property_edges: &[(usize, usize)],
) -> Vec<Triple> {
    let decl = Iri::new(vocab::RDFS_CLASS).unwrap();
    let sub_class = Iri::new(vocab::RDFS_SUBCLASS_OF).unwrap();
    let sub_prop = Iri::new(vocab::RDFS_SUBPROPERTY_OF).unwrap();
    let mut triples: Vec<Triple> = (0..n)
        .map(|i| Triple::new(class_iri(i), vocab::rdf_type(), decl.clone()).unwrap())
        .collect();
    triples.extend(
        class_edges
            .iter()
            .map(|&(a, b)| Triple::new(class_iri(a), sub_class.clone(), class_iri(b)).unwrap()),
    );
    triples.extend(
        property_edges.iter().map(|&(a, b)| {
            Triple::new(property_iri(a), sub_prop.clone(), property_iri(b)).unwrap()
        }),
    );
    triples
}
