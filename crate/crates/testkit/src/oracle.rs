//! Brute-force reference implementations. Nothing here touches the store
//! indexes or the closure table; reachability and joins are recomputed from
//! the raw triples every time.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cris_core::model::{Iri, Term, Triple};
use cris_core::query::{Condition, PathPattern, QueryAst};
use cris_core::vocab;
use regex::Regex;

/// Reflexive-transitive reachability over directed edges, one BFS per node.
pub fn bfs_reachability<N: Ord + Clone>(
    nodes: impl IntoIterator<Item = N>,
    edges: &[(N, N)],
) -> BTreeMap<N, BTreeSet<N>> {
    let mut adj: BTreeMap<&N, Vec<&N>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    let mut all: BTreeSet<N> = nodes.into_iter().collect();
    for (a, b) in edges {
        all.insert(a.clone());
        all.insert(b.clone());
    }
    all.iter()
        .map(|start| {
            let mut seen = BTreeSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            while let Some(n) = queue.pop_front() {
                for next in adj.get(n).into_iter().flatten() {
                    if seen.insert((*next).clone()) {
                        queue.push_back(next);
                    }
                }
            }
            (start.clone(), seen)
        })
        .collect()
}

/// Linear scan filter.
pub fn match_oracle(
    triples: &[Triple],
    s: Option<&Term>,
    p: Option<&Iri>,
    o: Option<&Term>,
) -> Vec<Triple> {
    let mut out: Vec<Triple> = triples
        .iter()
        .filter(|t| s.is_none_or(|s| t.subject() == s))
        .filter(|t| p.is_none_or(|p| t.predicate() == p))
        .filter(|t| o.is_none_or(|o| t.object() == o))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

fn edges_of(schema: &[Triple], predicate: &str) -> Vec<(Iri, Iri)> {
    schema
        .iter()
        .filter(|t| t.predicate().as_str() == predicate)
        .filter_map(|t| Some((t.subject().as_iri()?.clone(), t.object().as_iri()?.clone())))
        .collect()
}

/// Does `from` reach `to` along the edges (reflexively)?
fn reaches(edges: &[(Iri, Iri)], from: &Iri, to: &Iri) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        for (a, b) in edges {
            if a == n && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    false
}

fn like_regex(pattern: &str) -> Regex {
    let body: Vec<String> = pattern.split('*').map(regex::escape).collect();
    Regex::new(&format!("^(?s:{})$", body.join(".*"))).expect("escaped pattern")
}

type Assignment = BTreeMap<String, Term>;

struct Scan<'a> {
    triples: &'a [Triple],
    sub_class: Vec<(Iri, Iri)>,
    sub_prop: Vec<(Iri, Iri)>,
    /// memoized `reaches` answers, keyed by (is_class, from, to)
    memo: RefCell<BTreeMap<(bool, Iri, Iri), bool>>,
}

impl Scan<'_> {
    fn reaches(&self, class: bool, from: &Iri, to: &Iri) -> bool {
        let key = (class, from.clone(), to.clone());
        if let Some(&hit) = self.memo.borrow().get(&key) {
            return hit;
        }
        let edges = if class {
            &self.sub_class
        } else {
            &self.sub_prop
        };
        let answer = reaches(edges, from, to);
        self.memo.borrow_mut().insert(key, answer);
        answer
    }

    fn typed(&self, x: &Term, class: &Iri, strict: bool) -> bool {
        let rdf_type = vocab::rdf_type();
        self.triples.iter().any(|t| {
            t.subject() == x
                && t.predicate() == &rdf_type
                && t.object().as_iri().is_some_and(|d| {
                    if strict {
                        d == class
                    } else {
                        self.reaches(true, d, class)
                    }
                })
        })
    }

    /// Every extension of `partial` that satisfies `pattern`, binding one
    /// variable at a time and checking it against earlier bindings.
    /// Conditions are checked as soon as all of their variables are bound.
    fn extend(
        &self,
        partial: &Assignment,
        pattern: &PathPattern,
        filter: &[Condition],
    ) -> Vec<Assignment> {
        let admissible = |row: &Assignment| {
            filter
                .iter()
                .filter(|c| c.vars().iter().all(|v| row.contains_key(&v.0)))
                .all(|c| holds(c, row))
        };
        let head = &pattern.head_var.0;
        let candidates: Vec<Term> = match partial.get(head) {
            Some(x) => vec![x.clone()],
            None => self.triples.iter().map(|t| t.subject().clone()).collect(),
        };
        let mut rows: Vec<Assignment> = Vec::new();
        let mut seen = BTreeSet::new();
        for x in candidates {
            if seen.insert(x.clone()) && self.typed(&x, &pattern.head.iri, pattern.head.strict) {
                let mut row = partial.clone();
                row.insert(head.clone(), x);
                if admissible(&row) {
                    rows.push(row);
                }
            }
        }
        let mut prev = head;
        for (prop, var) in &pattern.steps {
            let mut next = Vec::new();
            for row in &rows {
                for t in self.triples {
                    if t.subject() != &row[prev] {
                        continue;
                    }
                    let ok = if prop.strict {
                        t.predicate() == &prop.iri
                    } else {
                        self.reaches(false, t.predicate(), &prop.iri)
                    };
                    if !ok || row.get(&var.0).is_some_and(|b| b != t.object()) {
                        continue;
                    }
                    let mut extended = row.clone();
                    extended.insert(var.0.clone(), t.object().clone());
                    if admissible(&extended) {
                        next.push(extended);
                    }
                }
            }
            rows = next;
            prev = &var.0;
        }
        rows
    }
}

fn holds(cond: &Condition, row: &Assignment) -> bool {
    let lexical = |v: &str| row[v].as_literal().map(|l| l.lexical().to_string());
    match cond {
        Condition::VarEqVar(a, b) => row[&a.0] == row[&b.0],
        Condition::VarEqLiteral(a, text) => lexical(&a.0).is_some_and(|l| &l == text),
        Condition::VarLikeLiteral(a, pattern) => {
            lexical(&a.0).is_some_and(|l| like_regex(pattern).is_match(&l))
        }
    }
}

/// Nested-loop evaluation: assignments are extended pattern by pattern,
/// each step scanning every triple.
/// `schema` supplies the subClassOf/subPropertyOf edges.
pub fn query_oracle(ast: &QueryAst, triples: &[Triple], schema: &[Triple]) -> Vec<Vec<Term>> {
    let scan = Scan {
        triples,
        sub_class: edges_of(schema, vocab::RDFS_SUBCLASS_OF),
        sub_prop: edges_of(schema, vocab::RDFS_SUBPROPERTY_OF),
        memo: RefCell::default(),
    };
    let (projection, patterns, filter) = match ast {
        QueryAst::Class(class) => {
            let pattern = PathPattern {
                head: class.clone(),
                head_var: cris_core::query::Var("X0".into()),
                steps: vec![],
            };
            let rows: BTreeSet<Vec<Term>> = scan
                .extend(&Assignment::new(), &pattern, &[])
                .into_iter()
                .map(|r| vec![r["X0"].clone()])
                .collect();
            return rows.into_iter().collect();
        }
        QueryAst::Select {
            projection,
            patterns,
            filter,
        } => (projection, patterns, filter),
    };

    let mut acc: Vec<Assignment> = vec![Assignment::new()];
    for pattern in patterns {
        acc = acc
            .iter()
            .flat_map(|partial| scan.extend(partial, pattern, filter))
            .collect();
    }
    let rows: BTreeSet<Vec<Term>> = acc
        .into_iter()
        .filter(|row| filter.iter().all(|c| holds(c, row)))
        .map(|row| projection.iter().map(|v| row[&v.0].clone()).collect())
        .collect();
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bfs_handles_cycles() {
        let r = bfs_reachability(0..4, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(r[&0], BTreeSet::from([0, 1, 2]));
        assert_eq!(r[&3], BTreeSet::from([3]));
    }

    #[test]
    fn like_regex_escapes() {
        assert!(like_regex("a.b*").is_match("a.bcd"));
        assert!(!like_regex("a.b*").is_match("axbcd"));
        assert!(like_regex("*").is_match(""));
    }
}
