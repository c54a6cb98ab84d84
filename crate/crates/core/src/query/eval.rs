use std::collections::{BTreeSet, HashMap, HashSet};

use crate::model::{Iri, Term};
use crate::schema::ClosureTable;
use crate::store::Snapshot;
use crate::vocab;

use super::{BindingTable, ClassRef, Condition, PathPattern, QueryAst, Var, CLASS_QUERY_COLUMN};

/// Partial result: one slot per query variable.
type Row = Vec<Option<Term>>;

/// `*` matches any (possibly empty) substring; every other character is literal.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let mut parts = pattern.split('*');
    let first = parts.next().unwrap_or("");
    let Some(mut rest) = text.strip_prefix(first) else {
        return false;
    };
    let tail: Vec<&str> = parts.collect();
    let Some((last, middle)) = tail.split_last() else {
        return rest.is_empty();
    };
    for part in middle {
        match rest.find(part) {
            Some(at) => rest = &rest[at + part.len()..],
            None => return false,
        }
    }
    rest.len() >= last.len() && rest.ends_with(last)
}

fn instances(class: &ClassRef, snap: &Snapshot, ct: &ClosureTable) -> BTreeSet<Term> {
    let rdf_type = vocab::rdf_type();
    let classes = if class.strict {
        BTreeSet::from([class.iri.clone()])
    } else {
        ct.subclasses_of(&class.iri)
    };
    classes
        .into_iter()
        .flat_map(|c| snap.match_pattern(None, Some(&rdf_type), Some(&Term::Iri(c))))
        .map(|t| t.into_parts().0)
        .collect()
}

fn literal_matches(term: &Term, test: impl Fn(&str) -> bool) -> bool {
    term.as_literal().is_some_and(|l| test(l.lexical()))
}

struct Plan {
    slots: Vec<Var>,
}

impl Plan {
    fn slot(&self, v: &Var) -> usize {
        self.slots
            .iter()
            .position(|s| s == v)
            .expect("variable bound by a pattern")
    }

    /// Conditions that mention only already-bound slots and hold for the row.
    fn admits(&self, row: &Row, filter: &[Condition]) -> bool {
        filter.iter().all(|cond| match cond {
            Condition::VarEqVar(a, b) => match (&row[self.slot(a)], &row[self.slot(b)]) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            },
            Condition::VarEqLiteral(a, text) => row[self.slot(a)]
                .as_ref()
                .is_none_or(|t| literal_matches(t, |l| l == text)),
            Condition::VarLikeLiteral(a, pattern) => row[self.slot(a)]
                .as_ref()
                .is_none_or(|t| literal_matches(t, |l| glob_match(pattern, l))),
        })
    }

    /// Rows of one pattern. Columns outside `needed` are dropped as soon as
    /// the path has moved past them, which keeps long paths from
    /// multiplying rows that only differ in discarded variables.
    fn pattern_rows(
        &self,
        pattern: &PathPattern,
        filter: &[Condition],
        needed: &BTreeSet<usize>,
        snap: &Snapshot,
        ct: &ClosureTable,
    ) -> Vec<Row> {
        let head = self.slot(&pattern.head_var);
        let mut rows: Vec<Row> = instances(&pattern.head, snap, ct)
            .into_iter()
            .map(|x| {
                let mut row = vec![None; self.slots.len()];
                row[head] = Some(x);
                row
            })
            .filter(|row| self.admits(row, filter))
            .collect();
        let mut prev = head;
        for (prop, var) in &pattern.steps {
            let properties: BTreeSet<Iri> = if prop.strict {
                BTreeSet::from([prop.iri.clone()])
            } else {
                ct.subproperties_of(&prop.iri)
            };
            let slot = self.slot(var);
            let mut next = Vec::new();
            for row in &rows {
                let subject = row[prev].as_ref().expect("path variable bound");
                for q in &properties {
                    for t in snap.match_pattern(Some(subject), Some(q), None) {
                        let mut extended = row.clone();
                        extended[slot] = Some(t.object().clone());
                        if self.admits(&extended, filter) {
                            next.push(extended);
                        }
                    }
                }
            }
            prev = slot;
            rows = narrow(next, |s| s == prev || needed.contains(&s));
        }
        rows
    }
}

/// Clears columns rejected by `keep` and removes the duplicates that leaves.
fn narrow(rows: Vec<Row>, keep: impl Fn(usize) -> bool) -> Vec<Row> {
    let mut seen = HashSet::new();
    rows.into_iter()
        .map(|mut row| {
            for (s, cell) in row.iter_mut().enumerate() {
                if !keep(s) {
                    *cell = None;
                }
            }
            row
        })
        .filter(|row| seen.insert(row.clone()))
        .collect()
}

/// Hash join on every pair of slots that must agree: shared variables and
/// `a = b` conditions linking the two sides.
fn join(left: Vec<Row>, right: Vec<Row>, keys: &[(usize, usize)]) -> Vec<Row> {
    let key_of = |row: &Row, pick: fn(&(usize, usize)) -> usize| -> Vec<Term> {
        keys.iter()
            .map(|k| row[pick(k)].clone().expect("join key bound"))
            .collect()
    };
    let mut index: HashMap<Vec<Term>, Vec<&Row>> = HashMap::new();
    for row in &right {
        index.entry(key_of(row, |k| k.1)).or_default().push(row);
    }
    let mut out = Vec::new();
    for l in &left {
        if let Some(matches) = index.get(&key_of(l, |k| k.0)) {
            for r in matches {
                let merged: Row = l
                    .iter()
                    .zip(r.iter())
                    .map(|(a, b)| a.clone().or_else(|| b.clone()))
                    .collect();
                out.push(merged);
            }
        }
    }
    out
}

pub fn evaluate(ast: &QueryAst, snap: &Snapshot, ct: &ClosureTable) -> BindingTable {
    let (projection, patterns, filter) = match ast {
        QueryAst::Class(class) => {
            return BindingTable {
                columns: vec![CLASS_QUERY_COLUMN.to_string()],
                rows: instances(class, snap, ct)
                    .into_iter()
                    .map(|x| vec![x])
                    .collect(),
            };
        }
        QueryAst::Select {
            projection,
            patterns,
            filter,
        } => (projection, patterns, filter),
    };

    let mut slots: Vec<Var> = Vec::new();
    for v in patterns.iter().flat_map(|p| p.vars()) {
        if !slots.contains(v) {
            slots.push(v.clone());
        }
    }
    let plan = Plan { slots };

    // Slots that must survive to the end: projected or filtered on.
    let mut keep: BTreeSet<usize> = projection.iter().map(|v| plan.slot(v)).collect();
    keep.extend(filter.iter().flat_map(|c| c.vars()).map(|v| plan.slot(v)));

    let mut acc: Option<(Vec<Row>, BTreeSet<usize>)> = None;
    for (k, pattern) in patterns.iter().enumerate() {
        let mut needed = keep.clone();
        needed.extend(
            patterns[k + 1..]
                .iter()
                .flat_map(|p| p.vars())
                .map(|v| plan.slot(v)),
        );
        let later = needed.clone();
        if let Some((_, left_bound)) = &acc {
            needed.extend(
                pattern
                    .vars()
                    .map(|v| plan.slot(v))
                    .filter(|s| left_bound.contains(s)),
            );
        }
        let rows = plan.pattern_rows(pattern, filter, &needed, snap, ct);
        let bound: BTreeSet<usize> = pattern
            .vars()
            .map(|v| plan.slot(v))
            .filter(|s| needed.contains(s))
            .collect();
        let merged = match acc {
            None => (rows, bound),
            Some((left, left_bound)) => {
                let mut keys: BTreeSet<(usize, usize)> =
                    left_bound.intersection(&bound).map(|&s| (s, s)).collect();
                for cond in filter {
                    if let Condition::VarEqVar(a, b) = cond {
                        let (a, b) = (plan.slot(a), plan.slot(b));
                        if left_bound.contains(&a) && bound.contains(&b) && !left_bound.contains(&b)
                        {
                            keys.insert((a, b));
                        } else if left_bound.contains(&b)
                            && bound.contains(&a)
                            && !left_bound.contains(&a)
                        {
                            keys.insert((b, a));
                        }
                    }
                }
                let keys: Vec<(usize, usize)> = keys.into_iter().collect();
                let joined = join(left, rows, &keys)
                    .into_iter()
                    .filter(|row| plan.admits(row, filter))
                    .collect();
                (joined, left_bound.union(&bound).copied().collect())
            }
        };
        let (rows, bound) = merged;
        acc = Some((
            narrow(rows, |s| later.contains(&s)),
            bound.intersection(&later).copied().collect(),
        ));
    }

    let rows = acc.map(|(rows, _)| rows).unwrap_or_default();
    let picks: Vec<usize> = projection.iter().map(|v| plan.slot(v)).collect();
    let projected: BTreeSet<Vec<Term>> = rows
        .into_iter()
        .map(|row| {
            picks
                .iter()
                .map(|&s| row[s].clone().expect("all variables bound after join"))
                .collect()
        })
        .collect();
    BindingTable {
        columns: projection.iter().map(|v| v.0.clone()).collect(),
        rows: projected.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Literal, PrefixMap, Triple};
    use crate::query::parse_query;
    use crate::schema::{bundled_cerif_schema, closure, load_schema};
    use crate::store::{SourceId, Store};
    use crate::vocab::{cerif, iri};
    use proptest::prelude::*;

    fn store_of(triples: &[Triple]) -> Store {
        let mut store = Store::new();
        for t in triples {
            store.insert(t.clone(), SourceId::Local, 0);
        }
        store
    }

    fn typed(s: &str, class: &str) -> Triple {
        Triple::new(cerif(s), vocab::rdf_type(), cerif(class)).unwrap()
    }

    fn rel(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(cerif(s), cerif(p), cerif(o)).unwrap()
    }

    fn lit(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(cerif(s), cerif(p), Literal::new(o)).unwrap()
    }

    fn run(extra_schema: &[Triple], data: &[Triple], query: &str) -> BindingTable {
        let mut schema_triples = bundled_cerif_schema();
        schema_triples.extend_from_slice(extra_schema);
        let ct = closure(&load_schema(&schema_triples).unwrap());
        let ast = parse_query(query, &PrefixMap::cerif()).unwrap();
        evaluate(&ast, &store_of(data).snapshot(), &ct)
    }

    #[test]
    fn glob() {
        assert!(glob_match("Sem*", "Semantic Web"));
        assert!(glob_match("*Web", "Semantic Web"));
        assert!(glob_match("*ant*", "Semantic Web"));
        assert!(glob_match("*", ""));
        assert!(glob_match("a*b*c", "abc"));
        assert!(glob_match("exact", "exact"));
        assert!(!glob_match("exact", "exactly"));
        assert!(!glob_match("a*a", "a"));
        assert!(!glob_match("sem*", "Semantic"));
    }

    #[test]
    fn subtype_inclusion_and_strict() {
        let data = [typed("p1", "Researcher"), typed("p2", "Student")];
        assert_eq!(run(&[], &data, "#Person").len(), 2);
        assert_eq!(
            run(&[], &data, "#Researcher").rows,
            vec![vec![Term::Iri(cerif("p1"))]]
        );
        assert_eq!(run(&[], &data, "^#Researcher").len(), 1);
        assert_eq!(run(&[], &data, "^#Person").len(), 0);
        assert_eq!(run(&[], &data, "#Person").columns, vec!["X0"]);
    }

    #[test]
    fn semantic_web_projects_with_persons() {
        let data = [
            typed("proj1", "Project"),
            typed("proj2", "Project"),
            typed("a", "Researcher"),
            typed("b", "Student"),
            typed("c", "Researcher"),
            rel("proj1", "project_persons", "a"),
            rel("proj1", "project_persons", "b"),
            rel("proj2", "project_persons", "c"),
            lit("proj1", "expertise_skill", "Semantic Web"),
            lit("proj2", "expertise_skill", "Databases"),
        ];
        let q = r#"select X,Y from #Project {X} . #project_persons {Y}, #Project {Z} . #expertise_skill {N} where X = Z and N = "Semantic Web""#;
        let table = run(&[], &data, q);
        assert_eq!(table.columns, vec!["X", "Y"]);
        let p = |s: &str| Term::Iri(cerif(s));
        assert_eq!(
            table.rows,
            vec![vec![p("proj1"), p("a")], vec![p("proj1"), p("b")]]
        );

        // same result when the join is spelled with a shared variable
        let shared = r#"select X,Y from #Project {X} . #project_persons {Y}, #Project {X} . #expertise_skill {N} where N like "Semantic*""#;
        assert_eq!(run(&[], &data, shared).rows, table.rows);
    }

    #[test]
    fn schema_extension_through_harvest() {
        let extension = [Triple::new(
            cerif("SoftwareProject"),
            iri(vocab::RDFS_SUBCLASS_OF),
            cerif("Project"),
        )
        .unwrap()];
        let data = [
            typed("s1", "SoftwareProject"),
            typed("a", "Researcher"),
            rel("s1", "project_persons", "a"),
            lit("s1", "expertise_skill", "Semantic Web"),
        ];
        let q = r#"select X,Y from #Project {X} . #project_persons {Y}, #Project {Z} . #expertise_skill {N} where X = Z and N = "Semantic Web""#;
        assert_eq!(run(&extension, &data, q).len(), 1);
        assert_eq!(
            run(
                &extension,
                &data,
                &q.replace("#Project {X}", "^#Project {X}")
            )
            .len(),
            0
        );
        assert_eq!(run(&extension, &data, "^#Project").len(), 0);
        assert_eq!(run(&extension, &data, "#Project").len(), 1);
    }

    #[test]
    fn subproperty_steps() {
        let extension = [Triple::new(
            cerif("project_leader"),
            iri(vocab::RDFS_SUBPROPERTY_OF),
            cerif("project_persons"),
        )
        .unwrap()];
        let data = [
            typed("proj", "Project"),
            rel("proj", "project_leader", "a"),
            rel("proj", "project_persons", "b"),
        ];
        assert_eq!(
            run(
                &extension,
                &data,
                "select Y from #Project {X} . #project_persons {Y}"
            )
            .len(),
            2
        );
        assert_eq!(
            run(
                &extension,
                &data,
                "select Y from #Project {X} . ^#project_persons {Y}"
            )
            .len(),
            1
        );
    }

    #[test]
    fn multi_step_path() {
        let data = [
            typed("proj", "Project"),
            rel("proj", "project_persons", "a"),
            rel("a", "member_of", "org"),
            lit("org", "name", "TU"),
        ];
        let t = run(
            &[],
            &data,
            "select X, O, N from #Project {X} . #project_persons {Y} . #member_of {O} . #name {N}",
        );
        assert_eq!(
            t.rows,
            vec![vec![
                Term::Iri(cerif("proj")),
                Term::Iri(cerif("org")),
                Term::Literal(Literal::new("TU"))
            ]]
        );
    }

    #[test]
    fn literal_equality_is_exact_but_ignores_language() {
        let data = [
            typed("p", "Project"),
            Triple::new(
                cerif("p"),
                cerif("title"),
                Literal::with_language("Ontology", "en").unwrap(),
            )
            .unwrap(),
        ];
        assert_eq!(
            run(
                &[],
                &data,
                r#"select X from #Project {X} . #title {T} where T = "Ontology""#
            )
            .len(),
            1
        );
        assert_eq!(
            run(
                &[],
                &data,
                r#"select X from #Project {X} . #title {T} where T = "ontology""#
            )
            .len(),
            0
        );
    }

    #[test]
    fn empty_store() {
        assert!(run(&[], &[], "#Person").is_empty());
        assert!(run(&[], &[], "select X from #Project {X} . #name {N}").is_empty());
        assert!(run(&[], &[], "#NotAClass").is_empty());
    }

    const CLASSES: [&str; 6] = [
        "Person",
        "Researcher",
        "Student",
        "Project",
        "Equipment",
        "Undeclared",
    ];

    proptest! {
        #[test]
        fn strict_rows_are_contained(types in prop::collection::vec((0usize..8, 0usize..6), 0..30)) {
            let data: Vec<Triple> = types.iter().map(|(s, c)| typed(&format!("x{s}"), CLASSES[*c])).collect();
            let ct = closure(&load_schema(&bundled_cerif_schema()).unwrap());
            let snap = store_of(&data).snapshot();
            for class in CLASSES {
                let loose = evaluate(&parse_query(&format!("#{class}"), &PrefixMap::cerif()).unwrap(), &snap, &ct);
                let strict = evaluate(&parse_query(&format!("^#{class}"), &PrefixMap::cerif()).unwrap(), &snap, &ct);
                prop_assert!(strict.rows.iter().all(|r| loose.rows.contains(r)));
            }
        }
    }
}
