//! Reflexive-transitive subclass and subproperty reachability.
//!
//! Computed by semi-naive fixpoint iteration: each round only extends the
//! pairs discovered in the previous round by one more edge. Cycles are
//! allowed and end up as mutual reachability.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::Iri;

use super::Schema;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClosureTable {
    classes: Reach,
    properties: Reach,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Reach {
    /// node -> every node reachable upward, including itself
    ancestors: BTreeMap<Iri, BTreeSet<Iri>>,
    /// node -> every node that reaches it, including itself
    descendants: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Reach {
    fn compute(nodes: &BTreeSet<Iri>, edges: &BTreeSet<(Iri, Iri)>) -> Self {
        let mut all: BTreeSet<&Iri> = nodes.iter().collect();
        for (child, parent) in edges {
            all.insert(child);
            all.insert(parent);
        }
        let ids: Vec<&Iri> = all.into_iter().collect();
        let index: BTreeMap<&Iri, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();

        let mut parents = vec![Vec::new(); ids.len()];
        for (child, parent) in edges {
            parents[index[child]].push(index[parent]);
        }

        let mut reach: Vec<BTreeSet<usize>> = (0..ids.len()).map(|i| BTreeSet::from([i])).collect();
        let mut delta: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (i, ps) in parents.iter().enumerate() {
            for &p in ps {
                if reach[i].insert(p) {
                    delta[i].push(p);
                }
            }
        }

        while delta.iter().any(|d| !d.is_empty()) {
            let mut next = vec![Vec::new(); ids.len()];
            for (i, frontier) in delta.iter().enumerate() {
                for &j in frontier {
                    for &k in &parents[j] {
                        if reach[i].insert(k) {
                            next[i].push(k);
                        }
                    }
                }
            }
            delta = next;
        }

        let mut ancestors = BTreeMap::new();
        let mut descendants: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for (i, set) in reach.iter().enumerate() {
            let node = ids[i];
            ancestors.insert(node.clone(), set.iter().map(|&j| ids[j].clone()).collect());
            for &j in set {
                descendants
                    .entry(ids[j].clone())
                    .or_default()
                    .insert(node.clone());
            }
        }
        Reach {
            ancestors,
            descendants,
        }
    }

    fn reaches(&self, child: &Iri, parent: &Iri) -> bool {
        child == parent
            || self
                .ancestors
                .get(child)
                .is_some_and(|set| set.contains(parent))
    }

    fn below(&self, node: &Iri) -> BTreeSet<Iri> {
        self.descendants
            .get(node)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([node.clone()]))
    }

    fn above(&self, node: &Iri) -> BTreeSet<Iri> {
        self.ancestors
            .get(node)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([node.clone()]))
    }

    fn has_cycle(&self) -> bool {
        self.ancestors
            .iter()
            .any(|(node, ups)| ups.iter().any(|up| up != node && self.reaches(up, node)))
    }
}

pub fn closure(schema: &Schema) -> ClosureTable {
    ClosureTable {
        classes: Reach::compute(&schema.classes, &schema.subclass_edges),
        properties: Reach::compute(&schema.properties, &schema.subproperty_edges),
    }
}

impl ClosureTable {
    /// True iff `parent` is reachable from `child`; undeclared classes only
    /// reach themselves.
    pub fn is_subclass(&self, child: &Iri, parent: &Iri) -> bool {
        self.classes.reaches(child, parent)
    }

    pub fn is_subproperty(&self, child: &Iri, parent: &Iri) -> bool {
        self.properties.reaches(child, parent)
    }

    /// Every class reaching `class`, including itself.
    pub fn subclasses_of(&self, class: &Iri) -> BTreeSet<Iri> {
        self.classes.below(class)
    }

    /// Every class reachable from `class`, including itself.
    pub fn superclasses_of(&self, class: &Iri) -> BTreeSet<Iri> {
        self.classes.above(class)
    }

    pub fn subproperties_of(&self, property: &Iri) -> BTreeSet<Iri> {
        self.properties.below(property)
    }

    pub fn superproperties_of(&self, property: &Iri) -> BTreeSet<Iri> {
        self.properties.above(property)
    }

    /// Reach set of a declared class, `None` when the class is unknown.
    pub fn class_reach(&self, class: &Iri) -> Option<&BTreeSet<Iri>> {
        self.classes.ancestors.get(class)
    }

    pub fn property_reach(&self, property: &Iri) -> Option<&BTreeSet<Iri>> {
        self.properties.ancestors.get(property)
    }

    pub fn has_subclass_cycle(&self) -> bool {
        self.classes.has_cycle()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{bundled_cerif_schema, load_schema};
    use crate::vocab::cerif;

    fn schema_from_edges(edges: &[(&str, &str)]) -> Schema {
        let mut schema = Schema::default();
        for (c, p) in edges {
            schema.classes.insert(cerif(c));
            schema.classes.insert(cerif(p));
            schema.subclass_edges.insert((cerif(c), cerif(p)));
        }
        schema
    }

    #[test]
    fn bundled_person_hierarchy() {
        let triples = bundled_cerif_schema();
        let schema = load_schema(&triples).unwrap();
        let ct = closure(&schema);
        assert!(ct.is_subclass(&cerif("Researcher"), &cerif("Person")));
        assert!(ct.is_subclass(&cerif("Student"), &cerif("Person")));
        assert!(ct.is_subclass(&cerif("University"), &cerif("HigherEducationEstablishment")));
        assert!(ct.is_subclass(&cerif("University"), &cerif("OrganizationUnit")));
        assert!(!ct.is_subclass(&cerif("Person"), &cerif("Researcher")));
        assert!(!ct.has_subclass_cycle());
    }

    #[test]
    fn lone_class_is_reflexive() {
        let mut schema = Schema::default();
        schema.classes.insert(cerif("C"));
        let ct = closure(&schema);
        assert!(ct.class_reach(&cerif("C")).unwrap().contains(&cerif("C")));
        assert!(ct.is_subclass(&cerif("C"), &cerif("C")));
        assert!(ct.is_subclass(&cerif("Undeclared"), &cerif("Undeclared")));
        assert!(!ct.is_subclass(&cerif("Undeclared"), &cerif("C")));
        assert_eq!(ct.subclasses_of(&cerif("Undeclared")).len(), 1);
    }

    #[test]
    fn cycles_collapse_to_mutual_reachability() {
        let schema = schema_from_edges(&[("A", "B"), ("B", "C"), ("C", "A"), ("C", "D")]);
        let ct = closure(&schema);
        for x in ["A", "B", "C"] {
            for y in ["A", "B", "C", "D"] {
                assert!(ct.is_subclass(&cerif(x), &cerif(y)), "{x} -> {y}");
            }
        }
        assert!(!ct.is_subclass(&cerif("D"), &cerif("A")));
        assert!(ct.has_subclass_cycle());
        assert_eq!(ct.subclasses_of(&cerif("D")).len(), 4);
    }

    #[test]
    fn closing_a_closed_edge_set_changes_nothing() {
        let schema = schema_from_edges(&[("A", "B"), ("B", "C"), ("D", "C"), ("E", "D")]);
        let ct = closure(&schema);
        let mut closed = schema.clone();
        for c in &schema.classes {
            for p in ct.superclasses_of(c) {
                closed.subclass_edges.insert((c.clone(), p));
            }
        }
        assert_eq!(closure(&closed), ct);
    }
}
