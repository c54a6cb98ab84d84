//! Query language: class retrieval with subtype inclusion, the `^` strict
//! operator, property-path patterns and conjunctive filters.
//!
//! ```text
//! #Person
//! ^#Researcher
//! select X, Y from #Project {X} . #project_persons {Y}, #Project {Z} . #expertise_skill {N}
//!   where X = Z and N = "Semantic Web"
//! ```

mod eval;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::model::{Iri, Term};

pub use eval::{evaluate, glob_match};
pub use parser::parse_query;

/// Column name used for plain class queries.
pub const CLASS_QUERY_COLUMN: &str = "X0";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A class reference; `strict` excludes subclasses (`^` prefix).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRef {
    pub iri: Iri,
    pub strict: bool,
}

/// A property reference; `strict` excludes subproperties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyRef {
    pub iri: Iri,
    pub strict: bool,
}

/// `Class {V} . prop1 {W1} . prop2 {W2} ...`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPattern {
    pub head: ClassRef,
    pub head_var: Var,
    pub steps: Vec<(PropertyRef, Var)>,
}

impl PathPattern {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        std::iter::once(&self.head_var).chain(self.steps.iter().map(|(_, v)| v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    VarEqVar(Var, Var),
    /// Matches literals whose lexical form equals the text exactly.
    VarEqLiteral(Var, String),
    /// Like [`Condition::VarEqLiteral`], with `*` matching any substring.
    VarLikeLiteral(Var, String),
}

impl Condition {
    pub fn vars(&self) -> Vec<&Var> {
        match self {
            Condition::VarEqVar(a, b) => vec![a, b],
            Condition::VarEqLiteral(a, _) | Condition::VarLikeLiteral(a, _) => vec![a],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAst {
    Class(ClassRef),
    Select {
        projection: Vec<Var>,
        patterns: Vec<PathPattern>,
        filter: Vec<Condition>,
    },
}

/// Deduplicated result rows, sorted by leftmost column then rightward.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl BindingTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown prefix {prefix:?} at {position}")]
    UnknownPrefix { position: usize, prefix: String },
    #[error("variable {name} at {position} is not bound by any pattern")]
    UnboundVariable { position: usize, name: String },
}

impl QueryError {
    /// Byte offset into the query text.
    pub fn position(&self) -> usize {
        match self {
            QueryError::Syntax { position, .. }
            | QueryError::UnknownPrefix { position, .. }
            | QueryError::UnboundVariable { position, .. } => *position,
        }
    }
}
