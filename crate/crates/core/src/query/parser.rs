use std::collections::BTreeSet;

use crate::model::{Iri, ModelError, PrefixMap};

use super::{ClassRef, Condition, PathPattern, PropertyRef, QueryAst, QueryError, Var};

const KEYWORDS: [&str; 5] = ["select", "from", "where", "and", "like"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    /// `<IRI>` or a bare absolute `scheme://...` reference
    IriRef(String),
    Hash(String),
    Prefixed(String, String),
    Str(String),
    Caret,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::IriRef(s) => format!("<{s}>"),
            Tok::Hash(s) => format!("#{s}"),
            Tok::Prefixed(p, n) => format!("{p}:{n}"),
            Tok::Str(_) => "string".into(),
            Tok::Caret => "'^'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of query".into(),
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        position,
        message: message.into(),
    }
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'-'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'^' => Some(Tok::Caret),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b'.' => Some(Tok::Dot),
            b',' => Some(Tok::Comma),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            toks.push((tok, start));
            i += 1;
            continue;
        }
        match c {
            b'<' => {
                let close = text[i..]
                    .find('>')
                    .ok_or_else(|| syntax(start, "unterminated IRI"))?;
                toks.push((Tok::IriRef(text[i + 1..i + close].to_string()), start));
                i += close + 1;
            }
            b'#' => {
                i += 1;
                while i < bytes.len() && is_name_byte(bytes[i]) {
                    i += 1;
                }
                if i == start + 1 {
                    return Err(syntax(start, "expected a name after '#'"));
                }
                toks.push((Tok::Hash(text[start + 1..i].to_string()), start));
            }
            b'"' => {
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(ch) = text[i..].chars().next() else {
                        return Err(syntax(start, "unterminated string"));
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let esc = text[i..]
                                .chars()
                                .next()
                                .ok_or_else(|| syntax(start, "unterminated string"))?;
                            i += esc.len_utf8();
                            value.push(match esc {
                                '"' => '"',
                                '\\' => '\\',
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                _ => return Err(syntax(i - 2, "invalid escape")),
                            });
                        }
                        _ => value.push(ch),
                    }
                }
                toks.push((Tok::Str(value), start));
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if bytes.get(i) == Some(&b':') {
                    if text[i + 1..].starts_with("//") {
                        // bare absolute IRI, e.g. http://host/path#Name
                        while i < bytes.len()
                            && !bytes[i].is_ascii_whitespace()
                            && !matches!(bytes[i], b'{' | b'}' | b',' | b'"' | b'<' | b'>')
                        {
                            i += 1;
                        }
                        toks.push((Tok::IriRef(text[start..i].to_string()), start));
                    } else {
                        i += 1;
                        let local_start = i;
                        while i < bytes.len() && is_name_byte(bytes[i]) {
                            i += 1;
                        }
                        if i == local_start {
                            return Err(syntax(local_start, "expected a local name after ':'"));
                        }
                        toks.push((
                            Tok::Prefixed(word.to_string(), text[local_start..i].to_string()),
                            start,
                        ));
                    }
                } else {
                    toks.push((Tok::Ident(word.to_string()), start));
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        }
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    prefixes: &'a PrefixMap,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> QueryError {
        syntax(
            self.pos(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), QueryError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.expected(&tok.describe()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&format!("'{kw}'")))
        }
    }

    fn var(&mut self) -> Result<(Var, usize), QueryError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let (_, pos) = self.bump();
                Ok((Var(name), pos))
            }
            _ => Err(self.expected("variable")),
        }
    }

    /// `'^'? ref`
    fn reference(&mut self) -> Result<(Iri, bool), QueryError> {
        let strict = self.eat(&Tok::Caret);
        let pos = self.pos();
        let token = match self.peek().clone() {
            Tok::IriRef(inner) => format!("<{inner}>"),
            Tok::Hash(name) => format!("#{name}"),
            Tok::Prefixed(prefix, name) => format!("{prefix}:{name}"),
            _ => return Err(self.expected("class or property reference")),
        };
        self.bump();
        let iri = self.prefixes.expand(&token).map_err(|e| match e {
            ModelError::UnknownPrefix(prefix) => QueryError::UnknownPrefix {
                position: pos,
                prefix,
            },
            other => syntax(pos, other.to_string()),
        })?;
        Ok((iri, strict))
    }

    fn braced_var(&mut self) -> Result<(Var, usize), QueryError> {
        self.expect(Tok::LBrace)?;
        let v = self.var()?;
        self.expect(Tok::RBrace)?;
        Ok(v)
    }

    fn pattern(&mut self, bound: &mut Vec<Var>) -> Result<PathPattern, QueryError> {
        let (iri, strict) = self.reference()?;
        let (head_var, head_pos) = self.braced_var()?;
        let mut seen = BTreeSet::from([head_var.clone()]);
        let _ = head_pos;
        let mut steps = Vec::new();
        while self.eat(&Tok::Dot) {
            let (piri, pstrict) = self.reference()?;
            let (var, vpos) = self.braced_var()?;
            if !seen.insert(var.clone()) {
                return Err(syntax(
                    vpos,
                    format!("variable {var} repeated within one pattern"),
                ));
            }
            steps.push((
                PropertyRef {
                    iri: piri,
                    strict: pstrict,
                },
                var,
            ));
        }
        bound.extend(seen);
        Ok(PathPattern {
            head: ClassRef { iri, strict },
            head_var,
            steps,
        })
    }

    fn condition(&mut self) -> Result<(Condition, Vec<(Var, usize)>), QueryError> {
        let (a, apos) = self.var()?;
        if self.is_keyword("like") {
            self.bump();
            return match self.bump() {
                (Tok::Str(s), _) => Ok((Condition::VarLikeLiteral(a.clone(), s), vec![(a, apos)])),
                (tok, pos) => Err(syntax(
                    pos,
                    format!("expected string, found {}", tok.describe()),
                )),
            };
        }
        self.expect(Tok::Eq)?;
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok((Condition::VarEqLiteral(a.clone(), s), vec![(a, apos)]))
            }
            _ => {
                let (b, bpos) = self
                    .var()
                    .map_err(|_| self.expected("variable or string"))?;
                Ok((
                    Condition::VarEqVar(a.clone(), b.clone()),
                    vec![(a, apos), (b, bpos)],
                ))
            }
        }
    }

    fn select(&mut self) -> Result<QueryAst, QueryError> {
        self.keyword("select")?;
        let mut projection = vec![self.var()?];
        while self.eat(&Tok::Comma) {
            projection.push(self.var()?);
        }
        self.keyword("from")?;
        let mut bound = Vec::new();
        let mut patterns = vec![self.pattern(&mut bound)?];
        while self.eat(&Tok::Comma) {
            patterns.push(self.pattern(&mut bound)?);
        }
        let mut filter = Vec::new();
        let mut used = Vec::new();
        if self.is_keyword("where") {
            self.bump();
            loop {
                let (cond, vars) = self.condition()?;
                filter.push(cond);
                used.extend(vars);
                if !self.is_keyword("and") {
                    break;
                }
                self.bump();
            }
        }
        if *self.peek() != Tok::Eof {
            return Err(self.expected("end of query"));
        }
        for (var, pos) in projection.iter().chain(used.iter()) {
            if !bound.contains(var) {
                return Err(QueryError::UnboundVariable {
                    position: *pos,
                    name: var.0.clone(),
                });
            }
        }
        Ok(QueryAst::Select {
            projection: projection.into_iter().map(|(v, _)| v).collect(),
            patterns,
            filter,
        })
    }
}

pub fn parse_query(text: &str, prefixes: &PrefixMap) -> Result<QueryAst, QueryError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        prefixes,
    };
    if p.is_keyword("select") {
        return p.select();
    }
    let (iri, strict) = p.reference()?;
    if *p.peek() != Tok::Eof {
        return Err(p.expected("end of query"));
    }
    Ok(QueryAst::Class(ClassRef { iri, strict }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::cerif;

    fn parse(text: &str) -> Result<QueryAst, QueryError> {
        parse_query(text, &PrefixMap::cerif())
    }

    #[test]
    fn class_queries() {
        assert_eq!(
            parse("#Person").unwrap(),
            QueryAst::Class(ClassRef {
                iri: cerif("Person"),
                strict: false
            })
        );
        assert_eq!(
            parse("^#Researcher").unwrap(),
            QueryAst::Class(ClassRef {
                iri: cerif("Researcher"),
                strict: true
            })
        );
        assert_eq!(
            parse("  ^http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Researcher ").unwrap(),
            QueryAst::Class(ClassRef {
                iri: cerif("Researcher"),
                strict: true
            })
        );
        assert_eq!(
            parse("<http://derpi.tuwien.ac.at/~andrei/cerif.rdfs#Person>").unwrap(),
            parse("cerif:Person").unwrap()
        );
    }

    #[test]
    fn select_with_join_and_filter() {
        let q = r#"select X,Y from #Project {X} . #project_persons {Y}, #Project {Z} . #expertise_skill {N} where X = Z and N = "Semantic Web""#;
        let QueryAst::Select {
            projection,
            patterns,
            filter,
        } = parse(q).unwrap()
        else {
            panic!("expected select");
        };
        assert_eq!(projection, vec![Var("X".into()), Var("Y".into())]);
        assert_eq!(patterns.len(), 2);
        assert_eq!(patterns[0].steps[0].0.iri, cerif("project_persons"));
        assert_eq!(
            filter,
            vec![
                Condition::VarEqVar(Var("X".into()), Var("Z".into())),
                Condition::VarEqLiteral(Var("N".into()), "Semantic Web".into()),
            ]
        );
    }

    #[test]
    fn like_and_strict_property() {
        let q = r#"select X from ^#Project {X} . ^#expertise_skill {N} where N like "Sem*""#;
        let QueryAst::Select {
            patterns, filter, ..
        } = parse(q).unwrap()
        else {
            panic!();
        };
        assert!(patterns[0].head.strict && patterns[0].steps[0].0.strict);
        assert_eq!(
            filter,
            vec![Condition::VarLikeLiteral(Var("N".into()), "Sem*".into())]
        );
    }

    #[test]
    fn unbound_variable() {
        let err = parse(r#"select X from #Project {X} where Y = "z""#).unwrap_err();
        assert_eq!(
            err,
            QueryError::UnboundVariable {
                position: 33,
                name: "Y".into()
            }
        );
        let err = parse("select Q from #Project {X}").unwrap_err();
        assert!(matches!(err, QueryError::UnboundVariable { ref name, .. } if name == "Q"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("select from").unwrap_err();
        assert_eq!(err.position(), 7);
        assert!(matches!(err, QueryError::Syntax { .. }));
        assert!(matches!(
            parse(""),
            Err(QueryError::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse("#Person extra"),
            Err(QueryError::Syntax { position: 8, .. })
        ));
        assert!(matches!(
            parse("select X from #P {X"),
            Err(QueryError::Syntax { .. })
        ));
        assert!(matches!(
            parse("select X from #P {X} . #p {X}"),
            Err(QueryError::Syntax { .. })
        ));
        assert!(matches!(
            parse("select and from #P {and}"),
            Err(QueryError::Syntax { .. })
        ));
        assert!(matches!(
            parse("\"unterminated"),
            Err(QueryError::Syntax { .. })
        ));
    }

    #[test]
    fn unknown_prefix() {
        assert_eq!(
            parse("xyz:Name").unwrap_err(),
            QueryError::UnknownPrefix {
                position: 0,
                prefix: "xyz".into()
            }
        );
    }

    #[test]
    fn keywords_are_case_sensitive() {
        assert!(parse("SELECT X from #P {X}").is_err());
    }
}
