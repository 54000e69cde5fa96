//! Minimal s-expressions for derivation files.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sexp {
    Sym(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Sexp::Str(s) | Sexp::Sym(s) => Some(s),
            _ => None,
        }
    }
}

pub fn parse_all(src: &str) -> Result<Vec<Sexp>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut opens: Vec<usize> = Vec::new();
    while i < chars.len() {
        let (pos, ch) = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            ';' => {
                while i < chars.len() && chars[i].1 != '\n' {
                    i += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                opens.push(pos);
                i += 1;
            }
            ')' => {
                let done = stack.pop().filter(|_| !stack.is_empty()).ok_or(Error::Parse {
                    pos,
                    msg: "unbalanced `)`".into(),
                })?;
                opens.pop();
                stack.last_mut().expect("non-empty").push(Sexp::List(done));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&(_, c)) = chars.get(i) else {
                        return Err(Error::Parse { pos, msg: "unterminated string".into() });
                    };
                    i += 1;
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(&(_, e)) = chars.get(i) else {
                                return Err(Error::Parse { pos, msg: "unterminated escape".into() });
                            };
                            i += 1;
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                        }
                        c => s.push(c),
                    }
                }
                stack.last_mut().expect("non-empty").push(Sexp::Str(s));
            }
            _ => {
                let mut s = String::new();
                while i < chars.len() {
                    let c = chars[i].1;
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    i += 1;
                }
                stack.last_mut().expect("non-empty").push(Sexp::Sym(s));
            }
        }
    }
    if let Some(pos) = opens.pop() {
        return Err(Error::Parse { pos, msg: "unclosed `(`".into() });
    }
    Ok(stack.pop().expect("root"))
}

pub fn parse_one(src: &str) -> Result<Sexp> {
    let mut all = parse_all(src)?;
    if all.len() != 1 {
        return Err(Error::Parse { pos: 0, msg: format!("expected one form, found {}", all.len()) });
    }
    Ok(all.pop().expect("one"))
}

/// A tagged node `(tag :key value ... child ...)`.
pub struct Node<'a> {
    pub tag: &'a str,
    pub keys: Vec<(&'a str, &'a Sexp)>,
    pub children: Vec<&'a Sexp>,
}

impl<'a> Node<'a> {
    pub fn of(s: &'a Sexp) -> Result<Node<'a>> {
        let xs = s.list().ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected a list, got {s}") })?;
        let tag = xs
            .first()
            .and_then(|x| x.sym())
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected a tagged list, got {s}") })?;
        let mut keys = Vec::new();
        let mut children = Vec::new();
        let mut i = 1;
        while i < xs.len() {
            match xs[i].sym() {
                Some(k) if k.starts_with(':') => {
                    let v = xs.get(i + 1).ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: format!("key {k} without a value"),
                    })?;
                    keys.push((&k[1..], v));
                    i += 2;
                }
                _ => {
                    children.push(&xs[i]);
                    i += 1;
                }
            }
        }
        Ok(Node { tag, keys, children })
    }

    pub fn get(&self, key: &str) -> Option<&'a Sexp> {
        self.keys.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub fn get_text(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .text()
                .map(Some)
                .ok_or_else(|| Error::Parse { pos: 0, msg: format!(":{key} expects a string or symbol") }),
        }
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Sym(s) => f.write_str(s),
            Sexp::Str(s) => f.write_str(&quote(s)),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_with_keys() {
        let s = parse_one(r#"(forallL :X X :witness "var(nu#0)" (ax)) ; trailing"#).unwrap();
        let n = Node::of(&s).unwrap();
        assert_eq!(n.tag, "forallL");
        assert_eq!(n.get_text("witness").unwrap(), Some("var(nu#0)"));
        assert_eq!(n.children.len(), 1);
        assert_eq!(s.to_string(), r#"(forallL :X X :witness "var(nu#0)" (ax))"#);
    }

    #[test]
    fn unbalanced() {
        assert!(parse_one("(a (b)").is_err());
        assert!(parse_one("a)").is_err());
        assert!(parse_one("\"abc").is_err());
    }
}
