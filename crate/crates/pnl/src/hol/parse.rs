//! Text syntax for HOL types, terms and signatures.
//!
//! ```text
//! type ::= prim -> type | prim        prim ::= name | (type, ...) | ()
//! term ::= \x:type. term | \atom. term | forall x:type. term | app => term | app
//! app  ::= arg arg*
//! arg  ::= name | atom | bot | imp | forall[type] | (term, ...) | (term)
//! ```
//!
//! Names may carry an atom-list suffix as in `X@[nu#0,nu#1]`.

use std::collections::BTreeMap;

use crate::atoms::{parse_atom, Atom};
use crate::error::{Error, Result};
use crate::text::{Cursor, Tok};

use super::{HolConst, HolSignature, HolTerm, HolType, HolVar};

/// A HOL signature plus free variables that text may mention.
#[derive(Clone, Debug)]
pub struct HolScope<'a> {
    pub sig: &'a HolSignature,
    vars: BTreeMap<String, HolVar>,
}

impl<'a> HolScope<'a> {
    pub fn new(sig: &'a HolSignature) -> Self {
        let vars = sig.vars().iter().map(|(n, ty)| (n.to_string(), HolVar::new(n, ty.clone()))).collect();
        HolScope { sig, vars }
    }

    pub fn declare(&mut self, v: HolVar) {
        self.vars.insert(v.name.to_string(), v);
    }

    pub fn var(&self, name: &str) -> Option<&HolVar> {
        self.vars.get(name)
    }

    pub fn parse_type(&self, src: &str) -> Result<HolType> {
        let mut c = Cursor::new(src)?;
        let t = ty(&mut c)?;
        c.expect_end()?;
        self.sig.check_type(&t)?;
        Ok(t)
    }

    /// Parses and type-checks a term.
    pub fn parse_term(&self, src: &str) -> Result<HolTerm> {
        let mut c = Cursor::new(src)?;
        let t = self.term(&mut c, &mut Vec::new())?;
        c.expect_end()?;
        self.sig.type_of(&t)?;
        Ok(t)
    }

    /// Parses a term of type `o`.
    pub fn parse_prop(&self, src: &str) -> Result<HolTerm> {
        let t = self.parse_term(src)?;
        self.sig.check_prop(&t)?;
        Ok(t)
    }

    /// `name : type`, or a bare atom.
    pub fn parse_var_decl(&self, src: &str) -> Result<HolVar> {
        let mut c = Cursor::new(src)?;
        let v = self.binder(&mut c)?;
        c.expect_end()?;
        self.sig.check_type(&v.ty)?;
        Ok(v)
    }

    fn binder(&self, c: &mut Cursor) -> Result<HolVar> {
        if matches!(c.peek_at(1), Some(Tok::Sym("#"))) {
            return Ok(HolVar::atom(&parse_atom(c)?));
        }
        let n = name(c)?;
        c.expect_sym(":")?;
        Ok(HolVar::new(&n, ty(c)?))
    }

    pub(crate) fn term(&self, c: &mut Cursor, bound: &mut Vec<HolVar>) -> Result<HolTerm> {
        if c.eat_sym("\\") {
            return self.bind(c, bound, HolTerm::lam);
        }
        if c.is_ident("forall") && !matches!(c.peek_at(1), Some(Tok::Sym("["))) {
            c.eat_ident("forall");
            return self.bind(c, bound, HolTerm::forall);
        }
        let lhs = self.app(c, bound)?;
        if c.eat_sym("=>") {
            let rhs = self.term(c, bound)?;
            return Ok(HolTerm::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn bind(
        &self,
        c: &mut Cursor,
        bound: &mut Vec<HolVar>,
        mk: fn(&HolVar, HolTerm) -> HolTerm,
    ) -> Result<HolTerm> {
        let mut v = self.binder(c)?;
        c.expect_sym(".")?;
        // A bound non-atom is kept distinct from any free variable of the same name.
        if v.atom.is_none() {
            v.name = format!("{}\u{0}{}", v.name, bound.len()).into();
        }
        bound.push(v.clone());
        let body = self.term(c, bound);
        bound.pop();
        let t = mk(&v, body?);
        Ok(strip_hints(t))
    }

    fn app(&self, c: &mut Cursor, bound: &mut Vec<HolVar>) -> Result<HolTerm> {
        let mut t = self.arg(c, bound)?;
        while self.starts_arg(c) {
            let x = self.arg(c, bound)?;
            t = HolTerm::app(t, x);
        }
        Ok(t)
    }

    fn starts_arg(&self, c: &Cursor) -> bool {
        match c.peek() {
            Some(Tok::Sym("(")) => true,
            Some(Tok::Ident(_)) => true,
            _ => false,
        }
    }

    fn arg(&self, c: &mut Cursor, bound: &mut Vec<HolVar>) -> Result<HolTerm> {
        if c.eat_sym("(") {
            let mut xs = Vec::new();
            let mut trailing = false;
            while !c.eat_sym(")") {
                xs.push(self.term(c, bound)?);
                trailing = c.eat_sym(",");
                if !trailing && !c.is_sym(")") {
                    return c.err("expected `,` or `)`");
                }
            }
            if xs.len() == 1 && !trailing {
                return Ok(xs.pop().expect("one"));
            }
            return Ok(HolTerm::Tuple(xs));
        }
        if matches!(c.peek_at(1), Some(Tok::Sym("#"))) {
            let a: Atom = parse_atom(c)?;
            return Ok(HolTerm::atom(&a));
        }
        if c.eat_ident("bot") {
            return Ok(HolTerm::bot());
        }
        if c.eat_ident("imp") {
            return Ok(HolTerm::Const(HolConst::imp()));
        }
        if c.is_ident("forall") {
            c.eat_ident("forall");
            c.expect_sym("[")?;
            let beta = ty(c)?;
            c.expect_sym("]")?;
            return Ok(HolTerm::Const(HolConst::forall(beta)));
        }
        let n = name(c)?;
        if let Some(v) = bound.iter().rev().find(|v| v.name.split('\u{0}').next() == Some(n.as_str())) {
            return Ok(HolTerm::var(v));
        }
        if let Some(v) = self.vars.get(&n) {
            return Ok(HolTerm::var(v));
        }
        if let Some(k) = self.sig.constant(&n) {
            return Ok(HolTerm::Const(k));
        }
        c.err(format!("undeclared variable or constant {n}"))
    }
}

/// Removes the disambiguating suffix the parser adds to bound names.
fn strip_hints(t: HolTerm) -> HolTerm {
    match t {
        HolTerm::Lam(mut b, body) => {
            if let Some((h, _)) = b.hint.split_once('\u{0}') {
                b.hint = h.into();
            }
            HolTerm::Lam(b, body)
        }
        HolTerm::App(f, x) => HolTerm::App(f, Box::new(strip_hints(*x))),
        t => t,
    }
}

/// An identifier with an optional `@[atoms]` suffix.
fn name(c: &mut Cursor) -> Result<String> {
    let mut n = c.ident()?;
    if c.eat_sym("@") {
        c.expect_sym("[")?;
        let mut atoms = Vec::new();
        while !c.eat_sym("]") {
            atoms.push(parse_atom(c)?.to_string());
            if !c.eat_sym(",") && !c.is_sym("]") {
                return c.err("expected `,` or `]`");
            }
        }
        n = format!("{n}@[{}]", atoms.join(","));
    }
    Ok(n)
}

pub(crate) fn ty(c: &mut Cursor) -> Result<HolType> {
    let lhs = if c.eat_sym("(") {
        let mut xs = Vec::new();
        let mut trailing = false;
        while !c.eat_sym(")") {
            xs.push(ty(c)?);
            trailing = c.eat_sym(",");
            if !trailing && !c.is_sym(")") {
                return c.err("expected `,` or `)` in type");
            }
        }
        if xs.len() == 1 && !trailing {
            xs.pop().expect("one")
        } else {
            HolType::Tuple(xs)
        }
    } else {
        HolType::base(&c.ident()?)
    };
    if c.eat_sym("->") {
        return Ok(HolType::arrow(lhs, ty(c)?));
    }
    Ok(lhs)
}

/// Reads `basetype`, `const` and `var` lines; `%` starts a comment. Atom
/// sorts may be declared with `atomsort nu`, which adds `mu_nu`.
pub fn parse_hol_signature(src: &str) -> Result<HolSignature> {
    let mut sig = HolSignature::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: Error| match e {
            Error::Parse { msg, .. } => Error::Parse { pos: lineno + 1, msg: format!("line {}: {msg}", lineno + 1) },
            e => e,
        };
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kw {
            "basetype" => sig.add_base(rest.trim()),
            "atomsort" => sig.add_base(&format!("mu_{}", rest.trim())),
            "const" | "var" => {
                let (n, t) = rest
                    .split_once(':')
                    .ok_or_else(|| at(Error::Parse { pos: 0, msg: format!("expected `{kw} name : type`") }))?;
                let mut c = Cursor::new(t).map_err(at)?;
                let t = ty(&mut c).map_err(at)?;
                c.expect_end().map_err(at)?;
                if kw == "const" {
                    sig.add_const(n.trim(), t)?;
                } else {
                    sig.add_var(n.trim(), t)?;
                }
            }
            other => {
                return Err(at(Error::Parse { pos: 0, msg: format!("unknown declaration {other}") }));
            }
        }
    }
    Ok(sig)
}
