//! Text syntax for terms and propositions.
//!
//! ```text
//! term  ::= atom | [atom] term | f(args) | (term, ...) | perm*X | X
//! prop  ::= forall X:sort#perm(+{..},-{..}). prop | prim => prop | prim
//! prim  ::= bot | P(args) | (prop)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::atoms::{parse_atom, parse_perm_set, parse_permutation, AtomSort};
use crate::error::Result;
use crate::text::{Cursor, Tok};

use super::{canon_prop, canon_term, PnlSort, Prop, Signature, Term, Unknown};

/// A signature together with the free unknowns that text may mention.
#[derive(Clone, Debug)]
pub struct Scope<'a> {
    pub sig: &'a Signature,
    unknowns: BTreeMap<String, Unknown>,
}

impl<'a> Scope<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Scope { sig, unknowns: BTreeMap::new() }
    }

    pub fn with_unknowns(sig: &'a Signature, us: impl IntoIterator<Item = Unknown>) -> Self {
        let mut s = Scope::new(sig);
        for u in us {
            s.declare(u);
        }
        s
    }

    pub fn declare(&mut self, u: Unknown) {
        self.unknowns.insert(u.name().to_string(), u);
    }

    pub fn unknown(&self, name: &str) -> Option<&Unknown> {
        self.unknowns.get(name)
    }

    pub fn unknowns(&self) -> impl Iterator<Item = &Unknown> {
        self.unknowns.values()
    }

    /// Parses and sort-checks a term; the result is canonical.
    pub fn parse_term(&self, src: &str) -> Result<Term> {
        let mut c = Cursor::new(src)?;
        let t = self.term(&mut c, &[])?;
        c.expect_end()?;
        self.sig.sort_of(&t)?;
        Ok(canon_term(&t))
    }

    /// Parses and sort-checks a proposition; the result is canonical.
    pub fn parse_prop(&self, src: &str) -> Result<Prop> {
        let mut c = Cursor::new(src)?;
        let p = self.prop(&mut c, &mut Vec::new())?;
        c.expect_end()?;
        self.sig.check_prop(&p)?;
        Ok(canon_prop(&p))
    }

    pub fn parse_sort(&self, src: &str) -> Result<PnlSort> {
        let mut c = Cursor::new(src)?;
        let s = self.sort(&mut c)?;
        c.expect_end()?;
        Ok(s)
    }

    /// `name : sort # perm(...)`.
    pub fn parse_unknown_decl(&self, src: &str) -> Result<Unknown> {
        let mut c = Cursor::new(src)?;
        let u = self.binder(&mut c)?;
        c.expect_end()?;
        Ok(u)
    }

    pub(crate) fn sort(&self, c: &mut Cursor) -> Result<PnlSort> {
        if c.eat_sym("[") {
            let n = c.ident()?;
            if !self.sig.is_atom_sort(&n) {
                return c.err(format!("{n} is not a name sort"));
            }
            c.expect_sym("]")?;
            let body = self.sort(c)?;
            return Ok(PnlSort::Abs(AtomSort::new(&n), Box::new(body)));
        }
        if c.eat_sym("(") {
            let mut xs = Vec::new();
            let mut trailing = false;
            while !c.eat_sym(")") {
                xs.push(self.sort(c)?);
                trailing = c.eat_sym(",");
                if !trailing && !c.is_sym(")") {
                    return c.err("expected `,` or `)` in tuple sort");
                }
            }
            if xs.len() == 1 && !trailing {
                return Ok(xs.pop().expect("one element"));
            }
            return Ok(PnlSort::Tuple(xs));
        }
        let n = c.ident()?;
        if self.sig.is_atom_sort(&n) {
            Ok(PnlSort::Name(AtomSort::new(&n)))
        } else if self.sig.base_sorts().contains(n.as_str()) {
            Ok(PnlSort::Base(Arc::from(n.as_str())))
        } else {
            c.err(format!("undeclared sort {n}"))
        }
    }

    fn binder(&self, c: &mut Cursor) -> Result<Unknown> {
        let name = c.ident()?;
        c.expect_sym(":")?;
        let sort = self.sort(c)?;
        c.expect_sym("#")?;
        let pmss = parse_perm_set(c)?;
        Ok(Unknown::new(&name, sort, pmss))
    }

    fn lookup(&self, c: &Cursor, name: &str, bound: &[Unknown]) -> Result<Unknown> {
        if let Some(u) = bound.iter().rev().find(|u| u.name() == name) {
            return Ok(u.clone());
        }
        match self.unknowns.get(name) {
            Some(u) => Ok(u.clone()),
            None => c.err(format!("undeclared unknown {name}")),
        }
    }

    fn args(&self, c: &mut Cursor, bound: &[Unknown]) -> Result<Term> {
        c.expect_sym("(")?;
        let mut xs = Vec::new();
        while !c.eat_sym(")") {
            xs.push(self.term(c, bound)?);
            if !c.eat_sym(",") && !c.is_sym(")") {
                return c.err("expected `,` or `)`");
            }
        }
        Ok(if xs.len() == 1 { xs.pop().expect("one") } else { Term::Tuple(xs) })
    }

    pub(crate) fn term(&self, c: &mut Cursor, bound: &[Unknown]) -> Result<Term> {
        if c.eat_sym("[") {
            let a = parse_atom(c)?;
            c.expect_sym("]")?;
            let body = self.term(c, bound)?;
            return Ok(Term::Abs(a, Box::new(body)));
        }
        if c.is_sym("(") {
            let mark = c.mark();
            if let Ok(pi) = parse_permutation(c) {
                if c.eat_sym("*") {
                    let name = c.ident()?;
                    let x = self.lookup(c, &name, bound)?;
                    return Ok(Term::Susp(pi, x));
                }
            }
            c.reset(mark);
            c.expect_sym("(")?;
            let mut xs = Vec::new();
            let mut trailing = false;
            while !c.eat_sym(")") {
                xs.push(self.term(c, bound)?);
                trailing = c.eat_sym(",");
                if !trailing && !c.is_sym(")") {
                    return c.err("expected `,` or `)` in tuple");
                }
            }
            if xs.len() == 1 && !trailing {
                return Ok(xs.pop().expect("one"));
            }
            return Ok(Term::Tuple(xs));
        }
        match (c.peek(), c.peek_at(1)) {
            (Some(Tok::Ident(_)), Some(Tok::Sym("#"))) => Ok(Term::Atom(parse_atom(c)?)),
            (Some(Tok::Ident(_)), Some(Tok::Sym("("))) => {
                let f = c.ident()?;
                if !self.sig.term_formers().contains_key(f.as_str()) {
                    return c.err(format!("undeclared term-former {f}"));
                }
                let arg = self.args(c, bound)?;
                Ok(Term::App(Arc::from(f.as_str()), Box::new(arg)))
            }
            (Some(Tok::Ident(_)), _) => {
                let name = c.ident()?;
                Ok(Term::var(&self.lookup(c, &name, bound)?))
            }
            _ => c.err("expected a term"),
        }
    }

    pub(crate) fn prop(&self, c: &mut Cursor, bound: &mut Vec<Unknown>) -> Result<Prop> {
        if c.eat_ident("forall") {
            let x = self.binder(c)?;
            c.expect_sym(".")?;
            bound.push(x.clone());
            let body = self.prop(c, bound);
            bound.pop();
            return Ok(Prop::Forall(x, Box::new(body?)));
        }
        let lhs = self.prim(c, bound)?;
        if c.eat_sym("=>") {
            let rhs = self.prop(c, bound)?;
            return Ok(Prop::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn prim(&self, c: &mut Cursor, bound: &mut Vec<Unknown>) -> Result<Prop> {
        if c.eat_ident("bot") {
            return Ok(Prop::Bot);
        }
        if c.eat_sym("(") {
            let p = self.prop(c, bound)?;
            c.expect_sym(")")?;
            return Ok(p);
        }
        let p = c.ident()?;
        if !self.sig.prop_formers().contains_key(p.as_str()) {
            return c.err(format!("undeclared proposition-former {p}"));
        }
        let arg = self.args(c, bound)?;
        Ok(Prop::Pred(Arc::from(p.as_str()), arg))
    }
}


fn write_args(f: &mut fmt::Formatter<'_>, head: &str, arg: &Term) -> fmt::Result {
    match arg {
        Term::Tuple(xs) if xs.len() != 1 => {
            write!(f, "{head}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        _ => write!(f, "{head}({arg})"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(a) => write!(f, "{a}"),
            Term::Tuple(xs) if xs.len() == 1 => write!(f, "({},)", xs[0]),
            Term::Tuple(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Term::App(g, arg) => write_args(f, g, arg),
            Term::Abs(a, body) => write!(f, "[{a}] {body}"),
            Term::Susp(pi, x) if pi.is_id() => write!(f, "{x}"),
            Term::Susp(pi, x) => write!(f, "{pi}*{x}"),
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Bot => f.write_str("bot"),
            Prop::Pred(p, r) => write_args(f, p, r),
            Prop::Imp(a, b) => {
                match **a {
                    Prop::Imp(..) | Prop::Forall(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " => {b}")
            }
            Prop::Forall(x, body) => write!(f, "forall {}:{}#{}. {body}", x.name(), x.sort(), x.pmss()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::PermissionSet;
    use crate::pnl::alpha_eq_prop;

    fn sig() -> Signature {
        let mut s = Signature::new();
        let nu = s.add_atom_sort("nu").unwrap();
        s.add_base_sort("iota").unwrap();
        s.add_term_former("var", PnlSort::Name(nu.clone()), "iota").unwrap();
        s.add_term_former("app", PnlSort::Tuple(vec![PnlSort::base("iota"), PnlSort::base("iota")]), "iota")
            .unwrap();
        s.add_term_former("lam", PnlSort::Abs(nu.clone(), Box::new(PnlSort::base("iota"))), "iota").unwrap();
        s.add_prop_former("eq", PnlSort::Tuple(vec![PnlSort::base("iota"), PnlSort::base("iota")])).unwrap();
        s.add_prop_former("P", PnlSort::Name(nu)).unwrap();
        s
    }

    fn scope(s: &Signature) -> Scope<'_> {
        Scope::with_unknowns(s, [Unknown::new("X", PnlSort::base("iota"), PermissionSet::down())])
    }

    #[test]
    fn roundtrip_terms() {
        let s = sig();
        let sc = scope(&s);
        for src in [
            "lam([nu#-1] app(X, var(nu#-1)))",
            "((nu#-1 nu#-2))*X",
            "lam([nu#0] ((nu#-1 nu#0))*X)",
            "app(var(nu#3), X)",
        ] {
            let t = sc.parse_term(src).unwrap();
            let back = sc.parse_term(&t.to_string()).unwrap();
            assert_eq!(t, back, "{src} printed as {t}");
        }
    }

    #[test]
    fn roundtrip_props() {
        let s = sig();
        let sc = scope(&s);
        for src in [
            "forall Y:iota#perm(+{},-{}). eq(app(lam([nu#-1] var(nu#-1)), Y), Y)",
            "(bot => bot) => P(nu#-1)",
            "forall Z:iota#perm(+{},-{nu#-1}). eq(lam([nu#-1] app(Z, var(nu#-1))), Z)",
            "(forall Y:iota#perm(+{},-{}). eq(Y, X)) => bot",
        ] {
            let p = sc.parse_prop(src).unwrap();
            let back = sc.parse_prop(&p.to_string()).unwrap();
            assert_eq!(p, back, "{src} printed as {p}");
        }
    }

    #[test]
    fn bound_names_shadow_scope() {
        let s = sig();
        let sc = scope(&s);
        let p = sc.parse_prop("forall X:nu#perm(+{},-{}). P(X)").unwrap();
        let q = sc.parse_prop("forall W:nu#perm(+{},-{}). P(W)").unwrap();
        assert!(alpha_eq_prop(&p, &q));
    }

    #[test]
    fn parse_errors() {
        let s = sig();
        let sc = scope(&s);
        assert!(matches!(sc.parse_term("app(var(nu#0)"), Err(crate::Error::Parse { .. })));
        assert!(matches!(sc.parse_term("app(var(nu#0))"), Err(crate::Error::Sort(_))));
        assert!(sc.parse_term("Q").is_err());
        assert!(sc.parse_prop("P(nu#0) =>").is_err());
    }

    #[test]
    fn tuples_and_sorts() {
        let s = sig();
        let sc = scope(&s);
        assert_eq!(sc.parse_term("()").unwrap(), Term::Tuple(vec![]));
        let t = sc.parse_term("(nu#1,)").unwrap();
        assert_eq!(t.to_string(), "(nu#1,)");
        assert_eq!(sc.parse_sort("[nu](iota, nu)").unwrap().to_string(), "[nu](iota, nu)");
    }
}
