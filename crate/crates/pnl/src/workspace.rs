//! Line-oriented workspace files.
//!
//! A theory file declares a signature, free unknowns and named axioms:
//!
//! ```text
//! atomsort nu
//! basesort iota
//! termformer lam : ([nu]iota) iota
//! propformer eq : (iota, iota)
//! unknown W : iota # perm(+{}, -{nu#-1})
//! axiom beta_id : forall Y:iota#perm(+{},-{}). eq(app(lam([nu#-1] var(nu#-1)), Y), Y)
//! ```
//!
//! A file without `axiom` lines is a plain signature. Derivation files are
//! the s-expression format of the proof module; inside one, `$name` stands
//! for the named axiom. Interpretation files assign proposition-formers:
//!
//! ```text
//! pred eq = equal
//! pred P = table default 0
//! holds P(nu#-1)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::nomsem::{denote_term, GroundValue, PnlInterp, PnlValuation, PredInterp};
use crate::pnl::{free_unknowns, PnlSort, Prop, Scope, Signature, Unknown};
use crate::proof::{parse_derivation, Derivation};

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Signature,
    Theory,
    Derivation,
    Interpretation,
}

impl FileKind {
    /// Guesses the kind from the first significant line.
    pub fn detect(src: &str) -> FileKind {
        let lines: Vec<&str> = significant(src).map(|(_, l)| l).collect();
        if lines.first().is_some_and(|l| l.starts_with('(') || l.starts_with(';')) {
            FileKind::Derivation
        } else if lines.iter().any(|l| l.starts_with("pred ")) {
            FileKind::Interpretation
        } else if lines.iter().any(|l| l.starts_with("axiom ")) {
            FileKind::Theory
        } else {
            FileKind::Signature
        }
    }
}

fn significant(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('%').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { pos: line, msg: format!("line {line}: {msg}") },
        Error::Sort(m) => Error::Sort(format!("line {line}: {m}")),
        Error::Invalid(m) => Error::Invalid(format!("line {line}: {m}")),
        e => e,
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos: line, msg: format!("line {line}: {}", msg.into()) }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub sig: Signature,
    pub unknowns: Vec<Unknown>,
    pub axioms: Vec<(String, Prop)>,
}

impl Theory {
    pub fn parse(src: &str) -> Result<Theory> {
        let mut th = Theory::default();
        for (line, text) in significant(src) {
            th.declaration(text).map_err(|e| at_line(line, e))?;
        }
        Ok(th)
    }

    fn declaration(&mut self, text: &str) -> Result<()> {
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let named = |what: &str| -> Result<(&str, &str)> {
            rest.split_once(':')
                .map(|(n, r)| (n.trim(), r.trim()))
                .filter(|(n, _)| !n.is_empty())
                .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected `{what} name : ...`") })
        };
        match kw {
            "atomsort" => {
                self.sig.add_atom_sort(rest)?;
            }
            "basesort" => self.sig.add_base_sort(rest)?,
            "termformer" => {
                let (name, ty) = named("termformer")?;
                let (arg, res) = ty
                    .rsplit_once(char::is_whitespace)
                    .ok_or_else(|| Error::Parse { pos: 0, msg: "expected `(arg) result`".into() })?;
                let arg = Scope::new(&self.sig).parse_sort(arg.trim())?;
                self.sig.check_sort(&arg)?;
                self.sig.add_term_former(name, arg, res.trim())?;
            }
            "propformer" => {
                let (name, ty) = named("propformer")?;
                let arg = Scope::new(&self.sig).parse_sort(ty)?;
                self.sig.check_sort(&arg)?;
                self.sig.add_prop_former(name, arg)?;
            }
            "unknown" => {
                let u = self.scope().parse_unknown_decl(rest)?;
                self.sig.check_sort(u.sort())?;
                if self.unknowns.iter().any(|v| v.name() == u.name()) {
                    return Err(Error::Invalid(format!("unknown {} declared twice", u.name())));
                }
                self.unknowns.push(u);
            }
            "axiom" => {
                let (name, body) = named("axiom")?;
                if self.axiom(name).is_some() {
                    return Err(Error::Invalid(format!("axiom {name} declared twice")));
                }
                let phi = self.scope().parse_prop(body)?;
                self.axioms.push((name.to_string(), phi));
            }
            other => return Err(Error::Parse { pos: 0, msg: format!("unknown declaration `{other}`") }),
        }
        Ok(())
    }

    pub fn scope(&self) -> Scope<'_> {
        Scope::with_unknowns(&self.sig, self.unknowns.iter().cloned())
    }

    pub fn axiom(&self, name: &str) -> Option<&Prop> {
        self.axioms.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// Replaces every `$name` by the parenthesised axiom.
    pub fn expand(&self, src: &str) -> Result<String> {
        let mut out = String::with_capacity(src.len());
        let mut rest = src;
        while let Some(i) = rest.find('$') {
            out.push_str(&rest[..i]);
            let tail = &rest[i + 1..];
            let len = tail.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(tail.len());
            let name = &tail[..len];
            let phi = self
                .axiom(name)
                .ok_or_else(|| Error::Parse { pos: src.len() - rest.len() + i, msg: format!("no axiom named `{name}`") })?;
            out.push_str(&format!("({phi})"));
            rest = &tail[len..];
        }
        out.push_str(rest);
        Ok(out)
    }

    pub fn parse_derivation(&self, src: &str) -> Result<Derivation> {
        parse_derivation(&self.scope(), &self.expand(src)?)
    }
}

fn former_arg(s: &PnlSort) -> String {
    match s {
        PnlSort::Tuple(xs) if xs.len() != 1 => s.to_string(),
        _ => format!("({s})"),
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in self.sig.atom_sorts() {
            writeln!(f, "atomsort {n}")?;
        }
        for b in self.sig.base_sorts() {
            writeln!(f, "basesort {b}")?;
        }
        for (name, (arg, res)) in self.sig.term_formers() {
            writeln!(f, "termformer {name} : {} {res}", former_arg(arg))?;
        }
        for (name, arg) in self.sig.prop_formers() {
            writeln!(f, "propformer {name} : {arg}")?;
        }
        for u in &self.unknowns {
            writeln!(f, "unknown {} : {} # {}", u.name(), u.sort(), u.pmss())?;
        }
        for (name, phi) in &self.axioms {
            writeln!(f, "axiom {name} : {phi}")?;
        }
        Ok(())
    }
}

/// Reads an interpretation file over `sig`.
pub fn parse_interp(sig: &Signature, src: &str) -> Result<PnlInterp> {
    let mut interp = PnlInterp::new(sig.clone());
    let mut tables: BTreeMap<String, (BTreeMap<GroundValue, bool>, bool)> = BTreeMap::new();
    let scope = Scope::new(sig);
    for (line, text) in significant(src) {
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        match kw {
            "pred" => {
                let (name, how) = rest.split_once('=').ok_or_else(|| parse_err(line, "expected `pred P = ...`"))?;
                let (name, how) = (name.trim(), how.split_whitespace().collect::<Vec<_>>());
                if !sig.prop_formers().contains_key(name) {
                    return Err(at_line(line, Error::Invalid(format!("{name} is not a proposition-former"))));
                }
                if interp.preds().contains_key(name) || tables.contains_key(name) {
                    return Err(at_line(line, Error::Invalid(format!("{name} interpreted twice"))));
                }
                match how.as_slice() {
                    ["equal"] => interp.set_pred(name, PredInterp::Equal)?,
                    ["table", "default", d] => {
                        let d = parse_bit(d).ok_or_else(|| parse_err(line, "default must be 0 or 1"))?;
                        tables.insert(name.to_string(), (BTreeMap::new(), d));
                    }
                    _ => return Err(parse_err(line, "expected `equal` or `table default 0|1`")),
                }
            }
            "holds" | "fails" => {
                let phi = scope.parse_prop(rest.trim()).map_err(|e| at_line(line, e))?;
                let Prop::Pred(p, r) = &phi else {
                    return Err(parse_err(line, "a row must be a single atomic proposition"));
                };
                if !free_unknowns(r).is_empty() {
                    return Err(parse_err(line, "a row must be ground"));
                }
                let (rows, _) =
                    tables.get_mut(&**p).ok_or_else(|| parse_err(line, format!("{p} has no table declared above")))?;
                let v = denote_term(&interp, &PnlValuation::new(), r)?;
                if rows.insert(v, kw == "holds").is_some() {
                    return Err(at_line(line, Error::Invalid(format!("duplicate row {phi}"))));
                }
            }
            other => return Err(parse_err(line, format!("unknown declaration `{other}`"))),
        }
    }
    for (p, (rows, default)) in tables {
        interp.set_pred(&p, PredInterp::Table { rows, default })?;
    }
    Ok(interp)
}

fn parse_bit(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// Prints an interpretation; custom predicates have no text form.
pub fn print_interp(interp: &PnlInterp) -> Result<String> {
    let mut out = String::new();
    for (p, pi) in interp.preds() {
        match pi {
            PredInterp::Equal => out.push_str(&format!("pred {p} = equal\n")),
            PredInterp::Table { rows, default } => {
                out.push_str(&format!("pred {p} = table default {}\n", u8::from(*default)));
                for (v, b) in rows {
                    let arg = match v {
                        GroundValue::Tuple(xs) if xs.len() != 1 => v.to_string(),
                        _ => format!("({v})"),
                    };
                    out.push_str(&format!("{} {p}{arg}\n", if *b { "holds" } else { "fails" }));
                }
            }
            PredInterp::Custom { name, .. } => {
                return Err(Error::Unsupported(format!("predicate {p} uses the built-in decision {name}")))
            }
        }
    }
    Ok(out)
}
