//! Simply-typed λ-calculus with products and the logical constants `bot`,
//! `imp` and `forall[β]`.
//!
//! Bound variables are de Bruijn indices and free variables are named, so
//! α-equivalent terms are structurally equal. Binders keep a printing hint
//! that equality ignores.

mod parse;
pub mod proof;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::atoms::{Atom, AtomSort, Permutation};
use crate::error::{Error, Result};

pub use parse::{parse_hol_signature, HolScope};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HolType {
    Base(Arc<str>),
    Tuple(Vec<HolType>),
    Arrow(Box<HolType>, Box<HolType>),
}

impl HolType {
    pub fn o() -> Self {
        HolType::base("o")
    }

    pub fn base(name: &str) -> Self {
        HolType::Base(Arc::from(name))
    }

    pub fn arrow(a: HolType, b: HolType) -> Self {
        HolType::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> ... -> an -> cod`.
    pub fn arrows(args: impl IntoIterator<Item = HolType, IntoIter: DoubleEndedIterator>, cod: HolType) -> Self {
        args.into_iter().rev().fold(cod, |acc, a| HolType::arrow(a, acc))
    }

    pub fn is_o(&self) -> bool {
        matches!(self, HolType::Base(n) if &**n == "o")
    }

    pub fn bases(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            HolType::Base(n) => {
                out.insert(n.clone());
            }
            HolType::Tuple(xs) => xs.iter().for_each(|x| x.bases(out)),
            HolType::Arrow(a, b) => {
                a.bases(out);
                b.bases(out);
            }
        }
    }
}

/// `mu_ν`, the type of atoms of sort `ν`.
pub fn atom_type(sort: &AtomSort) -> HolType {
    HolType::Base(Arc::from(format!("mu_{}", sort.name())))
}

impl fmt::Display for HolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HolType::Base(n) => f.write_str(n),
            HolType::Tuple(xs) if xs.len() == 1 => write!(f, "({},)", xs[0]),
            HolType::Tuple(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            HolType::Arrow(a, b) => match **a {
                HolType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

/// A free variable. Embedded PNL atoms are variables named after the atom
/// with type `mu_ν`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HolVar {
    pub name: Arc<str>,
    pub ty: HolType,
    pub atom: Option<Atom>,
}

impl HolVar {
    pub fn new(name: &str, ty: HolType) -> Self {
        HolVar { name: Arc::from(name), ty, atom: None }
    }

    pub fn atom(a: &Atom) -> Self {
        HolVar { name: Arc::from(a.to_string()), ty: atom_type(a.sort()), atom: Some(a.clone()) }
    }

    pub fn is_atom(&self) -> bool {
        self.atom.is_some()
    }
}

impl fmt::Display for HolVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A λ-binder: its type plus a name used only for printing.
#[derive(Clone, Debug)]
pub struct Binder {
    pub ty: HolType,
    pub hint: Arc<str>,
    pub atom: Option<Atom>,
}

impl Binder {
    pub fn of(v: &HolVar) -> Self {
        Binder { ty: v.ty.clone(), hint: v.name.clone(), atom: v.atom.clone() }
    }
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.ty == other.ty
    }
}
impl Eq for Binder {}
impl PartialOrd for Binder {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Binder {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ty.cmp(&other.ty)
    }
}
impl std::hash::Hash for Binder {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ty.hash(state)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HolConst {
    pub name: Arc<str>,
    pub ty: HolType,
}

impl HolConst {
    pub fn new(name: &str, ty: HolType) -> Self {
        HolConst { name: Arc::from(name), ty }
    }

    pub fn bot() -> Self {
        HolConst::new("bot", HolType::o())
    }

    pub fn imp() -> Self {
        HolConst::new("imp", HolType::arrows([HolType::o(), HolType::o()], HolType::o()))
    }

    /// `forall[β] : (β -> o) -> o`.
    pub fn forall(beta: HolType) -> Self {
        HolConst::new("forall", HolType::arrow(HolType::arrow(beta, HolType::o()), HolType::o()))
    }

    pub fn is_logical(&self) -> bool {
        matches!(&*self.name, "bot" | "imp" | "forall")
    }

    /// The quantified type of a `forall[β]` constant.
    pub fn forall_domain(&self) -> Option<&HolType> {
        if &*self.name != "forall" {
            return None;
        }
        match &self.ty {
            HolType::Arrow(p, _) => match &**p {
                HolType::Arrow(b, _) => Some(b),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HolTerm {
    Free(HolVar),
    Bound(usize),
    Lam(Binder, Box<HolTerm>),
    App(Box<HolTerm>, Box<HolTerm>),
    Tuple(Vec<HolTerm>),
    Const(HolConst),
}

impl HolTerm {
    pub fn var(v: &HolVar) -> Self {
        HolTerm::Free(v.clone())
    }

    pub fn atom(a: &Atom) -> Self {
        HolTerm::Free(HolVar::atom(a))
    }

    pub fn konst(c: HolConst) -> Self {
        HolTerm::Const(c)
    }

    pub fn app(f: HolTerm, x: HolTerm) -> Self {
        HolTerm::App(Box::new(f), Box::new(x))
    }

    pub fn apps(f: HolTerm, xs: impl IntoIterator<Item = HolTerm>) -> Self {
        xs.into_iter().fold(f, HolTerm::app)
    }

    /// `λv.body`, abstracting the free occurrences of `v`.
    pub fn lam(v: &HolVar, body: HolTerm) -> Self {
        HolTerm::Lam(Binder::of(v), Box::new(close(&body, v, 0)))
    }

    pub fn lams<'a>(vs: impl IntoIterator<Item = &'a HolVar, IntoIter: DoubleEndedIterator>, body: HolTerm) -> Self {
        vs.into_iter().rev().fold(body, |acc, v| HolTerm::lam(v, acc))
    }

    pub fn bot() -> Self {
        HolTerm::Const(HolConst::bot())
    }

    pub fn imp(a: HolTerm, b: HolTerm) -> Self {
        HolTerm::apps(HolTerm::Const(HolConst::imp()), [a, b])
    }

    /// `forall[type(v)] (λv.body)`.
    pub fn forall(v: &HolVar, body: HolTerm) -> Self {
        HolTerm::app(HolTerm::Const(HolConst::forall(v.ty.clone())), HolTerm::lam(v, body))
    }

    pub fn as_imp(&self) -> Option<(&HolTerm, &HolTerm)> {
        if let HolTerm::App(f, b) = self {
            if let HolTerm::App(g, a) = &**f {
                if matches!(&**g, HolTerm::Const(c) if &*c.name == "imp") {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `forall[β] (λ.body)` as `(binder, body)`.
    pub fn as_forall(&self) -> Option<(&Binder, &HolTerm)> {
        if let HolTerm::App(f, l) = self {
            if let (HolTerm::Const(c), HolTerm::Lam(b, body)) = (&**f, &**l) {
                if &*c.name == "forall" {
                    return Some((b, body));
                }
            }
        }
        None
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, HolTerm::Const(c) if &*c.name == "bot")
    }

    pub fn size(&self) -> usize {
        match self {
            HolTerm::Free(_) | HolTerm::Bound(_) | HolTerm::Const(_) => 1,
            HolTerm::Lam(_, b) => 1 + b.size(),
            HolTerm::App(f, x) => 1 + f.size() + x.size(),
            HolTerm::Tuple(xs) => 1 + xs.iter().map(HolTerm::size).sum::<usize>(),
        }
    }
}

/// Replaces free `v` by the bound index `depth`.
fn close(t: &HolTerm, v: &HolVar, depth: usize) -> HolTerm {
    match t {
        HolTerm::Free(w) if w == v => HolTerm::Bound(depth),
        HolTerm::Free(_) | HolTerm::Bound(_) | HolTerm::Const(_) => t.clone(),
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(close(body, v, depth + 1))),
        HolTerm::App(f, x) => HolTerm::app(close(f, v, depth), close(x, v, depth)),
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| close(x, v, depth)).collect()),
    }
}

fn shift(t: &HolTerm, d: isize, cutoff: usize) -> HolTerm {
    match t {
        HolTerm::Bound(i) if *i >= cutoff => HolTerm::Bound((*i as isize + d) as usize),
        HolTerm::Free(_) | HolTerm::Bound(_) | HolTerm::Const(_) => t.clone(),
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(shift(body, d, cutoff + 1))),
        HolTerm::App(f, x) => HolTerm::app(shift(f, d, cutoff), shift(x, d, cutoff)),
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| shift(x, d, cutoff)).collect()),
    }
}

fn subst_bound(t: &HolTerm, j: usize, s: &HolTerm) -> HolTerm {
    match t {
        HolTerm::Bound(i) if *i == j => s.clone(),
        HolTerm::Free(_) | HolTerm::Bound(_) | HolTerm::Const(_) => t.clone(),
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(subst_bound(body, j + 1, &shift(s, 1, 0)))),
        HolTerm::App(f, x) => HolTerm::app(subst_bound(f, j, s), subst_bound(x, j, s)),
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| subst_bound(x, j, s)).collect()),
    }
}

/// Contracts `(λ.body) arg`.
pub fn instantiate(body: &HolTerm, arg: &HolTerm) -> HolTerm {
    shift(&subst_bound(body, 0, &shift(arg, 1, 0)), -1, 0)
}

pub fn free_vars(t: &HolTerm) -> BTreeSet<HolVar> {
    fn go(t: &HolTerm, out: &mut BTreeSet<HolVar>) {
        match t {
            HolTerm::Free(v) => {
                out.insert(v.clone());
            }
            HolTerm::Bound(_) | HolTerm::Const(_) => {}
            HolTerm::Lam(_, b) => go(b, out),
            HolTerm::App(f, x) => {
                go(f, out);
                go(x, out);
            }
            HolTerm::Tuple(xs) => xs.iter().for_each(|x| go(x, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

pub fn alpha_eq(t: &HolTerm, u: &HolTerm) -> bool {
    t == u
}

/// Renames free variables; `f` returns `None` to keep a variable.
pub fn rename_free(t: &HolTerm, f: &impl Fn(&HolVar) -> Option<HolVar>) -> HolTerm {
    match t {
        HolTerm::Free(v) => HolTerm::Free(f(v).unwrap_or_else(|| v.clone())),
        HolTerm::Bound(_) | HolTerm::Const(_) => t.clone(),
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(rename_free(body, f))),
        HolTerm::App(a, x) => HolTerm::app(rename_free(a, f), rename_free(x, f)),
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| rename_free(x, f)).collect()),
    }
}

/// `π·t` with `π` acting on the atom variables.
pub fn perm(pi: &Permutation, t: &HolTerm) -> HolTerm {
    rename_free(t, &|v| v.atom.as_ref().map(|a| HolVar::atom(&pi.apply(a))))
}

/// `t[X:=u]`. Bound variables are indices, so capture cannot occur.
pub fn subst(t: &HolTerm, x: &HolVar, u: &HolTerm) -> HolTerm {
    subst_many(t, &BTreeMap::from([(x.clone(), u.clone())]))
}

pub fn subst_many(t: &HolTerm, m: &BTreeMap<HolVar, HolTerm>) -> HolTerm {
    fn go(t: &HolTerm, m: &BTreeMap<HolVar, HolTerm>, depth: usize) -> HolTerm {
        match t {
            HolTerm::Free(v) => match m.get(v) {
                Some(u) => shift(u, depth as isize, 0),
                None => t.clone(),
            },
            HolTerm::Bound(_) | HolTerm::Const(_) => t.clone(),
            HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(go(body, m, depth + 1))),
            HolTerm::App(f, x) => HolTerm::app(go(f, m, depth), go(x, m, depth)),
            HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| go(x, m, depth)).collect()),
        }
    }
    go(t, m, 0)
}

fn whnf(t: HolTerm) -> HolTerm {
    match t {
        HolTerm::App(f, x) => match whnf(*f) {
            HolTerm::Lam(_, body) => whnf(instantiate(&body, &x)),
            f => HolTerm::App(Box::new(f), x),
        },
        t => t,
    }
}

/// β-normal form by leftmost-outermost reduction.
pub fn beta_normalize(t: &HolTerm) -> HolTerm {
    match t {
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(beta_normalize(body))),
        HolTerm::App(f, x) => match whnf((**f).clone()) {
            HolTerm::Lam(_, body) => beta_normalize(&instantiate(&body, x)),
            f => HolTerm::app(beta_normalize(&f), beta_normalize(x)),
        },
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(beta_normalize).collect()),
        _ => t.clone(),
    }
}

/// β-normal form reducing arguments before contracting.
pub fn beta_normalize_innermost(t: &HolTerm) -> HolTerm {
    match t {
        HolTerm::Lam(b, body) => HolTerm::Lam(b.clone(), Box::new(beta_normalize_innermost(body))),
        HolTerm::App(f, x) => {
            let f = beta_normalize_innermost(f);
            let x = beta_normalize_innermost(x);
            match f {
                HolTerm::Lam(_, body) => beta_normalize_innermost(&instantiate(&body, &x)),
                f => HolTerm::app(f, x),
            }
        }
        HolTerm::Tuple(xs) => HolTerm::Tuple(xs.iter().map(beta_normalize_innermost).collect()),
        _ => t.clone(),
    }
}

pub fn is_beta_normal(t: &HolTerm) -> bool {
    match t {
        HolTerm::App(f, x) => !matches!(**f, HolTerm::Lam(..)) && is_beta_normal(f) && is_beta_normal(x),
        HolTerm::Lam(_, b) => is_beta_normal(b),
        HolTerm::Tuple(xs) => xs.iter().all(is_beta_normal),
        _ => true,
    }
}

/// Base types, non-logical constants, and declared free variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HolSignature {
    bases: BTreeSet<Arc<str>>,
    consts: BTreeMap<Arc<str>, HolType>,
    vars: BTreeMap<Arc<str>, HolType>,
}

impl Default for HolSignature {
    fn default() -> Self {
        HolSignature::new()
    }
}

impl HolSignature {
    pub fn new() -> Self {
        HolSignature { bases: BTreeSet::from([Arc::from("o")]), consts: BTreeMap::new(), vars: BTreeMap::new() }
    }

    pub fn add_base(&mut self, name: &str) {
        self.bases.insert(Arc::from(name));
    }

    pub fn add_const(&mut self, name: &str, ty: HolType) -> Result<()> {
        if matches!(name, "bot" | "imp" | "forall") {
            return Err(Error::Invalid(format!("{name} is a logical constant")));
        }
        self.check_type(&ty)?;
        self.consts.insert(Arc::from(name), ty);
        Ok(())
    }

    pub fn add_var(&mut self, name: &str, ty: HolType) -> Result<()> {
        self.check_type(&ty)?;
        self.vars.insert(Arc::from(name), ty);
        Ok(())
    }

    pub fn bases(&self) -> &BTreeSet<Arc<str>> {
        &self.bases
    }

    pub fn consts(&self) -> &BTreeMap<Arc<str>, HolType> {
        &self.consts
    }

    pub fn vars(&self) -> &BTreeMap<Arc<str>, HolType> {
        &self.vars
    }

    pub fn constant(&self, name: &str) -> Option<HolConst> {
        self.consts.get(name).map(|ty| HolConst::new(name, ty.clone()))
    }

    pub fn check_type(&self, ty: &HolType) -> Result<()> {
        let mut bs = BTreeSet::new();
        ty.bases(&mut bs);
        match bs.iter().find(|b| !self.bases.contains(*b)) {
            Some(b) => Err(Error::Type(format!("undeclared base type {b}"))),
            None => Ok(()),
        }
    }

    fn check_const(&self, c: &HolConst) -> Result<()> {
        let expected = match &*c.name {
            "bot" => HolConst::bot().ty,
            "imp" => HolConst::imp().ty,
            "forall" => {
                let beta = c
                    .forall_domain()
                    .ok_or_else(|| Error::Type(format!("forall constant has type {}", c.ty)))?;
                self.check_type(beta)?;
                return Ok(());
            }
            n => self.consts.get(n).cloned().ok_or_else(|| Error::Type(format!("undeclared constant {n}")))?,
        };
        if expected == c.ty {
            Ok(())
        } else {
            Err(Error::Type(format!("constant {} declared at {expected}, used at {}", c.name, c.ty)))
        }
    }

    pub fn type_of(&self, t: &HolTerm) -> Result<HolType> {
        self.type_in(t, &mut Vec::new())
    }

    pub(crate) fn type_in(&self, t: &HolTerm, ctx: &mut Vec<HolType>) -> Result<HolType> {
        match t {
            HolTerm::Free(v) => {
                self.check_type(&v.ty)?;
                if let Some(a) = &v.atom {
                    if v.ty != atom_type(a.sort()) {
                        return Err(Error::Type(format!("atom {a} used at type {}", v.ty)));
                    }
                }
                Ok(v.ty.clone())
            }
            HolTerm::Bound(i) => ctx
                .len()
                .checked_sub(i + 1)
                .map(|k| ctx[k].clone())
                .ok_or_else(|| Error::Type(format!("loose bound index {i}"))),
            HolTerm::Lam(b, body) => {
                self.check_type(&b.ty)?;
                ctx.push(b.ty.clone());
                let r = self.type_in(body, ctx);
                ctx.pop();
                Ok(HolType::arrow(b.ty.clone(), r?))
            }
            HolTerm::App(f, x) => {
                let tf = self.type_in(f, ctx)?;
                let tx = self.type_in(x, ctx)?;
                match tf {
                    HolType::Arrow(a, c) if *a == tx => Ok(*c),
                    HolType::Arrow(a, _) => Err(Error::Type(format!("argument has type {tx}, expected {a}"))),
                    other => Err(Error::Type(format!("cannot apply a term of type {other}"))),
                }
            }
            HolTerm::Tuple(xs) => Ok(HolType::Tuple(xs.iter().map(|x| self.type_in(x, ctx)).collect::<Result<_>>()?)),
            HolTerm::Const(c) => {
                self.check_const(c)?;
                Ok(c.ty.clone())
            }
        }
    }

    /// Checks that `t` is a proposition.
    pub fn check_prop(&self, t: &HolTerm) -> Result<()> {
        let ty = self.type_of(t)?;
        if ty.is_o() {
            Ok(())
        } else {
            Err(Error::Type(format!("proposition has type {ty}, expected o")))
        }
    }
}

impl fmt::Display for HolSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bases.iter().filter(|b| &***b != "o") {
            writeln!(f, "basetype {b}")?;
        }
        for (c, ty) in &self.consts {
            writeln!(f, "const {c} : {ty}")?;
        }
        for (v, ty) in &self.vars {
            writeln!(f, "var {v} : {ty}")?;
        }
        Ok(())
    }
}

const PREC_BINDER: u8 = 0;
const PREC_IMP: u8 = 1;
const PREC_APP: u8 = 2;
const PREC_ATOM: u8 = 3;

struct Printer {
    avoid: BTreeSet<String>,
    names: Vec<String>,
}

impl Printer {
    fn pick(&self, b: &Binder) -> String {
        let taken = |n: &str| self.avoid.contains(n) || self.names.iter().any(|m| m == n);
        if let Some(a) = &b.atom {
            if !taken(&a.to_string()) {
                return a.to_string();
            }
            return (0..)
                .map(|i| Atom::new(a.sort(), i).to_string())
                .find(|n| !taken(n))
                .expect("unbounded");
        }
        let mut n = b.hint.to_string();
        while taken(&n) {
            n.push('\'');
        }
        n
    }

    fn binder(&mut self, f: &mut fmt::Formatter<'_>, kw: &str, b: &Binder, body: &HolTerm, prec: u8) -> fmt::Result {
        let name = self.pick(b);
        if prec > PREC_BINDER {
            f.write_str("(")?;
        }
        if b.atom.is_some() {
            write!(f, "{kw}{name}. ")?;
        } else {
            write!(f, "{kw}{name}:{}. ", b.ty)?;
        }
        self.names.push(name);
        self.go(f, body, PREC_BINDER)?;
        self.names.pop();
        if prec > PREC_BINDER {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn go(&mut self, f: &mut fmt::Formatter<'_>, t: &HolTerm, prec: u8) -> fmt::Result {
        if let Some((b, body)) = t.as_forall() {
            return self.binder(f, "forall ", b, body, prec);
        }
        if let Some((a, b)) = t.as_imp() {
            if prec > PREC_IMP {
                f.write_str("(")?;
            }
            self.go(f, a, PREC_APP)?;
            f.write_str(" => ")?;
            self.go(f, b, PREC_IMP)?;
            if prec > PREC_IMP {
                f.write_str(")")?;
            }
            return Ok(());
        }
        match t {
            HolTerm::Free(v) => f.write_str(&v.name),
            HolTerm::Bound(i) => match self.names.len().checked_sub(i + 1) {
                Some(k) => f.write_str(&self.names[k]),
                None => write!(f, "?{i}"),
            },
            HolTerm::Const(c) => match c.forall_domain() {
                Some(beta) => write!(f, "forall[{beta}]"),
                None => f.write_str(&c.name),
            },
            HolTerm::Lam(b, body) => self.binder(f, "\\", b, body, prec),
            HolTerm::App(g, x) => {
                if prec > PREC_APP {
                    f.write_str("(")?;
                }
                self.go(f, g, PREC_APP)?;
                f.write_str(" ")?;
                self.go(f, x, PREC_ATOM)?;
                if prec > PREC_APP {
                    f.write_str(")")?;
                }
                Ok(())
            }
            HolTerm::Tuple(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    self.go(f, x, PREC_BINDER)?;
                }
                if xs.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for HolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let avoid = free_vars(self).into_iter().map(|v| v.name.to_string()).collect();
        Printer { avoid, names: Vec::new() }.go(f, self, PREC_BINDER)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(i: i64) -> Atom {
        Atom::new(&AtomSort::new("nu"), i)
    }

    fn mu() -> HolType {
        HolType::base("mu_nu")
    }

    #[test]
    fn identity_types() {
        let mut s = HolSignature::new();
        s.add_base("mu_nu");
        let x = HolVar::new("X", mu());
        let id = HolTerm::lam(&x, HolTerm::var(&x));
        assert_eq!(s.type_of(&id).unwrap(), HolType::arrow(mu(), mu()));
        let bad = HolTerm::app(HolTerm::var(&x), HolTerm::var(&x));
        assert!(matches!(s.type_of(&bad), Err(Error::Type(_))));
    }

    #[test]
    fn alpha_by_structure() {
        let x = HolVar::new("X", mu());
        let y = HolVar::new("Y", mu());
        assert!(alpha_eq(&HolTerm::lam(&x, HolTerm::var(&x)), &HolTerm::lam(&y, HolTerm::var(&y))));
        let k1 = HolTerm::lam(&x, HolTerm::lam(&y, HolTerm::var(&x)));
        let k2 = HolTerm::lam(&y, HolTerm::lam(&x, HolTerm::var(&x)));
        assert!(!alpha_eq(&k1, &k2));
    }

    #[test]
    fn substitution_avoids_capture() {
        let x = HolVar::new("X", mu());
        let y = HolVar::new("Y", mu());
        let t = HolTerm::lam(&y, HolTerm::var(&x));
        let got = subst(&t, &x, &HolTerm::var(&y));
        assert_eq!(free_vars(&got), BTreeSet::from([y.clone()]));
        assert_eq!(got.to_string(), "\\Y':mu_nu. Y");
        assert_eq!(subst(&HolTerm::var(&x), &x, &HolTerm::atom(&nu(0))), HolTerm::atom(&nu(0)));
    }

    #[test]
    fn beta_strategies_agree() {
        let mut s = HolSignature::new();
        s.add_base("mu_nu");
        s.add_const("c", mu()).unwrap();
        let x = HolVar::new("X", mu());
        let f = HolVar::new("F", HolType::arrow(mu(), mu()));
        let c = HolTerm::Const(s.constant("c").unwrap());
        let t = HolTerm::app(HolTerm::lam(&x, HolTerm::var(&x)), c.clone());
        assert_eq!(beta_normalize(&t), c);
        // (λF.λX.F (F X)) (λX.X) under a binder
        let twice = HolTerm::lam(
            &f,
            HolTerm::lam(&x, HolTerm::app(HolTerm::var(&f), HolTerm::app(HolTerm::var(&f), HolTerm::var(&x)))),
        );
        let t = HolTerm::app(twice, HolTerm::lam(&x, HolTerm::var(&x)));
        let n = beta_normalize(&t);
        assert!(is_beta_normal(&n));
        assert_eq!(n, beta_normalize_innermost(&t));
        assert_eq!(n, HolTerm::lam(&x, HolTerm::var(&x)));
        assert_eq!(s.type_of(&n).unwrap(), s.type_of(&t).unwrap());
    }

    #[test]
    fn atom_binders_print_as_atoms() {
        let a = HolVar::atom(&nu(-1));
        let xd = HolVar::new("X@[nu#-1]", HolType::arrow(mu(), HolType::base("mu_iota")));
        let t = HolTerm::lam(&a, HolTerm::app(HolTerm::var(&xd), HolTerm::var(&a)));
        assert_eq!(t.to_string(), "\\nu#-1. X@[nu#-1] nu#-1");
        let clash = HolTerm::Lam(Binder::of(&a), Box::new(HolTerm::Tuple(vec![HolTerm::Bound(0), HolTerm::var(&a)])));
        assert_eq!(clash.to_string(), "\\nu#0. (nu#0, nu#-1)");
    }

    #[test]
    fn logical_sugar() {
        let x = HolVar::new("X", HolType::o());
        let t = HolTerm::forall(&x, HolTerm::imp(HolTerm::var(&x), HolTerm::bot()));
        assert_eq!(t.to_string(), "forall X:o. X => bot");
        assert!(HolSignature::new().check_prop(&t).is_ok());
    }
}
