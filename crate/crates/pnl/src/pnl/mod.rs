//! Permissive-nominal syntax: sorts, signatures, unknowns, terms and
//! propositions, with both permutation actions and free atoms/unknowns.
//!
//! The enums below are raw syntax. Every operation that produces a term or a
//! proposition returns it in canonical α-normal form (see [`canon`]), so two
//! results are α-equivalent exactly when they are equal.

pub mod canon;
pub mod parse;
pub mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::atoms::{Atom, AtomSetExpr, AtomSort, PermissionSet, Permutation};
use crate::error::{Error, Result};

pub use canon::{alpha_eq, alpha_eq_prop, canon_prop, canon_term};
pub use parse::Scope;
pub use subst::Subst;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PnlSort {
    Name(AtomSort),
    Base(Arc<str>),
    Tuple(Vec<PnlSort>),
    Abs(AtomSort, Box<PnlSort>),
}

impl PnlSort {
    pub fn base(name: &str) -> Self {
        PnlSort::Base(Arc::from(name))
    }

    pub fn name(sort: &AtomSort) -> Self {
        PnlSort::Name(sort.clone())
    }
}

impl fmt::Display for PnlSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PnlSort::Name(s) => write!(f, "{s}"),
            PnlSort::Base(s) => f.write_str(s),
            PnlSort::Tuple(xs) if xs.len() == 1 => write!(f, "({},)", xs[0]),
            PnlSort::Tuple(xs) => {
                write!(f, "({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            }
            PnlSort::Abs(s, body) => write!(f, "[{s}]{body}"),
        }
    }
}

/// Term-formers `f:(α)τ` and proposition-formers `P:α` over declared sorts.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Signature {
    atom_sorts: BTreeSet<AtomSort>,
    base_sorts: BTreeSet<Arc<str>>,
    term_formers: BTreeMap<Arc<str>, (PnlSort, Arc<str>)>,
    prop_formers: BTreeMap<Arc<str>, PnlSort>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn name_taken(&self, name: &str) -> bool {
        self.atom_sorts.contains(&AtomSort::new(name))
            || self.base_sorts.contains(name)
            || self.term_formers.contains_key(name)
            || self.prop_formers.contains_key(name)
    }

    pub fn add_atom_sort(&mut self, name: &str) -> Result<AtomSort> {
        if self.name_taken(name) {
            return Err(Error::Invalid(format!("name {name} already declared")));
        }
        let s = AtomSort::new(name);
        self.atom_sorts.insert(s.clone());
        Ok(s)
    }

    pub fn add_base_sort(&mut self, name: &str) -> Result<()> {
        if self.name_taken(name) {
            return Err(Error::Invalid(format!("name {name} already declared")));
        }
        self.base_sorts.insert(Arc::from(name));
        Ok(())
    }

    pub fn add_term_former(&mut self, name: &str, arg: PnlSort, result: &str) -> Result<()> {
        if self.name_taken(name) {
            return Err(Error::Invalid(format!("name {name} already declared")));
        }
        self.check_sort(&arg)?;
        if !self.base_sorts.contains(result) {
            return Err(Error::Sort(format!("result sort {result} of {name} is not a declared base sort")));
        }
        self.term_formers.insert(Arc::from(name), (arg, Arc::from(result)));
        Ok(())
    }

    pub fn add_prop_former(&mut self, name: &str, arg: PnlSort) -> Result<()> {
        if self.name_taken(name) {
            return Err(Error::Invalid(format!("name {name} already declared")));
        }
        self.check_sort(&arg)?;
        self.prop_formers.insert(Arc::from(name), arg);
        Ok(())
    }

    pub fn atom_sorts(&self) -> &BTreeSet<AtomSort> {
        &self.atom_sorts
    }

    pub fn base_sorts(&self) -> &BTreeSet<Arc<str>> {
        &self.base_sorts
    }

    pub fn term_formers(&self) -> &BTreeMap<Arc<str>, (PnlSort, Arc<str>)> {
        &self.term_formers
    }

    pub fn prop_formers(&self) -> &BTreeMap<Arc<str>, PnlSort> {
        &self.prop_formers
    }

    pub fn is_atom_sort(&self, name: &str) -> bool {
        self.atom_sorts.contains(&AtomSort::new(name))
    }

    pub fn check_sort(&self, s: &PnlSort) -> Result<()> {
        match s {
            PnlSort::Name(n) if self.atom_sorts.contains(n) => Ok(()),
            PnlSort::Name(n) => Err(Error::Sort(format!("undeclared name sort {n}"))),
            PnlSort::Base(b) if self.base_sorts.contains(b) => Ok(()),
            PnlSort::Base(b) => Err(Error::Sort(format!("undeclared base sort {b}"))),
            PnlSort::Tuple(xs) => xs.iter().try_for_each(|x| self.check_sort(x)),
            PnlSort::Abs(n, body) => {
                self.check_sort(&PnlSort::Name(n.clone()))?;
                self.check_sort(body)
            }
        }
    }

    /// The sort of `r`, or the first typing failure.
    pub fn sort_of(&self, r: &Term) -> Result<PnlSort> {
        match r {
            Term::Atom(a) => {
                self.check_sort(&PnlSort::Name(a.sort().clone()))?;
                Ok(PnlSort::Name(a.sort().clone()))
            }
            Term::Tuple(xs) => Ok(PnlSort::Tuple(xs.iter().map(|x| self.sort_of(x)).collect::<Result<_>>()?)),
            Term::App(f, arg) => {
                let (want, res) = self
                    .term_formers
                    .get(f)
                    .ok_or_else(|| Error::Sort(format!("undeclared term-former {f}")))?;
                let got = self.sort_of(arg)?;
                if &got != want {
                    return Err(Error::Sort(format!("{f} expects an argument of sort {want}, got {got}")));
                }
                Ok(PnlSort::Base(res.clone()))
            }
            Term::Abs(a, body) => Ok(PnlSort::Abs(a.sort().clone(), Box::new(self.sort_of(body)?))),
            Term::Susp(_, x) => {
                self.check_sort(x.sort())?;
                Ok(x.sort().clone())
            }
        }
    }

    pub fn check_prop(&self, phi: &Prop) -> Result<()> {
        match phi {
            Prop::Bot => Ok(()),
            Prop::Imp(a, b) => {
                self.check_prop(a)?;
                self.check_prop(b)
            }
            Prop::Pred(p, r) => {
                let want = self
                    .prop_formers
                    .get(p)
                    .ok_or_else(|| Error::Sort(format!("undeclared proposition-former {p}")))?;
                let got = self.sort_of(r)?;
                if &got != want {
                    return Err(Error::Sort(format!("{p} expects an argument of sort {want}, got {got}")));
                }
                Ok(())
            }
            Prop::Forall(x, body) => {
                self.check_sort(x.sort())?;
                self.check_prop(body)
            }
        }
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct UnknownData {
    name: Arc<str>,
    sort: PnlSort,
    pmss: PermissionSet,
}

/// A level-2 variable with a sort and a permission set. Two unknowns are equal
/// when name, sort and permission set all agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Unknown(Arc<UnknownData>);

impl Unknown {
    pub fn new(name: &str, sort: PnlSort, pmss: PermissionSet) -> Self {
        Unknown(Arc::new(UnknownData { name: Arc::from(name), sort, pmss }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn sort(&self) -> &PnlSort {
        &self.0.sort
    }

    pub fn pmss(&self) -> &PermissionSet {
        &self.0.pmss
    }

    /// The same sort and permission set under another name.
    pub fn renamed(&self, name: &str) -> Unknown {
        Unknown::new(name, self.sort().clone(), self.pmss().clone())
    }

    pub fn same_kind(&self, other: &Unknown) -> bool {
        self.sort() == other.sort() && self.pmss() == other.pmss()
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Atom(Atom),
    Tuple(Vec<Term>),
    App(Arc<str>, Box<Term>),
    Abs(Atom, Box<Term>),
    Susp(Permutation, Unknown),
}

impl Term {
    pub fn app(f: &str, arg: Term) -> Term {
        Term::App(Arc::from(f), Box::new(arg))
    }

    pub fn abs(a: &Atom, body: Term) -> Term {
        Term::Abs(a.clone(), Box::new(body))
    }

    pub fn var(x: &Unknown) -> Term {
        Term::Susp(Permutation::id(), x.clone())
    }

    pub fn susp(pi: Permutation, x: &Unknown) -> Term {
        Term::Susp(pi, x.clone())
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Susp(..) => 1,
            Term::Tuple(xs) => 1 + xs.iter().map(|x| x.size()).sum::<usize>(),
            Term::App(_, r) | Term::Abs(_, r) => 1 + r.size(),
        }
    }

    /// Leaves have depth 1; every constructor adds one.
    pub fn depth(&self) -> usize {
        match self {
            Term::Atom(_) | Term::Susp(..) => 1,
            Term::Tuple(xs) => 1 + xs.iter().map(|x| x.depth()).max().unwrap_or(0),
            Term::App(_, r) | Term::Abs(_, r) => 1 + r.depth(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Prop {
    Bot,
    Imp(Box<Prop>, Box<Prop>),
    Pred(Arc<str>, Term),
    Forall(Unknown, Box<Prop>),
}

impl Prop {
    pub fn imp(a: Prop, b: Prop) -> Prop {
        Prop::Imp(Box::new(a), Box::new(b))
    }

    pub fn pred(p: &str, r: Term) -> Prop {
        Prop::Pred(Arc::from(p), r)
    }

    pub fn forall(x: &Unknown, body: Prop) -> Prop {
        Prop::Forall(x.clone(), Box::new(body))
    }
}

/// `fa(r)`.
pub fn free_atoms(r: &Term) -> AtomSetExpr {
    match r {
        Term::Atom(a) => AtomSetExpr::singleton(a.clone()),
        Term::Tuple(xs) => xs.iter().fold(AtomSetExpr::empty(), |acc, x| acc.union(&free_atoms(x))),
        Term::App(_, r) => free_atoms(r),
        Term::Abs(a, r) => free_atoms(r).remove(a),
        Term::Susp(pi, x) => x.pmss().to_expr().perm_image(pi),
    }
}

pub fn free_atoms_prop(phi: &Prop) -> AtomSetExpr {
    match phi {
        Prop::Bot => AtomSetExpr::empty(),
        Prop::Imp(a, b) => free_atoms_prop(a).union(&free_atoms_prop(b)),
        Prop::Pred(_, r) => free_atoms(r),
        Prop::Forall(_, body) => free_atoms_prop(body),
    }
}

/// `fU(r)`.
pub fn free_unknowns(r: &Term) -> BTreeSet<Unknown> {
    let mut out = BTreeSet::new();
    collect_unknowns(r, &mut out);
    out
}

fn collect_unknowns(r: &Term, out: &mut BTreeSet<Unknown>) {
    match r {
        Term::Atom(_) => {}
        Term::Tuple(xs) => xs.iter().for_each(|x| collect_unknowns(x, out)),
        Term::App(_, r) | Term::Abs(_, r) => collect_unknowns(r, out),
        Term::Susp(_, x) => {
            out.insert(x.clone());
        }
    }
}

pub fn free_unknowns_prop(phi: &Prop) -> BTreeSet<Unknown> {
    match phi {
        Prop::Bot => BTreeSet::new(),
        Prop::Imp(a, b) => {
            let mut s = free_unknowns_prop(a);
            s.extend(free_unknowns_prop(b));
            s
        }
        Prop::Pred(_, r) => free_unknowns(r),
        Prop::Forall(x, body) => {
            let mut s = free_unknowns_prop(body);
            s.remove(x);
            s
        }
    }
}

/// Level-1 action on raw syntax.
pub(crate) fn perm_raw(pi: &Permutation, r: &Term) -> Term {
    match r {
        Term::Atom(a) => Term::Atom(pi.apply(a)),
        Term::Tuple(xs) => Term::Tuple(xs.iter().map(|x| perm_raw(pi, x)).collect()),
        Term::App(f, r) => Term::App(f.clone(), Box::new(perm_raw(pi, r))),
        Term::Abs(a, r) => Term::Abs(pi.apply(a), Box::new(perm_raw(pi, r))),
        Term::Susp(p, x) => Term::Susp(pi.compose(p), x.clone()),
    }
}

pub(crate) fn perm_prop_raw(pi: &Permutation, phi: &Prop) -> Prop {
    match phi {
        Prop::Bot => Prop::Bot,
        Prop::Imp(a, b) => Prop::imp(perm_prop_raw(pi, a), perm_prop_raw(pi, b)),
        Prop::Pred(p, r) => Prop::Pred(p.clone(), perm_raw(pi, r)),
        Prop::Forall(x, body) => Prop::Forall(x.clone(), Box::new(perm_prop_raw(pi, body))),
    }
}

/// `π·r`, canonical.
pub fn perm_term(pi: &Permutation, r: &Term) -> Term {
    canon_term(&perm_raw(pi, r))
}

/// `π·φ`, canonical. The bound unknown of a quantifier is left alone.
pub fn perm_prop(pi: &Permutation, phi: &Prop) -> Prop {
    canon_prop(&perm_prop_raw(pi, phi))
}

/// A finite bijection on unknowns preserving sort and permission set.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UnknownPerm {
    map: BTreeMap<Unknown, Unknown>,
}

impl UnknownPerm {
    pub fn new(pairs: BTreeMap<Unknown, Unknown>) -> Result<Self> {
        for (x, y) in &pairs {
            if !x.same_kind(y) {
                return Err(Error::Sort(format!("{x} and {y} differ in sort or permission set")));
            }
        }
        let map: BTreeMap<Unknown, Unknown> = pairs.into_iter().filter(|(x, y)| x != y).collect();
        let dom: BTreeSet<&Unknown> = map.keys().collect();
        let img: BTreeSet<&Unknown> = map.values().collect();
        if dom != img || img.len() != map.len() {
            return Err(Error::Invalid("unknown mapping is not a bijection".into()));
        }
        Ok(UnknownPerm { map })
    }

    pub fn swap(x: &Unknown, y: &Unknown) -> Result<Self> {
        UnknownPerm::new(BTreeMap::from([(x.clone(), y.clone()), (y.clone(), x.clone())]))
    }

    pub fn apply(&self, x: &Unknown) -> Unknown {
        self.map.get(x).cloned().unwrap_or_else(|| x.clone())
    }
}

pub(crate) fn level2_raw(pi: &UnknownPerm, r: &Term) -> Term {
    match r {
        Term::Atom(_) => r.clone(),
        Term::Tuple(xs) => Term::Tuple(xs.iter().map(|x| level2_raw(pi, x)).collect()),
        Term::App(f, r) => Term::App(f.clone(), Box::new(level2_raw(pi, r))),
        Term::Abs(a, r) => Term::Abs(a.clone(), Box::new(level2_raw(pi, r))),
        Term::Susp(p, x) => Term::Susp(p.clone(), pi.apply(x)),
    }
}

pub(crate) fn level2_prop_raw(pi: &UnknownPerm, phi: &Prop) -> Prop {
    match phi {
        Prop::Bot => Prop::Bot,
        Prop::Imp(a, b) => Prop::imp(level2_prop_raw(pi, a), level2_prop_raw(pi, b)),
        Prop::Pred(p, r) => Prop::Pred(p.clone(), level2_raw(pi, r)),
        Prop::Forall(x, body) => Prop::Forall(pi.apply(x), Box::new(level2_prop_raw(pi, body))),
    }
}

pub fn level2_term(pi: &UnknownPerm, r: &Term) -> Term {
    canon_term(&level2_raw(pi, r))
}

pub fn level2_prop(pi: &UnknownPerm, phi: &Prop) -> Prop {
    canon_prop(&level2_prop_raw(pi, phi))
}

/// Unknowns bound anywhere in `phi`, outermost first.
pub fn bound_unknowns(phi: &Prop) -> Vec<Unknown> {
    let mut out = Vec::new();
    fn go(phi: &Prop, out: &mut Vec<Unknown>) {
        match phi {
            Prop::Bot | Prop::Pred(..) => {}
            Prop::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
            Prop::Forall(x, body) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
                go(body, out);
            }
        }
    }
    go(phi, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(i: i64) -> Atom {
        Atom::new(&AtomSort::new("nu"), i)
    }

    fn lambda_sig() -> Signature {
        let mut s = Signature::new();
        let nu = s.add_atom_sort("nu").unwrap();
        s.add_base_sort("iota").unwrap();
        s.add_term_former("var", PnlSort::Name(nu.clone()), "iota").unwrap();
        s.add_term_former("app", PnlSort::Tuple(vec![PnlSort::base("iota"), PnlSort::base("iota")]), "iota")
            .unwrap();
        s.add_term_former("lam", PnlSort::Abs(nu, Box::new(PnlSort::base("iota"))), "iota").unwrap();
        s
    }

    #[test]
    fn sorts_of_lambda_terms() {
        let s = lambda_sig();
        let x = Unknown::new("X", PnlSort::base("iota"), PermissionSet::down());
        assert_eq!(s.sort_of(&Term::app("var", Term::Atom(nu(-1)))).unwrap(), PnlSort::base("iota"));
        let lam = Term::app("lam", Term::abs(&nu(-1), Term::var(&x)));
        assert_eq!(s.sort_of(&lam).unwrap(), PnlSort::base("iota"));
        assert!(matches!(s.sort_of(&Term::app("app", Term::Atom(nu(-1)))), Err(Error::Sort(_))));
        assert!(s.sort_of(&Term::app("nope", Term::Tuple(vec![]))).is_err());
    }

    #[test]
    fn free_atoms_clauses() {
        let x = Unknown::new("X", PnlSort::base("iota"), PermissionSet::down());
        assert!(free_atoms(&Term::abs(&nu(0), Term::Atom(nu(0)))).is_empty());
        let pi = Permutation::swap(&nu(-1), &nu(0)).unwrap();
        assert_eq!(free_atoms(&Term::susp(pi.clone(), &x)), PermissionSet::down().to_expr().perm_image(&pi));
        let y = Unknown::new("Y", PnlSort::base("iota"), PermissionSet::down());
        let phi = Prop::forall(&x, Prop::pred("P", Term::Tuple(vec![Term::var(&x), Term::var(&y)])));
        assert_eq!(free_unknowns_prop(&phi), BTreeSet::from([y]));
    }

    #[test]
    fn level1_examples() {
        let x = Unknown::new("X", PnlSort::base("iota"), PermissionSet::down());
        let (a, b) = (nu(-1), nu(-2));
        let ab = Permutation::swap(&a, &b).unwrap();
        let got = perm_raw(&ab, &Term::abs(&a, Term::var(&x)));
        assert_eq!(got, Term::abs(&b, Term::susp(ab.clone(), &x)));
        let phi = Prop::forall(&x, Prop::pred("P", Term::abs(&a, Term::var(&x))));
        let want = Prop::forall(&x, Prop::pred("P", Term::abs(&b, Term::susp(ab.clone(), &x))));
        assert_eq!(perm_prop_raw(&ab, &phi), want);
    }

    #[test]
    fn level2_examples() {
        let x = Unknown::new("X", PnlSort::base("iota"), PermissionSet::down());
        let y = Unknown::new("Y", PnlSort::base("iota"), PermissionSet::down());
        let sw = UnknownPerm::swap(&x, &y).unwrap();
        let pi = Permutation::swap(&nu(-1), &nu(-2)).unwrap();
        assert_eq!(level2_raw(&sw, &Term::susp(pi.clone(), &x)), Term::susp(pi, &y));
        let phi = Prop::forall(&x, Prop::pred("P", Term::var(&x)));
        assert_eq!(level2_prop_raw(&sw, &phi), Prop::forall(&y, Prop::pred("P", Term::var(&y))));
        let z = Unknown::new("Z", PnlSort::base("iota"), PermissionSet::new(BTreeSet::new(), BTreeSet::from([nu(-1)])).unwrap());
        assert!(matches!(UnknownPerm::swap(&x, &z), Err(Error::Sort(_))));
    }
}
