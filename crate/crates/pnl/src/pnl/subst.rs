//! Level-2 substitution. Substitution captures atoms: `(π·X)θ = π·θ(X)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

use super::canon::fresh_unknown_like;
use super::{
    canon_prop, canon_term, free_atoms, free_unknowns, free_unknowns_prop, level2_prop_raw, perm_raw, Prop,
    Signature, Term, Unknown, UnknownPerm,
};

/// A finite map from unknowns to terms respecting sorts and permission sets.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Subst {
    map: BTreeMap<Unknown, Term>,
}

impl Subst {
    pub fn id() -> Self {
        Subst::default()
    }

    /// `[X:=r]`. Requires `r:sort(X)` and `fa(r) ⊆ pmss(X)`.
    pub fn point(sig: &Signature, x: &Unknown, r: &Term) -> Result<Subst> {
        let mut s = Subst::id();
        s.insert(sig, x, r)?;
        Ok(s)
    }

    pub fn insert(&mut self, sig: &Signature, x: &Unknown, r: &Term) -> Result<()> {
        let got = sig.sort_of(r)?;
        if &got != x.sort() {
            return Err(Error::Sort(format!("{x} has sort {}, substituted term has sort {got}", x.sort())));
        }
        check_permission(x, r)?;
        self.map.insert(x.clone(), canon_term(r));
        Ok(())
    }

    pub fn get(&self, x: &Unknown) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Unknown> {
        self.map.keys()
    }

    /// Unknowns a binder must avoid: the domain and everything free in the range.
    pub fn nontriv(&self) -> BTreeSet<Unknown> {
        let mut s: BTreeSet<Unknown> = self.map.keys().cloned().collect();
        for r in self.map.values() {
            s.extend(free_unknowns(r));
        }
        s
    }

    pub fn apply(&self, r: &Term) -> Term {
        canon_term(&self.apply_raw(r))
    }

    pub fn apply_prop(&self, phi: &Prop) -> Prop {
        canon_prop(&self.apply_prop_raw(phi))
    }

    fn apply_raw(&self, r: &Term) -> Term {
        match r {
            Term::Atom(_) => r.clone(),
            Term::Tuple(xs) => Term::Tuple(xs.iter().map(|x| self.apply_raw(x)).collect()),
            Term::App(f, r) => Term::App(f.clone(), Box::new(self.apply_raw(r))),
            Term::Abs(a, r) => Term::Abs(a.clone(), Box::new(self.apply_raw(r))),
            Term::Susp(pi, x) => match self.map.get(x) {
                Some(t) => perm_raw(pi, t),
                None => r.clone(),
            },
        }
    }

    fn apply_prop_raw(&self, phi: &Prop) -> Prop {
        match phi {
            Prop::Bot => Prop::Bot,
            Prop::Imp(a, b) => Prop::imp(self.apply_prop_raw(a), self.apply_prop_raw(b)),
            Prop::Pred(p, r) => Prop::Pred(p.clone(), self.apply_raw(r)),
            Prop::Forall(x, body) => {
                let nontriv = self.nontriv();
                if nontriv.contains(x) {
                    let mut avoid = nontriv.clone();
                    avoid.extend(free_unknowns_prop(body));
                    let y = fresh_unknown_like(x, avoid.iter());
                    let sw = UnknownPerm::swap(x, &y).expect("same kind");
                    let body = level2_prop_raw(&sw, body);
                    Prop::Forall(y, Box::new(self.apply_prop_raw(&body)))
                } else {
                    Prop::Forall(x.clone(), Box::new(self.apply_prop_raw(body)))
                }
            }
        }
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(x, r)| format!("{x}:={r}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Fails with a witness atom unless `fa(r) ⊆ pmss(X)`.
pub fn check_permission(x: &Unknown, r: &Term) -> Result<()> {
    let fa = free_atoms(r);
    let pm = x.pmss().to_expr();
    if fa.is_subset(&pm) {
        return Ok(());
    }
    let msg = match fa.subset_witness(&pm) {
        Some(a) => format!("{a} is free in {r} but {a} is not in pmss({x}) = {}", x.pmss()),
        None => format!("fa({r}) is not contained in pmss({x}) = {}", x.pmss()),
    };
    Err(Error::Permission(msg))
}
