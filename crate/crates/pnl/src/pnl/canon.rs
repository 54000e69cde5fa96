//! Canonical α-normal forms.
//!
//! Atom binders become the first up atom of their sort that is not free in
//! the abstraction. Unknown binders become `_k` for the least `k` whose name
//! is not used by a free unknown of the quantified proposition. Suspended
//! permutations are cut down to the permission set of their unknown.

use crate::atoms::{Atom, Permutation};

use super::{free_atoms, free_unknowns_prop, level2_prop_raw, perm_raw, Prop, Term, Unknown, UnknownPerm};

pub fn canon_term(r: &Term) -> Term {
    match r {
        Term::Atom(a) => Term::Atom(a.clone()),
        Term::Tuple(xs) => Term::Tuple(xs.iter().map(canon_term).collect()),
        Term::App(f, r) => Term::App(f.clone(), Box::new(canon_term(r))),
        Term::Abs(a, body) => {
            let fa = free_atoms(body).remove(a);
            let c = (0..)
                .map(|i| Atom::new(a.sort(), i))
                .find(|c| !fa.contains(c))
                .expect("free atoms are coinfinite among up atoms");
            let body = if &c == a {
                canon_term(body)
            } else {
                canon_term(&perm_raw(&Permutation::swap(&c, a).expect("same sort"), body))
            };
            Term::Abs(c, Box::new(body))
        }
        Term::Susp(pi, x) => Term::Susp(pi.restrict(|a| x.pmss().contains(a)), x.clone()),
    }
}

pub(crate) fn canonical_binder_name(k: usize) -> String {
    format!("_{k}")
}

pub fn canon_prop(phi: &Prop) -> Prop {
    match phi {
        Prop::Bot => Prop::Bot,
        Prop::Imp(a, b) => Prop::imp(canon_prop(a), canon_prop(b)),
        Prop::Pred(p, r) => Prop::Pred(p.clone(), canon_term(r)),
        Prop::Forall(x, body) => {
            let mut used = free_unknowns_prop(body);
            used.remove(x);
            let name = (0..)
                .map(canonical_binder_name)
                .find(|n| used.iter().all(|u| u.name() != n))
                .expect("unbounded");
            let y = x.renamed(&name);
            let body = if &y == x {
                canon_prop(body)
            } else {
                let sw = UnknownPerm::swap(x, &y).expect("same kind");
                canon_prop(&level2_prop_raw(&sw, body))
            };
            Prop::Forall(y, Box::new(body))
        }
    }
}

pub fn alpha_eq(r: &Term, s: &Term) -> bool {
    canon_term(r) == canon_term(s)
}

pub fn alpha_eq_prop(phi: &Prop, psi: &Prop) -> bool {
    canon_prop(phi) == canon_prop(psi)
}

/// A fresh unknown of the same kind as `x` whose name avoids `avoid`.
pub(crate) fn fresh_unknown_like<'a>(x: &Unknown, avoid: impl Iterator<Item = &'a Unknown> + Clone) -> Unknown {
    let name = (0..)
        .map(canonical_binder_name)
        .find(|n| avoid.clone().all(|u| u.name() != n))
        .expect("unbounded");
    x.renamed(&name)
}
