//! Exhaustive enumeration and seeded random generation of terms,
//! propositions and ground values over a finite universe of atoms and
//! unknowns. Generated terms are raw: abstractions keep their binder and
//! suspensions keep their full permutation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::atoms::{Atom, AtomSort, PermissionSet, Permutation};
use crate::nomsem::GroundValue;
use crate::pnl::{PnlSort, Prop, Signature, Term, Unknown};

#[derive(Clone, Debug)]
pub struct Universe {
    pub sig: Signature,
    pub atoms: Vec<Atom>,
    pub unknowns: Vec<Unknown>,
}

fn nu(i: i64) -> Atom {
    Atom::new(&AtomSort::new("nu"), i)
}

impl Universe {
    /// `{var, app, lam}` with `eq`, atoms `nu#-1, nu#-2, nu#0, nu#1`,
    /// `X` over the down atoms and `Y` over `perm(+{nu#0}, -{nu#-1})`.
    pub fn lambda() -> Universe {
        let sig = crate::corpus::lambda_theory().sig;
        let x = Unknown::new("X", PnlSort::base("iota"), PermissionSet::down());
        let pm = PermissionSet::new([nu(0)].into(), [nu(-1)].into()).expect("one sort");
        let y = Unknown::new("Y", PnlSort::base("iota"), pm);
        Universe { sig, atoms: vec![nu(-1), nu(-2), nu(0), nu(1)], unknowns: vec![x, y] }
    }

    fn atoms_of(&self, s: &AtomSort) -> Vec<Atom> {
        self.atoms.iter().filter(|a| a.sort() == s).cloned().collect()
    }

    /// Every permutation of the universe's atoms, sort by sort.
    pub fn permutations(&self) -> Vec<Permutation> {
        let mut sorts: Vec<AtomSort> = self.atoms.iter().map(|a| a.sort().clone()).collect();
        sorts.sort();
        sorts.dedup();
        let mut out = vec![BTreeMap::new()];
        for s in sorts {
            let xs = self.atoms_of(&s);
            let mut next = Vec::new();
            for m in &out {
                for p in permutations_of(&xs) {
                    let mut m: BTreeMap<Atom, Atom> = m.clone();
                    m.extend(xs.iter().cloned().zip(p));
                    next.push(m);
                }
            }
            out = next;
        }
        out.into_iter().map(|m| Permutation::from_map(m).expect("bijection")).collect()
    }

    /// Every raw term of `sort` with depth at most `depth`.
    pub fn enumerate(&self, sort: &PnlSort, depth: usize) -> Vec<Term> {
        let perms = self.permutations();
        let mut memo = BTreeMap::new();
        self.enum_at(sort, depth, &perms, &mut memo)
    }

    fn enum_at(
        &self,
        sort: &PnlSort,
        depth: usize,
        perms: &[Permutation],
        memo: &mut BTreeMap<(PnlSort, usize), Vec<Term>>,
    ) -> Vec<Term> {
        if depth == 0 {
            return Vec::new();
        }
        if let Some(v) = memo.get(&(sort.clone(), depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        match sort {
            PnlSort::Name(n) => out.extend(self.atoms_of(n).into_iter().map(Term::Atom)),
            PnlSort::Tuple(ss) => {
                let mut acc = vec![Vec::new()];
                for s in ss {
                    let xs = self.enum_at(s, depth - 1, perms, memo);
                    acc = acc
                        .into_iter()
                        .flat_map(|pre: Vec<Term>| {
                            xs.iter().map(move |x| {
                                let mut v = pre.clone();
                                v.push(x.clone());
                                v
                            })
                        })
                        .collect();
                }
                out.extend(acc.into_iter().map(Term::Tuple));
            }
            PnlSort::Abs(n, body) => {
                let bodies = self.enum_at(body, depth - 1, perms, memo);
                for a in self.atoms_of(n) {
                    out.extend(bodies.iter().map(|b| Term::abs(&a, b.clone())));
                }
            }
            PnlSort::Base(_) => {
                for x in self.unknowns.iter().filter(|x| x.sort() == sort) {
                    out.extend(perms.iter().map(|p| Term::susp(p.clone(), x)));
                }
                for (f, (arg, res)) in self.sig.term_formers() {
                    if &PnlSort::Base(res.clone()) == sort {
                        out.extend(self.enum_at(arg, depth - 1, perms, memo).into_iter().map(|t| Term::app(f, t)));
                    }
                }
            }
        }
        memo.insert((sort.clone(), depth), out.clone());
        out
    }

    /// A random raw term of `sort`, of depth at most `depth` where possible.
    pub fn random_term(&self, rng: &mut impl Rng, sort: &PnlSort, depth: usize) -> Term {
        match sort {
            PnlSort::Name(n) => Term::Atom(self.atoms_of(n).choose(rng).expect("atoms of every sort").clone()),
            PnlSort::Tuple(ss) => Term::Tuple(ss.iter().map(|s| self.random_term(rng, s, depth.saturating_sub(1))).collect()),
            PnlSort::Abs(n, body) => {
                let a = self.atoms_of(n).choose(rng).expect("atoms of every sort").clone();
                Term::abs(&a, self.random_term(rng, body, depth.saturating_sub(1)))
            }
            PnlSort::Base(_) => {
                let xs: Vec<&Unknown> = self.unknowns.iter().filter(|x| x.sort() == sort).collect();
                let fs: Vec<(&str, &PnlSort)> = self
                    .sig
                    .term_formers()
                    .iter()
                    .filter(|(_, (_, res))| &PnlSort::Base(res.clone()) == sort)
                    .map(|(f, (arg, _))| (&**f, arg))
                    .collect();
                let leaf = fs.iter().filter(|(_, arg)| matches!(arg, PnlSort::Name(_))).collect::<Vec<_>>();
                let stop = depth <= 1 || rng.gen_bool(0.25);
                if stop && !xs.is_empty() && (leaf.is_empty() || rng.gen_bool(0.5)) {
                    let x = xs.choose(rng).expect("non-empty");
                    let pi = self.random_perm(rng);
                    return Term::susp(pi, x);
                }
                let pool = if stop && !leaf.is_empty() { leaf } else { fs.iter().collect() };
                let (f, arg) = pool.choose(rng).expect("a former of this sort");
                Term::app(f, self.random_term(rng, arg, depth.saturating_sub(1)))
            }
        }
    }

    /// A permutation that is usually small: a swap, a 3-cycle or the identity.
    pub fn random_perm(&self, rng: &mut impl Rng) -> Permutation {
        let a = self.atoms.choose(rng).expect("atoms");
        let same: Vec<&Atom> = self.atoms.iter().filter(|b| b.sort() == a.sort() && *b != a).collect();
        match (rng.gen_range(0..4), same.as_slice()) {
            (0, _) | (_, []) => Permutation::id(),
            (1, [_, ..]) if same.len() >= 2 => {
                let mut two = same.choose_multiple(rng, 2);
                let (b, c) = (two.next().expect("two"), two.next().expect("two"));
                Permutation::from_cycles(&[vec![a.clone(), (*b).clone(), (*c).clone()]]).expect("distinct atoms")
            }
            _ => Permutation::swap(a, same.choose(rng).expect("non-empty")).expect("same sort"),
        }
    }

    /// A random proposition; `quantify` allows `∀` over copies of the
    /// universe's unknowns named `Q0`, `Q1`, ... in creation order.
    pub fn random_prop(&self, rng: &mut impl Rng, depth: usize, quantify: bool) -> Prop {
        let mut fresh = 0;
        self.random_prop_in(rng, depth, quantify, &self.unknowns, &mut fresh)
    }

    fn random_prop_in(
        &self,
        rng: &mut impl Rng,
        depth: usize,
        quantify: bool,
        scope: &[Unknown],
        fresh: &mut usize,
    ) -> Prop {
        let preds: Vec<(&str, &PnlSort)> = self.sig.prop_formers().iter().map(|(p, a)| (&**p, a)).collect();
        let roll = if depth <= 1 { 0 } else { rng.gen_range(0..if quantify { 5 } else { 4 }) };
        match roll {
            0 | 1 => {
                if rng.gen_ratio(1, 12) {
                    return Prop::Bot;
                }
                let (p, arg) = preds.choose(rng).expect("a proposition-former");
                let inner = Universe { unknowns: scope.to_vec(), ..self.clone() };
                Prop::pred(p, inner.random_term(rng, arg, 4))
            }
            2 | 3 => {
                let a = self.random_prop_in(rng, depth - 1, quantify, scope, fresh);
                Prop::imp(a, self.random_prop_in(rng, depth - 1, quantify, scope, fresh))
            }
            _ => {
                let base = self.unknowns.choose(rng).expect("unknowns");
                let q = base.renamed(&format!("Q{fresh}"));
                *fresh += 1;
                let mut inner = scope.to_vec();
                inner.push(q.clone());
                Prop::forall(&q, self.random_prop_in(rng, depth - 1, quantify, &inner, fresh))
            }
        }
    }

    /// A random ground value of `sort` with support inside `pmss`, drawing
    /// free atoms from the universe.
    pub fn random_value(&self, rng: &mut impl Rng, sort: &PnlSort, pmss: &PermissionSet, depth: usize) -> GroundValue {
        let free: Vec<Atom> = self.atoms.iter().filter(|a| pmss.contains(a)).cloned().collect();
        self.value_in(rng, sort, &free, depth)
    }

    fn value_in(&self, rng: &mut impl Rng, sort: &PnlSort, free: &[Atom], depth: usize) -> GroundValue {
        match sort {
            PnlSort::Name(n) => {
                let pool: Vec<&Atom> = free.iter().filter(|a| a.sort() == n).collect();
                match pool.choose(rng) {
                    Some(a) => GroundValue::atom(a),
                    // Nothing permitted of this sort: fall back to a far up atom.
                    None => GroundValue::atom(&Atom::new(n, 1000)),
                }
            }
            PnlSort::Tuple(ss) => GroundValue::Tuple(ss.iter().map(|s| self.value_in(rng, s, free, depth.saturating_sub(1))).collect()),
            PnlSort::Abs(n, body) => {
                let a = self.atoms_of(n).choose(rng).cloned().unwrap_or_else(|| Atom::new(n, 0));
                let mut inner = free.to_vec();
                inner.push(a.clone());
                GroundValue::abs(&a, self.value_in(rng, body, &inner, depth.saturating_sub(1)))
            }
            PnlSort::Base(b) => {
                let fs: Vec<(&str, &PnlSort)> = self
                    .sig
                    .term_formers()
                    .iter()
                    .filter(|(_, (_, res))| res == b)
                    .map(|(f, (arg, _))| (&**f, arg))
                    .collect();
                let shallow: Vec<&(&str, &PnlSort)> = fs
                    .iter()
                    .filter(|(_, arg)| matches!(arg, PnlSort::Name(n) if free.iter().any(|a| a.sort() == n)))
                    .collect();
                let pool = if depth <= 1 && !shallow.is_empty() { shallow } else { fs.iter().collect() };
                let (f, arg) = pool.choose(rng).expect("a former of this sort");
                GroundValue::con(f, self.value_in(rng, arg, free, depth.saturating_sub(1)))
            }
        }
    }
}

fn permutations_of(xs: &[Atom]) -> Vec<Vec<Atom>> {
    if xs.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let head = rest.remove(i);
        for mut p in permutations_of(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn enumeration_counts() {
        let u = Universe::lambda();
        assert_eq!(u.permutations().len(), 24);
        let iota = PnlSort::base("iota");
        // leaves: 2 unknowns x 24 suspensions; var(a): 4; lam([a] leaf): 4 x 48;
        // app(leaf, leaf): 48 x 48
        assert_eq!(u.enumerate(&iota, 1).len(), 48);
        assert_eq!(u.enumerate(&iota, 2).len(), 48 + 4);
        let d3 = u.enumerate(&iota, 3);
        assert_eq!(d3.len(), 48 + 4 + 4 * 48 + 48 * 48);
        assert!(d3.iter().all(|t| t.depth() <= 3 && u.sig.sort_of(t).is_ok()));
    }

    #[test]
    fn random_objects_are_well_sorted() {
        let u = Universe::lambda();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let t = u.random_term(&mut rng, &PnlSort::base("iota"), 4);
            assert!(u.sig.sort_of(&t).is_ok(), "{t}");
            let p = u.random_prop(&mut rng, 3, true);
            assert!(u.sig.check_prop(&p).is_ok(), "{p}");
            let x = &u.unknowns[1];
            let v = u.random_value(&mut rng, x.sort(), x.pmss(), 3);
            assert!(v.has_sort(&u.sig, x.sort()) && v.support().iter().all(|a| x.pmss().contains(a)), "{v}");
        }
    }
}
