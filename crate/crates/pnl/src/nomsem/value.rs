//! Ground values: the Herbrand carriers of the permutation-set semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::atoms::{Atom, PermissionSet, Permutation};
use crate::error::{Error, Result};
use crate::pnl::{PnlSort, Signature};

/// Abstractions are kept in canonical form: the bound atom is the first up
/// atom of its sort outside the support, so structural equality is the
/// abstraction equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GroundValue {
    Atom(Atom),
    Tuple(Vec<GroundValue>),
    Abs(Atom, Box<GroundValue>),
    Con(Arc<str>, Box<GroundValue>),
    Bool(bool),
}

impl GroundValue {
    pub fn atom(a: &Atom) -> Self {
        GroundValue::Atom(a.clone())
    }

    pub fn con(f: &str, v: GroundValue) -> Self {
        GroundValue::Con(Arc::from(f), Box::new(v))
    }

    pub fn pair(a: GroundValue, b: GroundValue) -> Self {
        GroundValue::Tuple(vec![a, b])
    }

    /// `[a]v`.
    pub fn abs(a: &Atom, v: GroundValue) -> Self {
        let mut s = v.support();
        s.remove(a);
        let c = (0..).map(|i| Atom::new(a.sort(), i)).find(|c| !s.contains(c)).expect("support is finite");
        if &c == a {
            return GroundValue::Abs(c, Box::new(v));
        }
        let sw = Permutation::swap(a, &c).expect("same sort");
        GroundValue::Abs(c, Box::new(v.permute(&sw)))
    }

    /// `[a1]...[an]v`.
    pub fn abs_list(d: &[Atom], v: GroundValue) -> Self {
        d.iter().rev().fold(v, |acc, a| GroundValue::abs(a, acc))
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.support_into(&mut out);
        out
    }

    fn support_into(&self, out: &mut BTreeSet<Atom>) {
        match self {
            GroundValue::Atom(a) => {
                out.insert(a.clone());
            }
            GroundValue::Tuple(xs) => xs.iter().for_each(|x| x.support_into(out)),
            GroundValue::Abs(a, v) => {
                let mut s = v.support();
                s.remove(a);
                out.extend(s);
            }
            GroundValue::Con(_, v) => v.support_into(out),
            GroundValue::Bool(_) => {}
        }
    }

    pub fn permute(&self, pi: &Permutation) -> GroundValue {
        match self {
            GroundValue::Atom(a) => GroundValue::Atom(pi.apply(a)),
            GroundValue::Tuple(xs) => GroundValue::Tuple(xs.iter().map(|x| x.permute(pi)).collect()),
            GroundValue::Abs(a, v) => GroundValue::abs(&pi.apply(a), v.permute(pi)),
            GroundValue::Con(f, v) => GroundValue::Con(f.clone(), Box::new(v.permute(pi))),
            GroundValue::Bool(b) => GroundValue::Bool(*b),
        }
    }

    /// Free atoms in order of first occurrence, left to right.
    pub fn support_order(&self) -> Vec<Atom> {
        fn go(v: &GroundValue, bound: &mut Vec<Atom>, seen: &mut BTreeSet<Atom>, out: &mut Vec<Atom>) {
            match v {
                GroundValue::Atom(a) => {
                    if !bound.contains(a) && seen.insert(a.clone()) {
                        out.push(a.clone());
                    }
                }
                GroundValue::Tuple(xs) => xs.iter().for_each(|x| go(x, bound, seen, out)),
                GroundValue::Abs(a, v) => {
                    bound.push(a.clone());
                    go(v, bound, seen, out);
                    bound.pop();
                }
                GroundValue::Con(_, v) => go(v, bound, seen, out),
                GroundValue::Bool(_) => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    /// Concretion `x@n` for an abstraction `[a]x`, defined when `n` is fresh
    /// for the abstraction.
    pub fn concrete(&self, n: &Atom) -> Option<GroundValue> {
        match self {
            GroundValue::Abs(a, v) if !self.support().contains(n) => {
                Some(v.permute(&Permutation::swap(a, n).expect("same sort")))
            }
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            GroundValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Checks that the value inhabits the Herbrand carrier of `sort`.
    pub fn has_sort(&self, sig: &Signature, sort: &PnlSort) -> bool {
        match (self, sort) {
            (GroundValue::Atom(a), PnlSort::Name(n)) => a.sort() == n,
            (GroundValue::Tuple(xs), PnlSort::Tuple(ss)) => {
                xs.len() == ss.len() && xs.iter().zip(ss).all(|(x, s)| x.has_sort(sig, s))
            }
            (GroundValue::Abs(a, v), PnlSort::Abs(n, body)) => a.sort() == n && v.has_sort(sig, body),
            (GroundValue::Con(f, v), PnlSort::Base(t)) => match sig.term_formers().get(f) {
                Some((arg, res)) => res == t && v.has_sort(sig, arg),
                None => false,
            },
            _ => false,
        }
    }
}

/// `[a]x = [a']x'` iff `a'∉supp(x)` and `(a' a)·x = x'`, given as raw pairs.
pub fn abs_eq(a: &Atom, x: &GroundValue, a2: &Atom, x2: &GroundValue) -> bool {
    if a.sort() != a2.sort() {
        return false;
    }
    if a == a2 {
        return x == x2;
    }
    !x.support().contains(a2) && &x.permute(&Permutation::swap(a2, a).expect("same sort")) == x2
}

impl fmt::Display for GroundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundValue::Atom(a) => write!(f, "{a}"),
            GroundValue::Tuple(xs) if xs.len() == 1 => write!(f, "({},)", xs[0]),
            GroundValue::Tuple(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            GroundValue::Abs(a, v) => write!(f, "[{a}] {v}"),
            GroundValue::Con(g, v) => match &**v {
                GroundValue::Tuple(xs) if xs.len() != 1 => write!(f, "{g}{v}"),
                _ => write!(f, "{g}({v})"),
            },
            GroundValue::Bool(b) => write!(f, "{}", u8::from(*b)),
        }
    }
}

/// The first down atom of `sort`'s name sort inside `pmss`, else the first up one.
fn atom_in(pmss: &PermissionSet, sort: &crate::atoms::AtomSort) -> Atom {
    (1..)
        .flat_map(|i| [Atom::new(sort, -i), Atom::new(sort, i - 1)])
        .find(|a| pmss.contains(a))
        .expect("permission sets are infinite")
}

/// A deterministic small inhabitant of `sort` with support inside `pmss`.
pub fn default_value(sig: &Signature, sort: &PnlSort, pmss: &PermissionSet) -> Result<GroundValue> {
    let mut memo = BTreeMap::new();
    inhabit(sig, sort, pmss, 6, &mut memo)
        .ok_or_else(|| Error::Sort(format!("no ground value of sort {sort} within depth 6")))
}

fn inhabit(
    sig: &Signature,
    sort: &PnlSort,
    pmss: &PermissionSet,
    fuel: usize,
    memo: &mut BTreeMap<(PnlSort, usize), Option<GroundValue>>,
) -> Option<GroundValue> {
    if fuel == 0 {
        return None;
    }
    if let Some(v) = memo.get(&(sort.clone(), fuel)) {
        return v.clone();
    }
    let v = match sort {
        PnlSort::Name(n) => Some(GroundValue::Atom(atom_in(pmss, n))),
        PnlSort::Tuple(ss) => {
            ss.iter().map(|s| inhabit(sig, s, pmss, fuel - 1, memo)).collect::<Option<Vec<_>>>().map(GroundValue::Tuple)
        }
        PnlSort::Abs(n, body) => {
            inhabit(sig, body, pmss, fuel - 1, memo).map(|v| GroundValue::abs(&Atom::new(n, 0), v))
        }
        PnlSort::Base(t) => sig
            .term_formers()
            .iter()
            .filter(|(_, (_, res))| res == t)
            .find_map(|(f, (arg, _))| inhabit(sig, arg, pmss, fuel - 1, memo).map(|v| GroundValue::Con(f.clone(), Box::new(v)))),
    };
    memo.insert((sort.clone(), fuel), v.clone());
    v
}
