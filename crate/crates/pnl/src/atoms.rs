//! Atoms, permission sets, finitely represented atom sets, permutations,
//! renamings and freshening pairs.
//!
//! An atom is a sort paired with an integer index. Negative indices are the
//! "down" atoms, non-negative ones the "up" atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::text::Cursor;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomSort(Arc<str>);

impl AtomSort {
    pub fn new(name: &str) -> Self {
        AtomSort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    sort: AtomSort,
    index: i64,
}

impl Atom {
    pub fn new(sort: &AtomSort, index: i64) -> Self {
        Atom { sort: sort.clone(), index }
    }

    pub fn sort(&self) -> &AtomSort {
        &self.sort
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn is_down(&self) -> bool {
        self.index < 0
    }

    pub fn is_up(&self) -> bool {
        self.index >= 0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.sort, self.index)
    }
}

/// `(atoms↓ ∪ adds) \ removes`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct PermissionSet {
    adds: BTreeSet<Atom>,
    removes: BTreeSet<Atom>,
}

impl PermissionSet {
    /// The set of all down atoms.
    pub fn down() -> Self {
        PermissionSet::default()
    }

    pub fn new(adds: BTreeSet<Atom>, removes: BTreeSet<Atom>) -> Result<Self> {
        if let Some(a) = adds.iter().find(|a| a.is_down()) {
            return Err(Error::Invalid(format!("permission set adds down atom {a}")));
        }
        if let Some(a) = removes.iter().find(|a| a.is_up()) {
            return Err(Error::Invalid(format!("permission set removes up atom {a}")));
        }
        Ok(PermissionSet { adds, removes })
    }

    pub fn adds(&self) -> &BTreeSet<Atom> {
        &self.adds
    }

    pub fn removes(&self) -> &BTreeSet<Atom> {
        &self.removes
    }

    pub fn contains(&self, a: &Atom) -> bool {
        if a.is_down() {
            !self.removes.contains(a)
        } else {
            self.adds.contains(a)
        }
    }

    pub fn to_expr(&self) -> AtomSetExpr {
        AtomSetExpr {
            include_down: true,
            excluded_down: self.removes.clone(),
            extras: self.adds.clone(),
        }
    }
}

impl fmt::Display for PermissionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm(+{{{}}},-{{{}}})", join(&self.adds), join(&self.removes))
    }
}

fn join<'a, T: fmt::Display + 'a>(xs: impl IntoIterator<Item = &'a T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// A finite atom set, or a cofinite-in-the-down-half set
/// `(atoms↓ \ excluded_down) ∪ extras`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct AtomSetExpr {
    include_down: bool,
    excluded_down: BTreeSet<Atom>,
    extras: BTreeSet<Atom>,
}

impl AtomSetExpr {
    pub fn empty() -> Self {
        AtomSetExpr::default()
    }

    pub fn all_down() -> Self {
        AtomSetExpr { include_down: true, ..Default::default() }
    }

    pub fn finite(atoms: impl IntoIterator<Item = Atom>) -> Self {
        AtomSetExpr { include_down: false, excluded_down: BTreeSet::new(), extras: atoms.into_iter().collect() }
    }

    pub fn singleton(a: Atom) -> Self {
        Self::finite([a])
    }

    pub fn new(include_down: bool, excluded_down: BTreeSet<Atom>, extras: BTreeSet<Atom>) -> Self {
        let mut s = AtomSetExpr { include_down, excluded_down, extras };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.include_down {
            self.excluded_down.retain(|a| a.is_down());
            let downs: Vec<Atom> = self.extras.iter().filter(|a| a.is_down()).cloned().collect();
            for a in downs {
                self.extras.remove(&a);
                self.excluded_down.remove(&a);
            }
        } else {
            self.excluded_down.clear();
        }
    }

    pub fn include_down(&self) -> bool {
        self.include_down
    }

    pub fn excluded_down(&self) -> &BTreeSet<Atom> {
        &self.excluded_down
    }

    pub fn extras(&self) -> &BTreeSet<Atom> {
        &self.extras
    }

    pub fn is_finite(&self) -> bool {
        !self.include_down
    }

    pub fn is_empty(&self) -> bool {
        !self.include_down && self.extras.is_empty()
    }

    /// The elements, when the set is finite.
    pub fn elements(&self) -> Option<&BTreeSet<Atom>> {
        (!self.include_down).then_some(&self.extras)
    }

    pub fn contains(&self, a: &Atom) -> bool {
        if self.include_down && a.is_down() && !self.excluded_down.contains(a) {
            return true;
        }
        self.extras.contains(a)
    }

    pub fn union(&self, other: &AtomSetExpr) -> AtomSetExpr {
        let include_down = self.include_down || other.include_down;
        let mut excluded = BTreeSet::new();
        if include_down {
            for d in self.excluded_down.iter().chain(other.excluded_down.iter()) {
                if !self.contains(d) && !other.contains(d) {
                    excluded.insert(d.clone());
                }
            }
        }
        let extras = self.extras.union(&other.extras).cloned().collect();
        AtomSetExpr::new(include_down, excluded, extras)
    }

    pub fn insert(&self, a: Atom) -> AtomSetExpr {
        self.union(&AtomSetExpr::singleton(a))
    }

    pub fn minus(&self, remove: &BTreeSet<Atom>) -> AtomSetExpr {
        let mut out = self.clone();
        for a in remove {
            out.extras.remove(a);
            if out.include_down && a.is_down() {
                out.excluded_down.insert(a.clone());
            }
        }
        out.normalize();
        out
    }

    pub fn remove(&self, a: &Atom) -> AtomSetExpr {
        self.minus(&BTreeSet::from([a.clone()]))
    }

    /// The members of the finite set `among`.
    pub fn intersect_finite(&self, among: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        among.iter().filter(|a| self.contains(a)).cloned().collect()
    }

    /// `(S \ nontriv(π)) ∪ π·(S ∩ nontriv(π))`.
    pub fn perm_image(&self, pi: &Permutation) -> AtomSetExpr {
        let nontriv = pi.support();
        let moved = self.intersect_finite(&nontriv);
        self.minus(&nontriv).union(&AtomSetExpr::finite(moved.iter().map(|a| pi.apply(a))))
    }

    /// `{ρ(a) | a ∈ S}`.
    pub fn ren_image(&self, rho: &Renaming) -> AtomSetExpr {
        let dom = rho.dom();
        let moved = self.intersect_finite(&dom);
        self.minus(&dom).union(&AtomSetExpr::finite(moved.iter().map(|a| rho.apply(a))))
    }

    pub fn is_subset(&self, other: &AtomSetExpr) -> bool {
        if !self.extras.iter().all(|a| other.contains(a)) {
            return false;
        }
        if !self.include_down {
            return true;
        }
        other.include_down && other.excluded_down.is_subset(&self.excluded_down)
    }

    pub fn is_subset_of_perm(&self, other: &PermissionSet) -> bool {
        self.is_subset(&other.to_expr())
    }

    /// An atom of `self` outside `other`, if one can be named. A sort is taken
    /// from the atoms mentioned by either side when the witness has to come
    /// from the unbounded down half.
    pub fn subset_witness(&self, other: &AtomSetExpr) -> Option<Atom> {
        if let Some(a) = self.extras.iter().find(|a| !other.contains(a)) {
            return Some(a.clone());
        }
        if !self.include_down {
            return None;
        }
        if other.include_down {
            return other.excluded_down.difference(&self.excluded_down).next().cloned();
        }
        let sort = self
            .excluded_down
            .iter()
            .chain(self.extras.iter())
            .chain(other.extras.iter())
            .map(|a| a.sort().clone())
            .next()?;
        (1..)
            .map(|i| Atom::new(&sort, -i))
            .find(|a| self.contains(a) && !other.contains(a))
    }
}

impl fmt::Display for AtomSetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.include_down {
            write!(f, "(down \\ {{{}}}) + {{{}}}", join(&self.excluded_down), join(&self.extras))
        } else {
            write!(f, "{{{}}}", join(&self.extras))
        }
    }
}

/// The smallest-magnitude atom of the requested sort and polarity outside `avoid`.
pub fn fresh_atom(sort: &AtomSort, avoid: &AtomSetExpr, want_down: bool) -> Result<Atom> {
    if !want_down {
        return Ok((0..).map(|i| Atom::new(sort, i)).find(|a| !avoid.contains(a)).expect("unbounded"));
    }
    if avoid.include_down {
        avoid
            .excluded_down
            .iter()
            .filter(|a| a.sort() == sort && !avoid.contains(a))
            .max_by_key(|a| a.index())
            .cloned()
            .ok_or_else(|| Error::Exhausted(format!("every down atom of sort {sort} is excluded")))
    } else {
        Ok((1..).map(|i| Atom::new(sort, -i)).find(|a| !avoid.contains(a)).expect("unbounded"))
    }
}

/// A finite, sort-preserving bijection. Only non-fixed points are stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Permutation {
    map: BTreeMap<Atom, Atom>,
}

impl Permutation {
    pub fn id() -> Self {
        Permutation::default()
    }

    pub fn swap(a: &Atom, b: &Atom) -> Result<Self> {
        if a.sort() != b.sort() {
            return Err(Error::Sort(format!("cannot swap {a} and {b}: different sorts")));
        }
        let mut map = BTreeMap::new();
        if a != b {
            map.insert(a.clone(), b.clone());
            map.insert(b.clone(), a.clone());
        }
        Ok(Permutation { map })
    }

    pub fn from_map(pairs: BTreeMap<Atom, Atom>) -> Result<Self> {
        for (a, b) in &pairs {
            if a.sort() != b.sort() {
                return Err(Error::Sort(format!("permutation maps {a} to {b}: different sorts")));
            }
        }
        let map: BTreeMap<Atom, Atom> = pairs.into_iter().filter(|(a, b)| a != b).collect();
        let dom: BTreeSet<&Atom> = map.keys().collect();
        let img: BTreeSet<&Atom> = map.values().collect();
        if dom != img || img.len() != map.len() {
            return Err(Error::Invalid("mapping is not a bijection on its support".into()));
        }
        Ok(Permutation { map })
    }

    pub fn from_cycles(cycles: &[Vec<Atom>]) -> Result<Self> {
        let mut acc = Permutation::id();
        for c in cycles {
            let mut seen = BTreeSet::new();
            for a in c {
                if !seen.insert(a) {
                    return Err(Error::Invalid(format!("atom {a} repeated in cycle")));
                }
            }
            let mut m = BTreeMap::new();
            for (i, a) in c.iter().enumerate() {
                m.insert(a.clone(), c[(i + 1) % c.len()].clone());
            }
            acc = acc.compose(&Permutation::from_map(m)?);
        }
        Ok(acc)
    }

    /// Extends a finite injective sort-preserving map to a permutation that
    /// agrees with it. The completion pairs the unmatched atoms per sort in
    /// ascending order, so the result depends only on `f`.
    pub fn extending(f: &BTreeMap<Atom, Atom>) -> Result<Self> {
        let dom: BTreeSet<&Atom> = f.keys().collect();
        let img: BTreeSet<&Atom> = f.values().collect();
        if img.len() != f.len() {
            return Err(Error::Invalid("map is not injective".into()));
        }
        let mut map: BTreeMap<Atom, Atom> = f.clone();
        let mut sources: BTreeMap<AtomSort, Vec<Atom>> = BTreeMap::new();
        let mut targets: BTreeMap<AtomSort, Vec<Atom>> = BTreeMap::new();
        for b in img.difference(&dom) {
            sources.entry(b.sort().clone()).or_default().push((*b).clone());
        }
        for a in dom.difference(&img) {
            targets.entry(a.sort().clone()).or_default().push((*a).clone());
        }
        for (s, src) in sources {
            let tgt = targets.remove(&s).unwrap_or_default();
            for (x, y) in src.into_iter().zip(tgt) {
                map.insert(x, y);
            }
        }
        Permutation::from_map(map)
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.map.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn is_id(&self) -> bool {
        self.map.is_empty()
    }

    /// `nontriv(π)`.
    pub fn support(&self) -> BTreeSet<Atom> {
        self.map.keys().cloned().collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.map.iter()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut map = BTreeMap::new();
        for a in self.map.keys().chain(other.map.keys()) {
            let b = self.apply(&other.apply(a));
            if &b != a {
                map.insert(a.clone(), b);
            }
        }
        Permutation { map }
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }

    /// Restricts to the atoms satisfying `keep`, completing to a bijection.
    pub fn restrict(&self, keep: impl Fn(&Atom) -> bool) -> Permutation {
        let f: BTreeMap<Atom, Atom> =
            self.map.iter().filter(|(a, _)| keep(a)).map(|(a, b)| (a.clone(), b.clone())).collect();
        Permutation::extending(&f).expect("restriction of a bijection is injective")
    }

    /// Cycles, each starting at its least atom, ordered by that atom.
    pub fn cycles(&self) -> Vec<Vec<Atom>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in self.map.keys() {
            if seen.contains(a) {
                continue;
            }
            let mut cyc = vec![a.clone()];
            seen.insert(a.clone());
            let mut b = self.apply(a);
            while &b != a {
                seen.insert(b.clone());
                cyc.push(b.clone());
                b = self.apply(&b);
            }
            out.push(cyc);
        }
        out
    }

    pub fn to_renaming(&self) -> Renaming {
        Renaming { map: self.map.clone() }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for c in self.cycles() {
            write!(f, "({})", c.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))?;
        }
        f.write_str(")")
    }
}

/// A finite, sort-preserving map on atoms; not necessarily injective.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Renaming {
    map: BTreeMap<Atom, Atom>,
}

impl Renaming {
    pub fn id() -> Self {
        Renaming::default()
    }

    pub fn from_map(pairs: BTreeMap<Atom, Atom>) -> Result<Self> {
        for (a, b) in &pairs {
            if a.sort() != b.sort() {
                return Err(Error::Sort(format!("renaming maps {a} to {b}: different sorts")));
            }
        }
        Ok(Renaming { map: pairs.into_iter().filter(|(a, b)| a != b).collect() })
    }

    /// `[a↦b]`: sends `a` to `b` and fixes everything else.
    pub fn atomic(a: &Atom, b: &Atom) -> Result<Self> {
        Renaming::from_map(BTreeMap::from([(a.clone(), b.clone())]))
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.map.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn is_id(&self) -> bool {
        self.map.is_empty()
    }

    pub fn dom(&self) -> BTreeSet<Atom> {
        self.map.keys().cloned().collect()
    }

    pub fn img(&self) -> BTreeSet<Atom> {
        self.map.values().cloned().collect()
    }

    pub fn nontriv(&self) -> BTreeSet<Atom> {
        let mut s = self.dom();
        s.extend(self.img());
        s
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.map.iter()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Renaming) -> Renaming {
        let mut map = BTreeMap::new();
        for a in self.map.keys().chain(other.map.keys()) {
            let b = self.apply(&other.apply(a));
            if &b != a {
                map.insert(a.clone(), b);
            }
        }
        Renaming { map }
    }

    pub fn compose_perm(&self, pi: &Permutation) -> Renaming {
        self.compose(&pi.to_renaming())
    }

    /// The renaming that agrees with `self` on `keep` and is the identity elsewhere.
    pub fn restrict(&self, keep: &BTreeSet<Atom>) -> Renaming {
        Renaming { map: self.map.iter().filter(|(a, _)| keep.contains(a)).map(|(a, b)| (a.clone(), b.clone())).collect() }
    }

    pub fn is_injective_on(&self, atoms: &BTreeSet<Atom>) -> bool {
        let imgs: BTreeSet<Atom> = atoms.iter().map(|a| self.apply(a)).collect();
        imgs.len() == atoms.len()
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.map.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "[{}]", body.join(", "))
    }
}

/// A pair of renamings moving a finite set `A` onto fresh atoms and back.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FresheningPair {
    pub rho1: Renaming,
    pub rho2: Renaming,
    pub avoid: AtomSetExpr,
}

impl FresheningPair {
    pub fn new(target: &BTreeSet<Atom>, avoid: &AtomSetExpr) -> FresheningPair {
        let mut blocked = avoid.union(&AtomSetExpr::finite(target.iter().cloned()));
        let mut m1 = BTreeMap::new();
        for a in target {
            let c = fresh_atom(a.sort(), &blocked, false).expect("up atoms never run out");
            blocked = blocked.insert(c.clone());
            m1.insert(a.clone(), c);
        }
        let m2 = m1.iter().map(|(a, c)| (c.clone(), a.clone())).collect();
        let pair = FresheningPair {
            rho1: Renaming::from_map(m1).expect("sort-preserving"),
            rho2: Renaming::from_map(m2).expect("sort-preserving"),
            avoid: avoid.clone(),
        };
        assert!(pair.verify(target), "freshening pair conditions violated");
        pair
    }

    /// Checks the defining conditions against `target`.
    pub fn verify(&self, target: &BTreeSet<Atom>) -> bool {
        let dom1 = self.rho1.dom();
        let dom2 = self.rho2.dom();
        dom1 == *target
            && dom2 == self.rho1.img()
            && target.iter().all(|a| self.rho2.apply(&self.rho1.apply(a)) == *a)
            && dom2.iter().all(|c| !self.avoid.contains(c) && !target.contains(c))
    }
}

pub(crate) fn parse_atom(c: &mut Cursor) -> Result<Atom> {
    let sort = c.ident()?;
    c.expect_sym("#")?;
    let neg = c.eat_sym("-");
    let v = c.int()? as i64;
    Ok(Atom::new(&AtomSort::new(&sort), if neg { -v } else { v }))
}

pub(crate) fn parse_atom_list(c: &mut Cursor, close: &str) -> Result<Vec<Atom>> {
    let mut out = Vec::new();
    if c.eat_sym(close) {
        return Ok(out);
    }
    loop {
        out.push(parse_atom(c)?);
        if c.eat_sym(close) {
            return Ok(out);
        }
        c.expect_sym(",")?;
    }
}

pub(crate) fn parse_perm_set(c: &mut Cursor) -> Result<PermissionSet> {
    if !c.eat_ident("perm") {
        return c.err("expected `perm(`");
    }
    c.expect_sym("(")?;
    c.expect_sym("+")?;
    c.expect_sym("{")?;
    let adds = parse_atom_list(c, "}")?;
    c.expect_sym(",")?;
    c.expect_sym("-")?;
    c.expect_sym("{")?;
    let removes = parse_atom_list(c, "}")?;
    c.expect_sym(")")?;
    PermissionSet::new(adds.into_iter().collect(), removes.into_iter().collect())
}

/// A cycle list `((a b)(c d e))`; `()` is the identity.
pub(crate) fn parse_permutation(c: &mut Cursor) -> Result<Permutation> {
    c.expect_sym("(")?;
    let mut cycles = Vec::new();
    while c.eat_sym("(") {
        let mut cyc = Vec::new();
        while !c.eat_sym(")") {
            cyc.push(parse_atom(c)?);
        }
        cycles.push(cyc);
    }
    c.expect_sym(")")?;
    Permutation::from_cycles(&cycles)
}

pub(crate) fn parse_renaming(c: &mut Cursor) -> Result<Renaming> {
    c.expect_sym("[")?;
    let mut m = BTreeMap::new();
    if !c.eat_sym("]") {
        loop {
            let a = parse_atom(c)?;
            c.expect_sym("->")?;
            let b = parse_atom(c)?;
            if m.insert(a.clone(), b).is_some() {
                return c.err(format!("atom {a} mapped twice"));
            }
            if c.eat_sym("]") {
                break;
            }
            c.expect_sym(",")?;
        }
    }
    Renaming::from_map(m)
}

fn parse_whole<T>(s: &str, f: impl FnOnce(&mut Cursor) -> Result<T>) -> Result<T> {
    let mut c = Cursor::new(s)?;
    let v = f(&mut c)?;
    c.expect_end()?;
    Ok(v)
}

impl FromStr for Atom {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_whole(s, parse_atom)
    }
}

impl FromStr for PermissionSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_whole(s, parse_perm_set)
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_whole(s, parse_permutation)
    }
}

impl FromStr for Renaming {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_whole(s, parse_renaming)
    }
}
