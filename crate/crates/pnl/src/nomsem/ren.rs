//! The free renaming-set extension of a permutation set, its abstractions,
//! and functions out of atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::atoms::{Atom, AtomSort, Permutation, Renaming};

use super::value::GroundValue;

/// An element `ρ▸x` of the free extension.
///
/// Stored as the orbit representative of `x` whose support is renamed, in
/// first-occurrence order, to the up atoms `0, 1, ...` of each sort, together
/// with the image under `ρ` of each of those atoms. Both rules of the
/// generating equivalence are absorbed by this form, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RenElement {
    value: GroundValue,
    images: Vec<Atom>,
}

impl RenElement {
    pub fn new(rho: &Renaming, x: &GroundValue) -> Self {
        let order = x.support_order();
        let mut next: BTreeMap<AtomSort, i64> = BTreeMap::new();
        let mut to_canon = BTreeMap::new();
        for a in &order {
            let k = next.entry(a.sort().clone()).or_insert(0);
            to_canon.insert(a.clone(), Atom::new(a.sort(), *k));
            *k += 1;
        }
        let pi = Permutation::extending(&to_canon).expect("injective and sort-preserving");
        RenElement { value: x.permute(&pi), images: order.iter().map(|a| rho.apply(a)).collect() }
    }

    /// `id▸x`.
    pub fn id(x: &GroundValue) -> Self {
        RenElement::new(&Renaming::id(), x)
    }

    /// The canonical orbit representative.
    pub fn value(&self) -> &GroundValue {
        &self.value
    }

    pub fn images(&self) -> &[Atom] {
        &self.images
    }

    /// The canonical renaming: canonical support atoms to their images.
    pub fn rho(&self) -> Renaming {
        let m = self.value.support_order().into_iter().zip(self.images.iter().cloned()).collect();
        Renaming::from_map(m).expect("sort-preserving")
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        self.images.iter().cloned().collect()
    }

    /// True when the suspended renaming is injective on the support, so the
    /// element is `id▸x` for an honest `x`.
    pub fn is_plain(&self) -> bool {
        self.support().len() == self.images.len()
    }

    /// The `x` with `self = id▸x`, when one exists.
    pub fn plain_value(&self) -> Option<GroundValue> {
        if !self.is_plain() {
            return None;
        }
        let m = self.value.support_order().into_iter().zip(self.images.iter().cloned()).collect();
        Some(self.value.permute(&Permutation::extending(&m).expect("injective")))
    }

    /// `ρ▸self`, composing on the left.
    pub fn act(&self, rho: &Renaming) -> Self {
        RenElement { value: self.value.clone(), images: self.images.iter().map(|a| rho.apply(a)).collect() }
    }

    pub fn permute(&self, pi: &Permutation) -> Self {
        self.act(&pi.to_renaming())
    }

    /// A representative `(ρ, x)` with `dom(ρ)` minimal. The first support
    /// atom mapped to an image `b` is named `b` itself; later ones get fresh
    /// names chosen outside `avoid` and the images, and `ρ` sends them to `b`.
    pub fn representative(&self, avoid: &BTreeSet<Atom>) -> (Renaming, GroundValue) {
        let canon = self.value.support_order();
        let mut blocked: BTreeSet<Atom> = avoid.iter().chain(self.images.iter()).cloned().collect();
        let mut claimed = BTreeSet::new();
        let mut names = BTreeMap::new();
        let mut rho = BTreeMap::new();
        for (c, b) in canon.iter().zip(&self.images) {
            if claimed.insert(b.clone()) {
                names.insert(c.clone(), b.clone());
            } else {
                let u = fresh(b.sort(), &blocked);
                blocked.insert(u.clone());
                rho.insert(u.clone(), b.clone());
                names.insert(c.clone(), u);
            }
        }
        let pi = Permutation::extending(&names).expect("names are distinct");
        (Renaming::from_map(rho).expect("sort-preserving"), self.value.permute(&pi))
    }

    /// A representative whose value mentions only atoms outside `avoid` and
    /// outside the images.
    pub fn fresh_representative(&self, avoid: &BTreeSet<Atom>) -> (Renaming, GroundValue) {
        let canon = self.value.support_order();
        let mut blocked: BTreeSet<Atom> = avoid.iter().chain(self.images.iter()).cloned().collect();
        let mut names = BTreeMap::new();
        let mut rho = BTreeMap::new();
        for (c, b) in canon.iter().zip(&self.images) {
            let u = fresh(b.sort(), &blocked);
            blocked.insert(u.clone());
            rho.insert(u.clone(), b.clone());
            names.insert(c.clone(), u);
        }
        let pi = Permutation::extending(&names).expect("names are distinct");
        (Renaming::from_map(rho).expect("sort-preserving"), self.value.permute(&pi))
    }
}

/// The up atom of smallest index outside `blocked`.
pub(crate) fn fresh(sort: &AtomSort, blocked: &BTreeSet<Atom>) -> Atom {
    (0..).map(|i| Atom::new(sort, i)).find(|a| !blocked.contains(a)).expect("blocked is finite")
}

impl fmt::Display for RenElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (rho, x) = self.representative(&BTreeSet::new());
        if rho.is_id() {
            write!(f, "id|>{x}")
        } else {
            write!(f, "{rho}|>{x}")
        }
    }
}

/// An element `[a]p` of the abstraction of the free extension, in canonical
/// form as for ground values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RenAbs {
    atom: Atom,
    body: RenElement,
}

impl RenAbs {
    pub fn new(a: &Atom, body: RenElement) -> Self {
        let mut s = body.support();
        s.remove(a);
        let c = fresh(a.sort(), &s);
        if &c == a {
            return RenAbs { atom: c, body };
        }
        let body = body.permute(&Permutation::swap(a, &c).expect("same sort"));
        RenAbs { atom: c, body }
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn body(&self) -> &RenElement {
        &self.body
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        let mut s = self.body.support();
        s.remove(&self.atom);
        s
    }
}

impl fmt::Display for RenAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.atom, self.body)
    }
}

/// Default behaviour of a finitely-presented atom function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AtomRule {
    Identity,
    Const(RenElement),
}

/// A function out of atoms, valued in a free extension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AtomFn {
    /// `λa.v`: sends `n` to `[a↦n]▸v`.
    AbsImage { atom: Atom, body: RenElement },
    FiniteExc { default: AtomRule, exceptions: BTreeMap<Atom, RenElement> },
}

impl AtomFn {
    pub fn apply(&self, n: &Atom) -> RenElement {
        match self {
            AtomFn::AbsImage { atom, body } => body.act(&Renaming::atomic(atom, n).expect("same sort")),
            AtomFn::FiniteExc { default, exceptions } => match exceptions.get(n) {
                Some(v) => v.clone(),
                None => match default {
                    AtomRule::Identity => RenElement::id(&GroundValue::atom(n)),
                    AtomRule::Const(v) => v.clone(),
                },
            },
        }
    }

    /// The swapping `(a b)` as an atom function.
    pub fn swap(a: &Atom, b: &Atom) -> Self {
        let exceptions = BTreeMap::from([
            (a.clone(), RenElement::id(&GroundValue::atom(b))),
            (b.clone(), RenElement::id(&GroundValue::atom(a))),
        ]);
        AtomFn::FiniteExc { default: AtomRule::Identity, exceptions }
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        match self {
            AtomFn::AbsImage { atom, body } => {
                let mut s = body.support();
                s.remove(atom);
                s
            }
            AtomFn::FiniteExc { default, exceptions } => {
                let mut s = BTreeSet::new();
                if let AtomRule::Const(v) = default {
                    s.extend(v.support());
                }
                for (n, v) in exceptions {
                    let fixed = matches!(default, AtomRule::Identity) && *v == RenElement::id(&GroundValue::atom(n));
                    if !fixed {
                        s.insert(n.clone());
                        s.extend(v.support());
                    }
                }
                s
            }
        }
    }

    pub fn agrees_on<'a>(&self, other: &AtomFn, probes: impl IntoIterator<Item = &'a Atom>) -> bool {
        probes.into_iter().all(|n| self.apply(n) == other.apply(n))
    }
}

/// `Ren(𝔸) → 𝔸`: `ρ▸a ↦ ρ(a)`.
pub fn ren_atom_collapse(p: &RenElement) -> Option<Atom> {
    match p.value() {
        GroundValue::Atom(_) => Some(p.images[0].clone()),
        _ => None,
    }
}

/// `Ren(X×Y) → Ren(X)×Ren(Y)`: `ρ▸(x,y) ↦ (ρ▸x, ρ▸y)`.
pub fn ren_pair_split(p: &RenElement) -> Option<(RenElement, RenElement)> {
    match p.value() {
        GroundValue::Tuple(xs) if xs.len() == 2 => {
            let rho = p.rho();
            Some((RenElement::new(&rho, &xs[0]), RenElement::new(&rho, &xs[1])))
        }
        _ => None,
    }
}

/// A preimage of `(p, q)` under [`ren_pair_split`]: both components are
/// re-represented over disjoint fresh atoms and the renamings are joined.
pub fn ren_pair_preimage(p: &RenElement, q: &RenElement) -> RenElement {
    let (r1, x) = p.fresh_representative(&BTreeSet::new());
    let used: BTreeSet<Atom> = x.support().into_iter().chain(r1.nontriv()).collect();
    let (r2, y) = q.fresh_representative(&used);
    let joined = r1.pairs().chain(r2.pairs()).map(|(a, b)| (a.clone(), b.clone())).collect();
    RenElement::new(&Renaming::from_map(joined).expect("sort-preserving"), &GroundValue::pair(x, y))
}

/// `Ren([𝔸]X) → [𝔸]Ren(X)`: `ρ▸[a]x ↦ [a](ρ▸x)` for `a ∉ nontriv(ρ)`.
pub fn ren_abs_push(p: &RenElement) -> Option<RenAbs> {
    let GroundValue::Abs(c, _) = p.value() else { return None };
    let rho = p.rho();
    let mut blocked = rho.nontriv();
    blocked.extend(p.value().support());
    let a = fresh(c.sort(), &blocked);
    let x = p.value().concrete(&a).expect("a is fresh");
    Some(RenAbs::new(&a, RenElement::new(&rho, &x)))
}

/// `[𝔸]Y → (𝔸 ⇒ Y)`: `[a]y ↦ λa.y`.
pub fn abs_fun(ab: &RenAbs) -> AtomFn {
    AtomFn::AbsImage { atom: ab.atom.clone(), body: ab.body.clone() }
}

/// `(𝔸×𝔸) ∪ {∗}` with the renaming action that collapses pairs whose
/// components are identified.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Exploding {
    Star,
    Pair(Atom, Atom),
}

impl Exploding {
    pub fn act(&self, rho: &Renaming) -> Exploding {
        match self {
            Exploding::Star => Exploding::Star,
            Exploding::Pair(a, b) if a == b => Exploding::Pair(rho.apply(a), rho.apply(a)),
            Exploding::Pair(a, b) => {
                let (x, y) = (rho.apply(a), rho.apply(b));
                if x == y {
                    Exploding::Star
                } else {
                    Exploding::Pair(x, y)
                }
            }
        }
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        match self {
            Exploding::Star => BTreeSet::new(),
            Exploding::Pair(a, b) => BTreeSet::from([a.clone(), b.clone()]),
        }
    }
}
