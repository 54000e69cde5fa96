//! Executable checks of the natural maps between free extensions,
//! abstractions and atom functions, each on a fixed witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::atoms::{Atom, AtomSort, Renaming};

use super::ren::{
    abs_fun, ren_abs_push, ren_atom_collapse, ren_pair_preimage, ren_pair_split, AtomFn, RenAbs, RenElement,
};
use super::value::GroundValue;

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub part: String,
    pub claim: String,
    /// The verdict the claim predicts.
    pub expected: bool,
    pub observed: bool,
    pub detail: String,
}

impl WitnessCheck {
    pub fn agrees(&self) -> bool {
        self.expected == self.observed
    }
}

impl fmt::Display for WitnessCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.agrees() { "as claimed" } else { "DIFFERS" };
        write!(f, "part {}: {} -> {} ({tag}); {}", self.part, self.claim, self.observed, self.detail)
    }
}

fn nu() -> AtomSort {
    AtomSort::new("nu")
}

/// Five atoms: `a = nu#-1`, `b = nu#-2` and three up atoms.
pub fn pool() -> Vec<Atom> {
    [-1, -2, 0, 1, 2].iter().map(|&i| Atom::new(&nu(), i)).collect()
}

fn at(a: &Atom) -> GroundValue {
    GroundValue::atom(a)
}

fn pair_of(x: &Atom, y: &Atom) -> GroundValue {
    GroundValue::pair(at(x), at(y))
}

/// Every map from `dom` into `cod`, as renamings.
pub fn all_renamings(dom: &[Atom], cod: &[Atom]) -> Vec<Renaming> {
    let mut out = vec![BTreeMap::new()];
    for a in dom {
        out = out
            .into_iter()
            .flat_map(|m: BTreeMap<Atom, Atom>| {
                cod.iter().map(move |b| {
                    let mut m = m.clone();
                    m.insert(a.clone(), b.clone());
                    m
                })
            })
            .collect();
    }
    out.into_iter().map(|m| Renaming::from_map(m).expect("one sort")).collect()
}

/// `Ren(𝔸) → 𝔸` is a bijection on everything generated from the pool.
pub fn part1() -> WitnessCheck {
    let p = pool();
    let mut by_image: BTreeMap<Atom, BTreeSet<RenElement>> = BTreeMap::new();
    for a in &p {
        for rho in all_renamings(std::slice::from_ref(a), &p) {
            let e = RenElement::new(&rho, &at(a));
            by_image.entry(ren_atom_collapse(&e).expect("atom")).or_default().insert(e);
        }
    }
    let injective = by_image.values().all(|s| s.len() == 1);
    let surjective = p.iter().all(|b| by_image.contains_key(b));
    WitnessCheck {
        part: "1".into(),
        claim: "Ren(A) -> A, rho|>a |-> rho(a), is a bijection".into(),
        expected: true,
        observed: injective && surjective,
        detail: format!("{} classes over a 5-atom pool; injective={injective}, surjective={surjective}", by_image.len()),
    }
}

pub fn part2_injective() -> WitnessCheck {
    let p = pool();
    let (a, b) = (&p[0], &p[1]);
    let x = RenElement::new(&Renaming::atomic(a, b).expect("same sort"), &pair_of(a, b));
    let y = RenElement::id(&pair_of(b, b));
    let collide = x != y && ren_pair_split(&x) == ren_pair_split(&y);
    WitnessCheck {
        part: "2a".into(),
        claim: "Ren(XxY) -> Ren(X)xRen(Y) is not injective".into(),
        expected: true,
        observed: collide,
        detail: format!("{x} and {y} are distinct with equal images"),
    }
}

/// Looks for a preimage of `(p, q)` among elements whose value has support
/// of size at most `k`, renamed into the pool.
pub fn bounded_pair_preimage(p: &RenElement, q: &RenElement, k: usize) -> Option<RenElement> {
    let cod = pool();
    let canon: Vec<Atom> = (0..k as i64).map(|i| Atom::new(&nu(), 100 + i)).collect();
    let slots: Vec<Vec<Atom>> = (0..4).map(|_| canon.clone()).collect();
    let mut values = vec![Vec::new()];
    for s in &slots {
        values = values
            .into_iter()
            .flat_map(|v: Vec<Atom>| {
                s.iter().map(move |a| {
                    let mut v = v.clone();
                    v.push(a.clone());
                    v
                })
            })
            .collect();
    }
    let rhos = all_renamings(&canon, &cod);
    for v in values {
        let x = GroundValue::pair(pair_of(&v[0], &v[1]), pair_of(&v[2], &v[3]));
        for rho in &rhos {
            let e = RenElement::new(rho, &x);
            if ren_pair_split(&e).as_ref() == Some(&(p.clone(), q.clone())) {
                return Some(e);
            }
        }
    }
    None
}

/// The claimed non-surjectivity witness for the product map. A preimage is
/// always available by separating the two supports with fresh atoms.
pub fn part2_surjective() -> WitnessCheck {
    let p = pool();
    let (a, b) = (&p[0], &p[1]);
    let left = RenElement::new(&Renaming::atomic(a, b).expect("same sort"), &pair_of(a, b));
    let right = RenElement::new(&Renaming::atomic(b, a).expect("same sort"), &pair_of(a, b));
    let small = bounded_pair_preimage(&left, &right, 3);
    let pre = ren_pair_preimage(&left, &right);
    let verified = ren_pair_split(&pre) == Some((left.clone(), right.clone()));
    WitnessCheck {
        part: "2b".into(),
        claim: format!("({left}, {right}) has no preimage under Ren(XxY) -> Ren(X)xRen(Y)"),
        expected: true,
        observed: !verified,
        detail: format!(
            "preimage with support <= 3: {}; preimage {pre} (support {}) splits back exactly: {verified}",
            small.map_or("none".into(), |e| e.to_string()),
            pre.value().support().len()
        ),
    }
}

/// Searches `ρ▸[e](u,v)` over the pool for a preimage of `target`.
pub fn bounded_abs_preimage(target: &RenAbs) -> Option<RenElement> {
    let p = pool();
    for e in &p {
        for u in &p {
            for v in &p {
                let x = GroundValue::abs(e, pair_of(u, v));
                let supp: Vec<Atom> = x.support().into_iter().collect();
                for rho in all_renamings(&supp, &p) {
                    let cand = RenElement::new(&rho, &x);
                    if ren_abs_push(&cand).as_ref() == Some(target) {
                        return Some(cand);
                    }
                }
            }
        }
    }
    None
}

fn abs_check(part: &str, target: RenAbs) -> WitnessCheck {
    let found = bounded_abs_preimage(&target);
    WitnessCheck {
        part: part.into(),
        claim: format!("{target} has no preimage under Ren([A]X) -> [A]Ren(X)"),
        expected: true,
        observed: found.is_none(),
        detail: match found {
            Some(e) => format!("preimage {e} found by search over the pool"),
            None => "no preimage among rho|>[e](u,v) over a 5-atom pool".into(),
        },
    }
}

/// The stated witness `[a]([a↦b]▸(a,b))`. The abstraction is vacuous, since
/// `a` is not in the support of the body, so it is reached.
pub fn part3_stated() -> WitnessCheck {
    let p = pool();
    let (a, b) = (&p[0], &p[1]);
    abs_check("3", RenAbs::new(a, RenElement::new(&Renaming::atomic(a, b).expect("same sort"), &pair_of(a, b))))
}

/// `[a]([b↦a]▸(a,b))`: both components are the bound atom, but the pair is
/// not diagonal, which no `ρ▸[a]x` with `a ∉ nontriv(ρ)` can produce.
pub fn part3_repaired() -> WitnessCheck {
    let p = pool();
    let (a, b) = (&p[0], &p[1]);
    abs_check("3'", RenAbs::new(a, RenElement::new(&Renaming::atomic(b, a).expect("same sort"), &pair_of(a, b))))
}

/// The swapping `(b a)` is not `λn.y` for any abstraction in `[𝔸]𝔸`.
pub fn part4() -> WitnessCheck {
    let p = pool();
    let probes = &p[..3];
    let swap = AtomFn::swap(&p[0], &p[1]);
    let mut hits = Vec::new();
    for x in &p {
        for y in &p {
            let f = abs_fun(&RenAbs::new(x, RenElement::id(&at(y))));
            if f.agrees_on(&swap, probes) {
                hits.push(format!("[{x}]{y}"));
            }
        }
    }
    WitnessCheck {
        part: "4".into(),
        claim: "the swapping (b a) is not in the image of [A]A -> (A => A)".into(),
        expected: true,
        observed: hits.is_empty(),
        detail: if hits.is_empty() {
            "every abstraction over the pool differs from the swapping on {a, b, c}".into()
        } else {
            format!("agreeing abstractions: {}", hits.join(", "))
        },
    }
}

pub fn all() -> Vec<WitnessCheck> {
    vec![part1(), part2_injective(), part2_surjective(), part3_stated(), part3_repaired(), part4()]
}
