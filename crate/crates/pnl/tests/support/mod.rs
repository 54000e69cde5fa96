//! Brute-force oracles. None of them calls the library's canonical forms,
//! term permutation action or free-atom computation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use pnl::atoms::{Atom, AtomSort, Permutation};
use pnl::nomsem::GroundValue;
use pnl::pnl::Term;

pub fn nu(i: i64) -> Atom {
    Atom::new(&AtomSort::new("nu"), i)
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a.max(b)] = a.min(b);
        true
    }
}

fn swap_atom(a: &Atom, b: &Atom, c: &Atom) -> Atom {
    if c == a {
        b.clone()
    } else if c == b {
        a.clone()
    } else {
        c.clone()
    }
}

/// `(a b)·r` on raw syntax: binders are swapped too, suspensions compose.
pub fn swap_term(a: &Atom, b: &Atom, r: &Term) -> Term {
    match r {
        Term::Atom(c) => Term::Atom(swap_atom(a, b, c)),
        Term::Tuple(xs) => Term::Tuple(xs.iter().map(|x| swap_term(a, b, x)).collect()),
        Term::App(f, x) => Term::App(f.clone(), Box::new(swap_term(a, b, x))),
        Term::Abs(c, x) => Term::Abs(swap_atom(a, b, c), Box::new(swap_term(a, b, x))),
        Term::Susp(pi, x) => {
            let mut dom: BTreeSet<Atom> = pi.support();
            dom.insert(a.clone());
            dom.insert(b.clone());
            let m: BTreeMap<Atom, Atom> = dom.iter().map(|c| (c.clone(), swap_atom(a, b, &pi.apply(c)))).collect();
            Term::Susp(Permutation::from_map(m).expect("bijection"), x.clone())
        }
    }
}

/// `c ∈ fa(r)`, with `fa(π·X) = π·pmss(X)`.
pub fn free_in(c: &Atom, r: &Term) -> bool {
    match r {
        Term::Atom(a) => a == c,
        Term::Tuple(xs) => xs.iter().any(|x| free_in(c, x)),
        Term::App(_, x) => free_in(c, x),
        Term::Abs(a, x) => a != c && free_in(c, x),
        Term::Susp(pi, x) => x.pmss().contains(&pi.inverse().apply(c)),
    }
}

fn subterms(r: &Term, out: &mut Vec<Term>) {
    out.push(r.clone());
    match r {
        Term::Atom(_) | Term::Susp(..) => {}
        Term::Tuple(xs) => xs.iter().for_each(|x| subterms(x, out)),
        Term::App(_, x) | Term::Abs(_, x) => subterms(x, out),
    }
}

/// Class labels for `terms` under the least congruence generated by
/// `(b a)·r ≈ r` for `a, b ∉ fa(r)`, computed over all subterms. The set
/// must be closed under swapping the atoms in `atoms`.
pub fn alpha_closure(terms: &[Term], atoms: &[Atom]) -> Vec<usize> {
    let mut all = Vec::new();
    for t in terms {
        subterms(t, &mut all);
    }
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut nodes = Vec::new();
    for t in all {
        if !index.contains_key(&t) {
            index.insert(t.clone(), nodes.len());
            nodes.push(t);
        }
    }
    let mut uf = UnionFind::new(nodes.len());
    for (i, r) in nodes.iter().enumerate() {
        for (k, a) in atoms.iter().enumerate() {
            for b in &atoms[k + 1..] {
                if a.sort() == b.sort() && !free_in(a, r) && !free_in(b, r) {
                    let s = swap_term(a, b, r);
                    let j = *index.get(&s).unwrap_or_else(|| panic!("term set not closed: {s}"));
                    uf.union(i, j);
                }
            }
        }
    }
    // Congruence: merge compound nodes whose heads agree and whose children
    // are already equivalent, until nothing changes.
    #[derive(PartialEq, Eq, Hash)]
    enum Head {
        Tuple(Vec<usize>),
        App(String, usize),
        Abs(Atom, usize),
    }
    loop {
        let mut seen: HashMap<Head, usize> = HashMap::new();
        let mut changed = false;
        for (i, r) in nodes.iter().enumerate() {
            let head = match r {
                Term::Tuple(xs) => Head::Tuple(xs.iter().map(|x| uf.find(index[x])).collect()),
                Term::App(f, x) => Head::App(f.to_string(), uf.find(index[&**x])),
                Term::Abs(a, x) => Head::Abs(a.clone(), uf.find(index[&**x])),
                _ => continue,
            };
            match seen.get(&head) {
                Some(&j) => changed |= uf.union(i, j),
                None => {
                    seen.insert(head, i);
                }
            }
        }
        if !changed {
            break;
        }
    }
    terms.iter().map(|t| uf.find(index[t])).collect()
}

/// Whether two labelings of the same items induce the same partition.
pub fn same_partition<A: Ord + Clone, B: Ord + Clone>(xs: &[A], ys: &[B]) -> Result<(), (usize, usize)> {
    assert_eq!(xs.len(), ys.len());
    let mut fwd: BTreeMap<A, (B, usize)> = BTreeMap::new();
    let mut back: BTreeMap<B, (A, usize)> = BTreeMap::new();
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        if let Some((y0, j)) = fwd.get(x) {
            if y0 != y {
                return Err((*j, i));
            }
        } else {
            fwd.insert(x.clone(), (y.clone(), i));
        }
        if let Some((x0, j)) = back.get(y) {
            if x0 != x {
                return Err((*j, i));
            }
        } else {
            back.insert(y.clone(), (x.clone(), i));
        }
    }
    Ok(())
}

/// Small values over a pool of atoms: raw atom tuples, as nested vectors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Small {
    Atom(Atom),
    Tuple(Vec<Small>),
    /// A raw abstraction over a tuple of atoms.
    Abs(Atom, Vec<Atom>),
}

impl Small {
    pub fn support(&self) -> BTreeSet<Atom> {
        match self {
            Small::Atom(a) => BTreeSet::from([a.clone()]),
            Small::Tuple(xs) => xs.iter().flat_map(|x| x.support()).collect(),
            Small::Abs(a, xs) => xs.iter().filter(|x| *x != a).cloned().collect(),
        }
    }

    pub fn map(&self, f: &impl Fn(&Atom) -> Atom) -> Small {
        match self {
            Small::Atom(a) => Small::Atom(f(a)),
            Small::Tuple(xs) => Small::Tuple(xs.iter().map(|x| x.map(f)).collect()),
            Small::Abs(a, xs) => Small::Abs(f(a), xs.iter().map(f).collect()),
        }
    }

    /// Abstractions compared by graph: the body at a fresh atom.
    pub fn key(&self, fresh: &Atom) -> Small {
        match self {
            Small::Abs(a, xs) => {
                Small::Abs(fresh.clone(), xs.iter().map(|x| if x == a { fresh.clone() } else { x.clone() }).collect())
            }
            Small::Tuple(xs) => Small::Tuple(xs.iter().map(|x| x.key(fresh)).collect()),
            s => s.clone(),
        }
    }

    pub fn to_value(&self) -> GroundValue {
        match self {
            Small::Atom(a) => GroundValue::atom(a),
            Small::Tuple(xs) => GroundValue::Tuple(xs.iter().map(Small::to_value).collect()),
            Small::Abs(a, xs) => GroundValue::abs(a, GroundValue::Tuple(xs.iter().map(GroundValue::atom).collect())),
        }
    }
}

/// Classes of `(ρ, x)` under rule 1 (only `ρ` on `supp(x)` matters) and
/// rule 2 (`(ρ∘π, x) ∼ (ρ, π·x)`) for every permutation `π` of the pool.
/// Renamings are given on `supp(x)` only. `fresh` is an atom outside the
/// pool used to compare abstractions.
pub fn ren_closure(items: &[(BTreeMap<Atom, Atom>, Small)], pool: &[Atom], fresh: &Atom) -> Vec<usize> {
    let norm = |rho: &BTreeMap<Atom, Atom>, x: &Small| -> (BTreeMap<Atom, Atom>, Small) {
        let s = x.support();
        (rho.iter().filter(|(a, _)| s.contains(*a)).map(|(a, b)| (a.clone(), b.clone())).collect(), x.key(fresh))
    };
    let mut index: HashMap<(BTreeMap<Atom, Atom>, Small), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut queue: Vec<(BTreeMap<Atom, Atom>, Small)> = items.iter().map(|(r, x)| norm(r, x)).collect();
    let mut edges = Vec::new();
    let perms = permutations(pool);
    while let Some(node) = queue.pop() {
        if index.contains_key(&node) {
            continue;
        }
        let i = nodes.len();
        index.insert(node.clone(), i);
        nodes.push(node.clone());
        let (rho, x) = node;
        for pi in &perms {
            // (σ, x) with σ = ρ'∘π gives (ρ', π·x) where ρ' = σ∘π⁻¹.
            let px = x.map(&|a| pi.get(a).cloned().unwrap_or_else(|| a.clone()));
            let inv: BTreeMap<Atom, Atom> = pi.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
            let rho2: BTreeMap<Atom, Atom> = px
                .support()
                .into_iter()
                .map(|b| {
                    let a = inv.get(&b).cloned().unwrap_or_else(|| b.clone());
                    let img = rho.get(&a).cloned().unwrap_or_else(|| a.clone());
                    (b, img)
                })
                .collect();
            let other = norm(&rho2, &px);
            edges.push((i, other.clone()));
            queue.push(other);
        }
    }
    let mut uf = UnionFind::new(nodes.len());
    for (i, other) in edges {
        uf.union(i, index[&other]);
    }
    items.iter().map(|(r, x)| uf.find(index[&norm(r, x)])).collect()
}

pub fn permutations(pool: &[Atom]) -> Vec<BTreeMap<Atom, Atom>> {
    fn go(rest: &[Atom], acc: &mut Vec<Atom>, out: &mut Vec<Vec<Atom>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let mut r = rest.to_vec();
            let h = r.remove(i);
            acc.push(h);
            go(&r, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, &mut Vec::new(), &mut out);
    out.into_iter().map(|img| pool.iter().cloned().zip(img).collect()).collect()
}

/// The graph of `[a]x` at each probe atom: `n ↦ (n a)·x` where defined.
pub fn abs_graph(a: &Atom, x: &[Atom], probes: &[Atom]) -> BTreeMap<Atom, Vec<Atom>> {
    let supp: BTreeSet<&Atom> = x.iter().filter(|c| *c != a).collect();
    probes
        .iter()
        .filter(|n| !supp.contains(n))
        .map(|n| (n.clone(), x.iter().map(|c| swap_atom(n, a, c)).collect()))
        .collect()
}
