//! Translation of restricted PNL into HOL.
//!
//! An unknown `X` is raised to a HOL variable `X@[d1,...,dn]` applied to the
//! atoms of `D ∩ pmss(X)`. Capture typing decides whether `D` records every
//! atom the translation must not forget.

use std::collections::{BTreeMap, BTreeSet};

use crate::atoms::{Atom, AtomSetExpr, Permutation};
use crate::error::{Error, Result};
use crate::hol::proof::{HolDerivation, HolRule, HolSequent};
use crate::hol::{atom_type, HolConst, HolSignature, HolTerm, HolType, HolVar};
use crate::pnl::{free_atoms_prop, PnlSort, Prop, Signature, Term, Unknown};
use crate::proof::{check_node, check_restricted, Derivation, Mode, NodeInfo, Rule, Sequent};

pub fn translate_sort(s: &PnlSort) -> HolType {
    match s {
        PnlSort::Name(n) => atom_type(n),
        PnlSort::Base(b) => HolType::base(&format!("mu_{b}")),
        PnlSort::Tuple(xs) => HolType::Tuple(xs.iter().map(translate_sort).collect()),
        PnlSort::Abs(n, body) => HolType::arrow(atom_type(n), translate_sort(body)),
    }
}

pub fn const_name(former: &str) -> String {
    format!("g_{former}")
}

/// Base types `mu_ν`, `mu_τ` and constants `g_f`, `g_P`.
pub fn translate_signature(sig: &Signature) -> HolSignature {
    let mut h = HolSignature::new();
    for n in sig.atom_sorts() {
        h.add_base(&format!("mu_{}", n.name()));
    }
    for b in sig.base_sorts() {
        h.add_base(&format!("mu_{b}"));
    }
    for (f, (arg, res)) in sig.term_formers() {
        let ty = HolType::arrow(translate_sort(arg), HolType::base(&format!("mu_{res}")));
        h.add_const(&const_name(f), ty).expect("bases declared above");
    }
    for (p, arg) in sig.prop_formers() {
        h.add_const(&const_name(p), HolType::arrow(translate_sort(arg), HolType::o())).expect("bases declared above");
    }
    h
}

/// `D ∩ pmss(X)`, in the order of `D`.
pub fn restrict_list(d: &[Atom], x: &Unknown) -> Vec<Atom> {
    d.iter().filter(|a| x.pmss().contains(a)).cloned().collect()
}

pub fn dlist_name(d: &[Atom]) -> String {
    format!("[{}]", d.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
}

/// The HOL variable `X_D`.
pub fn unknown_var(d: &[Atom], x: &Unknown) -> HolVar {
    let args = restrict_list(d, x).iter().map(|a| atom_type(a.sort())).collect::<Vec<_>>();
    HolVar::new(&format!("{}@{}", x.name(), dlist_name(d)), HolType::arrows(args, translate_sort(x.sort())))
}

fn former(sig: &Signature, f: &str) -> HolConst {
    if let Some((arg, res)) = sig.term_formers().get(f) {
        return HolConst::new(&const_name(f), HolType::arrow(translate_sort(arg), HolType::base(&format!("mu_{res}"))));
    }
    let arg = sig.prop_formers().get(f).expect("sort-checked input names a declared former");
    HolConst::new(&const_name(f), HolType::arrow(translate_sort(arg), HolType::o()))
}

/// `⟦r⟧_D`.
pub fn translate_term(sig: &Signature, d: &[Atom], r: &Term) -> HolTerm {
    match r {
        Term::Atom(a) => HolTerm::atom(a),
        Term::Tuple(xs) => HolTerm::Tuple(xs.iter().map(|x| translate_term(sig, d, x)).collect()),
        Term::App(f, r) => HolTerm::app(HolTerm::Const(former(sig, f)), translate_term(sig, d, r)),
        Term::Abs(a, r) => HolTerm::lam(&HolVar::atom(a), translate_term(sig, d, r)),
        Term::Susp(pi, x) => HolTerm::apps(
            HolTerm::var(&unknown_var(d, x)),
            restrict_list(d, x).iter().map(|a| HolTerm::atom(&pi.apply(a))),
        ),
    }
}

/// `⟦φ⟧_D`.
pub fn translate_prop(sig: &Signature, d: &[Atom], phi: &Prop) -> HolTerm {
    match phi {
        Prop::Bot => HolTerm::bot(),
        Prop::Imp(a, b) => HolTerm::imp(translate_prop(sig, d, a), translate_prop(sig, d, b)),
        Prop::Pred(p, r) => HolTerm::app(HolTerm::Const(former(sig, p)), translate_term(sig, d, r)),
        Prop::Forall(x, body) => HolTerm::forall(&unknown_var(d, x), translate_prop(sig, d, body)),
    }
}

/// The atoms a capture typing `D ⊢ r : A` needs in `D`.
fn required_term(r: &Term, abstracted: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
    match r {
        Term::Atom(_) => {}
        Term::Tuple(xs) => xs.iter().for_each(|x| required_term(x, abstracted, out)),
        Term::App(_, r) => required_term(r, abstracted, out),
        Term::Abs(a, r) => {
            abstracted.push(a.clone());
            required_term(r, abstracted, out);
            abstracted.pop();
        }
        Term::Susp(pi, x) => {
            out.extend(pi.support().into_iter().chain(abstracted.iter().cloned()).filter(|a| x.pmss().contains(a)));
        }
    }
}

fn required_prop(phi: &Prop, abstracted: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
    match phi {
        Prop::Bot => {}
        Prop::Imp(a, b) => {
            required_prop(a, abstracted, out);
            required_prop(b, abstracted, out);
        }
        Prop::Pred(_, r) => required_term(r, abstracted, out),
        Prop::Forall(_, body) => required_prop(body, abstracted, out),
    }
}

/// A term or proposition subject to capture typing.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Term(&'a Term),
    Prop(&'a Prop),
}

impl Subject<'_> {
    fn required(&self, a: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        let mut ab: Vec<Atom> = a.iter().cloned().collect();
        let mut out = BTreeSet::new();
        match self {
            Subject::Term(r) => required_term(r, &mut ab, &mut out),
            Subject::Prop(p) => required_prop(p, &mut ab, &mut out),
        }
        out
    }
}

/// Decides `D ⊢ subject : A`.
pub fn capture_check(d: &[Atom], subject: Subject, a: &BTreeSet<Atom>) -> bool {
    capture_missing(d, subject, a).is_empty()
}

/// Atoms that would have to be added to `D` for `D ⊢ subject : A`.
pub fn capture_missing(d: &[Atom], subject: Subject, a: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    subject.required(a).into_iter().filter(|x| !d.contains(x)).collect()
}

/// The least `D` with `D ⊢ s` for every subject, ordered by sort then index.
pub fn capture_infer_minimal<'a>(subjects: impl IntoIterator<Item = Subject<'a>>) -> Vec<Atom> {
    let empty = BTreeSet::new();
    let all: BTreeSet<Atom> = subjects.into_iter().flat_map(|s| s.required(&empty)).collect();
    all.into_iter().collect()
}

pub fn translate_sequent(sig: &Signature, d: &[Atom], s: &Sequent) -> HolSequent {
    HolSequent::new(
        s.left.iter().map(|p| translate_prop(sig, d, p)),
        s.right.iter().map(|p| translate_prop(sig, d, p)),
    )
}

fn sequent_subjects(s: &Sequent) -> impl Iterator<Item = Subject<'_>> {
    s.props().map(Subject::Prop)
}

/// A translated derivation together with the list `D` it was built over.
#[derive(Clone, Debug)]
pub struct TranslatedDerivation {
    pub d: Vec<Atom>,
    pub signature: HolSignature,
    pub derivation: HolDerivation,
}

/// Translates a restricted derivation. With `d = None` the minimal list over
/// every sequent of the tree is used.
pub fn translate_derivation(sig: &Signature, der: &Derivation, d: Option<&[Atom]>) -> Result<TranslatedDerivation> {
    for (path, n) in der.nodes() {
        if let Rule::Ax(pi) = &n.rule {
            if !pi.is_id() {
                return Err(Error::Unsound(format!(
                    "node {path} uses the equivariant axiom with {pi}; its HOL image {} is not derivable, \
                     so only the restricted axiom can be translated",
                    translate_sequent(sig, &[], &n.conclusion)
                )));
            }
        }
    }
    let report = check_restricted(sig, der);
    if !report.accepted {
        let f = report.failures().next().expect("rejected report has a failure");
        return Err(Error::Invalid(format!(
            "derivation is not a restricted derivation: {} {}: {}",
            f.path,
            f.rule,
            f.message.clone().unwrap_or_default()
        )));
    }
    let d: Vec<Atom> = match d {
        Some(d) => {
            let empty = BTreeSet::new();
            for (path, n) in der.nodes() {
                let missing: BTreeSet<Atom> =
                    sequent_subjects(&n.conclusion).flat_map(|s| capture_missing(d, s, &empty)).collect();
                if !missing.is_empty() {
                    let names: Vec<String> = missing.iter().map(|a| a.to_string()).collect();
                    return Err(Error::Capture(format!(
                        "sequent {} at {path} is not capture-typed by D={}; add {}",
                        n.conclusion,
                        dlist_name(d),
                        names.join(", ")
                    )));
                }
            }
            d.to_vec()
        }
        None => capture_infer_minimal(der.nodes().into_iter().flat_map(|(_, n)| sequent_subjects(&n.conclusion))),
    };
    let derivation = translate_node(sig, &d, der)?;
    Ok(TranslatedDerivation { signature: translate_signature(sig), derivation, d })
}

fn translate_node(sig: &Signature, d: &[Atom], n: &Derivation) -> Result<HolDerivation> {
    let rule = match &n.rule {
        Rule::Ax(_) | Rule::AxR => HolRule::Ax,
        Rule::BotL => HolRule::BotL,
        Rule::ImpL => HolRule::ImpL,
        Rule::ImpR => HolRule::ImpR,
        Rule::ForallL { witness, .. } => {
            let Ok(NodeInfo { principal: Some(Prop::Forall(x, _)) }) = check_node(sig, n, Mode::Restricted) else {
                return Err(Error::Invalid("forallL node without a resolvable principal quantifier".into()));
            };
            let binders: Vec<HolVar> = restrict_list(d, &x).iter().map(HolVar::atom).collect();
            HolRule::ForallL { witness: HolTerm::lams(&binders, translate_term(sig, d, witness)) }
        }
        Rule::ForallR { eigen } => HolRule::ForallR { eigen: unknown_var(d, eigen) },
    };
    Ok(HolDerivation {
        conclusion: translate_sequent(sig, d, &n.conclusion),
        rule,
        premises: n.premises.iter().map(|p| translate_node(sig, d, p)).collect::<Result<_>>()?,
    })
}

/// PNL symbol to HOL symbol, for reports.
pub fn symbol_map(sig: &Signature, d: &[Atom], unknowns: impl IntoIterator<Item = Unknown>) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    for n in sig.atom_sorts() {
        m.insert(n.name().to_string(), atom_type(n).to_string());
    }
    for b in sig.base_sorts() {
        m.insert(b.to_string(), format!("mu_{b}"));
    }
    for f in sig.term_formers().keys().chain(sig.prop_formers().keys()) {
        let c = former(sig, f);
        m.insert(f.to_string(), format!("{} : {}", c.name, c.ty));
    }
    for x in unknowns {
        let v = unknown_var(d, &x);
        m.insert(x.name().to_string(), format!("{} : {}", v.name, v.ty));
    }
    m
}

/// Name of the extra base sort of the guarded signature.
pub const GUARD_SORT: &str = "tau_pi";

/// Adds the base sort `tau_pi` and prefixes every proposition-former's
/// arity with it.
pub fn pi_guard_signature(sig: &Signature) -> Result<Signature> {
    let mut out = Signature::new();
    for n in sig.atom_sorts() {
        out.add_atom_sort(n.name())?;
    }
    for b in sig.base_sorts() {
        out.add_base_sort(b)?;
    }
    out.add_base_sort(GUARD_SORT)?;
    for (f, (arg, res)) in sig.term_formers() {
        out.add_term_former(f, arg.clone(), res)?;
    }
    for (p, arg) in sig.prop_formers() {
        out.add_prop_former(p, PnlSort::Tuple(vec![PnlSort::base(GUARD_SORT), arg.clone()]))?;
    }
    Ok(out)
}

/// `φ^π`: threads `z` as the first argument of every predicate.
pub fn pi_guard_prop(phi: &Prop, z: &Unknown) -> Result<Prop> {
    if z.sort() != &PnlSort::base(GUARD_SORT) {
        return Err(Error::Sort(format!("guard unknown {z} must have sort {GUARD_SORT}")));
    }
    let fa: AtomSetExpr = free_atoms_prop(phi);
    if !fa.is_subset_of_perm(z.pmss()) {
        let w = fa.subset_witness(&z.pmss().to_expr());
        return Err(Error::Permission(match w {
            Some(a) => format!("{a} is free in the proposition but not in pmss({z}) = {}", z.pmss()),
            None => format!("free atoms of the proposition are not within pmss({z}) = {}", z.pmss()),
        }));
    }
    if crate::pnl::bound_unknowns(phi).iter().any(|b| b.name() == z.name()) {
        return Err(Error::Invalid(format!("guard unknown {z} clashes with a bound unknown")));
    }
    fn go(phi: &Prop, z: &Unknown) -> Prop {
        match phi {
            Prop::Bot => Prop::Bot,
            Prop::Imp(a, b) => Prop::imp(go(a, z), go(b, z)),
            Prop::Pred(p, r) => Prop::Pred(p.clone(), Term::Tuple(vec![Term::var(z), r.clone()])),
            Prop::Forall(x, body) => Prop::Forall(x.clone(), Box::new(go(body, z))),
        }
    }
    Ok(crate::pnl::canon_prop(&go(phi, z)))
}

/// `π·t` on HOL terms, for equivariance checks.
pub fn hol_perm(pi: &Permutation, t: &HolTerm) -> HolTerm {
    crate::hol::perm(pi, t)
}
