//! Denotation of translated HOL terms in renaming sets.
//!
//! Types that are images of PNL sorts denote free extensions; `o` denotes
//! booleans; everything else is interpreted standardly, with functions as
//! closures. Quantifiers range over supplied witness lists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::atoms::{Atom, AtomSort, Renaming};
use crate::error::{Error, Result};
use crate::hol::{free_vars, HolSignature, HolTerm, HolType, HolVar};
use crate::pnl::{Signature, Unknown};
use crate::translate::{restrict_list, translate_signature, unknown_var};

use super::denote::{PnlInterp, PnlValuation, PnlWitnesses};
use super::ren::{fresh, ren_atom_collapse, RenElement};
use super::value::GroundValue;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HValue {
    Ren(RenElement),
    Bool(bool),
    Tuple(Vec<HValue>),
    Fun(HFun),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HFun {
    Closure { arg: HolType, body: Arc<HolTerm>, env: Vec<(HolType, HValue)> },
    Former(Arc<str>),
    Pred(Arc<str>),
    Imp,
    ImpLeft(bool),
    Forall(HolType),
}

impl HValue {
    pub fn as_ren(&self) -> Option<&RenElement> {
        match self {
            HValue::Ren(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            HValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn atoms_into(&self, out: &mut BTreeSet<Atom>) {
        match self {
            HValue::Ren(p) => out.extend(p.support()),
            HValue::Bool(_) => {}
            HValue::Tuple(xs) => xs.iter().for_each(|x| x.atoms_into(out)),
            HValue::Fun(HFun::Closure { body, env, .. }) => {
                out.extend(free_vars(body).into_iter().filter_map(|v| v.atom));
                env.iter().for_each(|(_, v)| v.atoms_into(out));
            }
            HValue::Fun(_) => {}
        }
    }
}

impl fmt::Display for HValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HValue::Ren(p) => write!(f, "{p}"),
            HValue::Bool(b) => write!(f, "{}", u8::from(*b)),
            HValue::Tuple(xs) => {
                write!(f, "({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            }
            HValue::Fun(_) => f.write_str("<function>"),
        }
    }
}

/// Values for HOL variables. Atoms not mentioned denote themselves.
#[derive(Clone, Debug, Default)]
pub struct HolValuation {
    map: BTreeMap<HolVar, HValue>,
}

impl HolValuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, v: &HolVar, x: HValue) {
        self.map.insert(v.clone(), x);
    }

    pub fn get(&self, v: &HolVar) -> Option<HValue> {
        if let Some(x) = self.map.get(v) {
            return Some(x.clone());
        }
        v.atom.as_ref().map(|a| HValue::Ren(RenElement::id(&GroundValue::atom(a))))
    }

    fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (v, x) in &self.map {
            out.extend(v.atom.clone());
            x.atoms_into(&mut out);
        }
        out
    }
}

/// Quantifier domains, looked up first by the bound variable's name and then
/// by its type.
#[derive(Clone, Debug, Default)]
pub struct HolWitnesses {
    pub by_name: BTreeMap<String, Vec<HValue>>,
    pub by_type: BTreeMap<HolType, Vec<HValue>>,
}

/// The renaming-set model induced by a PNL interpretation.
pub struct HolModel<'a> {
    pub interp: &'a PnlInterp,
    hsig: HolSignature,
}

impl<'a> HolModel<'a> {
    pub fn new(interp: &'a PnlInterp) -> Self {
        HolModel { interp, hsig: translate_signature(&interp.sig) }
    }

    pub fn hol_signature(&self) -> &HolSignature {
        &self.hsig
    }

    fn sig(&self) -> &Signature {
        &self.interp.sig
    }

    fn atom_sort_of(&self, ty: &HolType) -> Option<AtomSort> {
        match ty {
            HolType::Base(n) => {
                let s = n.strip_prefix("mu_")?;
                self.sig().is_atom_sort(s).then(|| AtomSort::new(s))
            }
            _ => None,
        }
    }

    /// Whether `ty` is the translation of some PNL sort.
    pub fn is_image(&self, ty: &HolType) -> bool {
        match ty {
            HolType::Base(n) => n
                .strip_prefix("mu_")
                .is_some_and(|s| self.sig().is_atom_sort(s) || self.sig().base_sorts().contains(s)),
            HolType::Tuple(ts) => ts.iter().all(|t| self.is_image(t)),
            HolType::Arrow(a, b) => self.atom_sort_of(a).is_some() && self.is_image(b),
        }
    }

    /// Evaluates `t` under `val`; `t` must be closed apart from `val`'s variables.
    pub fn denote(&self, t: &HolTerm, val: &HolValuation, w: &HolWitnesses) -> Result<HValue> {
        self.hsig.type_of(t)?;
        let mut avoid = val.atoms();
        avoid.extend(free_vars(t).into_iter().filter_map(|v| v.atom));
        for vs in w.by_name.values().chain(w.by_type.values()) {
            vs.iter().for_each(|x| x.atoms_into(&mut avoid));
        }
        let cx = Cx { model: self, val, w, avoid };
        cx.eval(t, &mut Vec::new())
    }
}

struct Cx<'m, 'a> {
    model: &'m HolModel<'a>,
    val: &'m HolValuation,
    w: &'m HolWitnesses,
    avoid: BTreeSet<Atom>,
}

type Env = Vec<(HolType, HValue)>;

impl Cx<'_, '_> {
    fn type_in(&self, t: &HolTerm, env: &Env) -> Result<HolType> {
        let mut ctx: Vec<HolType> = env.iter().map(|(ty, _)| ty.clone()).collect();
        self.model.hsig.type_in(t, &mut ctx)
    }

    fn fresh_for(&self, sort: &AtomSort, env: &Env) -> Atom {
        let mut blocked = self.avoid.clone();
        env.iter().for_each(|(_, v)| v.atoms_into(&mut blocked));
        fresh(sort, &blocked)
    }

    fn eval(&self, t: &HolTerm, env: &mut Env) -> Result<HValue> {
        match t {
            HolTerm::Free(v) => self.val.get(v).ok_or_else(|| Error::Invalid(format!("no value for variable {v}"))),
            HolTerm::Bound(i) => {
                let k = env.len().checked_sub(i + 1).ok_or_else(|| Error::Invalid("loose bound variable".into()))?;
                Ok(env[k].1.clone())
            }
            HolTerm::Const(c) => match &*c.name {
                "bot" => Ok(HValue::Bool(false)),
                "imp" => Ok(HValue::Fun(HFun::Imp)),
                "forall" => Ok(HValue::Fun(HFun::Forall(c.forall_domain().expect("typed").clone()))),
                name => {
                    let f = name.strip_prefix("g_").unwrap_or(name);
                    if self.model.sig().term_formers().contains_key(f) {
                        // `g_f : mu_ν -> mu_τ` has an image type, so it is the
                        // abstraction `id▸[c]f(c)` rather than a function.
                        if let HolType::Arrow(dom, _) = &c.ty {
                            if let Some(sort) = self.model.atom_sort_of(dom) {
                                let a = fresh(&sort, &BTreeSet::new());
                                let body = GroundValue::con(f, GroundValue::atom(&a));
                                return Ok(HValue::Ren(RenElement::id(&GroundValue::abs(&a, body))));
                            }
                        }
                        Ok(HValue::Fun(HFun::Former(Arc::from(f))))
                    } else if self.model.sig().prop_formers().contains_key(f) {
                        Ok(HValue::Fun(HFun::Pred(Arc::from(f))))
                    } else {
                        Err(Error::Unsupported(format!("constant {name} has no interpretation")))
                    }
                }
            },
            HolTerm::Tuple(ts) => {
                let tys = ts.iter().map(|x| self.type_in(x, env)).collect::<Result<Vec<_>>>()?;
                let vs = ts.iter().map(|x| self.eval(x, env)).collect::<Result<Vec<_>>>()?;
                if tys.iter().all(|ty| self.model.is_image(ty)) {
                    let ps: Vec<&RenElement> = vs.iter().map(|v| v.as_ren().expect("image-typed")).collect();
                    Ok(HValue::Ren(join(&ps)))
                } else {
                    Ok(HValue::Tuple(vs))
                }
            }
            HolTerm::Lam(b, body) => {
                let ty = self.type_in(t, env)?;
                if self.model.is_image(&ty) {
                    let sort = self.model.atom_sort_of(&b.ty).expect("image arrow");
                    let a = self.fresh_for(&sort, env);
                    env.push((b.ty.clone(), HValue::Ren(RenElement::id(&GroundValue::atom(&a)))));
                    let r = self.eval(body, env);
                    env.pop();
                    let HValue::Ren(p) = r? else { unreachable!("body of image type") };
                    let (rho, x) = p.representative(&BTreeSet::new());
                    Ok(HValue::Ren(RenElement::new(&rho, &GroundValue::abs(&a, x))))
                } else {
                    Ok(HValue::Fun(HFun::Closure { arg: b.ty.clone(), body: Arc::new((**body).clone()), env: env.clone() }))
                }
            }
            HolTerm::App(f, x) => {
                let fty = self.type_in(f, env)?;
                if self.model.is_image(&fty) {
                    let HValue::Ren(p) = self.eval(f, env)? else { unreachable!("image-typed") };
                    let HValue::Ren(q) = self.eval(x, env)? else { unreachable!("atom-typed") };
                    let b = ren_atom_collapse(&q).expect("atom-typed argument");
                    return Ok(HValue::Ren(concrete(&p, &b)));
                }
                if let (HolTerm::Const(c), HolTerm::Lam(binder, _)) = (&**f, &**x) {
                    if &*c.name == "forall" {
                        let dom = self.witnesses(&binder.hint, &binder.ty)?;
                        let g = self.eval(x, env)?;
                        return self.forall(&g, dom);
                    }
                }
                let g = self.eval(f, env)?;
                let v = self.eval(x, env)?;
                self.apply(&g, v)
            }
        }
    }

    fn witnesses(&self, name: &str, ty: &HolType) -> Result<&Vec<HValue>> {
        self.w
            .by_name
            .get(name)
            .or_else(|| self.w.by_type.get(ty))
            .filter(|vs| !vs.is_empty())
            .ok_or_else(|| Error::Invalid(format!("no witnesses for a quantifier over {name}:{ty}")))
    }

    fn forall(&self, g: &HValue, dom: &[HValue]) -> Result<HValue> {
        for y in dom {
            if !self.apply(g, y.clone())?.as_bool().expect("predicate") {
                return Ok(HValue::Bool(false));
            }
        }
        Ok(HValue::Bool(true))
    }

    fn apply(&self, g: &HValue, v: HValue) -> Result<HValue> {
        let HValue::Fun(g) = g else { return Err(Error::Invalid("applying a non-function".into())) };
        match g {
            HFun::Closure { arg, body, env } => {
                let mut env = env.clone();
                env.push((arg.clone(), v));
                self.eval(body, &mut env)
            }
            HFun::Former(f) => {
                let HValue::Ren(p) = v else { unreachable!("image-typed") };
                Ok(HValue::Ren(RenElement::new(&p.rho(), &GroundValue::Con(f.clone(), Box::new(p.value().clone())))))
            }
            HFun::Pred(p) => {
                let HValue::Ren(x) = v else { unreachable!("image-typed") };
                let pred = self.model.interp.pred(p)?;
                match x.plain_value() {
                    Some(y) => Ok(HValue::Bool(pred.decide(&y))),
                    None if pred.is_equivariant() => Ok(HValue::Bool(pred.decide(x.value()))),
                    None => Err(Error::Unsupported(format!(
                        "{p} is not equivariant, so it has no value on the identifying element {x}"
                    ))),
                }
            }
            HFun::Imp => Ok(HValue::Fun(HFun::ImpLeft(v.as_bool().expect("o-typed")))),
            HFun::ImpLeft(a) => Ok(HValue::Bool(!a || v.as_bool().expect("o-typed"))),
            HFun::Forall(ty) => {
                let dom = self.w.by_type.get(ty).filter(|vs| !vs.is_empty()).ok_or_else(|| {
                    Error::Invalid(format!("no witnesses for a quantifier over type {ty}"))
                })?;
                self.forall(&v, dom)
            }
        }
    }
}

/// `(⋃ρᵢ)▸(x₁,…,xₙ)` over representatives with pairwise disjoint renaming
/// domains that also avoid every other component's atoms.
fn join(ps: &[&RenElement]) -> RenElement {
    let mut avoid: BTreeSet<Atom> = ps.iter().flat_map(|p| p.support()).collect();
    let mut rho = BTreeMap::new();
    let mut xs = Vec::new();
    for p in ps {
        let (r, x) = p.representative(&avoid);
        avoid.extend(r.dom());
        rho.extend(r.pairs().map(|(a, b)| (a.clone(), b.clone())));
        xs.push(x);
    }
    RenElement::new(&Renaming::from_map(rho).expect("sort-preserving"), &GroundValue::Tuple(xs))
}

/// `(ρ▸[a]x) b = ([a↦b]∘ρ)▸x` with `a` chosen outside `nontriv(ρ) ∪ {b}`.
fn concrete(p: &RenElement, b: &Atom) -> RenElement {
    let rho = p.rho();
    let mut blocked = rho.nontriv();
    blocked.extend(p.value().support());
    blocked.insert(b.clone());
    let a = fresh(b.sort(), &blocked);
    let x = p.value().concrete(&a).expect("a is fresh for the abstraction");
    RenElement::new(&Renaming::atomic(&a, b).expect("same sort").compose(&rho), &x)
}

/// `D(ς)`: each `X_D` denotes `id▸[D∩pmss(X)]ς(X)`; atoms denote themselves.
pub fn valuation_lift<'a>(
    sig: &Signature,
    d: &[Atom],
    val: &PnlValuation,
    unknowns: impl IntoIterator<Item = &'a Unknown>,
) -> Result<HolValuation> {
    let mut out = HolValuation::new();
    for x in unknowns {
        let v = val.get(sig, x)?;
        out.set(&unknown_var(d, x), HValue::Ren(RenElement::id(&GroundValue::abs_list(&restrict_list(d, x), v))));
    }
    Ok(out)
}

/// Carries PNL witness lists across the translation: a value `x` for `X`
/// becomes `id▸[D∩pmss(X)]x` for `X_D`.
pub fn lift_witnesses<'a>(
    sig: &Signature,
    d: &[Atom],
    w: &PnlWitnesses,
    unknowns: impl IntoIterator<Item = &'a Unknown>,
) -> Result<HolWitnesses> {
    let mut out = HolWitnesses::default();
    for x in unknowns {
        let dx = restrict_list(d, x);
        let vs = w.for_unknown(sig, x)?;
        let lifted = vs.into_iter().map(|v| HValue::Ren(RenElement::id(&GroundValue::abs_list(&dx, v)))).collect();
        out.by_name.insert(unknown_var(d, x).name.to_string(), lifted);
    }
    Ok(out)
}
