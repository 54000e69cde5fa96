//! Herbrand interpretations of PNL and the denotation of terms and propositions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pnl::{PnlSort, Prop, Signature, Term, Unknown};

use super::value::{default_value, GroundValue};

/// How a proposition-former decides its argument.
#[derive(Clone)]
pub enum PredInterp {
    /// Rows looked up by equality; anything else gets `default`.
    Table { rows: BTreeMap<GroundValue, bool>, default: bool },
    /// Holds of pairs with equal components.
    Equal,
    Custom { name: String, equivariant: bool, decide: Arc<dyn Fn(&GroundValue) -> bool + Send + Sync> },
}

impl PredInterp {
    pub fn custom(name: &str, equivariant: bool, decide: impl Fn(&GroundValue) -> bool + Send + Sync + 'static) -> Self {
        PredInterp::Custom { name: name.to_string(), equivariant, decide: Arc::new(decide) }
    }

    pub fn decide(&self, v: &GroundValue) -> bool {
        match self {
            PredInterp::Table { rows, default } => rows.get(v).copied().unwrap_or(*default),
            PredInterp::Equal => matches!(v, GroundValue::Tuple(xs) if xs.len() == 2 && xs[0] == xs[1]),
            PredInterp::Custom { decide, .. } => decide(v),
        }
    }

    /// A table is equivariant exactly when every row that differs from the
    /// default has empty support.
    pub fn is_equivariant(&self) -> bool {
        match self {
            PredInterp::Table { rows, default } => {
                rows.iter().all(|(v, b)| b == default || v.support().is_empty())
            }
            PredInterp::Equal => true,
            PredInterp::Custom { equivariant, .. } => *equivariant,
        }
    }
}

impl fmt::Debug for PredInterp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredInterp::Table { rows, default } => f.debug_struct("Table").field("rows", rows).field("default", default).finish(),
            PredInterp::Equal => f.write_str("Equal"),
            PredInterp::Custom { name, equivariant, .. } => {
                f.debug_struct("Custom").field("name", name).field("equivariant", equivariant).finish()
            }
        }
    }
}

/// Carriers are ground values and term-formers are free constructors, so
/// only the proposition-formers need data.
#[derive(Clone, Debug)]
pub struct PnlInterp {
    pub sig: Signature,
    preds: BTreeMap<String, PredInterp>,
}

impl PnlInterp {
    pub fn new(sig: Signature) -> Self {
        PnlInterp { sig, preds: BTreeMap::new() }
    }

    pub fn set_pred(&mut self, p: &str, interp: PredInterp) -> Result<()> {
        if !self.sig.prop_formers().contains_key(p) {
            return Err(Error::Invalid(format!("{p} is not a proposition-former")));
        }
        self.preds.insert(p.to_string(), interp);
        Ok(())
    }

    pub fn pred(&self, p: &str) -> Result<&PredInterp> {
        self.preds.get(p).ok_or_else(|| Error::Invalid(format!("no interpretation for {p}")))
    }

    pub fn preds(&self) -> &BTreeMap<String, PredInterp> {
        &self.preds
    }

    pub fn fully_equivariant(&self) -> bool {
        self.preds.values().all(PredInterp::is_equivariant)
    }
}

/// Values for unknowns; an unmapped unknown takes the default inhabitant of
/// its sort.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PnlValuation {
    map: BTreeMap<Unknown, GroundValue>,
}

impl PnlValuation {
    pub fn new() -> Self {
        Self::default()
    }

    /// `ς[X:=v]`, checking sort and permission.
    pub fn set(&mut self, sig: &Signature, x: &Unknown, v: GroundValue) -> Result<()> {
        check_value(sig, x, &v)?;
        self.map.insert(x.clone(), v);
        Ok(())
    }

    pub fn get(&self, sig: &Signature, x: &Unknown) -> Result<GroundValue> {
        match self.map.get(x) {
            Some(v) => Ok(v.clone()),
            None => default_value(sig, x.sort(), x.pmss()),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Unknown, &GroundValue)> {
        self.map.iter()
    }
}

pub(crate) fn check_value(sig: &Signature, x: &Unknown, v: &GroundValue) -> Result<()> {
    if !v.has_sort(sig, x.sort()) {
        return Err(Error::Sort(format!("{v} is not a value of sort {}", x.sort())));
    }
    if let Some(a) = v.support().into_iter().find(|a| !x.pmss().contains(a)) {
        return Err(Error::Permission(format!("{a} is in the support of {v} but not in pmss({x})")));
    }
    Ok(())
}

/// Candidate values for quantified unknowns. Lists keyed by the unknown are
/// used as given; lists keyed by sort are filtered to the permission set.
#[derive(Clone, Debug, Default)]
pub struct PnlWitnesses {
    pub by_unknown: BTreeMap<Unknown, Vec<GroundValue>>,
    pub by_sort: BTreeMap<PnlSort, Vec<GroundValue>>,
}

impl PnlWitnesses {
    pub fn for_unknown(&self, sig: &Signature, x: &Unknown) -> Result<Vec<GroundValue>> {
        if let Some(vs) = self.by_unknown.get(x) {
            for v in vs {
                check_value(sig, x, v)?;
            }
            if !vs.is_empty() {
                return Ok(vs.clone());
            }
        }
        let vs: Vec<GroundValue> = self
            .by_sort
            .get(x.sort())
            .map(|vs| vs.iter().filter(|v| check_value(sig, x, v).is_ok()).cloned().collect())
            .unwrap_or_default();
        if vs.is_empty() {
            return Err(Error::Invalid(format!("no witnesses supplied for the quantifier over {x}")));
        }
        Ok(vs)
    }
}

pub fn denote_term(interp: &PnlInterp, val: &PnlValuation, r: &Term) -> Result<GroundValue> {
    Ok(match r {
        Term::Atom(a) => GroundValue::Atom(a.clone()),
        Term::Tuple(xs) => GroundValue::Tuple(xs.iter().map(|x| denote_term(interp, val, x)).collect::<Result<_>>()?),
        Term::App(f, x) => GroundValue::Con(f.clone(), Box::new(denote_term(interp, val, x)?)),
        Term::Abs(a, x) => GroundValue::abs(a, denote_term(interp, val, x)?),
        Term::Susp(pi, x) => val.get(&interp.sig, x)?.permute(pi),
    })
}

/// Truth value of `φ`. Quantifiers range over the supplied witnesses only.
pub fn denote_prop(interp: &PnlInterp, val: &PnlValuation, phi: &Prop, w: &PnlWitnesses) -> Result<bool> {
    Ok(match phi {
        Prop::Bot => false,
        Prop::Imp(a, b) => !denote_prop(interp, val, a, w)? || denote_prop(interp, val, b, w)?,
        Prop::Pred(p, r) => interp.pred(p)?.decide(&denote_term(interp, val, r)?),
        Prop::Forall(x, body) => {
            for v in w.for_unknown(&interp.sig, x)? {
                let mut inner = val.clone();
                inner.set(&interp.sig, x, v)?;
                if !denote_prop(interp, &inner, body, w)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{Atom, AtomSort};
    use crate::pnl::Scope;

    fn setup() -> (Signature, Atom, Atom) {
        let mut s = Signature::new();
        let nu = s.add_atom_sort("nu").unwrap();
        s.add_base_sort("iota").unwrap();
        s.add_term_former("var", PnlSort::name(&nu), "iota").unwrap();
        s.add_term_former("lam", PnlSort::Abs(nu.clone(), Box::new(PnlSort::base("iota"))), "iota").unwrap();
        s.add_prop_former("P", PnlSort::name(&nu)).unwrap();
        (s, Atom::new(&AtomSort::new("nu"), -1), Atom::new(&AtomSort::new("nu"), -2))
    }

    #[test]
    fn countermodel_separates_atoms() {
        let (s, a, _) = setup();
        let mut i = PnlInterp::new(s.clone());
        i.set_pred("P", PredInterp::Table { rows: BTreeMap::from([(GroundValue::atom(&a), true)]), default: false }).unwrap();
        assert!(!i.fully_equivariant());
        let sc = Scope::new(&s);
        let w = PnlWitnesses::default();
        let v = PnlValuation::new();
        assert!(denote_prop(&i, &v, &sc.parse_prop("P(nu#-1)").unwrap(), &w).unwrap());
        assert!(!denote_prop(&i, &v, &sc.parse_prop("P(nu#-2)").unwrap(), &w).unwrap());
        assert!(denote_prop(&i, &v, &sc.parse_prop("P(nu#-2) => bot").unwrap(), &w).unwrap());
    }

    #[test]
    fn abstraction_denotes_abstraction() {
        let (s, a, _) = setup();
        let i = PnlInterp::new(s.clone());
        let r = Scope::new(&s).parse_term("lam([nu#-1] var(nu#-1))").unwrap();
        let v = denote_term(&i, &PnlValuation::new(), &r).unwrap();
        assert_eq!(v, GroundValue::con("lam", GroundValue::abs(&a, GroundValue::con("var", GroundValue::atom(&a)))));
        assert!(v.support().is_empty());
    }

    #[test]
    fn valuation_respects_permissions() {
        let (s, _, _) = setup();
        let sc = Scope::new(&s);
        let x = sc.parse_unknown_decl("X : iota # perm(+{}, -{nu#-1})").unwrap();
        let mut val = PnlValuation::new();
        let bad = GroundValue::con("var", GroundValue::atom(&Atom::new(&AtomSort::new("nu"), -1)));
        assert!(matches!(val.set(&s, &x, bad), Err(Error::Permission(_))));
        let d = val.get(&s, &x).unwrap();
        assert!(check_value(&s, &x, &d).is_ok());
    }

    #[test]
    fn quantifier_needs_witnesses() {
        let (s, _, _) = setup();
        let mut i = PnlInterp::new(s.clone());
        i.set_pred("P", PredInterp::Table { rows: BTreeMap::new(), default: true }).unwrap();
        let phi = Scope::new(&s).parse_prop("forall Y:nu#perm(+{}, -{}). P(Y)").unwrap();
        let w = PnlWitnesses::default();
        assert!(denote_prop(&i, &PnlValuation::new(), &phi, &w).is_err());
    }
}
