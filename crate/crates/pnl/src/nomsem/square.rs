//! Randomized comparison of a proposition's PNL truth value with the value
//! of its translation in the renaming-set model.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atoms::{Atom, AtomSort};
use crate::error::Result;
use crate::gen::Universe;
use crate::pnl::{bound_unknowns, free_unknowns_prop, PnlSort, Prop};
use crate::translate::{capture_infer_minimal, dlist_name, translate_prop, Subject};

use super::denote::{denote_prop, PnlInterp, PnlValuation, PnlWitnesses, PredInterp};
use super::holsem::{lift_witnesses, valuation_lift, HValue, HolModel};
use super::value::GroundValue;

/// The lambda universe with `eq` as equality, an equivariant `isvar`, and a
/// `P` on names that holds of `nu#-1` only.
pub fn square_universe() -> (Universe, PnlInterp) {
    let mut u = Universe::lambda();
    let nu = AtomSort::new("nu");
    u.sig.add_prop_former("P", PnlSort::name(&nu)).expect("fresh name");
    u.sig.add_prop_former("isvar", PnlSort::base("iota")).expect("fresh name");
    let mut i = PnlInterp::new(u.sig.clone());
    i.set_pred("eq", PredInterp::Equal).expect("declared");
    let a = GroundValue::atom(&Atom::new(&nu, -1));
    i.set_pred("P", PredInterp::Table { rows: BTreeMap::from([(a, true)]), default: false }).expect("declared");
    i.set_pred("isvar", PredInterp::custom("isvar", true, |v| matches!(v, GroundValue::Con(f, _) if &**f == "var")))
        .expect("declared");
    (u, i)
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareCase {
    pub prop: String,
    pub d: String,
    pub pnl: Option<bool>,
    pub hol: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SquareCase {
    pub fn agrees(&self) -> bool {
        self.error.is_none() && self.pnl.is_some() && self.pnl == self.hol
    }
}

/// Evaluates `φ` both ways under `val` and `w`, with `D` the minimal list.
pub fn check_square(interp: &PnlInterp, phi: &Prop, val: &PnlValuation, w: &PnlWitnesses) -> SquareCase {
    let sig = &interp.sig;
    let d = capture_infer_minimal([Subject::Prop(phi)]);
    let mut case = SquareCase { prop: phi.to_string(), d: dlist_name(&d), pnl: None, hol: None, error: None };
    let run = |case: &mut SquareCase| -> Result<()> {
        case.pnl = Some(denote_prop(interp, val, phi, w)?);
        let free = free_unknowns_prop(phi);
        let hv = valuation_lift(sig, &d, val, free.iter())?;
        let bound = bound_unknowns(phi);
        let hw = lift_witnesses(sig, &d, w, bound.iter())?;
        let t = translate_prop(sig, &d, phi);
        case.hol = match HolModel::new(interp).denote(&t, &hv, &hw)? {
            HValue::Bool(b) => Some(b),
            other => return Err(crate::Error::Type(format!("proposition denoted {other}"))),
        };
        Ok(())
    };
    if let Err(e) = run(&mut case) {
        case.error = Some(e.to_string());
    }
    case
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareReport {
    pub seed: u64,
    pub instances: usize,
    pub quantified: usize,
    pub agreed: usize,
    pub failures: Vec<SquareCase>,
}

impl SquareReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.agreed == self.instances
    }
}

/// `n` random propositions, quantifier-free unless `quantified`, in which
/// case every instance carries at least one `∀` and three witnesses per
/// bound unknown, shared by both sides.
pub fn square_test(seed: u64, n: usize, quantified: bool) -> SquareReport {
    let (u, interp) = square_universe();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SquareReport { seed, instances: 0, quantified: 0, agreed: 0, failures: Vec::new() };
    while report.instances < n {
        let phi = u.random_prop(&mut rng, 4, quantified);
        let bound = bound_unknowns(&phi);
        if quantified == bound.is_empty() {
            continue;
        }
        let mut val = PnlValuation::new();
        for x in free_unknowns_prop(&phi) {
            let v = u.random_value(&mut rng, x.sort(), x.pmss(), 3);
            val.set(&u.sig, &x, v).expect("generated within the permission set");
        }
        let mut w = PnlWitnesses::default();
        for x in &bound {
            let vs = (0..3).map(|_| u.random_value(&mut rng, x.sort(), x.pmss(), 3)).collect();
            w.by_unknown.insert(x.clone(), vs);
        }
        let case = check_square(&interp, &phi, &val, &w);
        report.instances += 1;
        report.quantified += usize::from(!bound.is_empty());
        if case.agrees() {
            report.agreed += 1;
        } else {
            report.failures.push(case);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_agree() {
        let r = square_test(1, 40, false);
        assert!(r.ok(), "{:#?}", r.failures);
        let r = square_test(2, 8, true);
        assert_eq!(r.quantified, 8);
        assert!(r.ok(), "{:#?}", r.failures);
    }
}
