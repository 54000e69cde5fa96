//! Desk-scale nominal and renaming-set semantics.

pub mod denote;
pub mod holsem;
pub mod ren;
pub mod square;
pub mod value;
pub mod witnesses;

pub use denote::{denote_prop, denote_term, PnlInterp, PnlValuation, PnlWitnesses, PredInterp};
pub use holsem::{lift_witnesses, valuation_lift, HFun, HValue, HolModel, HolValuation, HolWitnesses};
pub use ren::{abs_fun, ren_abs_push, ren_atom_collapse, ren_pair_preimage, ren_pair_split, AtomFn, AtomRule, Exploding, RenAbs, RenElement};
pub use value::{abs_eq, default_value, GroundValue};
