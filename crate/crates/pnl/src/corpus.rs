//! The bundled lambda-calculus theory, its sample derivations, and the
//! equivariance fixtures.

use crate::error::{Error, Result};
use crate::nomsem::PnlInterp;
use crate::proof::Derivation;
use crate::workspace::{parse_interp, Theory};

pub const LAMBDA_THEORY: &str = include_str!("../corpus/lambda.thy");
pub const LAMBDA_INTERP: &str = include_str!("../corpus/lambda.interp");
pub const EQUIVARIANCE_THEORY: &str = include_str!("../corpus/equivariance.thy");
pub const AX_PERM: &str = include_str!("../corpus/ax_perm.proof");
pub const COUNTERMODEL: &str = include_str!("../corpus/countermodel.interp");

pub const LAMBDA_DERIVATIONS: &[(&str, &str)] = &[
    ("01_beta_id_var", include_str!("../corpus/lambda/01_beta_id_var.proof")),
    ("02_beta_id_unknown", include_str!("../corpus/lambda/02_beta_id_unknown.proof")),
    ("03_beta_const", include_str!("../corpus/lambda/03_beta_const.proof")),
    ("04_beta_app", include_str!("../corpus/lambda/04_beta_app.proof")),
    ("05_beta_lam", include_str!("../corpus/lambda/05_beta_lam.proof")),
    ("06_beta_var", include_str!("../corpus/lambda/06_beta_var.proof")),
    ("07_beta_var_unknown", include_str!("../corpus/lambda/07_beta_var_unknown.proof")),
    ("08_eta_var", include_str!("../corpus/lambda/08_eta_var.proof")),
    ("09_eta_unknown", include_str!("../corpus/lambda/09_eta_unknown.proof")),
    ("10_eta_suspended", include_str!("../corpus/lambda/10_eta_suspended.proof")),
    ("11_generalise", include_str!("../corpus/lambda/11_generalise.proof")),
    ("12_trans_chain", include_str!("../corpus/lambda/12_trans_chain.proof")),
    ("13_double_negation", include_str!("../corpus/lambda/13_double_negation.proof")),
    ("14_sym_eta", include_str!("../corpus/lambda/14_sym_eta.proof")),
];

/// Every bundled file by name, for listing and extraction.
pub fn files() -> Vec<(String, &'static str)> {
    let mut out = vec![
        ("lambda.thy".to_string(), LAMBDA_THEORY),
        ("lambda.interp".to_string(), LAMBDA_INTERP),
        ("equivariance.thy".to_string(), EQUIVARIANCE_THEORY),
        ("ax_perm.proof".to_string(), AX_PERM),
        ("countermodel.interp".to_string(), COUNTERMODEL),
    ];
    out.extend(LAMBDA_DERIVATIONS.iter().map(|(n, s)| (format!("lambda/{n}.proof"), *s)));
    out
}

pub fn file(name: &str) -> Option<&'static str> {
    files().into_iter().find(|(n, _)| n == name).map(|(_, s)| s)
}

pub fn lambda_theory() -> Theory {
    Theory::parse(LAMBDA_THEORY).expect("bundled theory parses")
}

pub fn lambda_derivations() -> Result<Vec<(&'static str, Derivation)>> {
    let th = lambda_theory();
    LAMBDA_DERIVATIONS
        .iter()
        .map(|(n, src)| {
            th.parse_derivation(src).map(|d| (*n, d)).map_err(|e| Error::Invalid(format!("{n}: {e}")))
        })
        .collect()
}

pub fn lambda_interp() -> PnlInterp {
    parse_interp(&lambda_theory().sig, LAMBDA_INTERP).expect("bundled interpretation parses")
}

pub fn equivariance_theory() -> Theory {
    Theory::parse(EQUIVARIANCE_THEORY).expect("bundled theory parses")
}

/// `P(a) ⊢ P(b)` by the axiom with `(a b)`.
pub fn ax_perm() -> Derivation {
    equivariance_theory().parse_derivation(AX_PERM).expect("bundled derivation parses")
}

/// `P` true at `a` only.
pub fn countermodel() -> PnlInterp {
    parse_interp(&equivariance_theory().sig, COUNTERMODEL).expect("bundled interpretation parses")
}
