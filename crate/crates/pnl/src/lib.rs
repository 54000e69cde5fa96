//! Permissive-nominal logic, higher-order logic, the capture-typed
//! translation between them, and a finite model of the nominal and
//! renaming-set semantics.

pub mod atoms;
pub mod error;
pub mod hol;
pub mod pnl;
pub mod proof;
pub mod nomsem;
pub mod translate;
pub mod workspace;
pub mod corpus;
pub mod gen;
pub mod sexpr;
mod text;

pub use error::{Error, Result};
