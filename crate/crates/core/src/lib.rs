//! Generalized Kripke semantics for first-order logic over arbitrary
//! truth-table connectives.

pub mod classical;
pub mod collapse;
pub mod enumerate;
pub mod error;
pub mod golden;
pub mod kripke;
pub mod model;
pub mod separator;
pub mod suites;
pub mod syntax;
pub mod truthfn;

pub use error::{Error, Result};
