//! Exact construction of Eisenstein series bases on congruence subgroups of
//! SL₂(Z), with q-expansions over cyclotomic fields.

pub mod arith;
pub mod characters;
pub mod cyclotomic;
pub mod eisenstein;
pub mod error;
pub mod hecke;
pub mod linalg;
pub mod modgroup;
pub mod qseries;
pub mod selfcheck;
pub mod special_values;

pub use cyclotomic::{CycNum, Rational};
pub use error::{Error, Result};
