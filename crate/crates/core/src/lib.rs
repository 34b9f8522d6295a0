//! Restricted Lie algebras over odd prime fields, their restricted enveloping
//! algebras u(L), and decision procedures for Lie identities on u(L) and on
//! its symmetric elements under the principal involution.

pub mod catalog;
pub mod cli;
pub mod env;
pub mod field;
pub mod identities;
pub mod io;
pub mod liealg;
pub mod linalg;

pub use env::{EnvElement, Enveloping, PbwMonomial};
pub use field::PrimeField;
pub use identities::{cross_check, CheckConfig, CrossCheckReport, EnvAmbient, IdentityVerdict};
pub use liealg::{validate, Algebra, AlgebraSpec};
pub use linalg::{Matrix, Subspace};
