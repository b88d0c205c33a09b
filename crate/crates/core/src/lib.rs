//! Symbolic dynamics over amenable groups at desk scale.
//!
//! Groups and finite shapes, patterns and periods, subshifts of finite type
//! with exact or locally admissible window languages, sliding block codes,
//! quasitilings, Krieger-type marker sets and an entropy-lowering cascade of
//! factor codes, each with brute-force verifiers.

#![forbid(unsafe_code)]

pub mod cascade;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod group;
pub mod marker;
pub mod pattern;
pub mod quasitile;
pub mod shape;
pub mod subshift;

pub use error::{Error, Result};
pub use group::{GroupId, GroupPoint};
pub use pattern::{Alphabet, Pattern};
pub use shape::{Shape, Side};
