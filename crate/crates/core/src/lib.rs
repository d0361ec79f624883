//! Finite sigma-p-groups, relation-tuple quotients and their counting
//! formulas, with class-group surveys for imaginary quadratic fields.

pub mod abelian;
pub mod acceptance;
pub mod class_groups;
pub mod error;
pub mod experiments;
pub mod fp;
pub mod free_subgroups;
pub mod group;
pub mod iso;
pub mod magnus;
pub mod measure;
pub mod word;
pub mod zassenhaus;

pub use error::{Error, Result};
pub use fp::Prime;
