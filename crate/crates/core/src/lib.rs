//! KMS states on finite groupoid algebras.

pub mod algebra;
pub mod axb;
pub mod characters;
pub mod crossed;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod io;
pub mod kms;
pub mod linalg;
pub mod measure;
pub mod positivity;
pub mod scalar;
pub mod snf;
pub mod strategy;
pub mod suite;

pub use error::{Error, Result};
