//! Certified valuation arithmetic for a dependent Artin-Schreier defect
//! extension of `F_p(u,v)`.

pub mod artin;
pub mod cert;
pub mod engine;
pub mod error;
pub mod fuzz;
pub mod host;
pub mod keyseq;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod selftest;
pub mod tower;
pub mod value;

pub use error::{Error, Result};
