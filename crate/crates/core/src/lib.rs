//! Implication of conditional independence statements: exact implication
//! through I-measures and graphoid closure, graph separation, and
//! approximate implication through Shannon-type linear programs.

mod error;
mod varset;

pub mod distmodel;
pub mod entropy;
pub mod graphoid;
pub mod graphsep;
pub mod imeasure;
pub mod shannon;
pub mod triple;

pub use entropy::{EntropyVector, FloatEntropy, RationalEntropy, Scalar};
pub use error::{Error, Result};
pub use triple::{parse_group, parse_triple, CiSet, CiTriple, ParseError, TripleKind};
pub use varset::{VarSet, MAX_VARS};
