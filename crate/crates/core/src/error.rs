use thiserror::Error;

use crate::triple::CiTriple;
use crate::varset::VarSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable set {set:?} is not contained in a ground set of size {n}")]
    OutOfRange { set: VarSet, n: usize },

    #[error("ground set size {n} exceeds the cap of {cap} for {what}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("ambient sizes differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("entropy value missing for subset {0:?}")]
    MissingSubset(VarSet),

    #[error("not a polymatroid: {0}")]
    NotPolymatroid(String),

    #[error("sets must be pairwise disjoint")]
    Overlap,

    #[error("set must be nonempty: {0}")]
    EmptySet(&'static str),

    #[error("triple {triple} does not conform: {reason}")]
    NonConforming { triple: CiTriple, reason: String },

    #[error("antecedents do not imply the consequent over positive polymatroids")]
    NotImplied,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("argument outside its domain: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
