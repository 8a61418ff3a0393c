//! Exact-rational toolkit for binarizations of bounded integer variables,
//! binary extended formulations, sequential convexification and
//! lift-and-project / binarization ranks via set covering.
//!
//! Everything is computed over arbitrary-precision rationals; results are
//! canonical (sorted vertex lists, lowest-terms entries) so set equality is
//! plain comparison.

mod bits;

pub mod bef;
pub mod binarization;
pub mod cover;
pub mod geom;
pub mod io;
pub mod linalg;
pub mod num;
pub mod rank;
pub mod reproduce;

pub use bef::ExtendedFormulation;
pub use binarization::Binarization;
pub use geom::{facet_hull, Face, HPolytope, SkeletonGraph, VPolytope};
pub use num::{QVector, Rational};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polyhedron is unbounded: a nonzero recession direction exists")]
    UnboundedPolyhedron,
    #[error("point is not in the polytope")]
    PointNotInPolytope,
    #[error("operation requires a nonempty polytope")]
    EmptyPolytope,
    #[error("argument out of range: {0}")]
    RangeViolation(String),
    #[error("sigma is not a bijection onto {{0,..,2^d-1}}")]
    NotBijective,
    #[error("not a binarization: {0}")]
    NotABinarization(String),
    #[error("binarization range too small: {0}")]
    RangeMismatch(String),
    #[error("operation requires a natural binarization")]
    NonNaturalBinarization,
    #[error("total dimension {dim} exceeds the enumeration limit {limit}")]
    SizeLimitExceeded { dim: usize, limit: usize },
    #[error("no witness (face, fixing) found for a vertex of a natural formulation")]
    NoWitness,
    #[error("persistency violated: interval ({0}, {0}+1) on variable x{1} appears after convexification")]
    PersistencyViolation(String, usize),
    #[error("set covering row has no ones")]
    InfeasibleRow,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
