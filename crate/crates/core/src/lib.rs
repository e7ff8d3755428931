//! Exact construction and certification of the convex hull of a disjunction
//! of polytopes `P_0, ..., P_n` in the extended space of `(x, z)`, where
//! `z` in `{0, e_1, ..., e_n}` selects the active polytope.
//!
//! All arithmetic is over arbitrary-precision rationals.

pub mod cuts;
pub mod ddhull;
pub mod error;
pub mod families;
pub mod hullenum;
pub mod lifting;
pub mod lp;
pub mod polyops;
pub mod random;
pub mod ratgeom;

pub use ddhull::double_description_hull;
pub use error::{Error, Result};
pub use hullenum::{
    compare, enumerate_facets, enumerate_signatures, oracle_hull, CompareReport, Facet, FacetList,
    Provenance, Signature, DEFAULT_ORACLE_CAP,
};
pub use lifting::{full_lifting_system, lift, lift_from_p0, lift_from_pk, DisjunctionInstance, LiftingResult};
pub use lp::{maximize, BasicPartition, LpOutcome, LpStatus};
pub use polyops::{canonicalize, HPolytope, LinearInequality, VRep};
pub use ratgeom::{rat, ratio, LiftedPoint, RatMatrix, RatVector, Rational};
