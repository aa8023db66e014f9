//! Planar valued constraint satisfaction: exact weighted relations, plane
//! instances, planar expressibility, and the Boolean and conservative
//! planar-tractability classifiers.

pub mod catalog;
pub mod classify_boolean;
pub mod classify_conservative;
pub mod closure;
pub mod error;
pub mod express;
pub mod json;
pub mod ops;
pub mod plane;
pub mod relation;
pub mod value;

pub use error::{Error, Result};
pub use ops::{MmVerdict, PolyVerdict};
pub use relation::{
    Language, MultimorphismCandidate, NamedRelation, OpTable, TuplePartition, WeightedRelation,
};
pub use value::ExtValue;
