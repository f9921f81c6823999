//! Exact computations with perverse sheaves on two-strata finite poset
//! models: gluing triples, local cohomology, the category of quadruples
//! `(A, B, u, v)` and the functors relating it to perverse complexes.

pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod poset;
pub mod complex;
pub mod derived;
pub mod sheaf;
pub mod gluing;
pub mod perverse;
pub mod cftg;
pub mod mv;

pub use error::{Error, Result};
