//! Verification engine for almost paracontact metric structures.
//!
//! Geometric fields are evaluated as truncated Taylor jets at sample points,
//! so curvature and its derivatives come out exact up to rounding.

pub mod einstein;
pub mod expr;
pub mod geometry;
pub mod hypersurface;
pub mod jet;
pub mod models;
pub mod paracontact;
pub mod report;
pub mod suite;
pub mod tensor;
