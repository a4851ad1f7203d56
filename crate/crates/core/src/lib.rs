//! Exact graded spaces, mode tables and vertex-algebra checks, plus a
//! floating-point lab for smeared fields on the circle.

pub mod fields;
pub mod linalg;
pub mod models;
pub mod reconstruct;
pub mod report;
pub mod scalar;
pub mod smear;
pub mod space;
pub mod unitarity;

pub use scalar::Scalar;
