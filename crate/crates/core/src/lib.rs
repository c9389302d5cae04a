//! Contour-integration eigensolver for Hermitian-definite pencils.

pub mod contour;
pub mod dense;
pub mod experiments;
pub mod feast;
pub mod linsolve;
pub mod multi;
pub mod sparse;

pub use num_complex::Complex64 as C64;
