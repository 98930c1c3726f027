//! Exact computer algebra for graded bicommutative Hopf algebras over prime
//! fields with truncated perfections: root towers, order-p coordinates,
//! rewrite-presented quotients with unique normal forms, Witt-vector
//! addition laws computed over the integers, augmented modules over the
//! perfected additive group, section-functor values on perfect pairs, and
//! the cohomology of the induced cochain levels for the affine line.
//!
//! Everything is exact: arithmetic happens in the prime field, in Laurent
//! weight scalars, or in arbitrary-precision integers, and truncation is
//! always explicit (precision errors instead of silent rounding, a
//! `truncated` flag wherever a degree bound discards terms).

pub mod algebra;
pub mod cech;
pub mod endo;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod maps;
pub mod modules;
pub mod rat;
pub mod rng;
pub mod scalars;
pub mod sections;
pub mod witt;
