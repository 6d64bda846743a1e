//! Exact arithmetic for the birational geometry of the Fano variety of lines
//! on a cubic fourfold containing cubic scrolls.
//!
//! Everything here is computed over arbitrary-precision integers and
//! rationals: Gram lattices and their discriminant groups, isometries and
//! reflection words, wall-divisor enumeration, rational cone geometry for the
//! chamber census, orbit reduction for the birational automorphism group, the
//! 27-lines combinatorics of a cubic surface, and exhaustive point scans of
//! determinantal surfaces over a prime field.

pub mod birgroup;
pub mod chambers;
pub mod cubicsurface;
pub mod fqgeom;
pub mod geom;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod scenario;
pub mod walls;

pub use lattice::{DiscriminantGroup, GramLattice, IntersectionLattice};
pub use matrix::{IMat, IVec, Int, Rat};
