//! Exact lattice and convex-geometry substrate.

pub mod cone;
pub mod fan;
pub mod matrix;
pub mod prefan;
pub mod snf;
pub mod subspace;

pub use cone::{Cone, LatticeVector};
pub use fan::{fan_validate, star_fan, Fan, FanDiagnostics, StarFan};
pub use matrix::{q, IntMatrix, RationalMatrix, Q, Z};
pub use prefan::{Prefan, StackyPrefan};
pub use snf::{smith_normal_form, Smith};
pub use subspace::{complement_in, subspace_join, subspace_meet, Subspace};
