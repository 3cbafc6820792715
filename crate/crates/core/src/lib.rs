//! Torus-equivariant vector bundles on toric varieties and their downgrades, computed
//! exactly from Klyachko filtrations.

pub mod bundle_ops;
pub mod cli;
pub mod cohomology;
pub mod complexity_one;
pub mod deformation;
pub mod downgrade;
pub mod error;
pub mod examples;
pub mod filtration;
pub mod lattice;
pub mod polytope;
pub mod sampling;
pub mod splitting;

pub use error::{Error, Result};
