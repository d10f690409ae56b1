//! First-order stabilization-free virtual element method (SF-VEM) for plane
//! linear elasticity on arbitrary polygonal meshes.
//!
//! The element stiffness is built from two per-element projections computed
//! purely from boundary data and monomial moments:
//!
//! * an energy projection of the displacement onto linear vector polynomials,
//!   pinned on rigid modes by a vertex-average inner product, and
//! * an L² projection of the strain onto degree-`ℓ` symmetric matrix
//!   polynomials, where `ℓ` grows with the vertex count so that the element
//!   has exactly the three rigid-body zero-energy modes and nothing else.
//!
//! No stabilization matrix is added. A conventional stabilized first-order
//! element is provided alongside as a comparison baseline.
//!
//! The crate also ships the mesh generators (structured quads, reflected
//! Voronoi with Lloyd relaxation, nonconvex heptagon splits), the scaled
//! boundary cubature used for error integrals, element-eigenvalue scans,
//! and the benchmark problems driven by the `sfvem` CLI.

pub mod analysis;
pub mod assembly;
pub mod benchmarks;
pub mod error;
pub mod geometry;
pub mod polyspace;
pub mod projectors;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{ElementGeometry, PolyMesh};
