//! Exact-arithmetic constructions of poset associahedra and affine poset
//! cyclohedra.
//!
//! The library builds half-space realizations of the poset associahedron
//! `A(P)` of a finite connected poset and of the cyclohedron `C(P~)` of an
//! affine poset, enumerates their face combinatorics through tubes and
//! tubings, and cross-checks every construction against an independent
//! brute-force vertex-enumeration oracle. All geometry is carried out in
//! arbitrary-precision rational arithmetic; nothing is floating point except
//! the optional OFF mesh export for external viewers.
//!
//! ```
//! use posetpoly::oracle::brute_force_vertices;
//! use posetpoly::realization::{build_associahedron, vertex_of_tubing};
//! use posetpoly::tubing::TubingEngine;
//! use posetpoly::Poset;
//!
//! // The associahedron of the 4-chain is the pentagon.
//! let p = Poset::chain(4);
//! let engine = TubingEngine::new(&p)?;
//! let maximal = engine.maximal_tubings();
//! assert_eq!(maximal.len(), 5);
//!
//! // Each maximal tubing solves to an exact vertex, and the brute-force
//! // oracle finds exactly the same five points.
//! let system = build_associahedron(&p)?;
//! let vertices = brute_force_vertices(&system)?;
//! assert_eq!(vertices.len(), 5);
//! for tubing in &maximal {
//!     let v = vertex_of_tubing(&p, &engine.members(tubing))?;
//!     assert!(vertices.iter().any(|cert| cert.point == v));
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod affine;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod poset;
pub mod realization;
pub mod system;
pub mod tubing;

pub use affine::{AffinePoset, AffineTube};
pub use poset::{ElemSet, Poset, PosetError};
pub use realization::{AlphaVariant, FHVector};
pub use system::{HalfSpaceSystem, Label, LinearFunctional, Point, Rat};
pub use tubing::{Tubing, TubingEngine};
