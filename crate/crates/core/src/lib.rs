//! Flexibility analysis of Kokotsakis meshes.
//!
//! A Kokotsakis mesh is a central polygon surrounded by a belt of faces, four
//! faces meeting at every central vertex. This crate decides whether such a
//! mesh admits first-order and finite flexions:
//!
//! * [`infinitesimal`] computes the invariant `chi` whose value 1 marks
//!   infinitesimal flexibility,
//! * [`incidence`] reformulates that condition as planar incidence geometry,
//! * [`flow`] integrates the flexion vector field and its derivative tests,
//! * [`algebra`] runs the angle-space elimination and resultant certificate
//!   for quadrilateral meshes and generates known flexible families.

pub mod geometry;
pub mod incidence;
pub mod infinitesimal;
pub mod io;
pub mod mesh;
pub mod ode;
pub mod sampling;
pub mod flow;
pub mod algebra;

pub use geometry::{ProjectivePoint2, Line2, Vector2, Vector3};
pub use mesh::{AngleSet, KokotsakisMesh};
