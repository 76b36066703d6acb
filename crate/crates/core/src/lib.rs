//! Numerical laboratory for area-constrained Willmore tori in curved
//! three-manifolds: Möbius-degenerating Clifford tori, Willmore energy in
//! perturbed normal coordinates, sphere asymptotics, and SO(3) Morse counts.

#![allow(clippy::needless_range_loop)]

pub mod ambient;
pub mod consts;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod moebius;
pub mod morse;
pub mod quadrature;
pub mod real;
pub mod spectral;
pub mod sphere;
pub mod surface;

pub use ambient::{AmbientMetric, CurvatureData};
pub use error::{Result, WlabError};
pub use jet::{Jet, J2, J4};
pub use real::Real;
