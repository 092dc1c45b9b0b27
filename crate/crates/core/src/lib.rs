//! Orthogonal polynomials, reproducing kernels and Cesàro means on the
//! parabolic domain `U`, the paraboloid surface `V0^{d+1}` and the solid
//! paraboloid `V^{d+1}`.
//!
//! All weights are normalized to probability measures.

#![allow(non_snake_case)]

pub mod basis;
pub mod domain_u;
pub mod error;
pub mod functions;
pub mod harness;
pub mod quadrature;
pub mod rng;
pub mod solid_v;
pub mod specfun;
pub mod sphere;
pub mod surface_v0;

pub use basis::{Expansion, OrthogonalBasis};
pub use domain_u::{UPoint, WeightU};
pub use error::{Error, Result};
pub use functions::{Domain, TestFunction};
pub use harness::{run, CheckRow, Command, ExperimentConfig, Report};
pub use solid_v::{BallIndex, SolidPoint, WeightV};
pub use specfun::{CesaroSpec, JacobiParams};
pub use surface_v0::{SurfacePoint, WeightV0};
