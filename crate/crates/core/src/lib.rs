//! Reproducing-kernel integral transforms on the unit disk.
//!
//! Points are given in polar form `(r, θ)`. Sources live on polar
//! rectangles and are integrated by adaptive tensor Gauss-Legendre
//! quadrature; see [`quadrature`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gridfile;
pub mod heatlab;
pub mod kernels;
pub mod quadrature;
pub mod sources;
pub mod transforms;
pub mod verify;

pub use kernels::{analytic_bergman_kernel, poisson_kernel, q_kernel, ComplexPoint, KernelError, KernelId, PolarPoint};
pub use quadrature::{PolarRectangle, QuadratureError, QuadratureResult, QuadratureSpec};
pub use sources::{AngularFactor, BoundaryFunction, DiskSource, RadialFactor, SourceError, SourceFunction};
pub use transforms::{EvaluationGrid, Field, TransformError};
