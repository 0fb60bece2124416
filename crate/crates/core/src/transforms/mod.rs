//! Integral operators on the disk: the Poisson integral of a boundary
//! function, the Q-transform `T f(r, θ) = ∫∫ f(ρ, φ) Q(rρ, θ − φ) ρ dρ dφ`,
//! the harmonic representation `−u(0) + (2/π) T u`, the orthogonal
//! projection onto the harmonic Bergman space, and the weighted analytic
//! Bergman representation.
//!
//! The projection uses the kernel `(2Q − 1)/π`: for harmonic `u` the mean
//! value property gives `(1/π)∫∫ u = u(0)`, so subtracting that term from
//! `(2/π) T u` cancels the `u(0)` offset and the operator fixes every
//! harmonic function with finite area norm.
//!
//! Fields are computed point by point with no interpolation. Grid points
//! are evaluated in parallel and written by index.

mod integrand;
pub mod tabulated;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{self, ComplexPoint, KernelError};
use crate::quadrature::{
    integrate_box, integrate_interval, PointFn, PolarRectangle, QuadratureError, QuadratureResult, QuadratureSpec,
    SingularRadialMap,
};
use crate::sources::{angular_segments, BoundaryFunction, DiskSource, Piece};

pub(crate) use integrand::AngularMap;
pub use integrand::KernelKind;
use integrand::{PieceIntegrand, RadialMap};
pub use tabulated::TabulatedSource;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("evaluation radius {r} exceeds the configured maximum {max}")]
    EvaluationRadius { r: f64, max: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite value at (r, theta) = ({r}, {theta})")]
    NonFinite { r: f64, theta: f64 },
}

/// Tensor grid of evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid {
    radii: Vec<f64>,
    angles: Vec<f64>,
}

impl EvaluationGrid {
    pub const DEFAULT_R_MAX: f64 = 0.9;
    pub const DEFAULT_N_R: usize = 40;
    pub const DEFAULT_N_THETA: usize = 128;

    /// `n_r` radii evenly spaced on `[0, r_max]` and `n_theta` angles
    /// `−π + 2πj/n_theta`. `r_max` must be below 1.
    pub fn uniform(r_max: f64, n_r: usize, n_theta: usize) -> Result<Self, TransformError> {
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(TransformError::Grid(format!("r_max = {r_max} must lie in (0, 1)")));
        }
        if n_r < 2 || n_theta < 1 {
            return Err(TransformError::Grid("need n_r >= 2 and n_theta >= 1".into()));
        }
        let radii = (0..n_r).map(|i| r_max * i as f64 / (n_r - 1) as f64).collect();
        let angles = (0..n_theta).map(|j| -PI + 2.0 * PI * j as f64 / n_theta as f64).collect();
        Ok(Self { radii, angles })
    }

    pub fn default_grid() -> Self {
        Self::uniform(Self::DEFAULT_R_MAX, Self::DEFAULT_N_R, Self::DEFAULT_N_THETA).expect("defaults are valid")
    }

    /// Arbitrary strictly increasing axes, radii in `[0, 1]`.
    pub fn from_axes(radii: Vec<f64>, angles: Vec<f64>) -> Result<Self, TransformError> {
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if radii.is_empty() || angles.is_empty() {
            return Err(TransformError::Grid("empty axis".into()));
        }
        if !increasing(&radii) || !increasing(&angles) {
            return Err(TransformError::Grid("axes must be strictly increasing".into()));
        }
        if radii[0] < 0.0 || *radii.last().expect("non-empty") > 1.0 {
            return Err(TransformError::Grid("radii must lie in [0, 1]".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(TransformError::Grid("angles must be finite".into()));
        }
        Ok(Self { radii, angles })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
    pub fn n_r(&self) -> usize {
        self.radii.len()
    }
    pub fn n_theta(&self) -> usize {
        self.angles.len()
    }
    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("non-empty")
    }

    /// `(r, θ)` of flat index `k` (row-major, radius outer).
    pub fn point(&self, k: usize) -> (f64, f64) {
        let n = self.angles.len();
        (self.radii[k / n], self.angles[k % n])
    }

    /// Angles evenly spaced over a full turn.
    pub fn is_periodic_uniform(&self) -> bool {
        let n = self.angles.len();
        if n < 3 {
            return false;
        }
        let h = 2.0 * PI / n as f64;
        self.angles.windows(2).all(|w| ((w[1] - w[0]) - h).abs() < 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub operator: String,
    pub source: String,
    pub prefactor: f64,
    pub quadrature: QuadratureSpec,
    /// Output is harmonic by construction.
    pub harmonic: bool,
}

/// Values of a computed function on an [`EvaluationGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: EvaluationGrid,
    /// Row-major `n_r × n_theta`.
    pub values: Vec<f64>,
    pub converged: Vec<bool>,
    pub meta: FieldMeta,
}

impl Field {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_theta() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_theta();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|c| *c)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute difference to `f(r, θ)` over the grid.
    pub fn max_error_against<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        (0..self.grid.len())
            .map(|k| {
                let (r, t) = self.grid.point(k);
                (self.values[k] - f(r, t)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Linear combination `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field, TransformError> {
        if self.grid != other.grid {
            return Err(TransformError::Grid("fields live on different grids".into()));
        }
        let mut out = self.clone();
        for (k, v) in out.values.iter_mut().enumerate() {
            *v = a * self.values[k] + b * other.values[k];
        }
        for (k, c) in out.converged.iter_mut().enumerate() {
            *c = self.converged[k] && other.converged[k];
        }
        Ok(out)
    }
}

fn check_grid(grid: &EvaluationGrid, spec: &QuadratureSpec) -> Result<(), TransformError> {
    spec.validate()?;
    let r_max = grid.r_max();
    if r_max > spec.max_eval_radius {
        return Err(TransformError::EvaluationRadius { r: r_max, max: spec.max_eval_radius });
    }
    Ok(())
}

fn evaluate_grid<F>(grid: &EvaluationGrid, f: F) -> Result<(Vec<f64>, Vec<bool>), TransformError>
where
    F: Fn(f64, f64) -> Result<QuadratureResult, TransformError> + Sync,
{
    let results: Vec<Result<QuadratureResult, TransformError>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (r, t) = grid.point(k);
            f(r, t)
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut converged = Vec::with_capacity(results.len());
    for (k, res) in results.into_iter().enumerate() {
        let res = res?;
        if !res.value.is_finite() {
            let (r, theta) = grid.point(k);
            return Err(TransformError::NonFinite { r, theta });
        }
        values.push(res.value);
        converged.push(res.converged);
    }
    Ok((values, converged))
}

/// `∫∫_piece density(ρ, φ) K(r, θ; ρ, φ) ρ dρ dφ` for one piece.
pub fn integrate_piece(
    piece: &Piece,
    r: f64,
    theta: f64,
    kind: KernelKind,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    let rect = piece.rect;
    let radial = match piece.density.singular_exponent() {
        Some(beta) => {
            let map = SingularRadialMap::new(beta)?;
            RadialMap::Singular(map)
        }
        None => RadialMap::Linear,
    };
    let x_range = match radial {
        RadialMap::Linear => (rect.r_lo(), rect.r_hi()),
        RadialMap::Singular(map) => map.t_range(rect.r_lo(), rect.r_hi()),
    };
    let mut total = QuadratureResult { value: 0.0, error_estimate: 0.0, panels_used: 0, converged: true };
    for seg in angular_segments(&piece.density.angular_factor(), rect.theta_lo(), rect.theta_hi()) {
        let mut parts = Vec::with_capacity(2);
        if seg.singular_lo && seg.singular_hi {
            let mid = 0.5 * (seg.lo + seg.hi);
            parts.push(AngularMap::graded_lo(seg.lo, mid));
            parts.push(AngularMap::graded_hi(mid, seg.hi));
        } else if seg.singular_lo {
            parts.push(AngularMap::graded_lo(seg.lo, seg.hi));
        } else if seg.singular_hi {
            parts.push(AngularMap::graded_hi(seg.lo, seg.hi));
        } else {
            parts.push(AngularMap::linear(seg.lo, seg.hi));
        }
        for angular in parts {
            let g = PieceIntegrand::new(r, theta, kind, piece.density, radial, angular);
            let res = integrate_box(&g, x_range, angular.y_range(), spec)?;
            total.absorb(&res, 1.0);
        }
    }
    Ok(total)
}

/// Sum over pieces of `weight · ∫∫ density K ρ dρ dφ` at one point.
pub fn integrate_pieces(
    pieces: &[Piece],
    r: f64,
    theta: f64,
    kind: KernelKind,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    let mut total = QuadratureResult { value: 0.0, error_estimate: 0.0, panels_used: 0, converged: true };
    for piece in pieces {
        let res = integrate_piece(piece, r, theta, kind, spec)?;
        total.absorb(&res, piece.weight);
    }
    Ok(total)
}

/// `∫∫ f ρ dρ dφ` over the disk.
pub fn source_integral<S: DiskSource + ?Sized>(
    f: &S,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    integrate_pieces(&f.pieces(), 0.0, 0.0, KernelKind::Unit, spec)
}

/// `prefactor · T f` at a single point.
pub fn q_transform_point<S: DiskSource + ?Sized>(
    f: &S,
    r: f64,
    theta: f64,
    prefactor: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    spec.validate()?;
    if r > spec.max_eval_radius || r < 0.0 {
        return Err(TransformError::EvaluationRadius { r, max: spec.max_eval_radius });
    }
    let mut res = integrate_pieces(&f.pieces(), r, theta, KernelKind::Q, spec)?;
    res.value *= prefactor;
    res.error_estimate *= prefactor.abs();
    Ok(res)
}

/// Poisson integral `(1/2π) ∫ f(φ) P_r(θ − φ) dφ` on a grid.
pub fn poisson_integral(
    f: &BoundaryFunction,
    grid: &EvaluationGrid,
    spec: &QuadratureSpec,
) -> Result<Field, TransformError> {
    check_grid(grid, spec)?;
    let pieces = f.pieces();
    let (values, converged) = evaluate_grid(grid, |r, t| poisson_point_pieces(&pieces, r, t, spec))?;
    Ok(Field {
        grid: grid.clone(),
        values,
        converged,
        meta: FieldMeta {
            operator: "poisson_integral".into(),
            source: f.describe(),
            prefactor: 1.0 / (2.0 * PI),
            quadrature: *spec,
            harmonic: true,
        },
    })
}

/// Poisson integral at one point.
pub fn poisson_point(
    f: &BoundaryFunction,
    r: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    spec.validate()?;
    if !(0.0..=spec.max_eval_radius).contains(&r) {
        return Err(TransformError::EvaluationRadius { r, max: spec.max_eval_radius });
    }
    poisson_point_pieces(&f.pieces(), r, theta, spec)
}

fn poisson_point_pieces(
    pieces: &[crate::sources::ArcPiece],
    r: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    let mut total = QuadratureResult { value: 0.0, error_estimate: 0.0, panels_used: 0, converged: true };
    let scale = 1.0 / (2.0 * PI);
    for p in pieces {
        for seg in angular_segments(&p.density, p.lo, p.hi) {
            let mut parts = Vec::with_capacity(2);
            if seg.singular_lo && seg.singular_hi {
                let mid = 0.5 * (seg.lo + seg.hi);
                parts.push(AngularMap::graded_lo(seg.lo, mid));
                parts.push(AngularMap::graded_hi(mid, seg.hi));
            } else if seg.singular_lo {
                parts.push(AngularMap::graded_lo(seg.lo, seg.hi));
            } else if seg.singular_hi {
                parts.push(AngularMap::graded_hi(seg.lo, seg.hi));
            } else {
                parts.push(AngularMap::linear(seg.lo, seg.hi));
            }
            for map in parts {
                let (y0, y1) = map.y_range();
                let res = integrate_interval(
                    |y: f64| {
                        let (phi, jac) = map.apply(y);
                        let psi = theta - phi;
                        p.density.value(phi) * kernels::poisson_from_parts(r, kernels::one_minus_cos(psi)) * jac * scale
                    },
                    y0,
                    y1,
                    spec.nodes_angular,
                    spec.adaptive_tol,
                    spec.max_depth,
                )?;
                total.absorb(&res, p.weight);
            }
        }
    }
    Ok(total)
}

/// `prefactor · ∫∫ f(ρ, φ) Q(rρ, θ − φ) ρ dρ dφ` on a grid.
pub fn q_transform<S: DiskSource + ?Sized>(
    f: &S,
    grid: &EvaluationGrid,
    prefactor: f64,
    spec: &QuadratureSpec,
) -> Result<Field, TransformError> {
    check_grid(grid, spec)?;
    let pieces = f.pieces();
    let (values, converged) = evaluate_grid(grid, |r, t| {
        let mut res = integrate_pieces(&pieces, r, t, KernelKind::Q, spec)?;
        res.value *= prefactor;
        Ok(res)
    })?;
    Ok(Field {
        grid: grid.clone(),
        values,
        converged,
        meta: FieldMeta {
            operator: "q_transform".into(),
            source: f.describe(),
            prefactor,
            quadrature: *spec,
            harmonic: true,
        },
    })
}

/// Orthogonal projection of `f` onto the harmonic Bergman space, computed
/// with the kernel `(2Q − 1)/π`.
pub fn bergman_project<S: DiskSource + ?Sized>(
    f: &S,
    grid: &EvaluationGrid,
    spec: &QuadratureSpec,
) -> Result<Field, TransformError> {
    check_grid(grid, spec)?;
    let pieces = f.pieces();
    let (values, converged) =
        evaluate_grid(grid, |r, t| integrate_pieces(&pieces, r, t, KernelKind::Projection, spec))?;
    Ok(Field {
        grid: grid.clone(),
        values,
        converged,
        meta: FieldMeta {
            operator: "bergman_project".into(),
            source: f.describe(),
            prefactor: 1.0,
            quadrature: *spec,
            harmonic: true,
        },
    })
}

/// Harmonic representation `−u(0) + (2/π) ∫∫ u(ρ, φ) Q(rρ, θ − φ) ρ dρ dφ`
/// for a function given pointwise on the whole disk.
pub fn harmonic_rep<U>(
    u: U,
    u_at_origin: f64,
    grid: &EvaluationGrid,
    spec: &QuadratureSpec,
) -> Result<Field, TransformError>
where
    U: Fn(f64, f64) -> f64 + Sync,
{
    check_grid(grid, spec)?;
    let (values, converged) = evaluate_grid(grid, |r, t| harmonic_rep_point(&u, u_at_origin, r, t, spec))?;
    Ok(Field {
        grid: grid.clone(),
        values,
        converged,
        meta: FieldMeta {
            operator: "harmonic_rep".into(),
            source: "callable".into(),
            prefactor: 2.0 / PI,
            quadrature: *spec,
            harmonic: true,
        },
    })
}

pub fn harmonic_rep_point<U>(
    u: &U,
    u_at_origin: f64,
    r: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError>
where
    U: Fn(f64, f64) -> f64 + Sync,
{
    let g = PointFn(|rho: f64, phi: f64| {
        let psi = theta - phi;
        u(rho, phi) * kernels::q_from_parts(r * rho, kernels::one_minus_cos(psi), psi.sin()) * rho
    });
    let disk = PolarRectangle::full_disk();
    let mut res = integrate_box(&g, (0.0, 1.0), (disk.theta_lo(), disk.theta_hi()), spec)?;
    res.value = -u_at_origin + 2.0 / PI * res.value;
    res.error_estimate *= 2.0 / PI;
    Ok(res)
}

/// Discrete polar Laplacian of `prefactor · T f` at `(r, θ)`, with all five
/// stencil values taken under one shared quadrature rule so that panel
/// choices do not leak into the difference quotients.
pub fn q_transform_stencil_laplacian<S: DiskSource + ?Sized>(
    f: &S,
    r: f64,
    theta: f64,
    h_r: f64,
    h_theta: f64,
    prefactor: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, TransformError> {
    if !(r - h_r > 0.0) || r + h_r > spec.max_eval_radius {
        return Err(TransformError::EvaluationRadius { r: r + h_r, max: spec.max_eval_radius });
    }
    let mut res = integrate_pieces(&f.pieces(), r, theta, KernelKind::Stencil { h_r, h_theta }, spec)?;
    res.value *= prefactor;
    res.error_estimate *= prefactor.abs();
    Ok(res)
}

/// Analytic test functions for the weighted representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticTestFunction {
    Monomial(u32),
    /// Taylor coefficients `c_0, c_1, …`.
    Polynomial(Vec<Complex64>),
}

impl AnalyticTestFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticTestFunction::Monomial(n) => z.powu(*n),
            AnalyticTestFunction::Polynomial(c) => {
                c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ck| acc * z + ck)
            }
        }
    }
}

/// `((1+α)/π) ∫∫ (1 − ρ²)^α f(ρe^{iφ}) (1 − zρe^{−iφ})^{−(2+α)} ρ dρ dφ`.
pub fn analytic_rep(
    f: &AnalyticTestFunction,
    alpha: f64,
    z: ComplexPoint,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<Complex64>, TransformError> {
    if !(alpha > -1.0) {
        return Err(KernelError::InvalidAlpha(alpha).into());
    }
    let zc = ComplexPoint::interior(z.re, z.im)?.as_complex();
    let scale = (1.0 + alpha) / PI;
    let kernel = |rho: f64, phi: f64| -> Complex64 {
        let w = Complex64::from_polar(rho, phi);
        let base = Complex64::new(1.0, 0.0) - zc * w.conj();
        f.eval(w) * base.powf(-(2.0 + alpha)) * scale
    };
    let disk = PolarRectangle::full_disk();
    if alpha < 0.0 {
        // (1 − ρ²)^α = (1 − ρ)^α (1 + ρ)^α; the first factor is absorbed by the map
        let map = SingularRadialMap::new(-alpha)?;
        let (t0, t1) = map.t_range(0.0, 1.0);
        let g = PointFn(|t: f64, phi: f64| {
            let rho = map.rho(t);
            kernel(rho, phi) * ((1.0 + rho).powf(alpha) * rho * map.jacobian())
        });
        Ok(integrate_box(&g, (t0, t1), (disk.theta_lo(), disk.theta_hi()), spec)?)
    } else {
        let g = PointFn(|rho: f64, phi: f64| kernel(rho, phi) * ((1.0 - rho * rho).powf(alpha) * rho));
        Ok(integrate_box(&g, (0.0, 1.0), (disk.theta_lo(), disk.theta_hi()), spec)?)
    }
}
