//! Steady-state heat conduction on the disk by finite differences, and a
//! comparison harness between the conduction solution and the Q-transform
//! of the same source.
//!
//! The mesh is node based: `r_i = i/N` for `i = 0..=N` and
//! `θ_j = −π + 2πj/M`. The origin is a single unknown tied to the mean of
//! the first ring. Each ring equation is the five-point polar stencil. The
//! linear system is diagonalised in `θ` by the discrete Fourier transform,
//! which leaves one tridiagonal system per angular mode. Iterative
//! refinement against the assembled operator then drives the relative
//! residual below the requested tolerance.

mod compare;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureSpec;
use crate::sources::{DiskSource, Piece, SourceFunction};
use crate::transforms::{EvaluationGrid, Field, FieldMeta, TransformError};

pub use compare::{conjecture_compare, ConjectureConfig, ConjectureOutcome, ConjectureReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("invalid heat problem: {0}")]
    InvalidProblem(String),
    #[error("solver did not converge: relative residual {achieved:e} after {iterations} iterations")]
    NonConvergence { achieved: f64, iterations: usize },
    #[error("source is not finite at r = {r}, theta = {theta}")]
    NonFiniteSource { r: f64, theta: f64 },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HeatBoundary {
    /// `u = 0` on the circle.
    DirichletZero,
    /// `k ∂u/∂r + h u = 0` on the circle.
    Robin { h: f64 },
}

impl HeatBoundary {
    pub fn tag(&self) -> String {
        match self {
            HeatBoundary::DirichletZero => "dirichlet_zero".into(),
            HeatBoundary::Robin { h } => format!("robin(h={h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatProblem {
    pub source: SourceFunction,
    pub conductivity: f64,
    pub boundary: HeatBoundary,
    /// Radial intervals; the mesh has `n_r + 1` radii including 0 and 1.
    pub n_r: usize,
    pub n_theta: usize,
}

impl HeatProblem {
    pub fn new(source: SourceFunction, boundary: HeatBoundary, n_r: usize, n_theta: usize) -> Self {
        Self { source, conductivity: 1.0, boundary, n_r, n_theta }
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        if self.n_r < 16 || self.n_theta < 16 {
            return Err(HeatError::InvalidProblem(format!(
                "mesh {}x{} is too coarse; both resolutions must be at least 16",
                self.n_r, self.n_theta
            )));
        }
        if !(self.conductivity > 0.0 && self.conductivity.is_finite()) {
            return Err(HeatError::InvalidProblem(format!("conductivity {} must be positive", self.conductivity)));
        }
        if let HeatBoundary::Robin { h } = self.boundary {
            if !(h > 0.0 && h.is_finite()) {
                return Err(HeatError::InvalidProblem(format!("Robin coefficient {h} must be positive")));
            }
        }
        self.source.validate("source").map_err(|e| HeatError::InvalidProblem(e.to_string()))
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..=self.n_r).map(|i| i as f64 / self.n_r as f64).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_theta).map(|j| -PI + 2.0 * PI * j as f64 / self.n_theta as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const MAX_REFINEMENTS: usize = 20;
const SUBSAMPLES: usize = 4;

fn piece_sum(pieces: &[Piece], rho: f64, phi: f64) -> f64 {
    pieces.iter().filter(|p| p.rect.contains(rho, phi)).map(|p| p.weight * p.value(rho, phi)).sum()
}

/// `ρ`-weighted midpoint average of `f` over `[r0, r1] × [t0, t1]`.
fn cell_average(pieces: &[Piece], r0: f64, r1: f64, t0: f64, t1: f64, n_t: usize) -> Result<f64, HeatError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..SUBSAMPLES {
        let rho = r0 + (a as f64 + 0.5) * (r1 - r0) / SUBSAMPLES as f64;
        for b in 0..n_t {
            let phi = t0 + (b as f64 + 0.5) * (t1 - t0) / n_t as f64;
            let v = piece_sum(pieces, rho, phi);
            if !v.is_finite() {
                return Err(HeatError::NonFiniteSource { r: rho, theta: phi });
            }
            num += v * rho;
            den += rho;
        }
    }
    Ok(num / den)
}

/// Discrete operator and its mode-wise inverse for one mesh.
struct Operator {
    n: usize,
    m: usize,
    dr: f64,
    dt: f64,
    /// `2Δr h/k` for Robin, `None` for Dirichlet.
    robin: Option<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Operator {
    fn new(p: &HeatProblem) -> Self {
        let mut planner = FftPlanner::new();
        let dr = 1.0 / p.n_r as f64;
        Self {
            n: p.n_r,
            m: p.n_theta,
            dr,
            dt: 2.0 * PI / p.n_theta as f64,
            robin: match p.boundary {
                HeatBoundary::DirichletZero => None,
                HeatBoundary::Robin { h } => Some(2.0 * dr * h / p.conductivity),
            },
            fwd: planner.plan_fft_forward(p.n_theta),
            inv: planner.plan_fft_inverse(p.n_theta),
        }
    }

    /// Rings carrying unknowns: `1..=last`.
    fn last(&self) -> usize {
        if self.robin.is_some() {
            self.n
        } else {
            self.n - 1
        }
    }

    fn coeffs(&self, i: usize) -> (f64, f64, f64) {
        let r = i as f64 * self.dr;
        let h2 = self.dr * self.dr;
        (1.0 / h2 - 0.5 / (r * self.dr), -2.0 / h2, 1.0 / h2 + 0.5 / (r * self.dr))
    }

    /// `L u` at every unknown; `u` holds the center then rings `1..=last`
    /// row-major. The outer ring for Dirichlet is zero and not stored.
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let m = self.m;
        let last = self.last();
        let ring = |i: usize, j: usize| -> f64 {
            if i == 0 {
                u[0]
            } else if i > last {
                0.0
            } else {
                u[1 + (i - 1) * m + j]
            }
        };
        let mean1: f64 = (0..m).map(|j| ring(1, j)).sum::<f64>() / m as f64;
        out[0] = 4.0 / (self.dr * self.dr) * (mean1 - u[0]);
        for i in 1..=last {
            let (a, b, c) = self.coeffs(i);
            let r = i as f64 * self.dr;
            let ang = 1.0 / (self.dt * self.dt * r * r);
            for j in 0..m {
                let jp = (j + 1) % m;
                let jm = (j + m - 1) % m;
                let centre = ring(i, j);
                let outer = if i == self.n {
                    // ghost node from the Robin condition
                    ring(i - 1, j) - self.robin.expect("only Robin stores the outer ring") * centre
                } else {
                    ring(i + 1, j)
                };
                out[1 + (i - 1) * m + j] =
                    a * ring(i - 1, j) + b * centre + c * outer + ang * (ring(i, jp) - 2.0 * centre + ring(i, jm));
            }
        }
    }

    /// Solves `L u = rhs` exactly up to rounding.
    #[allow(clippy::needless_range_loop)]
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let last = self.last();
        // modes[i-1][k]: coefficient k of ring i, normalised by 1/m
        let mut modes: Vec<Vec<Complex64>> = (1..=last)
            .map(|i| {
                let mut buf: Vec<Complex64> =
                    rhs[1 + (i - 1) * m..1 + i * m].iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.fwd.process(&mut buf);
                buf.iter_mut().for_each(|c| *c /= m as f64);
                buf
            })
            .collect();
        let mut center = 0.0;
        for k in 0..m {
            let lambda = -4.0 * (PI * k as f64 / m as f64).sin().powi(2) / (self.dt * self.dt);
            // tridiagonal rows; mode 0 prepends the center unknown
            let with_center = k == 0;
            let size = last + usize::from(with_center);
            let mut lo = vec![0.0; size];
            let mut di = vec![0.0; size];
            let mut up = vec![0.0; size];
            let mut d: Vec<Complex64> = Vec::with_capacity(size);
            if with_center {
                let s = 4.0 / (self.dr * self.dr);
                di[0] = -s;
                up[0] = s;
                d.push(Complex64::new(rhs[0], 0.0));
            }
            let off = usize::from(with_center);
            for i in 1..=last {
                let (a, b, c) = self.coeffs(i);
                let r = i as f64 * self.dr;
                let row = off + i - 1;
                lo[row] = if i == 1 && !with_center { 0.0 } else { a };
                di[row] = b + lambda / (r * r);
                up[row] = c;
                if i == self.n {
                    let beta = self.robin.expect("outer ring is stored only for Robin");
                    lo[row] = a + c;
                    di[row] = b - beta * c + lambda / (r * r);
                    up[row] = 0.0;
                } else if i == last {
                    up[row] = 0.0;
                }
                d.push(modes[i - 1][k]);
            }
            let x = thomas(&lo, &di, &up, &d);
            if with_center {
                center = x[0].re;
            }
            for i in 1..=last {
                modes[i - 1][k] = x[off + i - 1];
            }
        }
        let mut u = vec![0.0; 1 + last * m];
        u[0] = center;
        for i in 1..=last {
            let buf = &mut modes[i - 1];
            self.inv.process(buf);
            for j in 0..m {
                u[1 + (i - 1) * m + j] = buf[j].re;
            }
        }
        u
    }
}

/// Tridiagonal solve with real coefficients and complex right-hand side.
fn thomas(lo: &[f64], di: &[f64], up: &[f64], d: &[Complex64]) -> Vec<Complex64> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    c[0] = up[0] / di[0];
    x[0] = d[0] / di[0];
    for i in 1..n {
        let den = di[i] - lo[i] * c[i - 1];
        c[i] = up[i] / den;
        x[i] = (d[i] - x[i - 1] * lo[i]) / den;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= next * c[i];
    }
    x
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `∇·(k∇u) = −f` and returns the nodal field, outer circle included.
pub fn solve_steady_state(p: &HeatProblem) -> Result<Field, HeatError> {
    solve_with_stats(p).map(|(f, _)| f)
}

pub fn solve_with_stats(p: &HeatProblem) -> Result<(Field, SolveStats), HeatError> {
    p.validate()?;
    let op = Operator::new(p);
    let (n, m) = (p.n_r, p.n_theta);
    let last = op.last();
    let radii = p.radii();
    let angles = p.angles();
    let pieces = p.source.pieces();

    // right-hand side −f/k from cell averages
    let k = p.conductivity;
    let mut rhs = vec![0.0; 1 + last * m];
    rhs[0] = -cell_average(&pieces, 0.0, 0.5 * op.dr, -PI, PI, 8 * SUBSAMPLES)? / k;
    for i in 1..=last {
        let r0 = radii[i] - 0.5 * op.dr;
        let r1 = (radii[i] + 0.5 * op.dr).min(1.0);
        for j in 0..m {
            let t = angles[j];
            let avg = cell_average(&pieces, r0, r1, t - 0.5 * op.dt, t + 0.5 * op.dt, SUBSAMPLES)?;
            rhs[1 + (i - 1) * m + j] = -avg / k;
        }
    }

    let scale = norm2(&rhs);
    let mut u = op.solve(&rhs);
    let mut lu = vec![0.0; u.len()];
    let mut iterations = 1;
    let mut rel;
    loop {
        op.apply(&u, &mut lu);
        let res: Vec<f64> = rhs.iter().zip(&lu).map(|(b, a)| b - a).collect();
        let rn = norm2(&res);
        rel = if scale > 0.0 { rn / scale } else { rn };
        if !rel.is_finite() {
            return Err(HeatError::NonConvergence { achieved: rel, iterations });
        }
        if rel <= RESIDUAL_TOLERANCE {
            break;
        }
        if iterations >= MAX_REFINEMENTS {
            return Err(HeatError::NonConvergence { achieved: rel, iterations });
        }
        let du = op.solve(&res);
        u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
        iterations += 1;
    }

    let mut values = Vec::with_capacity((n + 1) * m);
    values.extend(std::iter::repeat_n(u[0], m));
    for i in 1..=n {
        for j in 0..m {
            values.push(if i <= last { u[1 + (i - 1) * m + j] } else { 0.0 });
        }
    }
    let grid = EvaluationGrid::from_axes(radii, angles)?;
    let field = Field {
        converged: vec![true; values.len()],
        grid,
        values,
        meta: FieldMeta {
            operator: format!("heat_steady_state[{}]", p.boundary.tag()),
            source: p.source.describe(),
            prefactor: 1.0,
            quadrature: QuadratureSpec::default(),
            harmonic: false,
        },
    };
    Ok((field, SolveStats { iterations, relative_residual: rel }))
}
