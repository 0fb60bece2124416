//! Harmonicity checks, norms, and the invariant suite.

mod norms;
mod suite;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::KernelError;
use crate::quadrature::{QuadratureError, QuadratureSpec};
use crate::sources::DiskSource;
use crate::transforms::{self, Field, TransformError};

pub use norms::{circle_integrals, norm, NormInput, NormKind, NormReport, NormSpec, TailMethod};
pub use suite::{run_invariant_suite, InvariantRecord, KernelFixture, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("stencil out of range: r_min = {r_min} must be at least 2 h_r = {}", 2.0 * h_r)]
    StencilOutOfRange { r_min: f64, h_r: f64 },
    #[error("norm kind {kind} cannot be applied to {input}")]
    IncompatibleKind { kind: String, input: String },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for Annulus {
    fn default() -> Self {
        Self { r_min: 0.1, r_max: 0.8 }
    }
}

impl Annulus {
    fn validate(&self, h_r: f64) -> Result<(), VerifyError> {
        if !(self.r_min < self.r_max && self.r_max + h_r < 1.0) {
            return Err(VerifyError::InvalidSpec(format!(
                "annulus [{}, {}] must be ordered and leave room for the stencil inside the disk",
                self.r_min, self.r_max
            )));
        }
        if self.r_min < 2.0 * h_r {
            return Err(VerifyError::StencilOutOfRange { r_min: self.r_min, h_r });
        }
        Ok(())
    }

    fn contains(&self, r: f64) -> bool {
        r >= self.r_min - 1e-12 && r <= self.r_max + 1e-12
    }
}

/// Discrete Laplacian residuals on an annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    pub max_abs_residual: f64,
    /// `max_abs_residual` divided by the largest `|u|` among the sampled
    /// points (left unscaled when that is zero).
    pub max_normalized_residual: f64,
    pub normalization: f64,
    /// `residual_grid[i][j]` at `(radii[i], angles[j])`.
    pub residual_grid: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub annulus: Annulus,
    pub stencil_spacing: (f64, f64),
    /// False when some underlying quadrature did not meet its tolerance.
    pub converged: bool,
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn stencil(c: f64, rp: f64, rm: f64, tp: f64, tm: f64, r: f64, h_r: f64, h_t: f64) -> f64 {
    (rp - 2.0 * c + rm) / (h_r * h_r) + (rp - rm) / (2.0 * h_r * r) + (tp - 2.0 * c + tm) / (h_t * h_t * r * r)
}

fn sample_axes(annulus: &Annulus, samples: (usize, usize)) -> Result<(Vec<f64>, Vec<f64>), VerifyError> {
    let (n_r, n_t) = samples;
    if n_r < 2 || n_t < 1 {
        return Err(VerifyError::InvalidSpec("need at least 2 radii and 1 angle".into()));
    }
    let radii =
        (0..n_r).map(|i| annulus.r_min + (annulus.r_max - annulus.r_min) * i as f64 / (n_r - 1) as f64).collect();
    let angles = (0..n_t).map(|j| -PI + 2.0 * PI * j as f64 / n_t as f64).collect();
    Ok((radii, angles))
}

fn assemble(
    radii: Vec<f64>,
    angles: Vec<f64>,
    residuals: Vec<f64>,
    magnitudes: Vec<f64>,
    converged: bool,
    annulus: Annulus,
    spacing: (f64, f64),
) -> HarmonicityReport {
    let max_abs = residuals.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let normalization = magnitudes.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let scale = if normalization > 0.0 { normalization } else { 1.0 };
    let n_t = angles.len();
    HarmonicityReport {
        max_abs_residual: max_abs,
        max_normalized_residual: max_abs / scale,
        normalization,
        residual_grid: residuals.chunks(n_t).map(|c| c.to_vec()).collect(),
        radii,
        angles,
        annulus,
        stencil_spacing: spacing,
        converged,
    }
}

/// Residual of the polar five-point Laplacian for a pointwise function.
pub fn laplacian_residual<F>(
    f: F,
    annulus: Annulus,
    spacing: (f64, f64),
    samples: (usize, usize),
) -> Result<HarmonicityReport, VerifyError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let (h_r, h_t) = spacing;
    annulus.validate(h_r)?;
    let (radii, angles) = sample_axes(&annulus, samples)?;
    let n_t = angles.len();
    let pairs: Vec<(f64, f64)> = (0..radii.len() * n_t)
        .into_par_iter()
        .map(|k| {
            let (r, t) = (radii[k / n_t], angles[k % n_t]);
            let c = f(r, t);
            let res = stencil(c, f(r + h_r, t), f(r - h_r, t), f(r, t + h_t), f(r, t - h_t), r, h_r, h_t);
            (res, c)
        })
        .collect();
    let (residuals, magnitudes): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(VerifyError::NonFinite("laplacian residual".into()));
    }
    Ok(assemble(radii, angles, residuals, magnitudes, true, annulus, spacing))
}

/// Residual on a computed field, using its own grid spacing. The radial
/// axis must be uniform; angles wrap when they cover a full turn evenly,
/// otherwise edge columns are skipped.
pub fn laplacian_residual_field(field: &Field, annulus: Annulus) -> Result<HarmonicityReport, VerifyError> {
    let g = &field.grid;
    let radii = g.radii();
    let angles = g.angles();
    if radii.len() < 3 || angles.len() < 3 {
        return Err(VerifyError::InvalidSpec("field grid too small for a stencil".into()));
    }
    let h_r = radii[1] - radii[0];
    if radii.windows(2).any(|w| ((w[1] - w[0]) - h_r).abs() > 1e-12) {
        return Err(VerifyError::InvalidSpec("field radii must be evenly spaced".into()));
    }
    let h_t = angles[1] - angles[0];
    let periodic = g.is_periodic_uniform();
    if !periodic && angles.windows(2).any(|w| ((w[1] - w[0]) - h_t).abs() > 1e-12) {
        return Err(VerifyError::InvalidSpec("field angles must be evenly spaced".into()));
    }
    annulus.validate(h_r)?;
    let n_t = angles.len();
    let rows: Vec<usize> = (1..radii.len() - 1).filter(|&i| annulus.contains(radii[i])).collect();
    if rows.is_empty() {
        return Err(VerifyError::InvalidSpec("no grid radius with a full stencil inside the annulus".into()));
    }
    let cols: Vec<usize> = if periodic { (0..n_t).collect() } else { (1..n_t - 1).collect() };
    let mut residuals = Vec::with_capacity(rows.len() * cols.len());
    let mut magnitudes = Vec::with_capacity(rows.len() * cols.len());
    let mut converged = true;
    for &i in &rows {
        for &j in &cols {
            let jp = (j + 1) % n_t;
            let jm = (j + n_t - 1) % n_t;
            let c = field.value(i, j);
            let res = stencil(
                c,
                field.value(i + 1, j),
                field.value(i - 1, j),
                field.value(i, jp),
                field.value(i, jm),
                radii[i],
                h_r,
                h_t,
            );
            for (ii, jj) in [(i, j), (i + 1, j), (i - 1, j), (i, jp), (i, jm)] {
                converged &= field.converged[ii * n_t + jj];
            }
            residuals.push(res);
            magnitudes.push(c);
        }
    }
    let r_axis = rows.iter().map(|&i| radii[i]).collect();
    let t_axis = cols.iter().map(|&j| angles[j]).collect();
    Ok(assemble(r_axis, t_axis, residuals, magnitudes, converged, annulus, (h_r, h_t)))
}

/// Residual of `prefactor · T f` where every stencil value is integrated
/// under one shared quadrature, so quadrature noise does not get amplified
/// by `1/h²`.
pub fn q_transform_harmonicity<S: DiskSource + ?Sized>(
    f: &S,
    prefactor: f64,
    annulus: Annulus,
    spacing: (f64, f64),
    samples: (usize, usize),
    spec: &QuadratureSpec,
) -> Result<HarmonicityReport, VerifyError> {
    let (h_r, h_t) = spacing;
    annulus.validate(h_r)?;
    spec.validate()?;
    let (radii, angles) = sample_axes(&annulus, samples)?;
    let n_t = angles.len();
    let results: Vec<Result<(f64, f64, bool), TransformError>> = (0..radii.len() * n_t)
        .into_par_iter()
        .map(|k| {
            let (r, t) = (radii[k / n_t], angles[k % n_t]);
            let lap = transforms::q_transform_stencil_laplacian(f, r, t, h_r, h_t, prefactor, spec)?;
            let val = transforms::q_transform_point(f, r, t, prefactor, spec)?;
            Ok((lap.value, val.value, lap.converged && val.converged))
        })
        .collect();
    let mut residuals = Vec::with_capacity(results.len());
    let mut magnitudes = Vec::with_capacity(results.len());
    let mut converged = true;
    for res in results {
        let (lap, val, ok) = res?;
        residuals.push(lap);
        magnitudes.push(val);
        converged &= ok;
    }
    Ok(assemble(radii, angles, residuals, magnitudes, converged, annulus, spacing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::SourceFunction;
    use crate::transforms::EvaluationGrid;

    #[test]
    fn exact_harmonic_sample() {
        let rep =
            laplacian_residual(|r, t| r * r * (2.0 * t).cos(), Annulus::default(), (1e-3, 5e-4), (8, 16)).unwrap();
        assert!(rep.max_abs_residual <= 1e-6, "{}", rep.max_abs_residual);
    }

    #[test]
    fn r_squared_has_laplacian_four() {
        let rep = laplacian_residual(|r, _| r * r, Annulus::default(), (1e-2, 1e-2), (5, 8)).unwrap();
        for row in &rep.residual_grid {
            for v in row {
                assert!((v - 4.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn stencil_is_second_order() {
        let samples: [fn(f64, f64) -> f64; 3] = [
            |r, t| r.powi(5) * (5.0 * t).cos(),
            |r, t| r.powi(3) * (3.0 * t).sin(),
            |r, t| (r * t.cos()).exp() * (r * t.sin()).cos(),
        ];
        for u in samples {
            let coarse = laplacian_residual(u, Annulus::default(), (0.02, 0.04), (8, 16)).unwrap();
            let fine = laplacian_residual(u, Annulus::default(), (0.01, 0.02), (8, 16)).unwrap();
            let ratio = coarse.max_abs_residual / fine.max_abs_residual;
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn stencil_must_avoid_origin() {
        let a = Annulus { r_min: 0.01, r_max: 0.5 };
        assert!(matches!(
            laplacian_residual(|r, _| r, a, (0.01, 0.01), (3, 3)),
            Err(VerifyError::StencilOutOfRange { .. })
        ));
    }

    #[test]
    fn field_residual_of_disk_projection() {
        let spec = QuadratureSpec::default();
        let grid = EvaluationGrid::uniform(0.9, 19, 32).unwrap();
        let s = SourceFunction::char_disk(0.25).unwrap();
        let field = transforms::q_transform(&s, &grid, 1.0, &spec).unwrap();
        let rep = laplacian_residual_field(&field, Annulus::default()).unwrap();
        assert!(rep.max_normalized_residual < 1e-6, "{}", rep.max_normalized_residual);
    }
}
