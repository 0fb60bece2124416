use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kernels::{one_minus_cos, q_from_parts};
use crate::quadrature::{Integrand2D, SingularRadialMap};
use crate::sources::Density;

/// Kernel integrated against a source density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `Q(rρ, θ − φ)`.
    Q,
    /// `(2Q(rρ, θ − φ) − 1) / π`.
    Projection,
    /// Constant 1: the plain area integral.
    Unit,
    /// Five-point polar Laplacian of `Q(·ρ, · − φ)` taken at `(r, θ)`.
    Stencil { h_r: f64, h_theta: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum RadialMap {
    Linear,
    Singular(SingularRadialMap),
}

impl RadialMap {
    /// `(ρ, dρ/dx)` with the singular factor folded into the Jacobian.
    #[inline]
    fn apply(&self, x: f64) -> (f64, f64) {
        match self {
            RadialMap::Linear => (x, 1.0),
            RadialMap::Singular(m) => (m.rho(x), m.jacobian()),
        }
    }

    fn rho_max(&self, x: (f64, f64)) -> f64 {
        match self {
            RadialMap::Linear => x.1,
            RadialMap::Singular(m) => m.rho(x.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Grading {
    Linear,
    /// Cubic clustering toward the lower end.
    Lo,
    /// Cubic clustering toward the upper end.
    Hi,
}

/// Parametrisation of an angular segment by `y`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AngularMap {
    grading: Grading,
    lo: f64,
    hi: f64,
}

impl AngularMap {
    pub(crate) fn linear(lo: f64, hi: f64) -> Self {
        Self { grading: Grading::Linear, lo, hi }
    }
    pub(crate) fn graded_lo(lo: f64, hi: f64) -> Self {
        Self { grading: Grading::Lo, lo, hi }
    }
    pub(crate) fn graded_hi(lo: f64, hi: f64) -> Self {
        Self { grading: Grading::Hi, lo, hi }
    }

    pub(crate) fn y_range(&self) -> (f64, f64) {
        match self.grading {
            Grading::Linear => (self.lo, self.hi),
            _ => (0.0, 1.0),
        }
    }

    /// `(φ, dφ/dy)`.
    #[inline]
    pub(crate) fn apply(&self, y: f64) -> (f64, f64) {
        let len = self.hi - self.lo;
        match self.grading {
            Grading::Linear => (y, 1.0),
            Grading::Lo => (self.lo + len * y * y * y, 3.0 * len * y * y),
            Grading::Hi => {
                let u = 1.0 - y;
                (self.hi - len * u * u * u, 3.0 * len * u * u)
            }
        }
    }
}

pub(crate) struct PieceIntegrand {
    r: f64,
    theta: f64,
    kind: KernelKind,
    density: Density,
    radial: RadialMap,
    angular: AngularMap,
}

impl PieceIntegrand {
    pub(crate) fn new(
        r: f64,
        theta: f64,
        kind: KernelKind,
        density: Density,
        radial: RadialMap,
        angular: AngularMap,
    ) -> Self {
        Self { r, theta, kind, density, radial, angular }
    }
}

struct AngularNode {
    phi: f64,
    weight: f64,
    omc: f64,
    sin: f64,
    // ψ + k and ψ − k, only for the stencil
    omc_p: f64,
    sin_p: f64,
    omc_m: f64,
    sin_m: f64,
}

impl Integrand2D<f64> for PieceIntegrand {
    fn eval_tensor(&self, xs: &[f64], ys: &[f64], out: &mut [f64]) {
        let k = match self.kind {
            KernelKind::Stencil { h_theta, .. } => h_theta,
            _ => 0.0,
        };
        let stencil = matches!(self.kind, KernelKind::Stencil { .. });
        let nodes: Vec<AngularNode> = ys
            .iter()
            .map(|&y| {
                let (phi, jac) = self.angular.apply(y);
                let psi = self.theta - phi;
                let (omc_p, sin_p, omc_m, sin_m) = if stencil {
                    (one_minus_cos(psi + k), (psi + k).sin(), one_minus_cos(psi - k), (psi - k).sin())
                } else {
                    (0.0, 0.0, 0.0, 0.0)
                };
                AngularNode {
                    phi,
                    weight: self.density.angular_value(phi) * jac,
                    omc: one_minus_cos(psi),
                    sin: psi.sin(),
                    omc_p,
                    sin_p,
                    omc_m,
                    sin_m,
                }
            })
            .collect();
        let ny = ys.len();
        let separable = self.density.is_separable();
        for (i, &x) in xs.iter().enumerate() {
            let (rho, jac) = self.radial.apply(x);
            let radial_weight = self.density.radial_regular(rho) * rho * jac;
            let s = self.r * rho;
            let row = &mut out[i * ny..(i + 1) * ny];
            for (o, n) in row.iter_mut().zip(&nodes) {
                let kernel = match self.kind {
                    KernelKind::Q => q_from_parts(s, n.omc, n.sin),
                    KernelKind::Projection => (2.0 * q_from_parts(s, n.omc, n.sin) - 1.0) / PI,
                    KernelKind::Unit => 1.0,
                    KernelKind::Stencil { h_r, h_theta } => {
                        let r = self.r;
                        let h2 = h_r * h_r;
                        let c_ang = 1.0 / (h_theta * h_theta * r * r);
                        let c_plus = 1.0 / h2 + 0.5 / (h_r * r);
                        let c_minus = 1.0 / h2 - 0.5 / (h_r * r);
                        let c0 = -2.0 / h2 - 2.0 * c_ang;
                        c_plus * q_from_parts((r + h_r) * rho, n.omc, n.sin)
                            + c_minus * q_from_parts((r - h_r) * rho, n.omc, n.sin)
                            + c0 * q_from_parts(s, n.omc, n.sin)
                            + c_ang * (q_from_parts(s, n.omc_p, n.sin_p) + q_from_parts(s, n.omc_m, n.sin_m))
                    }
                };
                let density = if separable { n.weight } else { self.density.regular(rho, n.phi) * n.weight };
                *o = radial_weight * density * kernel;
            }
        }
    }

    fn prefers_y_split(&self, x: (f64, f64), y: (f64, f64)) -> bool {
        if self.r * self.radial.rho_max(x) < 0.8 {
            return false;
        }
        let (a, _) = self.angular.apply(y.0);
        let (b, _) = self.angular.apply(y.1);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let margin = 4.0 * (1.0 - self.r * self.radial.rho_max(x)).max(1e-3);
        // shift θ into [lo − π, lo + π) before comparing
        let t = lo + (self.theta - lo + PI).rem_euclid(2.0 * PI) - PI;
        t >= lo - margin && t <= hi + margin
    }
}
