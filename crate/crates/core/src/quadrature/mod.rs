//! Adaptive tensor Gauss-Legendre quadrature over polar rectangles.
//!
//! Every panel is integrated three times: with the full `(n_r, n_a)` rule
//! and with the node count halved in each direction separately. The two
//! differences give a per-direction error estimate; the panel is accepted
//! when their sum is below `adaptive_tol`, and otherwise bisected along
//! the direction with the larger estimate. Accepted panels are summed in
//! depth-first order, so results never depend on scheduling.
//!
//! The Jacobian `ρ` of the polar measure is always applied here, never by
//! integrands.

pub mod gauss;

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gauss::GaussRule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand is not finite at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("singularity exponent {0} must lie in (0, 1)")]
    InvalidExponent(f64),
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

/// `{(ρ, φ) : r_lo ≤ ρ ≤ r_hi, theta_lo ≤ φ ≤ theta_hi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RectRepr", into = "RectRepr")]
pub struct PolarRectangle {
    r_lo: f64,
    r_hi: f64,
    theta_lo: f64,
    theta_hi: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RectRepr {
    r: [f64; 2],
    theta: [f64; 2],
}

impl TryFrom<RectRepr> for PolarRectangle {
    type Error = QuadratureError;
    fn try_from(v: RectRepr) -> Result<Self, Self::Error> {
        PolarRectangle::new(v.r[0], v.r[1], v.theta[0], v.theta[1])
    }
}

impl From<PolarRectangle> for RectRepr {
    fn from(p: PolarRectangle) -> Self {
        RectRepr { r: [p.r_lo, p.r_hi], theta: [p.theta_lo, p.theta_hi] }
    }
}

impl PolarRectangle {
    pub fn new(r_lo: f64, r_hi: f64, theta_lo: f64, theta_hi: f64) -> Result<Self, QuadratureError> {
        let all_finite = [r_lo, r_hi, theta_lo, theta_hi].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(QuadratureError::InvalidRegion("non-finite bound".into()));
        }
        if !(0.0 <= r_lo && r_lo < r_hi && r_hi <= 1.0) {
            return Err(QuadratureError::InvalidRegion(format!(
                "radial bounds must satisfy 0 <= r_lo < r_hi <= 1, got [{r_lo}, {r_hi}]"
            )));
        }
        if !(theta_lo < theta_hi && theta_hi - theta_lo <= 2.0 * PI * (1.0 + 1e-15)) {
            return Err(QuadratureError::InvalidRegion(format!(
                "angular bounds must satisfy theta_lo < theta_hi <= theta_lo + 2pi, got [{theta_lo}, {theta_hi}]"
            )));
        }
        Ok(Self { r_lo, r_hi, theta_lo, theta_hi })
    }

    /// `[0, 1] × [−π, π]`.
    pub fn full_disk() -> Self {
        Self { r_lo: 0.0, r_hi: 1.0, theta_lo: -PI, theta_hi: PI }
    }

    /// Centered disk of the given radius, `[0, radius] × [−π, π]`.
    pub fn disk(radius: f64) -> Result<Self, QuadratureError> {
        Self::new(0.0, radius, -PI, PI)
    }

    pub fn r_lo(&self) -> f64 {
        self.r_lo
    }
    pub fn r_hi(&self) -> f64 {
        self.r_hi
    }
    pub fn theta_lo(&self) -> f64 {
        self.theta_lo
    }
    pub fn theta_hi(&self) -> f64 {
        self.theta_hi
    }

    pub fn angular_width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.r_hi * self.r_hi - self.r_lo * self.r_lo) * self.angular_width()
    }

    pub fn is_full_circle(&self) -> bool {
        self.angular_width() >= 2.0 * PI * (1.0 - 1e-15)
    }

    /// True when `(ρ, φ)` lies in the closed rectangle, with `φ` taken modulo 2π.
    pub fn contains(&self, rho: f64, phi: f64) -> bool {
        if rho < self.r_lo || rho > self.r_hi {
            return false;
        }
        if self.is_full_circle() {
            return true;
        }
        let shifted = self.theta_lo + (phi - self.theta_lo).rem_euclid(2.0 * PI);
        shifted <= self.theta_hi
    }

    pub fn rotated(&self, delta: f64) -> Self {
        Self { theta_lo: self.theta_lo + delta, theta_hi: self.theta_hi + delta, ..*self }
    }

    pub fn with_radial(&self, r_lo: f64, r_hi: f64) -> Result<Self, QuadratureError> {
        Self::new(r_lo, r_hi, self.theta_lo, self.theta_hi)
    }

    pub fn with_angular(&self, theta_lo: f64, theta_hi: f64) -> Result<Self, QuadratureError> {
        Self::new(self.r_lo, self.r_hi, theta_lo, theta_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub nodes_radial: usize,
    pub nodes_angular: usize,
    /// Absolute error target per accepted panel.
    pub adaptive_tol: f64,
    pub max_depth: u32,
    /// Flags an integrand factor `(1 − ρ)^{−β}` that the caller has left out
    /// of the integrand; it is absorbed by a change of variables.
    pub singularity_exponent: Option<f64>,
    /// Evaluation radii above this are refused by the transforms.
    pub max_eval_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_radial: 32,
            nodes_angular: 64,
            adaptive_tol: 1e-9,
            max_depth: 12,
            singularity_exponent: None,
            max_eval_radius: 0.99,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.nodes_radial < 2 || self.nodes_angular < 2 {
            return Err(QuadratureError::InvalidSpec("node counts must be at least 2".into()));
        }
        if !(self.adaptive_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("adaptive_tol must be positive".into()));
        }
        if !(1..=30).contains(&self.max_depth) {
            return Err(QuadratureError::InvalidSpec("max_depth must be in 1..=30".into()));
        }
        if let Some(beta) = self.singularity_exponent {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(QuadratureError::InvalidExponent(beta));
            }
        }
        if !(self.max_eval_radius > 0.0 && self.max_eval_radius < 1.0) {
            return Err(QuadratureError::InvalidSpec("max_eval_radius must be in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.adaptive_tol = tol;
        self
    }

    pub fn with_nodes(mut self, radial: usize, angular: usize) -> Self {
        self.nodes_radial = radial;
        self.nodes_angular = angular;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<V = f64> {
    pub value: V,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl<V: QuadValue> QuadratureResult<V> {
    fn zero() -> Self {
        Self { value: V::default(), error_estimate: 0.0, panels_used: 0, converged: true }
    }

    /// Accumulates another result, keeping the bookkeeping consistent.
    pub fn absorb(&mut self, other: &QuadratureResult<V>, weight: f64) {
        self.value = self.value + other.value * weight;
        self.error_estimate += other.error_estimate * weight.abs();
        self.panels_used += other.panels_used;
        self.converged &= other.converged;
    }
}

/// Scalar types the adaptive core can accumulate.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// An integrand that can be sampled on a tensor product of nodes.
///
/// `out[i * ys.len() + j]` receives `g(xs[i], ys[j])`. Implementations
/// that can hoist work out of the inner loop (trigonometry in `y`, say)
/// should do so.
pub trait Integrand2D<V>: Sync {
    fn eval_tensor(&self, xs: &[f64], ys: &[f64], out: &mut [V]);

    /// Hint that a panel holds a sharp feature along `y`, so `y` should be
    /// bisected first whenever it is unresolved.
    fn prefers_y_split(&self, _x: (f64, f64), _y: (f64, f64)) -> bool {
        false
    }
}

/// Adapter turning a point closure into an [`Integrand2D`].
pub struct PointFn<F>(pub F);

impl<V, F> Integrand2D<V> for PointFn<F>
where
    F: Fn(f64, f64) -> V + Sync,
{
    fn eval_tensor(&self, xs: &[f64], ys: &[f64], out: &mut [V]) {
        let ny = ys.len();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                out[i * ny + j] = (self.0)(x, y);
            }
        }
    }
}

struct Scratch<V> {
    xs: Vec<f64>,
    wx: Vec<f64>,
    ys: Vec<f64>,
    wy: Vec<f64>,
    out: Vec<V>,
}

impl<V: QuadValue> Scratch<V> {
    fn new() -> Self {
        Self { xs: Vec::new(), wx: Vec::new(), ys: Vec::new(), wy: Vec::new(), out: Vec::new() }
    }

    fn tensor<G: Integrand2D<V> + ?Sized>(
        &mut self,
        g: &G,
        rx: &GaussRule,
        ry: &GaussRule,
        x: (f64, f64),
        y: (f64, f64),
    ) -> Result<V, QuadratureError> {
        rx.mapped(x.0, x.1, &mut self.xs, &mut self.wx);
        ry.mapped(y.0, y.1, &mut self.ys, &mut self.wy);
        let ny = self.ys.len();
        self.out.clear();
        self.out.resize(self.xs.len() * ny, V::default());
        g.eval_tensor(&self.xs, &self.ys, &mut self.out);
        let mut total = V::default();
        for (i, wx) in self.wx.iter().enumerate() {
            let row = &self.out[i * ny..(i + 1) * ny];
            let mut acc = V::default();
            for (j, (v, wy)) in row.iter().zip(&self.wy).enumerate() {
                if !v.finite() {
                    return Err(QuadratureError::NonFinite { x: self.xs[i], y: self.ys[j] });
                }
                acc = acc + *v * *wy;
            }
            total = total + acc * *wx;
        }
        Ok(total)
    }
}

/// Adaptive integration of `g(x, y)` over `[x0, x1] × [y0, y1]` with no
/// Jacobian. `x` uses `nodes_radial`, `y` uses `nodes_angular`.
pub fn integrate_box<V, G>(
    g: &G,
    x: (f64, f64),
    y: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<V>, QuadratureError>
where
    V: QuadValue,
    G: Integrand2D<V> + ?Sized,
{
    spec.validate()?;
    if !(x.0 < x.1 && y.0 < y.1) {
        return Err(QuadratureError::InvalidRegion(format!("degenerate box {x:?} x {y:?}")));
    }
    let fine_x = gauss::rule(spec.nodes_radial);
    let fine_y = gauss::rule(spec.nodes_angular);
    let coarse_x = gauss::rule((spec.nodes_radial / 2).max(1));
    let coarse_y = gauss::rule((spec.nodes_angular / 2).max(1));
    let tol = spec.adaptive_tol;

    let mut scratch = Scratch::new();
    let mut result = QuadratureResult::<V>::zero();
    let mut stack = vec![(x, y, 0u32)];
    while let Some((px, py, depth)) = stack.pop() {
        let fine = scratch.tensor(g, &fine_x, &fine_y, px, py)?;
        let cx = scratch.tensor(g, &coarse_x, &fine_y, px, py)?;
        let cy = scratch.tensor(g, &fine_x, &coarse_y, px, py)?;
        let ex = (fine - cx).magnitude();
        let ey = (fine - cy).magnitude();
        let err = ex + ey;
        if !err.is_finite() {
            return Err(QuadratureError::NonFinite { x: px.0, y: py.0 });
        }
        if err <= tol || depth >= spec.max_depth {
            result.value = result.value + fine;
            result.error_estimate += err;
            result.panels_used += 1;
            result.converged &= err <= tol;
            continue;
        }
        let split_y = ey >= ex || (ey > 0.5 * tol && g.prefers_y_split(px, py));
        // Push the upper half first so the lower half is visited first.
        if split_y {
            let mid = 0.5 * (py.0 + py.1);
            stack.push((px, (mid, py.1), depth + 1));
            stack.push((px, (py.0, mid), depth + 1));
        } else {
            let mid = 0.5 * (px.0 + px.1);
            stack.push(((mid, px.1), py, depth + 1));
            stack.push(((px.0, mid), py, depth + 1));
        }
    }
    Ok(result)
}

/// Adaptive 1-D Gauss-Legendre with `|G_n − G_{n/2}|` panel estimates.
pub fn integrate_interval<V, F>(
    f: F,
    a: f64,
    b: f64,
    nodes: usize,
    tol: f64,
    max_depth: u32,
) -> Result<QuadratureResult<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if nodes < 2 || !(tol > 0.0) {
        return Err(QuadratureError::InvalidSpec("need nodes >= 2 and tol > 0".into()));
    }
    if !(a < b) {
        return Err(QuadratureError::InvalidRegion(format!("degenerate interval [{a}, {b}]")));
    }
    let fine = gauss::rule(nodes);
    let coarse = gauss::rule(nodes / 2);
    let apply = |rule: &GaussRule, lo: f64, hi: f64| -> Result<V, QuadratureError> {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = V::default();
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + half * x;
            let v = f(t);
            if !v.finite() {
                return Err(QuadratureError::NonFinite { x: t, y: 0.0 });
            }
            acc = acc + v * *w;
        }
        Ok(acc * half)
    };
    let mut result = QuadratureResult::<V>::zero();
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let g_fine = apply(&fine, lo, hi)?;
        let g_coarse = apply(&coarse, lo, hi)?;
        let err = (g_fine - g_coarse).magnitude();
        if err <= tol || depth >= max_depth {
            result.value = result.value + g_fine;
            result.error_estimate += err;
            result.panels_used += 1;
            result.converged &= err <= tol;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi, depth + 1));
        stack.push((lo, mid, depth + 1));
    }
    Ok(result)
}

/// `∫∫_region g(ρ, φ) ρ dρ dφ`.
///
/// When `spec.singularity_exponent` is `Some(β)` the integrand is taken to
/// be the regular part and the factor `(1 − ρ)^{−β}` is supplied by
/// [`integrate_singular_radial`].
pub fn integrate_polar<F>(
    integrand: F,
    region: &PolarRectangle,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if let Some(beta) = spec.singularity_exponent {
        let plain = QuadratureSpec { singularity_exponent: None, ..*spec };
        return integrate_singular_radial(integrand, beta, region, &plain);
    }
    let g = PointFn(|rho: f64, phi: f64| integrand(rho, phi) * rho);
    integrate_box(&g, (region.r_lo, region.r_hi), (region.theta_lo, region.theta_hi), spec)
}

/// Maps `t ∈ [t_lo, t_hi]` onto `ρ = 1 − t^{1/(1−β)}`; under this map
/// `(1 − ρ)^{−β} dρ = −dt / (1 − β)`.
#[derive(Debug, Clone, Copy)]
pub struct SingularRadialMap {
    pub beta: f64,
    inv: f64,
}

impl SingularRadialMap {
    pub fn new(beta: f64) -> Result<Self, QuadratureError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(QuadratureError::InvalidExponent(beta));
        }
        Ok(Self { beta, inv: 1.0 / (1.0 - beta) })
    }

    /// `t`-interval covering `ρ ∈ [r_lo, r_hi]`, in increasing order.
    pub fn t_range(&self, r_lo: f64, r_hi: f64) -> (f64, f64) {
        let e = 1.0 - self.beta;
        ((1.0 - r_hi).powf(e), (1.0 - r_lo).powf(e))
    }

    #[inline]
    pub fn rho(&self, t: f64) -> f64 {
        1.0 - t.powf(self.inv)
    }

    /// Constant Jacobian `1 / (1 − β)` of the absorbed measure.
    #[inline]
    pub fn jacobian(&self) -> f64 {
        self.inv
    }
}

/// `∫∫_region g(ρ, φ) (1 − ρ)^{−β} ρ dρ dφ` via `t = (1 − ρ)^{1−β}`,
/// which leaves a bounded integrand in `t`.
pub fn integrate_singular_radial<F>(
    integrand_regular: F,
    beta: f64,
    region: &PolarRectangle,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let map = SingularRadialMap::new(beta)?;
    let (t_lo, t_hi) = map.t_range(region.r_lo, region.r_hi);
    let jac = map.jacobian();
    let g = PointFn(|t: f64, phi: f64| {
        let rho = map.rho(t);
        integrand_regular(rho, phi) * rho * jac
    });
    let plain = QuadratureSpec { singularity_exponent: None, ..*spec };
    integrate_box(&g, (t_lo, t_hi), (region.theta_lo, region.theta_hi), &plain)
}

/// One-dimensional variant: `∫_a^b h(x) (1 − x)^{−β} dx` with `b ≤ 1`.
pub fn integrate_singular_1d<F>(
    h: F,
    beta: f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let map = SingularRadialMap::new(beta)?;
    if !(a < b && b <= 1.0) {
        return Err(QuadratureError::InvalidRegion(format!("need a < b <= 1, got [{a}, {b}]")));
    }
    let (t_lo, t_hi) = map.t_range(a, b);
    let jac = map.jacobian();
    integrate_interval(|t| h(map.rho(t)) * jac, t_lo, t_hi, spec.nodes_radial, spec.adaptive_tol, spec.max_depth)
}

/// Plain midpoint tensor rule with the Jacobian `ρ`. Slow and simple; it
/// exists to provide independent reference values.
pub fn midpoint_oracle<F>(
    integrand: F,
    region: &PolarRectangle,
    n_radial: usize,
    n_angular: usize,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64, f64) -> f64,
{
    if n_radial == 0 || n_angular == 0 {
        return Err(QuadratureError::InvalidSpec("midpoint counts must be positive".into()));
    }
    let hr = (region.r_hi - region.r_lo) / n_radial as f64;
    let ht = region.angular_width() / n_angular as f64;
    let mut total = 0.0;
    for i in 0..n_radial {
        let rho = region.r_lo + (i as f64 + 0.5) * hr;
        let mut row = 0.0;
        for j in 0..n_angular {
            let phi = region.theta_lo + (j as f64 + 0.5) * ht;
            let v = integrand(rho, phi);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { x: rho, y: phi });
            }
            row += v;
        }
        total += row * rho;
    }
    Ok(total * hr * ht)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::q_kernel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_disk_area() {
        let res = integrate_polar(|_, _| 1.0, &PolarRectangle::full_disk(), &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(res.value, PI, epsilon = 1e-13);
        assert!(res.converged);
    }

    #[test]
    fn quarter_disk_area() {
        let region = PolarRectangle::new(0.0, 0.25, 0.0, 2.0 * PI).unwrap();
        let res = integrate_polar(|_, _| 1.0, &region, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(res.value, PI / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn q_normalization_full_disk() {
        let res = integrate_polar(
            |rho, phi| q_kernel(0.5 * rho, 0.3 - phi).unwrap() / PI,
            &PolarRectangle::full_disk(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(res.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn singular_one_dimensional_self_test() {
        let res = integrate_singular_1d(|_| 1.0, 0.5, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(res.value, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn singular_radial_closed_form() {
        // ∫_{3/4}^{1} ρ (1−ρ)^{−1/4} dρ = (4/3)(1/4)^{3/4} − (4/7)(1/4)^{7/4}
        let expected = 4.0 / 3.0 * 0.25f64.powf(0.75) - 4.0 / 7.0 * 0.25f64.powf(1.75);
        let region = PolarRectangle::new(0.75, 1.0, 0.0, 1.0).unwrap();
        let spec = QuadratureSpec::default().with_tol(1e-14);
        let res = integrate_singular_radial(|_, _| 1.0, 0.25, &region, &spec).unwrap();
        assert_abs_diff_eq!(res.value, expected, epsilon = 1e-12);
        let via_spec =
            integrate_polar(|_, _| 1.0, &region, &QuadratureSpec { singularity_exponent: Some(0.25), ..spec }).unwrap();
        assert_eq!(via_spec.value, res.value);
    }

    #[test]
    fn midpoint_oracle_examples() {
        let disk = PolarRectangle::full_disk();
        let area = midpoint_oracle(|_, _| 1.0, &disk, 1000, 1000).unwrap();
        assert_abs_diff_eq!(area, PI, epsilon = 1e-5);
        let odd = midpoint_oracle(|rho, phi| rho * phi.cos(), &disk, 1000, 1000).unwrap();
        assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PolarRectangle::new(0.5, 0.25, 0.0, 1.0).is_err());
        assert!(PolarRectangle::new(0.0, 1.5, 0.0, 1.0).is_err());
        assert!(PolarRectangle::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PolarRectangle::new(0.0, 1.0, 0.0, 7.0).is_err());
        let region = PolarRectangle::full_disk();
        assert!(matches!(
            integrate_singular_radial(|_, _| 1.0, 1.0, &region, &QuadratureSpec::default()),
            Err(QuadratureError::InvalidExponent(_))
        ));
        assert!(matches!(
            integrate_polar(|_, _| f64::NAN, &region, &QuadratureSpec::default()),
            Err(QuadratureError::NonFinite { .. })
        ));
        let bad = QuadratureSpec { max_depth: 0, ..Default::default() };
        assert!(integrate_polar(|_, _| 1.0, &region, &bad).is_err());
    }

    #[test]
    fn unconverged_flag_when_depth_exhausted() {
        // a jump inside the region cannot be resolved to 1e-15 in 3 levels
        let spec = QuadratureSpec { max_depth: 3, adaptive_tol: 1e-15, ..Default::default() };
        let res = integrate_polar(|rho, _| if rho < 0.3333 { 1.0 } else { 0.0 }, &PolarRectangle::full_disk(), &spec)
            .unwrap();
        assert!(!res.converged);
        assert!(res.panels_used > 1);
    }

    #[test]
    fn contains_wraps_angles() {
        let r = PolarRectangle::new(0.2, 0.4, 5.0 * PI / 6.0, PI).unwrap();
        assert!(r.contains(0.3, -PI));
        assert!(r.contains(0.3, PI - 0.1 + 2.0 * PI));
        assert!(!r.contains(0.3, 0.0));
        assert!(!r.contains(0.5, PI));
    }
}
