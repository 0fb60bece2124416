use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernels::{self, one_minus_cos, poisson_from_parts, q_from_parts};
use crate::quadrature::{integrate_box, integrate_interval, PointFn, QuadratureSpec};
use crate::sources::catalog::catalog_sources;
use crate::sources::{AngularFactor, DiskSource, RadialFactor, SourceFunction};
use crate::transforms;
use crate::PolarRectangle;

use super::VerifyError;

/// Kernel used by the normalization checks. `SignFlipped` exists as a
/// negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFixture {
    #[default]
    Exact,
    SignFlipped,
}

impl KernelFixture {
    fn q(&self, s: f64, omc: f64, sin: f64) -> f64 {
        match self {
            KernelFixture::Exact => q_from_parts(s, omc, sin),
            KernelFixture::SignFlipped => -q_from_parts(s, omc, sin),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Largest evaluation radius used by the checks.
    pub r_max: f64,
    pub n_radii: usize,
    pub n_angles: usize,
    pub quadrature: QuadratureSpec,
    pub kernel_fixture: KernelFixture,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            r_max: 0.9,
            n_radii: 5,
            n_angles: 5,
            quadrature: QuadratureSpec::default(),
            kernel_fixture: KernelFixture::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub records: Vec<InvariantRecord>,
    pub all_passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &InvariantRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn record(id: &str, description: &str, measured: f64, threshold: f64) -> InvariantRecord {
    InvariantRecord {
        id: id.into(),
        description: description.into(),
        measured,
        threshold,
        passed: measured.is_finite() && measured <= threshold,
    }
}

type Check = fn(&SuiteConfig) -> Result<InvariantRecord, VerifyError>;

const CHECKS: &[Check] = &[
    q_normalization,
    poisson_normalization,
    q_symmetry,
    q_series,
    poisson_positivity,
    bergman_hermitian,
    center_identity,
    reproduces_rho_cos,
    projection_of_one,
    analytic_constant,
];

/// Runs every check. Checks are independent; a check that errors is
/// recorded as failed with a non-finite measurement.
pub fn run_invariant_suite(config: &SuiteConfig) -> SuiteReport {
    let records: Vec<InvariantRecord> = CHECKS
        .par_iter()
        .enumerate()
        .map(|(k, check)| {
            check(config).unwrap_or_else(|e| InvariantRecord {
                id: format!("check_{k}"),
                description: format!("check raised an error: {e}"),
                measured: f64::NAN,
                threshold: 0.0,
                passed: false,
            })
        })
        .collect();
    let all_passed = records.iter().all(|r| r.passed);
    SuiteReport { config: config.clone(), records, all_passed }
}

fn sample_points(config: &SuiteConfig) -> Vec<(f64, f64)> {
    let nr = config.n_radii.max(1);
    let na = config.n_angles.max(1);
    let mut out = Vec::with_capacity(nr * na);
    for i in 0..nr {
        let r = if nr == 1 { config.r_max } else { config.r_max * i as f64 / (nr - 1) as f64 };
        for j in 0..na {
            out.push((r, -PI + 2.0 * PI * (j as f64 + 0.5) / na as f64));
        }
    }
    out
}

fn spec_for(config: &SuiteConfig) -> QuadratureSpec {
    QuadratureSpec { max_eval_radius: config.quadrature.max_eval_radius.max(config.r_max), ..config.quadrature }
}

fn q_normalization(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let mut worst: f64 = 0.0;
    for (r, t) in sample_points(config) {
        let g = PointFn(|rho: f64, phi: f64| {
            let psi = t - phi;
            config.kernel_fixture.q(r * rho, one_minus_cos(psi), psi.sin()) * rho
        });
        let res = integrate_box(&g, (0.0, 1.0), (-PI, PI), &spec)?;
        worst = worst.max((res.value / PI - 1.0).abs());
    }
    Ok(record("q_normalization", "(1/pi) * area integral of Q(r rho, theta - phi) equals 1", worst, 1e-6))
}

fn poisson_normalization(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let mut worst: f64 = 0.0;
    for (r, t) in sample_points(config) {
        let res = integrate_interval(
            |phi: f64| poisson_from_parts(r, one_minus_cos(t - phi)),
            -PI,
            PI,
            spec.nodes_angular,
            spec.adaptive_tol,
            spec.max_depth,
        )?;
        worst = worst.max((res.value / (2.0 * PI) - 1.0).abs());
    }
    Ok(record("poisson_normalization", "(1/2pi) * circle integral of P_r equals 1", worst, 1e-9))
}

fn q_symmetry(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let mut worst: f64 = 0.0;
    for (s, psi) in sample_points(config) {
        let a = kernels::q_kernel(s, psi)?;
        let b = kernels::q_kernel(s, -psi)?;
        let c = kernels::q_kernel(s, psi + 2.0 * PI)?;
        worst = worst.max(((a - b).abs() + (a - c).abs()) / a.abs().max(1.0));
    }
    Ok(record("q_symmetry", "Q is even and 2pi-periodic in the angle", worst, 1e-12))
}

fn q_series(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let mut worst: f64 = 0.0;
    for (r, psi) in sample_points(config) {
        let s = r.min(0.6);
        let series: f64 = (0..400).map(|n| (n + 1) as f64 * s.powi(n) * (n as f64 * psi).cos()).sum();
        let q = kernels::q_kernel(s, psi)?;
        worst = worst.max((q - series).abs() / series.abs().max(1.0));
    }
    Ok(record("q_series", "Q matches its power series sum (n+1) s^n cos(n psi)", worst, 1e-10))
}

fn poisson_positivity(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let mut min = f64::INFINITY;
    for (r, t) in sample_points(config) {
        min = min.min(kernels::poisson_kernel(r, t)?);
    }
    // measured is the negated minimum so that "≤ threshold" means positive
    let mut rec = record("poisson_positivity", "Poisson kernel is strictly positive", -min, 0.0);
    rec.passed = min > 0.0;
    Ok(rec)
}

fn bergman_hermitian(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let pts: Vec<Complex64> =
        sample_points(config).into_iter().map(|(r, t)| Complex64::from_polar(r.min(0.95), t)).collect();
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.5] {
        for (k, z) in pts.iter().enumerate() {
            let w = pts[(k * 7 + 3) % pts.len()];
            let kz = kernels::analytic_bergman_kernel(
                kernels::ComplexPoint::interior(z.re, z.im)?,
                kernels::ComplexPoint::interior(w.re, w.im)?,
                alpha,
            )?;
            let kw = kernels::analytic_bergman_kernel(
                kernels::ComplexPoint::interior(w.re, w.im)?,
                kernels::ComplexPoint::interior(z.re, z.im)?,
                alpha,
            )?;
            // strip the weight (1 − |w|²)^α carried by the second argument
            let kz = kz / (1.0 - w.norm_sqr()).powf(alpha);
            let kw = kw / (1.0 - z.norm_sqr()).powf(alpha);
            worst = worst.max((kz - kw.conj()).norm() / kz.norm().max(1.0));
        }
    }
    Ok(record("bergman_hermitian", "unweighted kernel (1 - z conj(w))^-(2+alpha) is Hermitian", worst, 1e-12))
}

fn center_identity(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let mut worst: f64 = 0.0;
    for (_, case) in catalog_sources() {
        let plain = transforms::source_integral(&case.source, &spec)?.value;
        for t in [-2.0, 0.0, 1.0] {
            let v = transforms::q_transform_point(&case.source, 0.0, t, 1.0, &spec)?.value;
            worst = worst.max((v - plain).abs());
        }
    }
    Ok(record("center_identity", "transform at the origin equals the plain area integral", worst, 1e-8))
}

fn rho_cos() -> SourceFunction {
    SourceFunction::separable(RadialFactor::RhoPower(1), AngularFactor::Cos(1), PolarRectangle::full_disk())
        .expect("valid source")
}

fn reproduces_rho_cos(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let f = rho_cos();
    let mut worst: f64 = 0.0;
    for (r, t) in sample_points(config) {
        let v = transforms::q_transform_point(&f, r, t, 2.0 / PI, &spec)?.value;
        worst = worst.max((v - r * t.cos()).abs());
    }
    Ok(record("reproduces_rho_cos", "(2/pi) T(rho cos phi) equals r cos theta", worst, 1e-6))
}

fn projection_of_one(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let one = SourceFunction::char_disk(1.0).expect("valid radius");
    let pieces = one.pieces();
    let mut worst: f64 = 0.0;
    for (r, t) in sample_points(config) {
        let v = transforms::integrate_pieces(&pieces, r, t, transforms::KernelKind::Projection, &spec)?.value;
        worst = worst.max((v - 1.0).abs());
    }
    Ok(record("projection_of_one", "the projection fixes the constant function", worst, 1e-6))
}

fn analytic_constant(config: &SuiteConfig) -> Result<InvariantRecord, VerifyError> {
    let spec = spec_for(config);
    let z = kernels::ComplexPoint::interior(0.3, 0.2)?;
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.5] {
        let v = transforms::analytic_rep(&transforms::AnalyticTestFunction::Monomial(0), alpha, z, &spec)?.value;
        worst = worst.max((v - Complex64::new(1.0, 0.0)).norm());
    }
    Ok(record("analytic_constant", "weighted analytic representation reproduces 1", worst, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let rep = run_invariant_suite(&SuiteConfig::default());
        for r in &rep.records {
            assert!(r.passed, "{r:?}");
        }
        assert!(rep.all_passed);
    }

    #[test]
    fn sign_flip_is_caught() {
        let cfg = SuiteConfig { kernel_fixture: KernelFixture::SignFlipped, ..Default::default() };
        let rep = run_invariant_suite(&cfg);
        assert!(!rep.all_passed);
        let failed: Vec<_> = rep.failures().map(|r| r.id.as_str()).collect();
        assert_eq!(failed, vec!["q_normalization"]);
    }
}
