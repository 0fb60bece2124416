//! Closed-form evaluation of the three reproducing kernels on the unit disk.
//!
//! * the Poisson kernel `P(r, θ) = (1 − r²) / (1 − 2r cos θ + r²)`,
//! * the harmonic Bergman kernel
//!   `Q(s, ψ) = (1 − 2s cos ψ + s² cos 2ψ) / (1 − 2s cos ψ + s²)²`,
//!   which equals `Re (1 − s e^{iψ})^{-2}`,
//! * the weighted analytic Bergman kernel
//!   `((1+α)/π) (1 − |w|²)^α (1 − z w̄)^{−(2+α)}`.
//!
//! Denominators are formed from `(1 − s)²` and the haversine term
//! `2 s (1 − cos ψ) = 4 s sin²(ψ/2)`, so no cancellation occurs when
//! `s → 1` and `ψ → 0` simultaneously.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("radius {0} outside [0, 1)")]
    RadiusOutOfDomain(f64),
    #[error("point ({re}, {im}) is not inside the open unit disk")]
    PointOutsideDisk { re: f64, im: f64 },
    #[error("weight exponent alpha = {0} must exceed -1")]
    InvalidAlpha(f64),
}

/// A point of the closed unit disk in polar form.
///
/// `theta` is kept exactly as given; every kernel is 2π-periodic in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    /// Any point with `0 ≤ r ≤ 1`.
    pub fn new(r: f64, theta: f64) -> Result<Self, KernelError> {
        if !(0.0..=1.0).contains(&r) || !theta.is_finite() {
            return Err(KernelError::RadiusOutOfDomain(r));
        }
        Ok(Self { r, theta })
    }

    /// A point strictly inside the disk.
    pub fn interior(r: f64, theta: f64) -> Result<Self, KernelError> {
        if !(0.0..1.0).contains(&r) || !theta.is_finite() {
            return Err(KernelError::RadiusOutOfDomain(r));
        }
        Ok(Self { r, theta })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// A point of the open unit disk in Cartesian form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn interior(re: f64, im: f64) -> Result<Self, KernelError> {
        let p = Self { re, im };
        if !(p.modulus() < 1.0) {
            return Err(KernelError::PointOutsideDisk { re, im });
        }
        Ok(p)
    }

    pub fn modulus(self) -> f64 {
        (self.re * self.re + self.im * self.im).sqrt()
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.as_complex()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelId {
    Poisson,
    Q,
    AnalyticBergman { alpha: f64 },
}

impl KernelId {
    pub fn analytic_bergman(alpha: f64) -> Result<Self, KernelError> {
        if !(alpha > -1.0) {
            return Err(KernelError::InvalidAlpha(alpha));
        }
        Ok(Self::AnalyticBergman { alpha })
    }
}

fn check_radius(r: f64) -> Result<(), KernelError> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(KernelError::RadiusOutOfDomain(r))
    }
}

/// `1 − cos ψ`, computed without cancellation near `ψ = 0`.
#[inline]
pub(crate) fn one_minus_cos(psi: f64) -> f64 {
    let h = (0.5 * psi).sin();
    2.0 * h * h
}

/// Q from the pre-computed angular quantities `1 − cos ψ` and `sin ψ`.
///
/// With `a = 1 − s cos ψ = (1 − s) + s (1 − cos ψ)` and `b = s sin ψ`,
/// `|1 − s e^{iψ}|² = a² + b²` and the numerator is `a² − b²`.
#[inline]
pub(crate) fn q_from_parts(s: f64, omc: f64, sin_psi: f64) -> f64 {
    let a = (1.0 - s) + s * omc;
    let b = s * sin_psi;
    let a2 = a * a;
    let b2 = b * b;
    let d = a2 + b2;
    (a2 - b2) / (d * d)
}

#[inline]
pub(crate) fn poisson_from_parts(r: f64, omc: f64) -> f64 {
    let om = 1.0 - r;
    (1.0 - r * r) / (om * om + 2.0 * r * omc)
}

/// Poisson kernel of the unit disk.
pub fn poisson_kernel(r: f64, theta: f64) -> Result<f64, KernelError> {
    check_radius(r)?;
    Ok(poisson_from_parts(r, one_minus_cos(theta)))
}

/// Harmonic Bergman kernel `Q(s, ψ)`; `s` is the product `rρ` of the
/// evaluation and integration radii.
pub fn q_kernel(s: f64, psi: f64) -> Result<f64, KernelError> {
    check_radius(s)?;
    Ok(q_from_parts(s, one_minus_cos(psi), psi.sin()))
}

/// Weighted analytic Bergman kernel with weight `(1 − |w|²)^α`.
pub fn analytic_bergman_kernel(z: ComplexPoint, w: ComplexPoint, alpha: f64) -> Result<Complex64, KernelError> {
    if !(alpha > -1.0) {
        return Err(KernelError::InvalidAlpha(alpha));
    }
    for p in [z, w] {
        if !(p.modulus() < 1.0) {
            return Err(KernelError::PointOutsideDisk { re: p.re, im: p.im });
        }
    }
    Ok(analytic_bergman_unchecked(z.as_complex(), w.as_complex(), alpha))
}

#[inline]
pub(crate) fn analytic_bergman_unchecked(z: Complex64, w: Complex64, alpha: f64) -> Complex64 {
    let weight = (1.0 + alpha) / PI * (1.0 - w.norm_sqr()).powf(alpha);
    // Re(1 − z w̄) > 0 inside the disk, so the principal branch is continuous here.
    let base = Complex64::new(1.0, 0.0) - z * w.conj();
    base.powf(-(2.0 + alpha)) * weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_kernel(0.0, 1.234).unwrap(), 1.0);
        assert_abs_diff_eq!(poisson_kernel(0.5, 0.0).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(poisson_kernel(0.5, PI).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_kernel(0.0, 2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(q_kernel(0.5, 0.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(q_kernel(0.5, PI).unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        // numerator 1 − 1.8 cos 1 + 0.81 cos 2 ≈ −0.3097
        let numerator = 1.0 - 1.8 * 1f64.cos() + 0.81 * 2f64.cos();
        assert!(numerator < -0.30 && numerator > -0.32);
        assert!(q_kernel(0.9, 1.0).unwrap() < 0.0);
    }

    #[test]
    fn q_matches_textbook_formula() {
        for &s in &[0.1, 0.5, 0.8, 0.95] {
            for k in 0..50 {
                let psi = -PI + 2.0 * PI * k as f64 / 50.0;
                let c = psi.cos();
                let d = 1.0 - 2.0 * s * c + s * s;
                let direct = (1.0 - 2.0 * s * c + s * s * (2.0 * psi).cos()) / (d * d);
                let q = q_kernel(s, psi).unwrap();
                assert!((q - direct).abs() <= 1e-12 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(poisson_kernel(1.0, 0.0).is_err());
        assert!(poisson_kernel(-0.1, 0.0).is_err());
        assert!(q_kernel(1.0, 0.0).is_err());
        assert!(q_kernel(f64::NAN, 0.0).is_err());
        let z = ComplexPoint { re: 1.0, im: 0.0 };
        let w = ComplexPoint { re: 0.0, im: 0.0 };
        assert!(analytic_bergman_kernel(z, w, 0.0).is_err());
        assert!(analytic_bergman_kernel(w, w, -1.0).is_err());
        assert!(ComplexPoint::interior(0.8, 0.6).is_err());
        assert!(PolarPoint::interior(1.0, 0.0).is_err());
        assert!(PolarPoint::new(1.0, 0.0).is_ok());
        assert!(KernelId::analytic_bergman(-1.5).is_err());
    }

    #[test]
    fn analytic_bergman_examples() {
        let o = ComplexPoint::interior(0.0, 0.0).unwrap();
        let v = analytic_bergman_kernel(o, o, 0.0).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0);

        let h = ComplexPoint::interior(0.5, 0.0).unwrap();
        let v = analytic_bergman_kernel(h, h, 0.0).unwrap();
        assert_abs_diff_eq!(v.re, 16.0 / (9.0 * PI), epsilon = 1e-14);
    }

    #[test]
    fn analytic_bergman_matches_binomial_series() {
        // (1 − x)^{-3} = Σ (n+1)(n+2)/2 xⁿ, truncated at 60 terms
        let z = ComplexPoint::interior(0.3, 0.4).unwrap();
        let w = ComplexPoint::interior(0.2, -0.1).unwrap();
        let x = z.as_complex() * w.as_complex().conj();
        let mut series = Complex64::new(0.0, 0.0);
        let mut xn = Complex64::new(1.0, 0.0);
        for n in 0..60 {
            series += xn * ((n + 1) * (n + 2)) as f64 / 2.0;
            xn *= x;
        }
        let expected = series * (2.0 / PI) * (1.0 - w.as_complex().norm_sqr());
        let got = analytic_bergman_kernel(z, w, 1.0).unwrap();
        assert!((got - expected).norm() < 1e-13);
    }

    #[test]
    fn peak_closed_form() {
        for k in 0..99 {
            let s = k as f64 / 100.0;
            let q0 = q_kernel(s, 0.0).unwrap();
            let expected = 1.0 / ((1.0 - s) * (1.0 - s));
            assert!((q0 - expected).abs() <= 1e-12 * expected);
        }
    }
}
