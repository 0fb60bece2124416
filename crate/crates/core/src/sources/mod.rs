//! Declarative integrands on the disk and boundary functions on the circle.
//!
//! Both kinds decompose into *pieces*: a weight, a support (a polar
//! rectangle or a circular arc) and a density that is smooth on the
//! support apart from listed angular breakpoints and an optional radial
//! factor `(1 − ρ)^{−β}`. The transforms integrate piece by piece, so
//! discontinuities of characteristic functions never sit inside a panel.

pub mod catalog;
pub mod config;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::PolarPoint;
use crate::quadrature::PolarRectangle;

pub use catalog::{figure_case, FigureCase, FigurePayload, PoissonCase, QCase};
pub use config::{parse_source_config, ParsedConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error("source is not finite at (r = {r}, theta = {theta})")]
    NonFinite { r: f64, theta: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("unknown figure id {0}; figures are numbered 1 to 15")]
    UnknownFigure(u32),
}

impl SourceError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation { field: field.into(), message: message.into() }
    }
}

/// Angle reduced to `[−π, π)`.
#[inline]
pub fn wrap_angle(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Radial factor of a separable source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialFactor {
    One,
    /// `ρ^k`
    RhoPower(u32),
    /// `(1 − ρ)^{−β}`, stored as `β`
    PowOneMinusRho(f64),
    /// `amp · exp(−rate (ρ − center)²)`
    Gaussian {
        amp: f64,
        center: f64,
        rate: f64,
    },
}

impl RadialFactor {
    /// Value with any `(1 − ρ)^{−β}` factor left out.
    #[inline]
    pub fn regular(&self, rho: f64) -> f64 {
        match *self {
            RadialFactor::One | RadialFactor::PowOneMinusRho(_) => 1.0,
            RadialFactor::RhoPower(k) => rho.powi(k as i32),
            RadialFactor::Gaussian { amp, center, rate } => {
                let d = rho - center;
                amp * (-rate * d * d).exp()
            }
        }
    }

    pub fn singular_exponent(&self) -> Option<f64> {
        match *self {
            RadialFactor::PowOneMinusRho(beta) => Some(beta),
            _ => None,
        }
    }

    pub fn value(&self, rho: f64) -> f64 {
        match *self {
            RadialFactor::PowOneMinusRho(beta) => (1.0 - rho).powf(-beta),
            _ => self.regular(rho),
        }
    }

    fn validate(&self, field: &str) -> Result<(), SourceError> {
        match *self {
            RadialFactor::One | RadialFactor::RhoPower(_) => Ok(()),
            RadialFactor::PowOneMinusRho(beta) => {
                if beta > 0.0 && beta < 0.5 {
                    Ok(())
                } else {
                    Err(SourceError::invalid(
                        field,
                        format!("exponent {beta} must lie in (0, 1/2) for a square-integrable source"),
                    ))
                }
            }
            RadialFactor::Gaussian { amp, center, rate } => {
                if amp.is_finite() && center.is_finite() && rate.is_finite() && rate >= 0.0 {
                    Ok(())
                } else {
                    Err(SourceError::invalid(field, "gaussian needs finite amp, center and rate >= 0"))
                }
            }
        }
    }
}

/// Angular factor, a function of `φ ∈ [−π, π)`; arguments outside are wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularFactor {
    One,
    Cos(u32),
    Sin(u32),
    AbsPhi,
    PhiSquared,
    AbsLogAbsPhi,
}

impl AngularFactor {
    #[inline]
    pub fn value(&self, phi: f64) -> f64 {
        match *self {
            AngularFactor::One => 1.0,
            AngularFactor::Cos(n) => (n as f64 * phi).cos(),
            AngularFactor::Sin(n) => (n as f64 * phi).sin(),
            AngularFactor::AbsPhi => wrap_angle(phi).abs(),
            AngularFactor::PhiSquared => {
                let w = wrap_angle(phi);
                w * w
            }
            AngularFactor::AbsLogAbsPhi => wrap_angle(phi).abs().ln().abs(),
        }
    }

    fn is_periodic(&self) -> bool {
        matches!(self, AngularFactor::One | AngularFactor::Cos(_) | AngularFactor::Sin(_))
    }

    /// Points of `[−π, π]` where the factor is not smooth, with a flag for
    /// integrable singularities (as opposed to kinks or jumps).
    pub(crate) fn canonical_breakpoints(&self) -> Vec<(f64, bool)> {
        let mut out = Vec::new();
        match self {
            AngularFactor::AbsPhi => out.push((0.0, false)),
            AngularFactor::AbsLogAbsPhi => {
                out.extend([(-1.0, false), (0.0, true), (1.0, false)]);
            }
            _ => {}
        }
        if !self.is_periodic() {
            out.push((PI, false));
        }
        out
    }
}

/// Sub-interval of an angular range on which a density is smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSegment {
    pub lo: f64,
    pub hi: f64,
    pub singular_lo: bool,
    pub singular_hi: bool,
}

/// Splits `[lo, hi]` at every breakpoint of `factor` (modulo 2π).
pub fn angular_segments(factor: &AngularFactor, lo: f64, hi: f64) -> Vec<AngularSegment> {
    let mut cuts: Vec<(f64, bool)> = Vec::new();
    for (b, singular) in factor.canonical_breakpoints() {
        let k_min = ((lo - b) / (2.0 * PI)).floor() as i64 - 1;
        let k_max = ((hi - b) / (2.0 * PI)).ceil() as i64 + 1;
        for k in k_min..=k_max {
            let p = b + 2.0 * PI * k as f64;
            // tolerance for catalog bounds that equal a breakpoint up to rounding
            let eps = 1e-12 * (1.0 + p.abs());
            if p >= lo - eps && p <= hi + eps {
                cuts.push((p.clamp(lo, hi), singular));
            }
        }
    }
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = vec![(lo, false)];
    for (p, s) in cuts {
        let last = points.last_mut().expect("non-empty");
        if (p - last.0).abs() <= 1e-12 * (1.0 + p.abs()) {
            last.1 |= s;
        } else {
            points.push((p, s));
        }
    }
    let last = points.last_mut().expect("non-empty");
    if (hi - last.0).abs() <= 1e-12 * (1.0 + hi.abs()) {
        last.0 = hi;
    } else {
        points.push((hi, false));
    }
    points
        .windows(2)
        .map(|w| AngularSegment { lo: w[0].0, hi: w[1].0, singular_lo: w[0].1, singular_hi: w[1].1 })
        .collect()
}

/// Density carried by one integration piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Separable {
        radial: RadialFactor,
        angular: AngularFactor,
    },
    /// Bilinear interpolation of corner values over a single grid cell;
    /// `values[a][b]` sits at `(r.a, theta.b)`.
    Bilinear {
        r: (f64, f64),
        theta: (f64, f64),
        values: [[f64; 2]; 2],
    },
}

impl Density {
    pub fn angular_factor(&self) -> AngularFactor {
        match self {
            Density::Separable { angular, .. } => *angular,
            Density::Bilinear { .. } => AngularFactor::One,
        }
    }

    pub fn singular_exponent(&self) -> Option<f64> {
        match self {
            Density::Separable { radial, .. } => radial.singular_exponent(),
            Density::Bilinear { .. } => None,
        }
    }

    /// Radial part without the singular factor.
    #[inline]
    pub fn radial_regular(&self, rho: f64) -> f64 {
        match self {
            Density::Separable { radial, .. } => radial.regular(rho),
            Density::Bilinear { .. } => 1.0,
        }
    }

    #[inline]
    pub fn angular_value(&self, phi: f64) -> f64 {
        match self {
            Density::Separable { angular, .. } => angular.value(phi),
            Density::Bilinear { .. } => 1.0,
        }
    }

    /// Product value without the singular factor.
    #[inline]
    pub fn regular(&self, rho: f64, phi: f64) -> f64 {
        match self {
            Density::Separable { radial, angular } => radial.regular(rho) * angular.value(phi),
            Density::Bilinear { r, theta, values } => {
                let u = (rho - r.0) / (r.1 - r.0);
                let v = (phi - theta.0) / (theta.1 - theta.0);
                (1.0 - u) * ((1.0 - v) * values[0][0] + v * values[0][1])
                    + u * ((1.0 - v) * values[1][0] + v * values[1][1])
            }
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, Density::Separable { .. })
    }
}

/// Weighted density on a polar rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub weight: f64,
    pub rect: PolarRectangle,
    pub density: Density,
}

impl Piece {
    pub fn value(&self, rho: f64, phi: f64) -> f64 {
        let base = self.density.regular(rho, phi);
        match self.density.singular_exponent() {
            Some(beta) => base * (1.0 - rho).powf(-beta),
            None => base,
        }
    }
}

/// Anything that can be integrated against a kernel over the disk.
pub trait DiskSource: Sync {
    fn pieces(&self) -> Vec<Piece>;
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "config::SourceDoc", try_from = "config::SourceDoc")]
pub enum SourceFunction {
    CharacteristicDisk { radius: f64 },
    CharacteristicRect(PolarRectangle),
    SeparableOnRect { radial: RadialFactor, angular: AngularFactor, rect: PolarRectangle },
    WeightedSum(Vec<(f64, SourceFunction)>),
}

impl SourceFunction {
    pub fn char_disk(radius: f64) -> Result<Self, SourceError> {
        let s = Self::CharacteristicDisk { radius };
        s.validate("radius")?;
        Ok(s)
    }

    pub fn separable(radial: RadialFactor, angular: AngularFactor, rect: PolarRectangle) -> Result<Self, SourceError> {
        let s = Self::SeparableOnRect { radial, angular, rect };
        s.validate("source")?;
        Ok(s)
    }

    pub fn validate(&self, path: &str) -> Result<(), SourceError> {
        match self {
            SourceFunction::CharacteristicDisk { radius } => {
                if *radius > 0.0 && *radius <= 1.0 {
                    Ok(())
                } else {
                    Err(SourceError::invalid(path, format!("disk radius {radius} must be in (0, 1]")))
                }
            }
            SourceFunction::CharacteristicRect(_) => Ok(()),
            SourceFunction::SeparableOnRect { radial, .. } => radial.validate(&format!("{path}.radial")),
            SourceFunction::WeightedSum(terms) => {
                if terms.is_empty() {
                    return Err(SourceError::invalid(path, "weighted sum needs at least one term"));
                }
                for (i, (c, s)) in terms.iter().enumerate() {
                    if !c.is_finite() {
                        return Err(SourceError::invalid(format!("{path}.terms[{i}].coefficient"), "not finite"));
                    }
                    s.validate(&format!("{path}.terms[{i}].source"))?;
                }
                Ok(())
            }
        }
    }

    /// Pointwise value. Characteristic variants give exactly 0 or 1.
    pub fn evaluate(&self, p: PolarPoint) -> Result<f64, SourceError> {
        let mut total = 0.0;
        for piece in self.pieces() {
            if piece.rect.contains(p.r, p.theta) {
                let v = piece.value(p.r, p.theta);
                if !v.is_finite() {
                    return Err(SourceError::NonFinite { r: p.r, theta: p.theta });
                }
                total += piece.weight * v;
            }
        }
        Ok(total)
    }

    /// Rotates the support by `delta`. Only defined when every angular
    /// factor is `One`, because angular factors are written in absolute `φ`.
    pub fn rotated(&self, delta: f64) -> Option<Self> {
        Some(match self {
            SourceFunction::CharacteristicDisk { .. } => self.clone(),
            SourceFunction::CharacteristicRect(r) => SourceFunction::CharacteristicRect(r.rotated(delta)),
            SourceFunction::SeparableOnRect { radial, angular: AngularFactor::One, rect } => {
                SourceFunction::SeparableOnRect {
                    radial: *radial,
                    angular: AngularFactor::One,
                    rect: rect.rotated(delta),
                }
            }
            SourceFunction::SeparableOnRect { .. } => return None,
            SourceFunction::WeightedSum(terms) => SourceFunction::WeightedSum(
                terms.iter().map(|(c, s)| s.rotated(delta).map(|s| (*c, s))).collect::<Option<Vec<_>>>()?,
            ),
        })
    }

    fn collect_pieces(&self, weight: f64, out: &mut Vec<Piece>) {
        let unit = Density::Separable { radial: RadialFactor::One, angular: AngularFactor::One };
        match self {
            SourceFunction::CharacteristicDisk { radius } => out.push(Piece {
                weight,
                rect: PolarRectangle::disk(*radius).expect("validated radius"),
                density: unit,
            }),
            SourceFunction::CharacteristicRect(rect) => out.push(Piece { weight, rect: *rect, density: unit }),
            SourceFunction::SeparableOnRect { radial, angular, rect } => out.push(Piece {
                weight,
                rect: *rect,
                density: Density::Separable { radial: *radial, angular: *angular },
            }),
            SourceFunction::WeightedSum(terms) => {
                for (c, s) in terms {
                    s.collect_pieces(weight * c, out);
                }
            }
        }
    }
}

impl DiskSource for SourceFunction {
    fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        self.collect_pieces(1.0, &mut out);
        out
    }

    fn describe(&self) -> String {
        config::to_inline_string(&config::SourceDoc::from(self.clone()))
    }
}

/// Weighted density on a circular arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPiece {
    pub weight: f64,
    pub lo: f64,
    pub hi: f64,
    pub density: AngularFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "config::SourceDoc", try_from = "config::SourceDoc")]
pub enum BoundaryFunction {
    CharacteristicArc(f64, f64),
    AbsTheta,
    ThetaSquaredOnArc(f64, f64),
    SinOnArc(f64, f64),
    AbsLogAbsOnArc(f64, f64),
    Cos(u32),
    ConstantOne,
    WeightedSum(Vec<(f64, BoundaryFunction)>),
}

impl BoundaryFunction {
    pub fn validate(&self, path: &str) -> Result<(), SourceError> {
        let arc = |a: f64, b: f64| {
            let eps = 1e-12;
            if a.is_finite() && b.is_finite() && -PI - eps <= a && a < b && b <= PI + eps {
                Ok(())
            } else {
                Err(SourceError::invalid(
                    format!("{path}.arc"),
                    format!("arc [{a}, {b}] must satisfy -pi <= a < b <= pi"),
                ))
            }
        };
        match self {
            BoundaryFunction::CharacteristicArc(a, b)
            | BoundaryFunction::ThetaSquaredOnArc(a, b)
            | BoundaryFunction::SinOnArc(a, b)
            | BoundaryFunction::AbsLogAbsOnArc(a, b) => arc(*a, *b),
            BoundaryFunction::AbsTheta | BoundaryFunction::Cos(_) | BoundaryFunction::ConstantOne => Ok(()),
            BoundaryFunction::WeightedSum(terms) => {
                if terms.is_empty() {
                    return Err(SourceError::invalid(path, "weighted sum needs at least one term"));
                }
                for (i, (c, f)) in terms.iter().enumerate() {
                    if !c.is_finite() {
                        return Err(SourceError::invalid(format!("{path}.terms[{i}].coefficient"), "not finite"));
                    }
                    f.validate(&format!("{path}.terms[{i}].function"))?;
                }
                Ok(())
            }
        }
    }

    pub fn pieces(&self) -> Vec<ArcPiece> {
        let mut out = Vec::new();
        self.collect(1.0, &mut out);
        out
    }

    fn collect(&self, weight: f64, out: &mut Vec<ArcPiece>) {
        let mut push = |lo: f64, hi: f64, density: AngularFactor| out.push(ArcPiece { weight, lo, hi, density });
        match *self {
            BoundaryFunction::CharacteristicArc(a, b) => push(a, b, AngularFactor::One),
            BoundaryFunction::AbsTheta => push(-PI, PI, AngularFactor::AbsPhi),
            BoundaryFunction::ThetaSquaredOnArc(a, b) => push(a, b, AngularFactor::PhiSquared),
            BoundaryFunction::SinOnArc(a, b) => push(a, b, AngularFactor::Sin(1)),
            BoundaryFunction::AbsLogAbsOnArc(a, b) => push(a, b, AngularFactor::AbsLogAbsPhi),
            BoundaryFunction::Cos(n) => push(-PI, PI, AngularFactor::Cos(n)),
            BoundaryFunction::ConstantOne => push(-PI, PI, AngularFactor::One),
            BoundaryFunction::WeightedSum(ref terms) => {
                for (c, f) in terms {
                    f.collect(weight * c, out);
                }
            }
        }
    }

    /// Value at `θ` (wrapped to `[−π, π)`); arcs are closed.
    pub fn evaluate(&self, theta: f64) -> Result<f64, SourceError> {
        let t = wrap_angle(theta);
        let mut total = 0.0;
        for p in self.pieces() {
            let inside = (t >= p.lo && t <= p.hi) || (p.hi >= PI && t == -PI);
            if inside {
                let v = p.density.value(t);
                if !v.is_finite() {
                    return Err(SourceError::NonFinite { r: 1.0, theta });
                }
                total += p.weight * v;
            }
        }
        Ok(total)
    }

    pub fn describe(&self) -> String {
        config::to_inline_string(&config::SourceDoc::from(self.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(r: f64, t: f64) -> PolarPoint {
        PolarPoint::new(r, t).unwrap()
    }

    #[test]
    fn characteristic_disk_values() {
        let s = SourceFunction::char_disk(0.25).unwrap();
        assert_eq!(s.evaluate(pt(0.1, 2.0)).unwrap(), 1.0);
        assert_eq!(s.evaluate(pt(0.3, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_bump_peak() {
        let s = figure_case(15).unwrap().q_cases()[0].source.clone();
        assert_abs_diff_eq!(s.evaluate(pt(0.5, 0.0)).unwrap(), 10.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_source_is_non_finite_on_the_rim() {
        let s = figure_case(6).unwrap().q_cases()[0].source.clone();
        assert!(matches!(s.evaluate(pt(1.0, 0.0)), Err(SourceError::NonFinite { .. })));
        let inside = s.evaluate(pt(0.9, 0.1)).unwrap();
        assert_abs_diff_eq!(inside, 0.1f64.cos() / 0.1f64.powf(0.25), epsilon = 1e-12);
    }

    #[test]
    fn beta_bound_enforced() {
        let rect = PolarRectangle::new(0.5, 1.0, 0.0, 1.0).unwrap();
        assert!(SourceFunction::separable(RadialFactor::PowOneMinusRho(0.5), AngularFactor::One, rect).is_err());
        assert!(SourceFunction::separable(RadialFactor::PowOneMinusRho(0.49), AngularFactor::One, rect).is_ok());
    }

    #[test]
    fn segments_split_at_kinks_and_singularities() {
        let segs = angular_segments(&AngularFactor::AbsLogAbsPhi, 0.0, PI);
        assert_eq!(segs.len(), 2);
        assert!(segs[0].singular_lo && !segs[0].singular_hi);
        assert_abs_diff_eq!(segs[0].hi, 1.0);
        let segs = angular_segments(&AngularFactor::AbsPhi, -PI, PI);
        assert_eq!(segs.len(), 2);
        let segs = angular_segments(&AngularFactor::Cos(3), -PI, PI);
        assert_eq!(segs.len(), 1);
        let segs = angular_segments(&AngularFactor::PhiSquared, 2.0, 4.0);
        assert_eq!(segs.len(), 2);
        assert_abs_diff_eq!(segs[0].hi, PI);
    }

    #[test]
    fn boundary_values() {
        let f = BoundaryFunction::CharacteristicArc(-PI / 6.0, PI / 6.0);
        assert_eq!(f.evaluate(0.0).unwrap(), 1.0);
        assert_eq!(f.evaluate(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(BoundaryFunction::AbsTheta.evaluate(-2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(BoundaryFunction::AbsTheta.evaluate(2.0 * PI - 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert!(BoundaryFunction::AbsLogAbsOnArc(0.0, PI).evaluate(0.0).is_err());
        assert!(BoundaryFunction::CharacteristicArc(0.5, 0.2).validate("f").is_err());
    }

    #[test]
    fn wrap_angle_range() {
        for k in -20..20 {
            let w = wrap_angle(0.37 * k as f64);
            assert!((-PI..PI).contains(&w));
        }
        assert_eq!(wrap_angle(PI), -PI);
    }

    #[test]
    fn rotation_only_for_unit_angular_factor() {
        let rect = PolarRectangle::new(0.2, 0.4, 0.0, 1.0).unwrap();
        let s = SourceFunction::CharacteristicRect(rect);
        let r = s.rotated(0.5).unwrap();
        assert_eq!(r.evaluate(pt(0.3, 1.4)).unwrap(), 1.0);
        let c = SourceFunction::separable(RadialFactor::One, AngularFactor::Cos(1), rect).unwrap();
        assert!(c.rotated(0.5).is_none());
    }
}
