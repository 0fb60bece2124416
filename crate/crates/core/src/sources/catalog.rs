//! The fifteen figure definitions, each written out as data.
//!
//! Angles follow the `[−π, π)` convention; ranges such as `[0, 2π]` are
//! rewritten here. Prefactors are stored per case because the operator is
//! used both bare (prefactor 1) and with the `2/π` of the harmonic
//! representation.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use serde::Serialize;

use super::{AngularFactor, BoundaryFunction, RadialFactor, SourceError, SourceFunction};
use crate::kernels::KernelId;
use crate::quadrature::PolarRectangle;

pub const TWO_OVER_PI: f64 = 2.0 / PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonCase {
    pub boundary: BoundaryFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QCase {
    pub label: String,
    pub source: SourceFunction,
    pub prefactor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FigurePayload {
    KernelPlot {
        kernel: KernelId,
        radii: Vec<f64>,
    },
    Poisson(PoissonCase),
    Q(QCase),
    Paired {
        poisson: PoissonCase,
        q: QCase,
    },
    /// Several Q-transforms shown next to each other.
    SideBySide(Vec<QCase>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureCase {
    pub id: u32,
    pub description: String,
    pub payload: FigurePayload,
    /// Poisson figure this Q figure is compared against.
    pub companion: Option<u32>,
}

impl FigureCase {
    pub fn q_cases(&self) -> Vec<&QCase> {
        match &self.payload {
            FigurePayload::Q(q) => vec![q],
            FigurePayload::Paired { q, .. } => vec![q],
            FigurePayload::SideBySide(qs) => qs.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn poisson_cases(&self) -> Vec<&PoissonCase> {
        match &self.payload {
            FigurePayload::Poisson(p) => vec![p],
            FigurePayload::Paired { poisson, .. } => vec![poisson],
            _ => Vec::new(),
        }
    }

    /// Poisson/Q pair for the boundary-layer comparisons, resolving
    /// companions.
    pub fn comparison_pair(&self) -> Option<(PoissonCase, QCase)> {
        match (&self.payload, self.companion) {
            (FigurePayload::Paired { poisson, q }, _) => Some((poisson.clone(), q.clone())),
            (FigurePayload::Q(q), Some(c)) => {
                let other = figure_case(c).ok()?;
                let p = other.poisson_cases().first().map(|p| (*p).clone())?;
                Some((p, q.clone()))
            }
            _ => None,
        }
    }
}

fn rect(r_lo: f64, r_hi: f64, t_lo: f64, t_hi: f64) -> PolarRectangle {
    PolarRectangle::new(r_lo, r_hi, t_lo, t_hi).expect("catalog rectangles are valid")
}

fn q(label: &str, source: SourceFunction, prefactor: f64) -> QCase {
    QCase { label: label.into(), source, prefactor }
}

fn layer(angular: AngularFactor, t_lo: f64, t_hi: f64) -> SourceFunction {
    // the boundary-layer integrands carry an extra ρ besides the Jacobian
    SourceFunction::SeparableOnRect { radial: RadialFactor::RhoPower(1), angular, rect: rect(0.9, 1.0, t_lo, t_hi) }
}

fn figure_six_source() -> SourceFunction {
    SourceFunction::SeparableOnRect {
        radial: RadialFactor::PowOneMinusRho(0.25),
        angular: AngularFactor::Cos(1),
        rect: rect(0.75, 1.0, -FRAC_PI_6, FRAC_PI_6),
    }
}

fn figure_five_first() -> SourceFunction {
    SourceFunction::CharacteristicRect(rect(0.25, 0.5, 0.0, FRAC_PI_4))
}

/// Catalog entry for figure `id` (1 to 15).
pub fn figure_case(id: u32) -> Result<FigureCase, SourceError> {
    let (description, payload, companion) = match id {
        1 => (
            "Poisson kernel profiles at r = 0.5, 0.75, 0.85",
            FigurePayload::KernelPlot { kernel: KernelId::Poisson, radii: vec![0.5, 0.75, 0.85] },
            None,
        ),
        2 => (
            "Q kernel profiles at r = 0.5, 0.75",
            FigurePayload::KernelPlot { kernel: KernelId::Q, radii: vec![0.5, 0.75] },
            None,
        ),
        3 => (
            "Poisson integral of cos 2theta against the 2/pi Q-representation of rho^2 cos 2phi",
            FigurePayload::Paired {
                poisson: PoissonCase { boundary: BoundaryFunction::Cos(2) },
                q: q(
                    "q",
                    SourceFunction::SeparableOnRect {
                        radial: RadialFactor::RhoPower(2),
                        angular: AngularFactor::Cos(2),
                        rect: PolarRectangle::full_disk(),
                    },
                    TWO_OVER_PI,
                ),
            },
            None,
        ),
        4 => (
            "Q-transform of the characteristic function of the disk of radius 1/4",
            FigurePayload::Q(q("q", SourceFunction::CharacteristicDisk { radius: 0.25 }, 1.0)),
            None,
        ),
        5 => (
            "Q-transforms of one and of two characteristic polar rectangles",
            FigurePayload::SideBySide(vec![
                q("a", figure_five_first(), 1.0),
                q(
                    "b",
                    SourceFunction::WeightedSum(vec![
                        (1.0, figure_five_first()),
                        (1.0, SourceFunction::CharacteristicRect(rect(0.6, 0.8, 5.0 * FRAC_PI_6, PI))),
                    ]),
                    1.0,
                ),
            ]),
            None,
        ),
        6 => (
            "Q-transform of cos(phi)/(1-rho)^(1/4) on [3/4,1]x[-pi/6,pi/6]",
            FigurePayload::Q(q("q", figure_six_source(), 1.0)),
            None,
        ),
        7 => (
            "Figure 6 source plus cos(phi)/(1-rho)^(3/8) on [7/8,1]x[5pi/6,pi]",
            FigurePayload::Q(q(
                "q",
                SourceFunction::WeightedSum(vec![
                    (1.0, figure_six_source()),
                    (
                        1.0,
                        SourceFunction::SeparableOnRect {
                            radial: RadialFactor::PowOneMinusRho(0.375),
                            angular: AngularFactor::Cos(1),
                            rect: rect(0.875, 1.0, 5.0 * FRAC_PI_6, PI),
                        },
                    ),
                ]),
                1.0,
            )),
            None,
        ),
        8 => (
            "harmonic measure of the arc [-pi/6, pi/6]",
            FigurePayload::Poisson(PoissonCase {
                boundary: BoundaryFunction::CharacteristicArc(-FRAC_PI_6, FRAC_PI_6),
            }),
            None,
        ),
        9 => (
            "2/pi Q-transform of the characteristic function of [0.9,1]x[-pi/6,pi/6]",
            FigurePayload::Q(q(
                "q",
                SourceFunction::CharacteristicRect(rect(0.9, 1.0, -FRAC_PI_6, FRAC_PI_6)),
                TWO_OVER_PI,
            )),
            Some(8),
        ),
        10 => (
            "Poisson integral of |theta|",
            FigurePayload::Poisson(PoissonCase { boundary: BoundaryFunction::AbsTheta }),
            None,
        ),
        11 => (
            "2/pi Q-transform of rho |phi| on the layer [0.9,1]x[-pi,pi]",
            FigurePayload::Q(q("q", layer(AngularFactor::AbsPhi, -PI, PI), TWO_OVER_PI)),
            Some(10),
        ),
        12 => (
            "theta^2 on [-pi/6,pi/6]: Poisson integral against the layer Q-transform",
            FigurePayload::Paired {
                poisson: PoissonCase { boundary: BoundaryFunction::ThetaSquaredOnArc(-FRAC_PI_6, FRAC_PI_6) },
                q: q("q", layer(AngularFactor::PhiSquared, -FRAC_PI_6, FRAC_PI_6), TWO_OVER_PI),
            },
            None,
        ),
        13 => (
            "sin theta on [0,pi]: Poisson integral against the layer Q-transform",
            FigurePayload::Paired {
                poisson: PoissonCase { boundary: BoundaryFunction::SinOnArc(0.0, PI) },
                q: q("q", layer(AngularFactor::Sin(1), 0.0, PI), TWO_OVER_PI),
            },
            None,
        ),
        14 => (
            "|ln|theta|| on [0,pi]: Poisson integral against the layer Q-transform",
            FigurePayload::Paired {
                poisson: PoissonCase { boundary: BoundaryFunction::AbsLogAbsOnArc(0.0, PI) },
                q: q("q", layer(AngularFactor::AbsLogAbsPhi, 0.0, PI), TWO_OVER_PI),
            },
            None,
        ),
        15 => (
            "Q-transform of 10 exp(-10 (rho-0.5)^2) cos(phi) on [0.3,0.7]x[-pi/6,pi/6]",
            FigurePayload::Q(q(
                "q",
                SourceFunction::SeparableOnRect {
                    radial: RadialFactor::Gaussian { amp: 10.0, center: 0.5, rate: 10.0 },
                    angular: AngularFactor::Cos(1),
                    rect: rect(0.3, 0.7, -FRAC_PI_6, FRAC_PI_6),
                },
                1.0,
            )),
            None,
        ),
        other => return Err(SourceError::UnknownFigure(other)),
    };
    Ok(FigureCase { id, description: description.into(), payload, companion })
}

/// Every Q-transform source in the catalog, labelled `fig<id><label>`.
pub fn catalog_sources() -> Vec<(String, QCase)> {
    let mut out = Vec::new();
    for id in 1..=15 {
        let case = figure_case(id).expect("ids 1..=15 exist");
        let many = case.q_cases().len() > 1;
        for qc in case.q_cases() {
            let name = if many { format!("fig{id}{}", qc.label) } else { format!("fig{id}") };
            out.push((name, qc.clone()));
        }
    }
    out
}

/// Every boundary function in the catalog.
pub fn catalog_boundaries() -> Vec<(String, BoundaryFunction)> {
    let mut out = Vec::new();
    for id in 1..=15 {
        let case = figure_case(id).expect("ids 1..=15 exist");
        for p in case.poisson_cases() {
            out.push((format!("fig{id}"), p.boundary.clone()));
        }
    }
    out
}
