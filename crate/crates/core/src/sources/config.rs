//! Text schema for user-defined sources and boundary functions.
//!
//! One TOML document describes one function. The `type` key selects the
//! variant:
//!
//! ```toml
//! # a separable source on a polar rectangle
//! type = "separable"
//! radial = { pow_one_minus_rho = 0.25 }   # (1 - rho)^(-0.25)
//! angular = { cos = 1 }
//! rect = { r = [0.75, 1.0], theta = [-0.5235987755982989, 0.5235987755982989] }
//! ```
//!
//! Source types: `char_disk {radius}`, `char_rect {r, theta}`,
//! `separable {radial, angular, rect}`, `weighted_sum {terms}`.
//! Boundary types: `char_arc {arc}`, `abs_theta`, `theta_squared_on_arc {arc}`,
//! `sin_on_arc {arc}`, `abs_log_abs_on_arc {arc}`, `cos {n}`, `constant_one`,
//! `boundary_sum {terms}`. Sum terms are `{coefficient, source}` tables.
//!
//! Radial factors: `"one"`, `{rho_power = k}`, `{pow_one_minus_rho = beta}`,
//! `{gaussian = {amp, center, rate}}`. Angular factors: `"one"`, `{cos = n}`,
//! `{sin = n}`, `"abs_phi"`, `"phi_squared"`, `"abs_log_abs_phi"`.

use serde::{Deserialize, Serialize};

use super::{AngularFactor, BoundaryFunction, RadialFactor, SourceError, SourceFunction};
use crate::quadrature::PolarRectangle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectDoc {
    pub r: [f64; 2],
    pub theta: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coefficient: f64,
    pub source: SourceDoc,
}

/// Raw, unvalidated form of a configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceDoc {
    CharDisk { radius: f64 },
    CharRect { r: [f64; 2], theta: [f64; 2] },
    Separable { radial: RadialFactor, angular: AngularFactor, rect: RectDoc },
    WeightedSum { terms: Vec<TermDoc> },
    CharArc { arc: [f64; 2] },
    AbsTheta,
    ThetaSquaredOnArc { arc: [f64; 2] },
    SinOnArc { arc: [f64; 2] },
    AbsLogAbsOnArc { arc: [f64; 2] },
    Cos { n: u32 },
    ConstantOne,
    BoundarySum { terms: Vec<TermDoc> },
}

impl SourceDoc {
    pub fn is_boundary(&self) -> bool {
        !matches!(
            self,
            SourceDoc::CharDisk { .. }
                | SourceDoc::CharRect { .. }
                | SourceDoc::Separable { .. }
                | SourceDoc::WeightedSum { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Source(SourceFunction),
    Boundary(BoundaryFunction),
}

fn rect_from(r: [f64; 2], theta: [f64; 2], path: &str) -> Result<PolarRectangle, SourceError> {
    PolarRectangle::new(r[0], r[1], theta[0], theta[1]).map_err(|e| SourceError::invalid(path, e.to_string()))
}

fn source_from_doc(doc: &SourceDoc, path: &str) -> Result<SourceFunction, SourceError> {
    let s = match doc {
        SourceDoc::CharDisk { radius } => SourceFunction::CharacteristicDisk { radius: *radius },
        SourceDoc::CharRect { r, theta } => SourceFunction::CharacteristicRect(rect_from(*r, *theta, path)?),
        SourceDoc::Separable { radial, angular, rect } => SourceFunction::SeparableOnRect {
            radial: *radial,
            angular: *angular,
            rect: rect_from(rect.r, rect.theta, &format!("{path}.rect"))?,
        },
        SourceDoc::WeightedSum { terms } => SourceFunction::WeightedSum(
            terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    source_from_doc(&t.source, &format!("{path}.terms[{i}].source")).map(|s| (t.coefficient, s))
                })
                .collect::<Result<_, _>>()?,
        ),
        other => {
            return Err(SourceError::invalid(
                path,
                format!("boundary function `{}` used where a disk source is expected", type_name(other)),
            ))
        }
    };
    s.validate(path)?;
    Ok(s)
}

fn boundary_from_doc(doc: &SourceDoc, path: &str) -> Result<BoundaryFunction, SourceError> {
    let f = match doc {
        SourceDoc::CharArc { arc } => BoundaryFunction::CharacteristicArc(arc[0], arc[1]),
        SourceDoc::AbsTheta => BoundaryFunction::AbsTheta,
        SourceDoc::ThetaSquaredOnArc { arc } => BoundaryFunction::ThetaSquaredOnArc(arc[0], arc[1]),
        SourceDoc::SinOnArc { arc } => BoundaryFunction::SinOnArc(arc[0], arc[1]),
        SourceDoc::AbsLogAbsOnArc { arc } => BoundaryFunction::AbsLogAbsOnArc(arc[0], arc[1]),
        SourceDoc::Cos { n } => BoundaryFunction::Cos(*n),
        SourceDoc::ConstantOne => BoundaryFunction::ConstantOne,
        SourceDoc::BoundarySum { terms } => BoundaryFunction::WeightedSum(
            terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    boundary_from_doc(&t.source, &format!("{path}.terms[{i}].source")).map(|f| (t.coefficient, f))
                })
                .collect::<Result<_, _>>()?,
        ),
        other => {
            return Err(SourceError::invalid(
                path,
                format!("disk source `{}` used where a boundary function is expected", type_name(other)),
            ))
        }
    };
    f.validate(path)?;
    Ok(f)
}

fn type_name(doc: &SourceDoc) -> String {
    serde_json::to_value(doc)
        .ok()
        .and_then(|v| v.get("type").and_then(|t| t.as_str()).map(str::to_owned))
        .unwrap_or_else(|| "?".into())
}

impl TryFrom<SourceDoc> for SourceFunction {
    type Error = SourceError;
    fn try_from(doc: SourceDoc) -> Result<Self, Self::Error> {
        source_from_doc(&doc, "source")
    }
}

impl TryFrom<SourceDoc> for BoundaryFunction {
    type Error = SourceError;
    fn try_from(doc: SourceDoc) -> Result<Self, Self::Error> {
        boundary_from_doc(&doc, "boundary")
    }
}

impl From<SourceFunction> for SourceDoc {
    fn from(s: SourceFunction) -> Self {
        let rect_doc = |r: &PolarRectangle| RectDoc { r: [r.r_lo(), r.r_hi()], theta: [r.theta_lo(), r.theta_hi()] };
        match s {
            SourceFunction::CharacteristicDisk { radius } => SourceDoc::CharDisk { radius },
            SourceFunction::CharacteristicRect(rect) => {
                let d = rect_doc(&rect);
                SourceDoc::CharRect { r: d.r, theta: d.theta }
            }
            SourceFunction::SeparableOnRect { radial, angular, rect } => {
                SourceDoc::Separable { radial, angular, rect: rect_doc(&rect) }
            }
            SourceFunction::WeightedSum(terms) => SourceDoc::WeightedSum {
                terms: terms.into_iter().map(|(coefficient, s)| TermDoc { coefficient, source: s.into() }).collect(),
            },
        }
    }
}

impl From<BoundaryFunction> for SourceDoc {
    fn from(f: BoundaryFunction) -> Self {
        match f {
            BoundaryFunction::CharacteristicArc(a, b) => SourceDoc::CharArc { arc: [a, b] },
            BoundaryFunction::AbsTheta => SourceDoc::AbsTheta,
            BoundaryFunction::ThetaSquaredOnArc(a, b) => SourceDoc::ThetaSquaredOnArc { arc: [a, b] },
            BoundaryFunction::SinOnArc(a, b) => SourceDoc::SinOnArc { arc: [a, b] },
            BoundaryFunction::AbsLogAbsOnArc(a, b) => SourceDoc::AbsLogAbsOnArc { arc: [a, b] },
            BoundaryFunction::Cos(n) => SourceDoc::Cos { n },
            BoundaryFunction::ConstantOne => SourceDoc::ConstantOne,
            BoundaryFunction::WeightedSum(terms) => SourceDoc::BoundarySum {
                terms: terms.into_iter().map(|(coefficient, f)| TermDoc { coefficient, source: f.into() }).collect(),
            },
        }
    }
}

/// Parses and validates one configuration document.
pub fn parse_source_config(text: &str) -> Result<ParsedConfig, SourceError> {
    let doc: SourceDoc = toml::from_str(text).map_err(|e| SourceError::Parse(e.to_string()))?;
    if doc.is_boundary() {
        boundary_from_doc(&doc, "boundary").map(ParsedConfig::Boundary)
    } else {
        source_from_doc(&doc, "source").map(ParsedConfig::Source)
    }
}

pub fn parse_source(text: &str) -> Result<SourceFunction, SourceError> {
    match parse_source_config(text)? {
        ParsedConfig::Source(s) => Ok(s),
        ParsedConfig::Boundary(_) => {
            Err(SourceError::invalid("type", "expected a disk source, found a boundary function"))
        }
    }
}

pub fn parse_boundary(text: &str) -> Result<BoundaryFunction, SourceError> {
    match parse_source_config(text)? {
        ParsedConfig::Boundary(f) => Ok(f),
        ParsedConfig::Source(_) => {
            Err(SourceError::invalid("type", "expected a boundary function, found a disk source"))
        }
    }
}

pub fn source_to_toml(s: &SourceFunction) -> String {
    toml::to_string(&SourceDoc::from(s.clone())).expect("source documents always serialize")
}

pub fn boundary_to_toml(f: &BoundaryFunction) -> String {
    toml::to_string(&SourceDoc::from(f.clone())).expect("boundary documents always serialize")
}

pub(crate) fn to_inline_string(doc: &SourceDoc) -> String {
    serde_json::to_string(doc).expect("documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::catalog::figure_case;
    use std::f64::consts::PI;

    #[test]
    fn char_rect_example() {
        let text = "type = \"char_rect\"\nr = [0.25, 0.5]\ntheta = [0.0, 0.7853981633974483]\n";
        let parsed = parse_source(text).unwrap();
        let rect = PolarRectangle::new(0.25, 0.5, 0.0, PI / 4.0).unwrap();
        assert_eq!(parsed, SourceFunction::CharacteristicRect(rect));
    }

    #[test]
    fn figure_six_source_from_text() {
        let text = r#"
type = "separable"
radial = { pow_one_minus_rho = 0.25 }
angular = { cos = 1 }
rect = { r = [0.75, 1.0], theta = [-0.5235987755982989, 0.5235987755982989] }
"#;
        let parsed = parse_source(text).unwrap();
        let catalog = figure_case(6).unwrap().q_cases()[0].source.clone();
        assert_eq!(parsed, catalog);
    }

    #[test]
    fn inverted_bounds_are_validation_errors() {
        let text = "type = \"char_rect\"\nr = [0.5, 0.25]\ntheta = [0.0, 1.0]\n";
        match parse_source_config(text) {
            Err(SourceError::Validation { field, .. }) => assert_eq!(field, "source"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn beta_too_large_is_a_validation_error() {
        let text = r#"
type = "separable"
radial = { pow_one_minus_rho = 0.5 }
angular = "one"
rect = { r = [0.75, 1.0], theta = [0.0, 1.0] }
"#;
        match parse_source_config(text) {
            Err(SourceError::Validation { field, .. }) => assert_eq!(field, "source.radial"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "type = \"char_disk\"\nradius = \n";
        match parse_source_config(text) {
            Err(SourceError::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
        let unknown = "type = \"char_disk\"\nradius = 0.2\ncolour = 1\n";
        assert!(matches!(parse_source_config(unknown), Err(SourceError::Parse(_))));
    }

    #[test]
    fn nested_sum_and_boundary() {
        let text = r#"
type = "weighted_sum"
[[terms]]
coefficient = 1.0
source = { type = "char_disk", radius = 0.25 }
[[terms]]
coefficient = -2.0
source = { type = "char_rect", r = [0.5, 0.9], theta = [0.0, 1.0] }
"#;
        let s = parse_source(text).unwrap();
        assert!(matches!(s, SourceFunction::WeightedSum(ref t) if t.len() == 2));
        let b = parse_boundary("type = \"char_arc\"\narc = [-0.5, 0.5]\n").unwrap();
        assert_eq!(b, BoundaryFunction::CharacteristicArc(-0.5, 0.5));
        assert!(parse_source("type = \"abs_theta\"\n").is_err());
        let bad_nested = r#"
type = "weighted_sum"
[[terms]]
coefficient = 1.0
source = { type = "abs_theta" }
"#;
        assert!(matches!(parse_source_config(bad_nested), Err(SourceError::Validation { .. })));
    }

    #[test]
    fn catalog_round_trips() {
        for id in 1..=15 {
            let case = figure_case(id).unwrap();
            for q in case.q_cases() {
                let text = source_to_toml(&q.source);
                assert_eq!(parse_source(&text).unwrap(), q.source, "figure {id}");
            }
            for p in case.poisson_cases() {
                let text = boundary_to_toml(&p.boundary);
                assert_eq!(parse_boundary(&text).unwrap(), p.boundary, "figure {id}");
            }
        }
    }
}
