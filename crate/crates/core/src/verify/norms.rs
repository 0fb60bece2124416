use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::quadrature::{
    integrate_box, integrate_interval, PointFn, QuadratureResult, QuadratureSpec, SingularRadialMap,
};
use crate::sources::{wrap_angle, ArcPiece, BoundaryFunction, DiskSource, Piece};
use crate::transforms::{AngularMap, Field};

use super::VerifyError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// `(∫_D |f|^p (1 − |z|)^α dm)^{1/p}`.
    BergmanWeighted { p: f64, alpha: f64 },
    /// `(∫_D |f|² dm)^{1/2}`.
    HarmonicBergmanL2,
    /// `max_r ∫ |f(r e^{iθ})|² dθ` over the sampled radii.
    HardySup,
    /// `(∫ |f(e^{iθ})|² dθ)^{1/2}`.
    CircleL2,
}

impl NormKind {
    fn name(&self) -> &'static str {
        match self {
            NormKind::BergmanWeighted { .. } => "bergman_weighted",
            NormKind::HarmonicBergmanL2 => "harmonic_bergman_l2",
            NormKind::HardySup => "hardy_sup",
            NormKind::CircleL2 => "circle_l2",
        }
    }

    fn p_alpha(&self) -> Option<(f64, f64)> {
        match *self {
            NormKind::BergmanWeighted { p, alpha } => Some((p, alpha)),
            NormKind::HarmonicBergmanL2 => Some((2.0, 0.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    /// Disk norms integrate over `|z| ≤ truncation_radius`.
    pub truncation_radius: f64,
    pub quadrature: QuadratureSpec,
}

impl NormSpec {
    pub fn new(kind: NormKind) -> Self {
        Self { kind, truncation_radius: 0.999, quadrature: QuadratureSpec::default() }
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation_radius = radius;
        self
    }

    fn validate(&self) -> Result<(), VerifyError> {
        if let Some((p, alpha)) = self.kind.p_alpha() {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(VerifyError::InvalidSpec(format!("p = {p} must be at least 1")));
            }
            if !(alpha > -1.0 && alpha.is_finite()) {
                return Err(VerifyError::InvalidSpec(format!("alpha = {alpha} must exceed -1")));
            }
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius <= 0.999) {
            return Err(VerifyError::InvalidSpec(format!(
                "truncation radius {} must lie in (0, 0.999]",
                self.truncation_radius
            )));
        }
        self.quadrature.validate()?;
        Ok(())
    }
}

/// What a norm is taken of.
#[derive(Clone, Copy)]
pub enum NormInput<'a> {
    Source(&'a dyn DiskSource),
    Field(&'a Field),
    Boundary(&'a BoundaryFunction),
}

impl NormInput<'_> {
    fn name(&self) -> &'static str {
        match self {
            NormInput::Source(_) => "a source",
            NormInput::Field(_) => "a field",
            NormInput::Boundary(_) => "a boundary function",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// No tail: the norm is not a disk norm.
    None,
    /// Integrated directly from the source definition.
    Exact,
    /// Fourier modes of the outermost ring continued harmonically to `r = 1`.
    FourierContinuation,
    /// Largest sampled `|f|^p w` on the outermost ring times the tail area.
    SupTimesArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    /// The norm over the truncated region (for `HardySup`, the maximal
    /// circle integral itself).
    pub value: f64,
    /// Integral of `|f|^p w` before the root.
    pub truncated_integral: f64,
    /// Radius actually reached by the truncated integral.
    pub effective_radius: f64,
    /// Estimate of the same integral over `effective_radius < |z| < 1`.
    pub tail_estimate: f64,
    pub tail_method: TailMethod,
    /// `(truncated_integral + tail_estimate)^{1/p}`.
    pub value_with_tail: f64,
    pub converged: bool,
}

/// Norm of `input` under `spec`.
pub fn norm(input: NormInput<'_>, spec: &NormSpec) -> Result<NormReport, VerifyError> {
    spec.validate()?;
    let incompatible = || VerifyError::IncompatibleKind { kind: spec.kind.name().into(), input: input.name().into() };
    let report = match (spec.kind, input) {
        (NormKind::BergmanWeighted { .. } | NormKind::HarmonicBergmanL2, NormInput::Source(s)) => source_norm(s, spec)?,
        (NormKind::BergmanWeighted { .. } | NormKind::HarmonicBergmanL2, NormInput::Field(f)) => field_norm(f, spec)?,
        (NormKind::HardySup, NormInput::Field(f)) => {
            let radii = f.grid.radii();
            let circles = circle_integrals(f)?;
            let mut best = 0.0;
            let mut at = 0.0;
            for (k, c) in circles.iter().enumerate() {
                if radii[k] <= spec.truncation_radius && *c >= best {
                    best = *c;
                    at = radii[k];
                }
            }
            NormReport {
                kind: spec.kind,
                value: best,
                truncated_integral: best,
                effective_radius: at,
                tail_estimate: 0.0,
                tail_method: TailMethod::None,
                value_with_tail: best,
                converged: f.all_converged(),
            }
        }
        (NormKind::CircleL2, NormInput::Boundary(b)) => {
            let res = boundary_square_integral(b, &spec.quadrature)?;
            let value = res.value.sqrt();
            NormReport {
                kind: spec.kind,
                value,
                truncated_integral: res.value,
                effective_radius: 1.0,
                tail_estimate: 0.0,
                tail_method: TailMethod::None,
                value_with_tail: value,
                converged: res.converged,
            }
        }
        _ => return Err(incompatible()),
    };
    if !report.value.is_finite() || !report.value_with_tail.is_finite() {
        return Err(VerifyError::NonFinite(format!("{} norm", spec.kind.name())));
    }
    Ok(report)
}

/// `∫ |u(r, θ)|² dθ` on every ring of a field with a uniform periodic angle axis.
pub fn circle_integrals(field: &Field) -> Result<Vec<f64>, VerifyError> {
    if !field.grid.is_periodic_uniform() {
        return Err(VerifyError::InvalidSpec("circle integrals need evenly spaced angles over a full turn".into()));
    }
    let h = 2.0 * PI / field.grid.n_theta() as f64;
    Ok((0..field.grid.n_r()).map(|i| field.row(i).iter().map(|v| v * v).sum::<f64>() * h).collect())
}

/// Sorted cut points over `[−π, π]`, with flags for integrable singularities.
fn angular_partition(mut cuts: Vec<(f64, bool)>) -> Vec<(f64, f64, bool, bool)> {
    cuts.push((-PI, false));
    cuts.push((PI, false));
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (p, s) in cuts {
        match merged.last_mut() {
            Some(last) if (p - last.0).abs() <= 1e-12 => last.1 |= s,
            _ => merged.push((p, s)),
        }
    }
    merged.windows(2).map(|w| (w[0].0, w[1].0, w[0].1, w[1].1)).collect()
}

fn wrapped_cut(x: f64) -> f64 {
    if (x - PI).abs() <= 1e-12 {
        PI
    } else {
        wrap_angle(x)
    }
}

fn angular_maps(lo: f64, hi: f64, s_lo: bool, s_hi: bool) -> Vec<AngularMap> {
    if s_lo && s_hi {
        let mid = 0.5 * (lo + hi);
        vec![AngularMap::graded_lo(lo, mid), AngularMap::graded_hi(mid, hi)]
    } else if s_lo {
        vec![AngularMap::graded_lo(lo, hi)]
    } else if s_hi {
        vec![AngularMap::graded_hi(lo, hi)]
    } else {
        vec![AngularMap::linear(lo, hi)]
    }
}

/// `∫∫_{r_lo ≤ ρ ≤ r_hi} |Σ pieces|^p (1 − ρ)^α ρ dρ dφ`, cell by cell over
/// the common refinement of all piece boundaries.
fn source_power_integral(
    pieces: &[Piece],
    p: f64,
    alpha: f64,
    r_lo: f64,
    r_hi: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, VerifyError> {
    let mut r_cuts = vec![r_lo, r_hi];
    let mut t_cuts = Vec::new();
    for piece in pieces {
        for r in [piece.rect.r_lo(), piece.rect.r_hi()] {
            if r > r_lo && r < r_hi {
                r_cuts.push(r);
            }
        }
        if !piece.rect.is_full_circle() {
            t_cuts.push((wrapped_cut(piece.rect.theta_lo()), false));
            t_cuts.push((wrapped_cut(piece.rect.theta_hi()), false));
        }
        for (b, singular) in piece.density.angular_factor().canonical_breakpoints() {
            t_cuts.push((wrapped_cut(b), singular));
        }
    }
    r_cuts.sort_by(f64::total_cmp);
    r_cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    let segments = angular_partition(t_cuts);

    let mut total = QuadratureResult { value: 0.0, error_estimate: 0.0, panels_used: 0, converged: true };
    for rw in r_cuts.windows(2) {
        let (a, b) = (rw[0], rw[1]);
        for &(lo, hi, s_lo, s_hi) in &segments {
            let (rm, tm) = (0.5 * (a + b), 0.5 * (lo + hi));
            let active: Vec<&Piece> = pieces.iter().filter(|pc| pc.rect.contains(rm, tm)).collect();
            if active.is_empty() {
                continue;
            }
            let beta = active.iter().filter_map(|pc| pc.density.singular_exponent()).fold(0.0, f64::max);
            let e = p * beta - alpha;
            let value = |rho: f64, phi: f64| -> f64 {
                let s: f64 = active.iter().map(|pc| pc.weight * pc.value(rho, phi)).sum();
                s.abs().powf(p) * (1.0 - rho).powf(alpha) * rho
            };
            for map in angular_maps(lo, hi, s_lo, s_hi) {
                let y = map.y_range();
                let res = if e > 0.0 && e < 1.0 {
                    let m = SingularRadialMap::new(e)?;
                    let g = PointFn(|t: f64, yy: f64| {
                        let (phi, jy) = map.apply(yy);
                        let rho = m.rho(t);
                        value(rho, phi) * (1.0 - rho).powf(e) * m.jacobian() * jy
                    });
                    integrate_box(&g, m.t_range(a, b), y, spec)?
                } else {
                    let g = PointFn(|rho: f64, yy: f64| {
                        let (phi, jy) = map.apply(yy);
                        value(rho, phi) * jy
                    });
                    integrate_box(&g, (a, b), y, spec)?
                };
                total.absorb(&res, 1.0);
            }
        }
    }
    Ok(total)
}

fn source_norm(s: &dyn DiskSource, spec: &NormSpec) -> Result<NormReport, VerifyError> {
    let (p, alpha) = spec.kind.p_alpha().expect("disk norm");
    let pieces = s.pieces();
    let r = spec.truncation_radius;
    let inner = source_power_integral(&pieces, p, alpha, 0.0, r, &spec.quadrature)?;
    let tail = source_power_integral(&pieces, p, alpha, r, 1.0, &spec.quadrature)?;
    Ok(NormReport {
        kind: spec.kind,
        value: inner.value.powf(1.0 / p),
        truncated_integral: inner.value,
        effective_radius: r,
        tail_estimate: tail.value,
        tail_method: TailMethod::Exact,
        value_with_tail: (inner.value + tail.value).powf(1.0 / p),
        converged: inner.converged && tail.converged,
    })
}

/// Composite Simpson on evenly spaced samples, closing an odd interval
/// count with the 3/8 rule.
fn simpson(h: f64, y: &[f64]) -> f64 {
    let n = y.len() - 1;
    match n {
        0 => 0.0,
        1 => 0.5 * h * (y[0] + y[1]),
        _ => {
            let (even_end, tail) = if n.is_multiple_of(2) {
                (n, 0.0)
            } else {
                let k = n - 3;
                (k, 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]))
            };
            let mut s = 0.0;
            let mut i = 0;
            while i < even_end {
                s += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
                i += 2;
            }
            s + tail
        }
    }
}

fn field_norm(f: &Field, spec: &NormSpec) -> Result<NormReport, VerifyError> {
    let (p, alpha) = spec.kind.p_alpha().expect("disk norm");
    let g = &f.grid;
    if !g.is_periodic_uniform() || g.radii()[0] != 0.0 {
        return Err(VerifyError::InvalidSpec("field norms need radii from 0 and a periodic angle axis".into()));
    }
    let radii = g.radii();
    let n_used = radii.iter().take_while(|&&r| r <= spec.truncation_radius + 1e-12).count();
    if n_used < 2 {
        return Err(VerifyError::InvalidSpec("truncation radius below the second grid radius".into()));
    }
    let h_t = 2.0 * PI / g.n_theta() as f64;
    let ring = |i: usize| -> f64 {
        let w = (1.0 - radii[i]).powf(alpha) * radii[i];
        f.row(i).iter().map(|v| v.abs().powf(p)).sum::<f64>() * h_t * w
    };
    let samples: Vec<f64> = (0..n_used).map(ring).collect();
    let h_r = radii[1] - radii[0];
    let uniform = radii[..n_used].windows(2).all(|w| ((w[1] - w[0]) - h_r).abs() < 1e-12);
    let inner = if uniform {
        simpson(h_r, &samples)
    } else {
        radii[..n_used].windows(2).zip(samples.windows(2)).map(|(r, s)| 0.5 * (r[1] - r[0]) * (s[0] + s[1])).sum()
    };
    let r0 = radii[n_used - 1];
    let outer = f.row(n_used - 1);
    let (tail, method) = if f.meta.harmonic && p == 2.0 && alpha == 0.0 {
        (fourier_tail(outer, r0, 1.0), TailMethod::FourierContinuation)
    } else {
        let sup = outer.iter().fold(0.0, |m: f64, v| m.max(v.abs().powf(p)));
        // 2π ∫_{r0}^1 (1 − r)^α r dr
        let d = 1.0 - r0;
        let weighted_area = 2.0 * PI * (d.powf(alpha + 1.0) / (alpha + 1.0) - d.powf(alpha + 2.0) / (alpha + 2.0));
        (sup * weighted_area, TailMethod::SupTimesArea)
    };
    let converged = f.converged[..n_used * g.n_theta()].iter().all(|c| *c);
    Ok(NormReport {
        kind: spec.kind,
        value: inner.powf(1.0 / p),
        truncated_integral: inner,
        effective_radius: r0,
        tail_estimate: tail,
        tail_method: method,
        value_with_tail: (inner + tail).powf(1.0 / p),
        converged,
    })
}

/// `∫_{r0 ≤ r ≤ r1} ∫ |u|² dθ r dr` for the harmonic continuation of the
/// ring values `u(r0, ·)`.
fn fourier_tail(ring: &[f64], r0: f64, r1: f64) -> f64 {
    let m = ring.len();
    let mut buf: Vec<Complex64> = ring.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mut total = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let n = if k <= m / 2 { k } else { m - k } as i32;
        let amp2 = (c / m as f64).norm_sqr();
        let e = 2 * n + 2;
        total += amp2 * (r1.powi(e) - r0.powi(e)) / (e as f64 * r0.powi(2 * n));
    }
    2.0 * PI * total
}

fn arc_contains(p: &ArcPiece, t: f64) -> bool {
    let w = p.hi - p.lo;
    let d = (t - p.lo).rem_euclid(2.0 * PI);
    d <= w || w >= 2.0 * PI - 1e-12
}

fn boundary_square_integral(b: &BoundaryFunction, spec: &QuadratureSpec) -> Result<QuadratureResult, VerifyError> {
    let pieces = b.pieces();
    let mut cuts = Vec::new();
    for p in &pieces {
        if p.hi - p.lo < 2.0 * PI - 1e-12 {
            cuts.push((wrapped_cut(p.lo), false));
            cuts.push((wrapped_cut(p.hi), false));
        }
        for (x, s) in p.density.canonical_breakpoints() {
            cuts.push((wrapped_cut(x), s));
        }
    }
    let mut total = QuadratureResult { value: 0.0, error_estimate: 0.0, panels_used: 0, converged: true };
    for (lo, hi, s_lo, s_hi) in angular_partition(cuts) {
        let tm = 0.5 * (lo + hi);
        let active: Vec<&ArcPiece> = pieces.iter().filter(|p| arc_contains(p, tm)).collect();
        if active.is_empty() {
            continue;
        }
        for map in angular_maps(lo, hi, s_lo, s_hi) {
            let (y0, y1) = map.y_range();
            let res = integrate_interval(
                |y: f64| {
                    let (phi, jac) = map.apply(y);
                    let s: f64 = active.iter().map(|p| p.weight * p.density.value(phi)).sum();
                    s * s * jac
                },
                y0,
                y1,
                spec.nodes_angular,
                spec.adaptive_tol,
                spec.max_depth,
            )?;
            total.absorb(&res, 1.0);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::PolarRectangle;
    use crate::sources::{AngularFactor, RadialFactor, SourceFunction};
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_function_norms() {
        let one = SourceFunction::char_disk(1.0).unwrap();
        let l2 = norm(NormInput::Source(&one), &NormSpec::new(NormKind::HarmonicBergmanL2)).unwrap();
        assert_abs_diff_eq!(l2.value, PI.sqrt(), epsilon = 2e-3);
        assert_abs_diff_eq!(l2.value_with_tail, PI.sqrt(), epsilon = 1e-9);
        let w =
            norm(NormInput::Source(&one), &NormSpec::new(NormKind::BergmanWeighted { p: 2.0, alpha: 1.0 })).unwrap();
        assert_abs_diff_eq!(w.value, (PI / 3.0).sqrt(), epsilon = 2e-3);
    }

    #[test]
    fn arc_circle_norm() {
        let arc = BoundaryFunction::CharacteristicArc(-PI / 6.0, PI / 6.0);
        let r = norm(NormInput::Boundary(&arc), &NormSpec::new(NormKind::CircleL2)).unwrap();
        assert_abs_diff_eq!(r.value, (PI / 3.0).sqrt(), epsilon = 1e-10);
        let log = BoundaryFunction::AbsLogAbsOnArc(-PI / 6.0, PI / 6.0);
        // 2 ∫_0^a ln² x dx = 2a(ln² a − 2 ln a + 2)
        let a = PI / 6.0;
        let expected = (2.0 * a * (a.ln().powi(2) - 2.0 * a.ln() + 2.0)).sqrt();
        let r = norm(NormInput::Boundary(&log), &NormSpec::new(NormKind::CircleL2)).unwrap();
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-8);
    }

    #[test]
    fn singular_source_norm() {
        // ∫_{3/4}^1 (1−ρ)^{−1/2} ρ dρ · 2π/3 over a third of the circle
        let rect = PolarRectangle::new(0.75, 1.0, -PI / 3.0, PI / 3.0).unwrap();
        let s = SourceFunction::separable(RadialFactor::PowOneMinusRho(0.25), AngularFactor::One, rect).unwrap();
        let spec = NormSpec::new(NormKind::HarmonicBergmanL2);
        let r = norm(NormInput::Source(&s), &spec).unwrap();
        let radial = 2.0 * 0.25f64.sqrt() - (2.0 / 3.0) * 0.25f64.powf(1.5);
        assert_abs_diff_eq!(r.value_with_tail, (radial * 2.0 * PI / 3.0).sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn overlapping_pieces_are_summed_before_squaring() {
        let a = SourceFunction::char_disk(0.5).unwrap();
        let s = SourceFunction::WeightedSum(vec![(1.0, a.clone()), (1.0, a)]);
        let r = norm(NormInput::Source(&s), &NormSpec::new(NormKind::HarmonicBergmanL2)).unwrap();
        assert_abs_diff_eq!(r.value, (4.0 * PI * 0.25).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn incompatible_pairings() {
        let arc = BoundaryFunction::ConstantOne;
        assert!(matches!(
            norm(NormInput::Boundary(&arc), &NormSpec::new(NormKind::HarmonicBergmanL2)),
            Err(VerifyError::IncompatibleKind { .. })
        ));
        let bad = NormSpec::new(NormKind::BergmanWeighted { p: 0.5, alpha: 0.0 });
        let one = SourceFunction::char_disk(1.0).unwrap();
        assert!(norm(NormInput::Source(&one), &bad).is_err());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [3usize, 4, 5, 6, 7] {
            let h = 1.0 / n as f64;
            let y: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
            assert_abs_diff_eq!(simpson(h, &y), 0.25, epsilon = 1e-14);
        }
    }
}
