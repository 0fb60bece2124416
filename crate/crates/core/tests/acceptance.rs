//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use diskharm::heatlab::{conjecture_compare, solve_steady_state, ConjectureConfig, HeatBoundary, HeatProblem};
use diskharm::sources::catalog::{catalog_sources, figure_case};
use diskharm::sources::wrap_angle;
use diskharm::transforms::{
    analytic_rep, bergman_project, harmonic_rep, poisson_integral, poisson_point, q_transform, q_transform_point,
    source_integral, AnalyticTestFunction, TabulatedSource,
};
use diskharm::verify::{norm, q_transform_harmonicity, Annulus, NormInput, NormKind, NormSpec};
use diskharm::{
    AngularFactor, BoundaryFunction, ComplexPoint, EvaluationGrid, PolarRectangle, QuadratureSpec, RadialFactor,
    SourceFunction,
};
use num_complex::Complex64;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn q_normalization() -> Outcome {
    let spec = QuadratureSpec::default();
    let one = SourceFunction::char_disk(1.0)?;
    let (mut worst, mut slowest) = (0.0f64, Duration::ZERO);
    for i in 0..5 {
        for j in 0..5 {
            let (r, t) = (0.9 * i as f64 / 4.0, -PI + 2.0 * PI * (j as f64 + 0.3) / 5.0);
            let start = Instant::now();
            let v = q_transform_point(&one, r, t, 1.0 / PI, &spec)?;
            slowest = slowest.max(start.elapsed());
            worst = worst.max((v.value - 1.0).abs());
        }
    }
    let ok = worst <= 1e-6 && slowest <= Duration::from_secs(5);
    Ok((ok, format!("max |value - 1| = {worst:.3e} (tol 1e-6), slowest point {slowest:.2?} (limit 5s)")))
}

fn reproducing_suite() -> Outcome {
    let spec = QuadratureSpec::default();
    let grid = EvaluationGrid::uniform(0.8, 20, 64)?;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 0..=8i32 {
        let cos = move |r: f64, t: f64| r.powi(n) * (n as f64 * t).cos();
        let f = harmonic_rep(cos, if n == 0 { 1.0 } else { 0.0 }, &grid, &spec)?;
        worst = worst.max(f.max_error_against(cos));
        if n > 0 {
            let sin = move |r: f64, t: f64| r.powi(n) * (n as f64 * t).sin();
            let f = harmonic_rep(sin, 0.0, &grid, &spec)?;
            worst = worst.max(f.max_error_against(sin));
        }
    }
    let took = start.elapsed();
    let ok = worst <= 1e-6 && took <= Duration::from_secs(300);
    Ok((ok, format!("max grid error {worst:.3e} over 17 functions (tol 1e-6), total {took:.2?} (limit 5min)")))
}

fn figure4_plateau() -> Outcome {
    let f = q_transform(
        &SourceFunction::char_disk(0.25)?,
        &EvaluationGrid::default_grid(),
        1.0,
        &QuadratureSpec::default(),
    )?;
    let spread = f.max() - f.min();
    let off = f.values.iter().fold(0.0f64, |m, v| m.max((v - PI / 16.0).abs()));
    let ok = spread <= 1e-3 && off <= 1e-3;
    Ok((ok, format!("spread {spread:.3e}, max |value - pi/16| = {off:.3e} (tols 1e-3; printed 0.193 differs from pi/16 = 0.19635)")))
}

fn figure5_peaks() -> Outcome {
    let spec = QuadratureSpec::default();
    let grid = EvaluationGrid::default_grid();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, target) in [("fig5a", 0.17), ("fig5b", 0.5)] {
        let (_, case) = catalog_sources().into_iter().find(|(n, _)| n == name).ok_or("missing catalog entry")?;
        let peak = q_transform(&case.source, &grid, case.prefactor, &spec)?.max();
        ok &= (peak / target - 1.0).abs() <= 0.2;
        parts.push(format!("{name} max {peak:.5} (target {target} +/-20%)"));
    }
    Ok((ok, parts.join(", ")))
}

fn poisson_identities() -> Outcome {
    let spec = QuadratureSpec::default();
    let f = poisson_integral(&BoundaryFunction::Cos(1), &EvaluationGrid::default_grid(), &spec)?;
    let cos_err = f.max_error_against(|r, t| r * t.cos());
    let arc = BoundaryFunction::CharacteristicArc(-FRAC_PI_6, FRAC_PI_6);
    let center = poisson_point(&arc, 0.0, 0.0, &spec)?.value;
    let near = poisson_point(&arc, 0.99, 0.0, &spec)?.value;
    let ok = cos_err <= 1e-9 && (center - 1.0 / 6.0).abs() <= 1e-9 && near > 0.9;
    Ok((
        ok,
        format!(
            "cos error {cos_err:.3e} (tol 1e-9), arc at origin off by {:.3e} (tol 1e-9), arc at (0.99, 0) = {near:.5} (> 0.9)",
            (center - 1.0 / 6.0).abs()
        ),
    ))
}

fn half_ratio() -> Outcome {
    let spec = QuadratureSpec::default();
    let grid = EvaluationGrid::default_grid();
    let mut ok = true;
    let mut parts = Vec::new();
    for id in [11u32, 12, 13] {
        let case = figure_case(id)?;
        let (p, q) = case.comparison_pair().ok_or("figure has no comparison pair")?;
        let pf = poisson_integral(&p.boundary, &grid, &spec)?;
        let qf = q_transform(&q.source, &grid, q.prefactor, &spec)?;
        let arcs = p.boundary.pieces();
        let distance = |t: f64| {
            arcs.iter()
                .map(|a| {
                    if a.hi - a.lo >= 2.0 * PI - 1e-12 || (t - a.lo).rem_euclid(2.0 * PI) <= a.hi - a.lo {
                        0.0
                    } else {
                        wrap_angle(t - a.hi).abs().min(wrap_angle(a.lo - t).abs())
                    }
                })
                .fold(f64::INFINITY, f64::min)
        };
        let band: Vec<usize> = (0..grid.len()).filter(|&k| (0.2..=0.7).contains(&grid.point(k).0)).collect();
        let mut far: Vec<usize> = band.iter().copied().filter(|&k| distance(grid.point(k).1) > FRAC_PI_3).collect();
        let fallback = far.is_empty();
        if fallback {
            // the arc covers the whole circle, so every angle is "near" it
            far = band;
        }
        let inside = far.iter().filter(|&&k| (0.35..=0.65).contains(&(qf.values[k] / pf.values[k]))).count();
        let frac = inside as f64 / far.len() as f64;
        ok &= frac >= 0.8;
        parts.push(format!(
            "fig{id} {inside}/{} = {:.1}%{}",
            far.len(),
            100.0 * frac,
            if fallback { " (full-circle arc: all points in the radial band)" } else { "" }
        ));
    }
    Ok((ok, format!("{} (need >= 80%; qualitative claim)", parts.join(", "))))
}

fn harmonicity() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst = (0.0f64, String::new());
    let mut converged = true;
    for (name, case) in catalog_sources() {
        let rep = q_transform_harmonicity(
            &case.source,
            case.prefactor,
            Annulus::default(),
            (2.5e-4, 2.5e-4),
            (8, 16),
            &spec,
        )?;
        converged &= rep.converged;
        if rep.max_normalized_residual >= worst.0 {
            worst = (rep.max_normalized_residual, name);
        }
    }
    let ok = worst.0 <= 1e-3;
    Ok((
        ok,
        format!(
            "worst normalized residual {:.3e} ({}) at h = 2.5e-4 (tol 1e-3), converged {converged}",
            worst.0, worst.1
        ),
    ))
}

fn contraction_and_idempotence() -> Outcome {
    let spec = QuadratureSpec::default();
    let l2 = NormKind::BergmanWeighted { p: 2.0, alpha: 0.0 };
    let grid = EvaluationGrid::uniform(0.95, 96, 128)?;
    let mut worst_ratio = 0.0f64;
    // Raw T, reported only: T f = (pi/2) P f + (1/2) integral of f.
    let mut worst_t = 0.0f64;
    for seed in 0..20u64 {
        let f = common::seeded_source(seed, 0.9);
        let nf = norm(NormInput::Source(&f), &NormSpec::new(l2))?.value_with_tail;
        let pf = bergman_project(&f, &grid, &spec)?;
        let npf = norm(NormInput::Field(&pf), &NormSpec::new(l2).with_truncation(0.95))?.value_with_tail;
        worst_ratio = worst_ratio.max(npf / nf);
        let mass = source_integral(&f, &spec)?.value;
        let mut tf = pf.clone();
        tf.values.iter_mut().for_each(|v| *v = FRAC_PI_2 * *v + 0.5 * mass);
        let ntf = norm(NormInput::Field(&tf), &NormSpec::new(l2).with_truncation(0.95))?.value_with_tail;
        worst_t = worst_t.max(ntf / nf);
    }
    let contraction = worst_ratio <= 1.0 + 1e-6;

    // Resample P f on a rim-clustered grid fine enough to resolve the
    // boundary layers of the near-rim catalog sources.
    let wide = QuadratureSpec { max_eval_radius: 0.9999, max_depth: 16, ..spec };
    let resample = QuadratureSpec { nodes_radial: 8, nodes_angular: 8, adaptive_tol: 1e-7, ..wide };
    let cheap = QuadratureSpec::default().with_nodes(4, 4).with_tol(1e-6);
    let mut radii: Vec<f64> = (0..90).map(|i| i as f64 / 100.0).collect();
    let mut gap = 0.1;
    while gap > 0.002 {
        radii.push(1.0 - gap);
        gap *= 0.8;
    }
    let angles: Vec<f64> = (0..1024).map(|j| -PI + 2.0 * PI * j as f64 / 1024.0).collect();
    let fine = EvaluationGrid::from_axes(radii, angles)?;
    let check = EvaluationGrid::uniform(0.9, 6, 24)?;
    let mut worst_idem = (0.0f64, String::new());
    for (name, case) in catalog_sources() {
        let direct = bergman_project(&case.source, &check, &wide)?;
        let tab = TabulatedSource::from_field(&bergman_project(&case.source, &fine, &resample)?)?;
        let again = bergman_project(&tab, &check, &cheap)?;
        let err = direct.values.iter().zip(&again.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if err >= worst_idem.0 {
            worst_idem = (err, name);
        }
    }
    let idempotent = worst_idem.0 <= 5e-3;
    Ok((
        contraction && idempotent,
        format!(
            "max |Pf|/|f| over 20 random sources {worst_ratio:.8} (limit 1 + 1e-6); max |Tf|/|f| {worst_t:.5} (reported only); idempotence error {:.3e} ({}) (tol 5e-3)",
            worst_idem.0, worst_idem.1
        ),
    ))
}

fn analytic_representation() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for k in 0..10 {
        let z = Complex64::from_polar(0.05 + 0.09 * k as f64, 0.7 * k as f64 - 2.0);
        let zp = ComplexPoint::interior(z.re, z.im)?;
        for alpha in [0.0, 1.0, 2.5] {
            for n in 0..=5u32 {
                let v = analytic_rep(&AnalyticTestFunction::Monomial(n), alpha, zp, &spec)?.value;
                worst = worst.max((v - z.powu(n)).norm());
            }
        }
    }
    Ok((
        worst <= 1e-7,
        format!("max |rep - z^n| = {worst:.3e} over 10 points, n <= 5, alpha in {{0, 1, 2.5}} (tol 1e-7)"),
    ))
}

fn heat_oracle() -> Outcome {
    let one = SourceFunction::char_disk(1.0)?;
    let u = solve_steady_state(&HeatProblem::new(one, HeatBoundary::DirichletZero, 128, 256))?;
    let err = u.max_error_against(|r, _| (1.0 - r * r) / 4.0);

    let rho2 = SourceFunction::separable(RadialFactor::RhoPower(2), AngularFactor::One, PolarRectangle::full_disk())?;
    let exact = |r: f64, _: f64| (1.0 - r.powi(4)) / 16.0;
    let coarse = solve_steady_state(&HeatProblem::new(rho2.clone(), HeatBoundary::DirichletZero, 32, 64))?;
    let finer = solve_steady_state(&HeatProblem::new(rho2, HeatBoundary::DirichletZero, 64, 128))?;
    let ratio = coarse.max_error_against(exact) / finer.max_error_against(exact);

    let mut complete = true;
    let mut reports = Vec::new();
    for id in [4u32, 15] {
        let source = figure_case(id)?.q_cases()[0].source.clone();
        for bc in [HeatBoundary::DirichletZero, HeatBoundary::Robin { h: 1.0 }] {
            let rep = conjecture_compare(&source, bc, &ConjectureConfig::default())?.report;
            complete &= rep.n_points > 0
                && rep.correlation.is_some_and(f64::is_finite)
                && rep.scale_factor.is_finite()
                && rep.residual_rms.is_finite();
            reports.push(format!("fig{id}/{}: corr {:.4}", rep.boundary_tag, rep.correlation.unwrap_or(f64::NAN)));
        }
    }
    let ok = err <= 1e-3 && ratio >= 3.5 && complete;
    Ok((
        ok,
        format!(
            "f=1 error {err:.3e} at 128x256 (tol 1e-3); error ratio 32->64 {ratio:.3} (order {:.2}, need ratio >= 3.5); reports complete {complete} [{}]",
            ratio.log2(),
            reports.join(", ")
        ),
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Q normalization", q_normalization),
        ("reproducing suite", reproducing_suite),
        ("figure 4 plateau", figure4_plateau),
        ("figure 5 peaks", figure5_peaks),
        ("Poisson identities", poisson_identities),
        ("half-ratio pattern", half_ratio),
        ("harmonicity of transforms", harmonicity),
        ("projection contraction and idempotence", contraction_and_idempotence),
        ("analytic representation", analytic_representation),
        ("heat solver oracle", heat_oracle),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {name}: {} | {detail} [{:.1?}]",
            k + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
