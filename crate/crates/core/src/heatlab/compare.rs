use serde::{Deserialize, Serialize};

use crate::quadrature::QuadratureSpec;
use crate::sources::{DiskSource, SourceFunction};
use crate::transforms::{self, EvaluationGrid, Field};
use crate::verify::Annulus;

use super::{solve_with_stats, HeatBoundary, HeatError, HeatProblem, SolveStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub conductivity: f64,
    pub annulus: Annulus,
    pub quadrature: QuadratureSpec,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        Self {
            n_r: 64,
            n_theta: 128,
            conductivity: 1.0,
            annulus: Annulus::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Agreement between the conduction solution and the Q-transform. No
/// verdict is attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub source: String,
    pub boundary_condition: HeatBoundary,
    pub boundary_tag: String,
    pub mesh: (usize, usize),
    pub annulus: Annulus,
    /// Mesh points used: inside the annulus with a converged transform.
    pub n_points: usize,
    pub n_skipped_unconverged: usize,
    /// Pearson correlation; `None` when either field is exactly constant.
    pub correlation: Option<f64>,
    /// Set when the correlation is missing or dominated by noise.
    pub correlation_note: Option<String>,
    /// `c` minimising `‖u_fd − c u_q‖`.
    pub scale_factor: f64,
    /// RMS of `u_fd − c u_q`.
    pub residual_rms: f64,
    pub fd_range: (f64, f64),
    pub q_range: (f64, f64),
    pub solver: SolveStats,
}

impl ConjectureReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct ConjectureOutcome {
    pub report: ConjectureReport,
    pub fd_field: Field,
    /// Transform with prefactor 1 on the annulus rows of the mesh.
    pub q_field: Field,
}

/// Relative spread below which a field is treated as constant.
const FLAT: f64 = 1e-8;

pub fn conjecture_compare(
    source: &SourceFunction,
    boundary: HeatBoundary,
    config: &ConjectureConfig,
) -> Result<ConjectureOutcome, HeatError> {
    let problem = HeatProblem {
        source: source.clone(),
        conductivity: config.conductivity,
        boundary,
        n_r: config.n_r,
        n_theta: config.n_theta,
    };
    let (fd_field, solver) = solve_with_stats(&problem)?;

    let rows: Vec<usize> = fd_field
        .grid
        .radii()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= config.annulus.r_min - 1e-12 && r <= config.annulus.r_max + 1e-12)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(HeatError::InvalidProblem("no mesh radius inside the comparison annulus".into()));
    }
    let radii: Vec<f64> = rows.iter().map(|&i| fd_field.grid.radii()[i]).collect();
    let grid = EvaluationGrid::from_axes(radii, fd_field.grid.angles().to_vec())?;
    let q_field = transforms::q_transform(source, &grid, 1.0, &config.quadrature)?;

    let m = grid.n_theta();
    let mut fd = Vec::with_capacity(grid.len());
    let mut q = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for (a, &i) in rows.iter().enumerate() {
        for j in 0..m {
            let k = a * m + j;
            if q_field.converged[k] {
                fd.push(fd_field.value(i, j));
                q.push(q_field.values[k]);
            } else {
                skipped += 1;
            }
        }
    }

    let n = fd.len();
    let range = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let qq: f64 = q.iter().map(|x| x * x).sum();
    let fq: f64 = fd.iter().zip(&q).map(|(a, b)| a * b).sum();
    let scale_factor = if qq > 0.0 { fq / qq } else { 0.0 };
    let residual_rms = if n > 0 {
        (fd.iter().zip(&q).map(|(a, b)| (a - scale_factor * b).powi(2)).sum::<f64>() / n as f64).sqrt()
    } else {
        f64::NAN
    };
    let (correlation, correlation_note) = pearson(&fd, &q);

    Ok(ConjectureOutcome {
        report: ConjectureReport {
            source: source.describe(),
            boundary_condition: boundary,
            boundary_tag: boundary.tag(),
            mesh: (config.n_r, config.n_theta),
            annulus: config.annulus,
            n_points: n,
            n_skipped_unconverged: skipped,
            correlation,
            correlation_note,
            scale_factor,
            residual_rms,
            fd_range: range(&fd),
            q_range: range(&q),
            solver,
        },
        fd_field,
        q_field,
    })
}

fn spread(v: &[f64]) -> (f64, f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let peak = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    (mean, var.sqrt(), peak)
}

fn pearson(a: &[f64], b: &[f64]) -> (Option<f64>, Option<String>) {
    if a.len() < 2 {
        return (None, Some("fewer than two comparison points".into()));
    }
    let (ma, sa, pa) = spread(a);
    let (mb, sb, pb) = spread(b);
    if sa == 0.0 || sb == 0.0 {
        let which = if sa == 0.0 && sb == 0.0 {
            "both fields are"
        } else if sa == 0.0 {
            "conduction field is"
        } else {
            "transform field is"
        };
        return (None, Some(format!("{which} exactly constant on the annulus; correlation undefined")));
    }
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64;
    let r = (cov / (sa * sb)).clamp(-1.0, 1.0);
    let mut notes = Vec::new();
    for (name, s, p) in [("conduction", sa, pa), ("transform", sb, pb)] {
        if s <= FLAT * p {
            notes.push(format!(
                "{name} field is constant to quadrature precision (relative spread {:.3e}); correlation reflects noise",
                s / p
            ));
        }
    }
    (Some(r), if notes.is_empty() { None } else { Some(notes.join("; ")) })
}
