//! A source given by values on a polar grid, bilinear in each cell.

use std::f64::consts::PI;

use crate::quadrature::PolarRectangle;
use crate::sources::{Density, DiskSource, Piece};

use super::{Field, TransformError};

/// Grid data extended to the unit circle by linear extrapolation of the two
/// outermost rings.
#[derive(Debug, Clone)]
pub struct TabulatedSource {
    radii: Vec<f64>,
    angles: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TabulatedSource {
    /// The field's grid must start at `r = 0` and have evenly spaced angles
    /// over a full turn.
    pub fn from_field(field: &Field) -> Result<Self, TransformError> {
        let g = &field.grid;
        if g.radii()[0] != 0.0 || g.n_r() < 2 || !g.is_periodic_uniform() {
            return Err(TransformError::Grid(
                "tabulated sources need radii from 0 and a uniform periodic angle axis".into(),
            ));
        }
        let mut radii = g.radii().to_vec();
        let mut values = field.values.clone();
        let n_t = g.n_theta();
        let r_last = radii[radii.len() - 1];
        if r_last < 1.0 {
            let r_prev = radii[radii.len() - 2];
            let slope = (1.0 - r_last) / (r_last - r_prev);
            let base = values.len() - n_t;
            let ring: Vec<f64> = (0..n_t)
                .map(|j| {
                    let last = values[base + j];
                    let prev = values[base - n_t + j];
                    last + slope * (last - prev)
                })
                .collect();
            values.extend(ring);
            radii.push(1.0);
        }
        Ok(Self { radii, angles: g.angles().to_vec(), values, label: format!("tabulated({})", field.meta.operator) })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        let n = self.angles.len();
        self.values[i * n + (j % n)]
    }

    /// Bilinear interpolation at `(r, θ)`.
    pub fn evaluate(&self, r: f64, theta: f64) -> f64 {
        let n = self.angles.len();
        let h = 2.0 * PI / n as f64;
        let t = (theta - self.angles[0]).rem_euclid(2.0 * PI) / h;
        let j = (t.floor() as usize).min(n - 1);
        let v = t - j as f64;
        let r = r.clamp(0.0, 1.0);
        let i = match self.radii.iter().position(|&x| x > r) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => self.radii.len() - 2,
        };
        let u = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        (1.0 - u) * ((1.0 - v) * self.at(i, j) + v * self.at(i, j + 1))
            + u * ((1.0 - v) * self.at(i + 1, j) + v * self.at(i + 1, j + 1))
    }
}

impl DiskSource for TabulatedSource {
    fn pieces(&self) -> Vec<Piece> {
        let n = self.angles.len();
        let h = 2.0 * PI / n as f64;
        let mut out = Vec::with_capacity((self.radii.len() - 1) * n);
        for i in 0..self.radii.len() - 1 {
            let (r0, r1) = (self.radii[i], self.radii[i + 1]);
            for j in 0..n {
                let t0 = self.angles[j];
                let t1 = t0 + h;
                let rect = PolarRectangle::new(r0, r1, t0, t1).expect("grid cell is a valid rectangle");
                out.push(Piece {
                    weight: 1.0,
                    rect,
                    density: Density::Bilinear {
                        r: (r0, r1),
                        theta: (t0, t1),
                        values: [[self.at(i, j), self.at(i, j + 1)], [self.at(i + 1, j), self.at(i + 1, j + 1)]],
                    },
                });
            }
        }
        out
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}
