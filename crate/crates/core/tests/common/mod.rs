#![allow(dead_code)]

use std::f64::consts::PI;

use diskharm::{AngularFactor, PolarRectangle, RadialFactor, SourceFunction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A piecewise source shaped like the catalog ones: one to four weighted
/// separable pieces on polar rectangles inside `ρ ≤ rho_max`.
pub fn random_source<R: Rng>(rng: &mut R, rho_max: f64) -> SourceFunction {
    let n = rng.gen_range(1..=4);
    let terms = (0..n)
        .map(|_| {
            let r_lo = rng.gen_range(0.0..rho_max - 0.1);
            let r_hi = rng.gen_range(r_lo + 0.05..=rho_max);
            let full = rng.gen_bool(0.2);
            let (t_lo, t_hi) = if full {
                (-PI, PI)
            } else {
                let lo = rng.gen_range(-PI..PI - 0.2);
                (lo, rng.gen_range(lo + 0.1..=PI))
            };
            let radial = match rng.gen_range(0..3) {
                0 => RadialFactor::One,
                1 => RadialFactor::RhoPower(rng.gen_range(1..=3)),
                _ => RadialFactor::Gaussian {
                    amp: rng.gen_range(-2.0..2.0),
                    center: rng.gen_range(0.0..rho_max),
                    rate: rng.gen_range(0.0..10.0),
                },
            };
            let angular = match rng.gen_range(0..5) {
                0 | 1 => AngularFactor::One,
                2 => AngularFactor::Cos(rng.gen_range(1..=4)),
                3 => AngularFactor::Sin(rng.gen_range(1..=4)),
                _ => AngularFactor::AbsPhi,
            };
            let rect = PolarRectangle::new(r_lo, r_hi, t_lo, t_hi).expect("valid rectangle");
            let s = SourceFunction::separable(radial, angular, rect).expect("valid source");
            (rng.gen_range(-2.0..2.0), s)
        })
        .collect();
    SourceFunction::WeightedSum(terms)
}

pub fn seeded_source(seed: u64, rho_max: f64) -> SourceFunction {
    random_source(&mut ChaCha8Rng::seed_from_u64(seed), rho_max)
}

/// Source whose rectangles all carry angular factor `One`, so it can be
/// rotated.
pub fn seeded_rotatable(seed: u64, rho_max: f64) -> SourceFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            let r_lo = rng.gen_range(0.0..rho_max - 0.1);
            let r_hi = rng.gen_range(r_lo + 0.05..=rho_max);
            let lo = rng.gen_range(-PI..PI);
            let hi = lo + rng.gen_range(0.1..2.0 * PI);
            let radial =
                if rng.gen_bool(0.5) { RadialFactor::One } else { RadialFactor::RhoPower(rng.gen_range(1..=3)) };
            let rect = PolarRectangle::new(r_lo, r_hi, lo, hi).expect("valid rectangle");
            (rng.gen_range(-2.0..2.0), SourceFunction::separable(radial, AngularFactor::One, rect).expect("valid"))
        })
        .collect();
    SourceFunction::WeightedSum(terms)
}
