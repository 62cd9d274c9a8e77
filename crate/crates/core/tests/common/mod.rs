#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use staticflow::geometry::{RotSymMetric, StaticTriple};
use staticflow::RadialGrid;

/// Smooth bounded modulation `1 + Σ a_k sin(f_k r + φ_k)`.
#[derive(Debug, Clone)]
pub struct Wiggle(Vec<(f64, f64, f64)>);

impl Wiggle {
    pub fn random(rng: &mut StdRng, terms: usize, amplitude: f64) -> Self {
        Self(
            (0..terms)
                .map(|_| {
                    (
                        rng.random_range(-amplitude..amplitude),
                        rng.random_range(0.3..2.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect(),
        )
    }

    pub fn at(&self, r: f64) -> f64 {
        1.0 + self.0.iter().map(|(a, f, p)| a * (f * r + p).sin()).sum::<f64>()
    }
}

/// AdS-like triple with random smooth modulations of all three profiles.
#[derive(Debug, Clone)]
pub struct RandomTriple {
    pub n: usize,
    pub a: Wiggle,
    pub b: Wiggle,
    pub v: Wiggle,
}

impl RandomTriple {
    pub fn new(seed: u64, n: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        Self {
            n,
            a: Wiggle::random(&mut rng, 3, 0.08),
            b: Wiggle::random(&mut rng, 3, 0.08),
            v: Wiggle::random(&mut rng, 3, 0.08),
        }
    }

    pub fn a_at(&self, r: f64) -> f64 {
        self.a.at(r)
    }

    pub fn b_at(&self, r: f64) -> f64 {
        r.sinh().powi(2) * self.b.at(r)
    }

    pub fn v_at(&self, r: f64) -> f64 {
        r.cosh() * self.v.at(r)
    }

    pub fn metric(&self, grid: RadialGrid) -> RotSymMetric {
        RotSymMetric::new(self.n, grid.sample(|r| self.a_at(r)), grid.sample(|r| self.b_at(r))).unwrap()
    }

    pub fn triple(&self, grid: RadialGrid) -> StaticTriple {
        StaticTriple::new(self.metric(grid), grid.sample(|r| self.v_at(r))).unwrap()
    }
}

pub fn in_quadratic_band(ratio: f64) -> bool {
    (3.5..=4.5).contains(&ratio)
}
