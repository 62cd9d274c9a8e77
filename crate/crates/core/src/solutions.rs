//! Exact static Einstein vacua and bump perturbations of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RotSymMetric, StaticTriple};
use crate::grid::{Profile, RadialGrid};

/// Inner grid node must sit at least this far outside the horizon.
pub const HORIZON_MARGIN: f64 = 1.05;

/// Hyperbolic space with lapse `cosh r`: `A = 1`, `B = sinh² r`.
pub fn ads(n: usize, grid: RadialGrid) -> Result<StaticTriple> {
    let metric = RotSymMetric::new(
        n,
        Profile::constant(grid, 1.0),
        grid.sample(|r| r.sinh().powi(2)),
    )?;
    StaticTriple::new(metric, grid.sample(f64::cosh))
}

/// `V² = 1 + ρ² - 2m ρ^{2-n}`.
pub fn sads_lapse_squared(n: usize, mass: f64, rho: f64) -> f64 {
    if mass == 0.0 {
        return 1.0 + rho * rho;
    }
    1.0 + rho * rho - 2.0 * mass * rho.powi(2 - n as i32)
}

/// Largest root of `1 + ρ² - 2m ρ^{2-n}`; zero when `m = 0`.
pub fn horizon_radius(n: usize, mass: f64) -> f64 {
    if mass == 0.0 {
        return 0.0;
    }
    // V² is increasing in ρ for m > 0, so the root is unique.
    let f = |rho: f64| sads_lapse_squared(n, mass, rho);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    hi
}

fn check_mass(n: usize, mass: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mass {mass} must be finite and non-negative"
        )));
    }
    Ok(())
}

/// Schwarzschild-AdS in area-radius coordinates: the grid coordinate is `ρ`,
/// `A = V⁻²`, `B = ρ²`, `V = sqrt(1 + ρ² - 2m ρ^{2-n})`.
pub fn schwarzschild_ads(n: usize, mass: f64, grid: RadialGrid) -> Result<StaticTriple> {
    check_mass(n, mass)?;
    let rho_h = horizon_radius(n, mass);
    if grid.r_min() < HORIZON_MARGIN * rho_h {
        return Err(Error::Domain(format!(
            "inner radius {} is inside {HORIZON_MARGIN} x horizon radius {rho_h}",
            grid.r_min()
        )));
    }
    let v2 = grid.sample(|rho| sads_lapse_squared(n, mass, rho));
    let metric = RotSymMetric::new(n, v2.map(|x| 1.0 / x), grid.sample(|rho| rho * rho))?;
    StaticTriple::new(metric, v2.map(f64::sqrt))
}

/// Schwarzschild-AdS in geodesic coordinates: the grid coordinate is the
/// distance `r` to the horizon (to the center when `m = 0`), so `A = 1`,
/// `B = ρ(r)²` and `V = V(ρ(r))` with `dρ/dr = V(ρ)`.
pub fn schwarzschild_ads_geodesic(n: usize, mass: f64, grid: RadialGrid) -> Result<StaticTriple> {
    check_mass(n, mass)?;
    let rho_h = horizon_radius(n, mass);
    let lapse = |rho: f64| sads_lapse_squared(n, mass, rho).max(0.0).sqrt();

    let (r_start, rho_start) = if mass == 0.0 {
        (0.0, 0.0)
    } else {
        let rho_s = 2.0 * rho_h;
        (distance_to_horizon(n, mass, rho_s), rho_s)
    };

    let mut rho = Vec::with_capacity(grid.count());
    let (mut r, mut y) = (r_start, rho_start);
    for target in grid.nodes() {
        y = integrate_radius(&lapse, r, y, target);
        r = target;
        rho.push(y);
    }
    if rho[0] < HORIZON_MARGIN * rho_h {
        return Err(Error::Domain(format!(
            "inner node sits at area radius {} inside {HORIZON_MARGIN} x horizon radius {rho_h}",
            rho[0]
        )));
    }
    let rho = Profile::new(grid, rho)?;
    let metric = RotSymMetric::new(n, Profile::constant(grid, 1.0), rho.map(|x| x * x))?;
    StaticTriple::new(metric, rho.map(lapse))
}

/// `∫_{ρ_h}^{ρ} dρ'/V(ρ')` through the substitution `ρ' = ρ_h + s²`, which
/// removes the inverse square-root singularity at the horizon.
fn distance_to_horizon(n: usize, mass: f64, rho: f64) -> f64 {
    let rho_h = horizon_radius(n, mass);
    let f = |x: f64| sads_lapse_squared(n, mass, x);
    let slope = 2.0 * rho_h + 2.0 * mass * (n as f64 - 2.0) * rho_h.powi(1 - n as i32);
    let integrand = |s: f64| {
        if s == 0.0 {
            2.0 / slope.sqrt()
        } else {
            2.0 / (f(rho_h + s * s) / (s * s)).sqrt()
        }
    };
    let upper = (rho - rho_h).sqrt();
    let intervals = 4000;
    let step = upper / intervals as f64;
    let mut sum = integrand(0.0) + integrand(upper);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * integrand(i as f64 * step);
    }
    sum * step / 3.0
}

/// RK4 for `dρ/dr = V(ρ)` from `r0` to `r1`.
fn integrate_radius(lapse: &dyn Fn(f64) -> f64, r0: f64, rho0: f64, r1: f64) -> f64 {
    let span = r1 - r0;
    if span == 0.0 {
        return rho0;
    }
    let steps = (span.abs() / 5e-4).ceil().max(1.0) as usize;
    let dr = span / steps as f64;
    let mut y = rho0;
    for _ in 0..steps {
        let k1 = lapse(y);
        let k2 = lapse(y + 0.5 * dr * k1);
        let k3 = lapse(y + 0.5 * dr * k2);
        let k4 = lapse(y + dr * k3);
        y += dr / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationTarget {
    A,
    B,
    V,
}

/// Multiplies one profile by `1 + ε exp(-μ (r - r₀)²/w²) exp(-μ max(r - r₀, 0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub decay: f64,
    pub target: PerturbationTarget,
}

impl PerturbationSpec {
    pub const MAX_AMPLITUDE: f64 = 0.5;

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "perturbation width {} must be positive",
                self.width
            )));
        }
        if !(self.amplitude.abs() < Self::MAX_AMPLITUDE) {
            return Err(Error::InvalidParameter(format!(
                "perturbation amplitude {} must satisfy |ε| < {}",
                self.amplitude,
                Self::MAX_AMPLITUDE
            )));
        }
        if !(self.center.is_finite() && self.decay.is_finite()) {
            return Err(Error::InvalidParameter("center and decay must be finite".into()));
        }
        Ok(())
    }

    pub fn factor(&self, r: f64) -> f64 {
        let x = r - self.center;
        let bump = (-self.decay * x * x / (self.width * self.width)).exp();
        let tail = (-self.decay * x.max(0.0)).exp();
        1.0 + self.amplitude * bump * tail
    }
}

pub fn perturb(t: &StaticTriple, p: &PerturbationSpec) -> Result<StaticTriple> {
    p.validate()?;
    let g = t.metric();
    let grid = *t.grid();
    let scale = |f: &Profile| -> Profile {
        let values = grid
            .nodes()
            .zip(f.values())
            .map(|(r, v)| v * p.factor(r))
            .collect();
        Profile::new(grid, values).expect("scaled samples stay finite")
    };
    let (a, b, v) = match p.target {
        PerturbationTarget::A => (scale(g.a()), g.b().clone(), t.lapse().clone()),
        PerturbationTarget::B => (g.a().clone(), scale(g.b()), t.lapse().clone()),
        PerturbationTarget::V => (g.a().clone(), g.b().clone(), scale(t.lapse())),
    };
    let metric = RotSymMetric::with_fiber(g.n(), a, b, g.fiber_curvature())?;
    StaticTriple::new(metric, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sectional_defect, static_residual};

    fn grid() -> RadialGrid {
        RadialGrid::new(1.0, 6.0, 1001).unwrap()
    }

    #[test]
    fn ads_samples() {
        let g = RadialGrid::new(1.0, 2.0, 5).unwrap();
        let t = ads(4, g).unwrap();
        assert_eq!(t.metric().a()[0], 1.0);
        assert!((t.metric().b()[0] - 1.381097845541).abs() < 1e-11);
        assert!((t.lapse()[0] - 1.543080634815).abs() < 1e-11);
    }

    #[test]
    fn sads_lapse_value() {
        assert!((sads_lapse_squared(3, 0.5, 2.0) - 4.5).abs() < 1e-15);
        let t = schwarzschild_ads(3, 0.5, RadialGrid::new(2.0, 3.0, 11).unwrap()).unwrap();
        assert!((t.lapse()[0].powi(2) - 4.5).abs() < 1e-13);
        assert!((t.metric().a()[0] * 4.5 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn horizon_roots() {
        for n in 3..=6 {
            let rh = horizon_radius(n, 0.5);
            assert!(sads_lapse_squared(n, 0.5, rh).abs() < 1e-12, "n = {n}");
        }
        // n = 3: ρ³ + ρ - 1 = 0
        assert!((horizon_radius(3, 0.5) - 0.682_327_803_828_019_3).abs() < 1e-12);
    }

    #[test]
    fn grid_inside_horizon_is_rejected() {
        let g = RadialGrid::new(0.5, 3.0, 101).unwrap();
        assert!(matches!(schwarzschild_ads(3, 0.5, g), Err(Error::Domain(_))));
        let g = RadialGrid::new(0.7, 3.0, 101).unwrap();
        assert!(matches!(schwarzschild_ads(3, 0.5, g), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_fixtures_are_static_vacua() {
        let h2 = grid().spacing().powi(2);
        for n in 3..=5 {
            let r2 = static_residual(&schwarzschild_ads(n, 0.0, grid()).unwrap()).sup();
            let r3 = static_residual(&schwarzschild_ads_geodesic(n, 0.5, grid()).unwrap()).sup();
            assert!(r2 < 500.0 * h2, "n = {n}: {r2}");
            assert!(r3 < 500.0 * h2, "n = {n}: {r3}");
            // near the horizon the area-radius profiles are steep; check the rate
            let coarse = static_residual(&schwarzschild_ads(n, 0.5, grid()).unwrap()).sup();
            let fine = static_residual(&schwarzschild_ads(n, 0.5, grid().refined()).unwrap()).sup();
            let ratio = coarse / fine;
            assert!((3.5..=4.5).contains(&ratio), "n = {n}: {ratio}");
        }
    }

    #[test]
    fn geodesic_gauge_without_mass_is_ads() {
        let t = schwarzschild_ads_geodesic(4, 0.0, grid()).unwrap();
        let a = ads(4, grid()).unwrap();
        for i in 0..grid().count() {
            let rel = |x: f64, y: f64| (x / y - 1.0).abs();
            assert!(rel(t.metric().b()[i], a.metric().b()[i]) < 1e-10);
            assert!(rel(t.lapse()[i], a.lapse()[i]) < 1e-10);
        }
    }

    #[test]
    fn geodesic_distance_matches_area_radius() {
        // dr = dρ / V along the geodesic chart.
        let t = schwarzschild_ads_geodesic(3, 0.5, grid()).unwrap();
        let rho: Vec<f64> = t.metric().b().values().iter().map(|b| b.sqrt()).collect();
        let h = grid().spacing();
        for i in 1..rho.len() - 1 {
            let drho = (rho[i + 1] - rho[i - 1]) / (2.0 * h);
            assert!((drho / t.lapse()[i] - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn small_mass_approaches_ads() {
        let base = schwarzschild_ads(3, 0.0, grid()).unwrap();
        let diff = |m: f64| {
            let t = schwarzschild_ads(3, m, grid()).unwrap();
            t.lapse().zip_with(base.lapse(), |a, b| a - b).unwrap().sup_abs()
        };
        let (d1, d2) = (diff(1e-2), diff(5e-3));
        assert!(d1 < 1e-2);
        assert!((d1 / d2 - 2.0).abs() < 0.05);
    }

    #[test]
    fn heavier_black_hole_has_larger_defect() {
        let heavy = sectional_defect(schwarzschild_ads(3, 0.5, grid()).unwrap().metric());
        let light = sectional_defect(schwarzschild_ads(3, 0.25, grid()).unwrap().metric());
        for i in 0..grid().count() / 2 {
            assert!(heavy[i] > light[i], "node {i}");
        }
    }

    #[test]
    fn perturbation_identity_and_guard() {
        let t = ads(3, grid()).unwrap();
        let mut p = PerturbationSpec {
            amplitude: 0.0,
            center: 0.0,
            width: 3.0,
            decay: 2.0,
            target: PerturbationTarget::B,
        };
        assert_eq!(perturb(&t, &p).unwrap(), t);
        p.amplitude = 0.9;
        p.target = PerturbationTarget::V;
        assert!(matches!(perturb(&t, &p), Err(Error::InvalidParameter(_))));
        p.amplitude = 0.1;
        p.width = 0.0;
        assert!(perturb(&t, &p).is_err());
    }

    #[test]
    fn perturbation_is_smooth_in_amplitude() {
        let t = ads(3, grid()).unwrap();
        let at = |eps: f64| {
            let p = PerturbationSpec {
                amplitude: eps,
                center: 1.5,
                width: 1.0,
                decay: 2.0,
                target: PerturbationTarget::V,
            };
            perturb(&t, &p).unwrap().lapse().clone()
        };
        let (v0, v1, v2) = (at(0.0), at(0.01), at(0.02));
        for i in 0..grid().count() {
            let d1 = v1[i] - v0[i];
            let d2 = v2[i] - v0[i];
            assert!((d2 - 2.0 * d1).abs() <= 1e-12 * v0[i]);
        }
    }
}
