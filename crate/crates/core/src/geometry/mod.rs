//! Differential geometry of rotationally symmetric metrics
//!
//! ```text
//!     g = A(r) dr² + B(r) σ_k
//! ```
//!
//! where `σ_k` is the (n-1)-dimensional space form of constant sectional
//! curvature `k` (the unit round sphere for `k = 1`, flat space for `k = 0`).
//!
//! All operators are evaluated from derivatives of the logarithms
//! `a = ln A`, `b = ln B`, `v = ln V`, discretized with second-order central
//! differences (one-sided at the two end nodes). Profiles that grow like
//! `e^{2r}` have log-derivatives whose higher derivatives decay, so the
//! truncation error measured in the orthonormal frame stays uniform towards
//! conformal infinity instead of growing with the profile.
//!
//! In terms of the log-derivatives, the two sectional curvatures are
//!
//! ```text
//!     K_rad = -(b''/2 + b'²/4 - a'b'/4) / A        (planes containing ∂r)
//!     K_tan = k/B - b'²/(4A)                       (tangential planes)
//! ```
//!
//! and `Ric(∂r,∂r) = (n-1) A K_rad`, `Ric|_σ = B (K_rad + (n-2) K_tan) σ`.

pub mod chart;

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::{Profile, RadialGrid};

pub use chart::{lift_block_check, lifted_ricci, LiftBlockResidual, LiftedRicci, WarpedChart};

/// `g = A dr² + B σ_k` in dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotSymMetric {
    n: usize,
    a: Profile,
    b: Profile,
    fiber_curvature: f64,
}

impl RotSymMetric {
    /// Metric warped over the unit round sphere.
    pub fn new(n: usize, a: Profile, b: Profile) -> Result<Self> {
        Self::with_fiber(n, a, b, 1.0)
    }

    /// Metric warped over the space form of sectional curvature `k`.
    pub fn with_fiber(n: usize, a: Profile, b: Profile, k: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        a.check_same_grid(&b)?;
        if !k.is_finite() {
            return Err(Error::InvalidParameter("fiber curvature must be finite".into()));
        }
        for (node, (&av, &bv)) in a.values().iter().zip(b.values()).enumerate() {
            if !(av > 0.0 && bv > 0.0 && av.is_finite() && bv.is_finite()) {
                return Err(Error::Signature { node, a: av, b: bv });
            }
        }
        Ok(Self {
            n,
            a,
            b,
            fiber_curvature: k,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &RadialGrid {
        self.a.grid()
    }

    pub fn a(&self) -> &Profile {
        &self.a
    }

    pub fn b(&self) -> &Profile {
        &self.b
    }

    pub fn fiber_curvature(&self) -> f64 {
        self.fiber_curvature
    }

    fn log_derivatives(&self) -> LogDerivatives {
        LogDerivatives::of(&self.a, &self.b)
    }
}

/// A candidate static vacuum `(M, g, V)` with positive lapse.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTriple {
    metric: RotSymMetric,
    lapse: Profile,
}

impl StaticTriple {
    pub fn new(metric: RotSymMetric, lapse: Profile) -> Result<Self> {
        metric.a.check_same_grid(&lapse)?;
        if let Some(node) = lapse.first_non_positive() {
            return Err(Error::Lapse {
                node,
                value: lapse[node],
            });
        }
        if let Some(node) = lapse.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(Self { metric, lapse })
    }

    pub fn metric(&self) -> &RotSymMetric {
        &self.metric
    }

    pub fn lapse(&self) -> &Profile {
        &self.lapse
    }

    pub fn n(&self) -> usize {
        self.metric.n
    }

    pub fn grid(&self) -> &RadialGrid {
        self.metric.grid()
    }

    pub fn into_parts(self) -> (RotSymMetric, Profile) {
        (self.metric, self.lapse)
    }
}

/// First and second derivatives of `ln A` and `ln B`.
#[derive(Debug, Clone)]
pub(crate) struct LogDerivatives {
    pub a1: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
}

impl LogDerivatives {
    fn of(a: &Profile, b: &Profile) -> Self {
        let h = a.grid().spacing();
        let la: Vec<f64> = a.values().iter().map(|v| v.ln()).collect();
        let lb: Vec<f64> = b.values().iter().map(|v| v.ln()).collect();
        Self {
            a1: fd::d1(&la, h),
            b1: fd::d1(&lb, h),
            b2: fd::d2(&lb, h),
        }
    }
}

/// First and second derivatives of `ln V`.
pub(crate) fn lapse_log_derivatives(lapse: &Profile) -> (Vec<f64>, Vec<f64>) {
    let h = lapse.grid().spacing();
    let lv: Vec<f64> = lapse.values().iter().map(|v| v.ln()).collect();
    (fd::d1(&lv, h), fd::d2(&lv, h))
}

#[inline]
pub(crate) fn radial_sectional(a: f64, a1: f64, b1: f64, b2: f64) -> f64 {
    -(0.5 * b2 + 0.25 * b1 * b1 - 0.25 * a1 * b1) / a
}

#[inline]
pub(crate) fn tangential_sectional(k: f64, a: f64, b: f64, b1: f64) -> f64 {
    k / b - 0.25 * b1 * b1 / a
}

/// Ricci tensor `ric_rr dr² + ric_sph σ` and scalar curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureComponents {
    pub ric_rr: Profile,
    pub ric_sph: Profile,
    pub scal: Profile,
}

/// Sectional curvatures of the two plane types.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionalCurvatures {
    /// Planes containing the radial direction.
    pub radial: Profile,
    /// Planes tangent to the fiber.
    pub tangential: Profile,
}

pub fn sectional_curvatures(g: &RotSymMetric) -> SectionalCurvatures {
    let d = g.log_derivatives();
    let (a, b) = (g.a.values(), g.b.values());
    let k = g.fiber_curvature;
    let grid = *g.grid();
    let radial = (0..grid.count())
        .map(|i| radial_sectional(a[i], d.a1[i], d.b1[i], d.b2[i]))
        .collect();
    let tangential = (0..grid.count())
        .map(|i| tangential_sectional(k, a[i], b[i], d.b1[i]))
        .collect();
    SectionalCurvatures {
        radial: Profile::from_raw(grid, radial),
        tangential: Profile::from_raw(grid, tangential),
    }
}

pub fn ricci(g: &RotSymMetric) -> CurvatureComponents {
    let sc = sectional_curvatures(g);
    let n = g.n as f64;
    let grid = *g.grid();
    let (a, b) = (g.a.values(), g.b.values());
    let mut ric_rr = Vec::with_capacity(grid.count());
    let mut ric_sph = Vec::with_capacity(grid.count());
    let mut scal = Vec::with_capacity(grid.count());
    for i in 0..grid.count() {
        let kr = sc.radial[i];
        let kt = sc.tangential[i];
        ric_rr.push((n - 1.0) * a[i] * kr);
        ric_sph.push(b[i] * (kr + (n - 2.0) * kt));
        scal.push((n - 1.0) * (2.0 * kr + (n - 2.0) * kt));
    }
    CurvatureComponents {
        ric_rr: Profile::from_raw(grid, ric_rr),
        ric_sph: Profile::from_raw(grid, ric_sph),
        scal: Profile::from_raw(grid, scal),
    }
}

/// `∇²f = rr dr² + sph σ` for a radial function `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHessian {
    pub rr: Profile,
    pub sph: Profile,
}

/// Hessian of a radial function: `f'' - (A'/2A) f'` and `(B'/2A) f'`.
pub fn hessian_radial(g: &RotSymMetric, f: &Profile) -> Result<RadialHessian> {
    g.a.check_same_grid(f)?;
    let grid = *g.grid();
    let h = grid.spacing();
    let d = g.log_derivatives();
    let f1 = fd::d1(f.values(), h);
    let f2 = fd::d2(f.values(), h);
    let (a, b) = (g.a.values(), g.b.values());
    let rr = (0..grid.count())
        .map(|i| f2[i] - 0.5 * d.a1[i] * f1[i])
        .collect();
    let sph = (0..grid.count())
        .map(|i| 0.5 * b[i] * d.b1[i] * f1[i] / a[i])
        .collect();
    Ok(RadialHessian {
        rr: Profile::from_raw(grid, rr),
        sph: Profile::from_raw(grid, sph),
    })
}

pub fn laplacian_radial(g: &RotSymMetric, f: &Profile) -> Result<Profile> {
    let hess = hessian_radial(g, f)?;
    let m = (g.n - 1) as f64;
    let (a, b) = (g.a.values(), g.b.values());
    Ok(Profile::from_raw(
        *g.grid(),
        (0..a.len())
            .map(|i| hess.rr[i] / a[i] + m * hess.sph[i] / b[i])
            .collect(),
    ))
}

/// `V⁻¹∇²V` and `V⁻¹ΔV` from the log-derivatives of the lapse. The result is
/// invariant under `V ↦ λV`.
#[derive(Debug, Clone, PartialEq)]
pub struct LapseHessian {
    pub rr: Profile,
    pub sph: Profile,
    pub laplacian: Profile,
}

pub fn lapse_hessian(t: &StaticTriple) -> LapseHessian {
    let g = &t.metric;
    let d = g.log_derivatives();
    let (v1, v2) = lapse_log_derivatives(&t.lapse);
    let grid = *g.grid();
    let m = (g.n - 1) as f64;
    let (a, b) = (g.a.values(), g.b.values());
    let mut rr = Vec::with_capacity(grid.count());
    let mut sph = Vec::with_capacity(grid.count());
    let mut lap = Vec::with_capacity(grid.count());
    for i in 0..grid.count() {
        let hrr = v2[i] + v1[i] * v1[i] - 0.5 * d.a1[i] * v1[i];
        let hs = 0.5 * d.b1[i] * v1[i] / a[i];
        rr.push(hrr);
        sph.push(b[i] * hs);
        lap.push(hrr / a[i] + m * hs);
    }
    LapseHessian {
        rr: Profile::from_raw(grid, rr),
        sph: Profile::from_raw(grid, sph),
        laplacian: Profile::from_raw(grid, lap),
    }
}

/// Residuals of `Ric(g) + n g - V⁻¹∇²V = 0` and `V⁻¹Δ_g V - n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticResidual {
    pub tensor_rr: Profile,
    pub tensor_sph: Profile,
    /// `V⁻¹ Δ_g V - n`.
    pub scalar: Profile,
    /// `‖tensor‖_g` in the orthonormal frame.
    pub tensor_norm: Profile,
}

impl StaticResidual {
    pub fn tensor_sup(&self) -> f64 {
        self.tensor_norm.sup_abs()
    }

    pub fn scalar_sup(&self) -> f64 {
        self.scalar.sup_abs()
    }

    pub fn sup(&self) -> f64 {
        self.tensor_sup().max(self.scalar_sup())
    }
}

pub fn static_residual(t: &StaticTriple) -> StaticResidual {
    let g = &t.metric;
    let ric = ricci(g);
    let vh = lapse_hessian(t);
    let n = g.n as f64;
    let grid = *g.grid();
    let (a, b) = (g.a.values(), g.b.values());
    let tensor_rr: Vec<f64> = (0..grid.count())
        .map(|i| ric.ric_rr[i] + n * a[i] - vh.rr[i])
        .collect();
    let tensor_sph: Vec<f64> = (0..grid.count())
        .map(|i| ric.ric_sph[i] + n * b[i] - vh.sph[i])
        .collect();
    let scalar = vh.laplacian.map(|l| l - n);
    let tensor_norm = frame_norm(g, &tensor_rr, &tensor_sph);
    StaticResidual {
        tensor_rr: Profile::from_raw(grid, tensor_rr),
        tensor_sph: Profile::from_raw(grid, tensor_sph),
        scalar,
        tensor_norm,
    }
}

/// Pointwise `‖T‖_g` of a symmetric tensor `T = rr dr² + sph σ`, taken in the
/// orthonormal frame `{A^{-1/2} ∂r, B^{-1/2} e_a}`.
pub fn frame_norm(g: &RotSymMetric, rr: &[f64], sph: &[f64]) -> Profile {
    let m = (g.n - 1) as f64;
    let (a, b) = (g.a.values(), g.b.values());
    Profile::from_raw(
        *g.grid(),
        (0..a.len())
            .map(|i| {
                let x = rr[i] / a[i];
                let y = sph[i] / b[i];
                (x * x + m * y * y).sqrt()
            })
            .collect(),
    )
}

/// Pointwise `max(|K_rad + 1|, |K_tan + 1|)`.
pub fn sectional_defect(g: &RotSymMetric) -> Profile {
    let sc = sectional_curvatures(g);
    sc.radial
        .zip_with(&sc.tangential, |kr, kt| (kr + 1.0).abs().max((kt + 1.0).abs()))
        .expect("same grid")
}

/// Weighted decay of the static defects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsDefect {
    /// `sup e^{2r} ‖Ric + n g - V⁻¹∇²V‖_g`.
    pub d2: f64,
    /// `sup e^{a r} ‖∇(V⁻¹ΔV)‖_g`.
    pub da: f64,
}

pub fn as_defect(t: &StaticTriple, order: f64) -> Result<AsDefect> {
    if !(order >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "decay order {order} must be at least 2"
        )));
    }
    let res = static_residual(t);
    let grid = *t.grid();
    let vh = lapse_hessian(t);
    let dq = fd::d1(vh.laplacian.values(), grid.spacing());
    let a = t.metric.a.values();
    let grad = Profile::from_raw(
        grid,
        dq.iter().zip(a).map(|(q, a)| q.abs() / a.sqrt()).collect(),
    );
    Ok(AsDefect {
        d2: weighted_sup(&res.tensor_norm, 2.0),
        da: weighted_sup(&grad, order),
    })
}

/// Radial component `W^r` of `W^k = g^{ij}(Γ^k_ij - Γ̂^k_ij)`; the fiber
/// components vanish by symmetry.
///
/// ```text
///     W^r = (a' - â')/(2A) - (n-1)/2 · (b'/A - (B̂/B) b̂'/Â)
/// ```
///
/// The Christoffel differences are formed before anything else, so
/// `deturck_field(g, g)` is identically zero.
pub fn deturck_field(g: &RotSymMetric, g_hat: &RotSymMetric) -> Result<Profile> {
    g.a.check_same_grid(&g_hat.a)?;
    if g.n != g_hat.n {
        return Err(Error::DimensionMismatch(g.n, g_hat.n));
    }
    if g.fiber_curvature != g_hat.fiber_curvature {
        return Err(Error::InvalidParameter(
            "metrics are warped over different fibers".into(),
        ));
    }
    let d = g.log_derivatives();
    let dh = g_hat.log_derivatives();
    Ok(Profile::from_raw(
        *g.grid(),
        deturck_from_parts(
            g.n,
            g.a.values(),
            g.b.values(),
            &d.a1,
            &d.b1,
            g_hat.a.values(),
            g_hat.b.values(),
            &dh.a1,
            &dh.b1,
        ),
    ))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn deturck_from_parts(
    n: usize,
    a: &[f64],
    b: &[f64],
    a1: &[f64],
    b1: &[f64],
    a_hat: &[f64],
    b_hat: &[f64],
    a1_hat: &[f64],
    b1_hat: &[f64],
) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..a.len())
        .map(|i| {
            let radial = 0.5 * (a1[i] - a1_hat[i]) / a[i];
            let fiber = b1[i] / a[i] - (b_hat[i] / b[i]) * b1_hat[i] / a_hat[i];
            radial - 0.5 * m * fiber
        })
        .collect()
}

/// `L_W g` for `W = w ∂r`: `rr = w A' + 2A w'`, `sph = w B'`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieDerivative {
    pub rr: Profile,
    pub sph: Profile,
}

pub fn lie_derivative_radial(g: &RotSymMetric, w: &Profile) -> Result<LieDerivative> {
    g.a.check_same_grid(w)?;
    let grid = *g.grid();
    let d = g.log_derivatives();
    let w1 = fd::d1(w.values(), grid.spacing());
    let (a, b) = (g.a.values(), g.b.values());
    let rr = (0..grid.count())
        .map(|i| a[i] * (w[i] * d.a1[i] + 2.0 * w1[i]))
        .collect();
    let sph = (0..grid.count()).map(|i| b[i] * w[i] * d.b1[i]).collect();
    Ok(LieDerivative {
        rr: Profile::from_raw(grid, rr),
        sph: Profile::from_raw(grid, sph),
    })
}

/// `sup_r e^{μ r} |f(r)|`.
pub fn weighted_sup(f: &Profile, mu: f64) -> f64 {
    f.grid()
        .nodes()
        .zip(f.values())
        .fold(0.0, |m, (r, v)| m.max((mu * r).exp() * v.abs()))
}
