//! Method-of-lines integration of the DeTurck-gauged static flow
//!
//! ```text
//!     ∂g/∂t = -2 Ric(g) - 2n g + 2 V⁻¹∇²V + L_W g
//!     ∂V/∂t = Δ_g V - n V + dV(W)
//! ```
//!
//! with `W^k = g^{ij}(Γ^k_ij - Γ̂^k_ij)` anchored to the initial metric `ĝ`.
//! The right-hand side is assembled from the same log-derivative stencils as
//! [`crate::geometry`]; the lapse enters through `q = V / V̂`, which keeps the
//! lapse equation exactly linear in `V` while staying exact on the background.
//!
//! Both end nodes are Dirichlet nodes pinned to the background. Time stepping
//! is explicit with `dt ≤ cfl · R · h² · min(A) / 4`, where `4/(h² min A)`
//! bounds the spectrum of `g^{rr} ∂²_r` and `R` is the real stability radius
//! of the scheme.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::geometry::{
    self, as_defect, radial_sectional, static_residual, tangential_sectional, RotSymMetric,
    StaticTriple,
};
use crate::grid::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "explicit-rk4")]
    ExplicitRk4,
    #[serde(rename = "explicit-euler")]
    ExplicitEuler,
}

impl Scheme {
    /// Extent of the stability region along the negative real axis.
    pub fn stability_radius(self) -> f64 {
        match self {
            Scheme::ExplicitEuler => 2.0,
            Scheme::ExplicitRk4 => 2.785,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowControls {
    pub t_end: f64,
    #[serde(default = "FlowControls::default_cfl")]
    pub cfl: f64,
    #[serde(default = "FlowControls::default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "FlowControls::default_monitor_every")]
    pub monitor_every: usize,
    /// Early stop once the weighted deviation exceeds this value.
    #[serde(default = "FlowControls::default_budget")]
    pub deviation_budget: f64,
}

impl FlowControls {
    fn default_cfl() -> f64 {
        0.25
    }

    fn default_scheme() -> Scheme {
        Scheme::ExplicitRk4
    }

    fn default_monitor_every() -> usize {
        100
    }

    fn default_budget() -> f64 {
        f64::INFINITY
    }

    pub fn new(t_end: f64) -> Result<Self> {
        let c = Self {
            t_end,
            cfl: Self::default_cfl(),
            scheme: Self::default_scheme(),
            monitor_every: Self::default_monitor_every(),
            deviation_budget: Self::default_budget(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end = {} must be positive", self.t_end)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if self.monitor_every == 0 {
            return Err(Error::InvalidParameter("monitor_every must be positive".into()));
        }
        if !(self.deviation_budget > 0.0) {
            return Err(Error::InvalidParameter("deviation budget must be positive".into()));
        }
        Ok(())
    }
}

/// Frozen initial data with the derivatives the gauge needs.
#[derive(Debug)]
struct Background {
    triple: StaticTriple,
    a1: Vec<f64>,
    b1: Vec<f64>,
    /// `V̂'/V̂`
    v1: Vec<f64>,
    /// `V̂''/V̂`
    v_second: Vec<f64>,
}

impl Background {
    fn new(triple: StaticTriple) -> Self {
        let h = triple.grid().spacing();
        let ln = |p: &Profile| p.values().iter().map(|x| x.ln()).collect::<Vec<_>>();
        let g = triple.metric();
        let lv = ln(triple.lapse());
        let v1 = fd::d1(&lv, h);
        let v2 = fd::d2(&lv, h);
        let v_second = v1.iter().zip(&v2).map(|(p, s)| s + p * p).collect();
        Self {
            a1: fd::d1(&ln(g.a()), h),
            b1: fd::d1(&ln(g.b()), h),
            v1,
            v_second,
            triple,
        }
    }

    fn a(&self) -> &[f64] {
        self.triple.metric().a().values()
    }

    fn b(&self) -> &[f64] {
        self.triple.metric().b().values()
    }

    fn v(&self) -> &[f64] {
        self.triple.lapse().values()
    }
}

/// `(g(t), V(t), t)` together with the frozen background `(ĝ, V̂)`.
#[derive(Debug, Clone)]
pub struct FlowState {
    metric: RotSymMetric,
    lapse: Profile,
    t: f64,
    background: Arc<Background>,
}

impl FlowState {
    /// Starts the flow at `t = 0` with the initial data as its own background.
    pub fn new(initial: StaticTriple) -> Self {
        let (metric, lapse) = initial.clone().into_parts();
        Self {
            metric,
            lapse,
            t: 0.0,
            background: Arc::new(Background::new(initial)),
        }
    }

    pub fn with_background(
        metric: RotSymMetric,
        lapse: Profile,
        t: f64,
        background: StaticTriple,
    ) -> Result<Self> {
        let triple = StaticTriple::new(metric, lapse)?;
        if triple.grid() != background.grid() {
            return Err(Error::GridMismatch);
        }
        if triple.n() != background.n() {
            return Err(Error::DimensionMismatch(triple.n(), background.n()));
        }
        if triple.metric().fiber_curvature() != background.metric().fiber_curvature() {
            return Err(Error::InvalidParameter("background lives over a different fiber".into()));
        }
        let (metric, lapse) = triple.into_parts();
        Ok(Self {
            metric,
            lapse,
            t,
            background: Arc::new(Background::new(background)),
        })
    }

    pub fn metric(&self) -> &RotSymMetric {
        &self.metric
    }

    pub fn lapse(&self) -> &Profile {
        &self.lapse
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn background(&self) -> &StaticTriple {
        &self.background.triple
    }

    pub fn triple(&self) -> StaticTriple {
        StaticTriple::new(self.metric.clone(), self.lapse.clone())
            .expect("flow states keep a positive lapse")
    }
}

/// Time derivatives of the three profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub da: Profile,
    pub db: Profile,
    pub dv: Profile,
}

struct Kernel<'a> {
    n: f64,
    k: f64,
    h: f64,
    bg: &'a Background,
}

impl Kernel<'_> {
    fn of(s: &FlowState) -> Kernel<'_> {
        Kernel {
            n: s.metric.n() as f64,
            k: s.metric.fiber_curvature(),
            h: s.metric.grid().spacing(),
            bg: &s.background,
        }
    }

    fn eval(&self, a: &[f64], b: &[f64], v: &[f64]) -> Result<[Vec<f64>; 3]> {
        let len = a.len();
        for i in 0..len {
            if !(a[i].is_finite() && b[i].is_finite() && v[i].is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            if !(a[i] > 0.0 && b[i] > 0.0) {
                return Err(Error::Signature { node: i, a: a[i], b: b[i] });
            }
            if !(v[i] > 0.0) {
                return Err(Error::Lapse { node: i, value: v[i] });
            }
        }
        let bg = self.bg;
        let (a_hat, b_hat, v_hat) = (bg.a(), bg.b(), bg.v());
        let h = self.h;
        let la: Vec<f64> = a.iter().map(|x| x.ln()).collect();
        let lb: Vec<f64> = b.iter().map(|x| x.ln()).collect();
        let q: Vec<f64> = v.iter().zip(v_hat).map(|(x, y)| x / y).collect();
        let a1 = fd::d1(&la, h);
        let b1 = fd::d1(&lb, h);
        let b2 = fd::d2(&lb, h);
        let q1 = fd::d1(&q, h);
        let q2 = fd::d2(&q, h);
        let w = geometry::deturck_from_parts(
            self.n as usize,
            a,
            b,
            &a1,
            &b1,
            a_hat,
            b_hat,
            &bg.a1,
            &bg.b1,
        );
        let w1 = fd::d1(&w, h);

        let (n, k) = (self.n, self.k);
        let mut da = vec![0.0; len];
        let mut db = vec![0.0; len];
        let mut dv = vec![0.0; len];
        for i in 0..len {
            let kr = radial_sectional(a[i], a1[i], b1[i], b2[i]);
            let kt = tangential_sectional(k, a[i], b[i], b1[i]);
            // V'/V̂ and V''/V̂
            let p1 = bg.v1[i] * q[i] + q1[i];
            let p2 = bg.v_second[i] * q[i] + 2.0 * bg.v1[i] * q1[i] + q2[i];
            let radial_hess = p2 - 0.5 * a1[i] * p1;
            let fiber_hess = 0.5 * b1[i] * p1 / a[i];
            da[i] = a[i]
                * (-2.0 * (n - 1.0) * kr - 2.0 * n + 2.0 * radial_hess / (a[i] * q[i])
                    + w[i] * a1[i]
                    + 2.0 * w1[i]);
            db[i] = b[i]
                * (-2.0 * (kr + (n - 2.0) * kt) - 2.0 * n + 2.0 * fiber_hess / q[i] + w[i] * b1[i]);
            dv[i] = v_hat[i]
                * (radial_hess / a[i] + (n - 1.0) * fiber_hess - n * q[i] + w[i] * p1);
        }
        for (i, ((x, y), z)) in da.iter().zip(&db).zip(&dv).enumerate() {
            if !(x.is_finite() && y.is_finite() && z.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
        }
        Ok([da, db, dv])
    }
}

pub fn rhs(s: &FlowState) -> Result<Derivative> {
    let [da, db, dv] = Kernel::of(s).eval(s.metric.a().values(), s.metric.b().values(), s.lapse.values())?;
    let grid = *s.metric.grid();
    Ok(Derivative {
        da: Profile::from_raw(grid, da),
        db: Profile::from_raw(grid, db),
        dv: Profile::from_raw(grid, dv),
    })
}

/// Largest admissible explicit step for the current state.
pub fn stable_dt(s: &FlowState, scheme: Scheme) -> f64 {
    let h = s.metric.grid().spacing();
    scheme.stability_radius() * h * h * s.metric.a().min() / 4.0
}

type Fields = [Vec<f64>; 3];

fn combine(base: &Fields, incs: &[(f64, &Fields)]) -> Fields {
    let mut out = base.clone();
    for (c, inc) in incs {
        for (o, d) in out.iter_mut().zip(inc.iter()) {
            for (x, y) in o.iter_mut().zip(d) {
                *x += c * y;
            }
        }
    }
    out
}

fn pin_derivative(mut d: Fields) -> Fields {
    for f in d.iter_mut() {
        let last = f.len() - 1;
        f[0] = 0.0;
        f[last] = 0.0;
    }
    d
}

/// Advances one explicit step, holding both end nodes at the background.
pub fn step(s: &FlowState, dt: f64, scheme: Scheme) -> Result<FlowState> {
    if dt == 0.0 {
        return Ok(s.clone());
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    let limit = stable_dt(s, scheme);
    if dt > limit {
        return Err(Error::Unstable { dt, limit });
    }
    let kernel = Kernel::of(s);
    let f = |y: &Fields| kernel.eval(&y[0], &y[1], &y[2]).map(pin_derivative);
    let y0: Fields = [
        s.metric.a().values().to_vec(),
        s.metric.b().values().to_vec(),
        s.lapse.values().to_vec(),
    ];
    let mut y1 = match scheme {
        Scheme::ExplicitEuler => {
            let k1 = f(&y0)?;
            combine(&y0, &[(dt, &k1)])
        }
        Scheme::ExplicitRk4 => {
            let k1 = f(&y0)?;
            let k2 = f(&combine(&y0, &[(0.5 * dt, &k1)]))?;
            let k3 = f(&combine(&y0, &[(0.5 * dt, &k2)]))?;
            let k4 = f(&combine(&y0, &[(dt, &k3)]))?;
            combine(
                &y0,
                &[
                    (dt / 6.0, &k1),
                    (dt / 3.0, &k2),
                    (dt / 3.0, &k3),
                    (dt / 6.0, &k4),
                ],
            )
        }
    };
    let bg = &s.background;
    for (field, pinned) in y1.iter_mut().zip([bg.a(), bg.b(), bg.v()]) {
        let last = field.len() - 1;
        field[0] = pinned[0];
        field[last] = pinned[last];
    }
    let [a, b, v] = y1;
    let grid = *s.metric.grid();
    let metric = RotSymMetric::with_fiber(
        s.metric.n(),
        Profile::new(grid, a)?,
        Profile::new(grid, b)?,
        s.metric.fiber_curvature(),
    )?;
    let lapse = Profile::new(grid, v)?;
    if let Some(node) = lapse.first_non_positive() {
        return Err(Error::Lapse { node, value: lapse[node] });
    }
    Ok(FlowState {
        metric,
        lapse,
        t: s.t + dt,
        background: Arc::clone(&s.background),
    })
}

/// Pointwise `‖g - ĝ‖_ĝ + ‖∇̂ g‖_ĝ`.
///
/// With `α = A/Â - 1` and `β = B/B̂ - 1`:
///
/// ```text
///     ‖g - ĝ‖² = α² + (n-1) β²
///     ‖∇̂g‖²   = (α'² + (n-1) β'² + (n-1) b̂'² (α - β)² / 2) / Â
/// ```
pub fn deviation_profile(s: &FlowState) -> Profile {
    let bg = &s.background;
    let m = (s.metric.n() - 1) as f64;
    let (a, b) = (s.metric.a().values(), s.metric.b().values());
    let alpha: Vec<f64> = a.iter().zip(bg.a()).map(|(x, y)| x / y - 1.0).collect();
    let beta: Vec<f64> = b.iter().zip(bg.b()).map(|(x, y)| x / y - 1.0).collect();
    let h = s.metric.grid().spacing();
    let alpha1 = fd::d1(&alpha, h);
    let beta1 = fd::d1(&beta, h);
    let values = (0..a.len())
        .map(|i| {
            let value = (alpha[i] * alpha[i] + m * beta[i] * beta[i]).sqrt();
            let mix = alpha[i] - beta[i];
            let grad = (alpha1[i] * alpha1[i]
                + m * beta1[i] * beta1[i]
                + 0.5 * m * bg.b1[i] * bg.b1[i] * mix * mix)
                / bg.a()[i];
            value + grad.sqrt()
        })
        .collect();
    Profile::from_raw(*s.metric.grid(), values)
}

/// `sup e^{2r} (‖g - ĝ‖_ĝ + ‖∇̂ g‖_ĝ)`.
pub fn weighted_deviation(s: &FlowState) -> f64 {
    geometry::weighted_sup(&deviation_profile(s), 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BudgetExceeded,
    PositivityLost,
    Nonfinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub times: Vec<f64>,
    pub weighted_dev: Vec<f64>,
    pub min_lapse: Vec<f64>,
    pub as_defect: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub terminated: Termination,
    pub steps: usize,
    /// Diagnostic for early termination.
    pub detail: Option<String>,
}

impl FlowReport {
    fn empty() -> Self {
        Self {
            times: vec![],
            weighted_dev: vec![],
            min_lapse: vec![],
            as_defect: vec![],
            residual_norms: vec![],
            terminated: Termination::Completed,
            steps: 0,
            detail: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_weighted_dev(&self) -> f64 {
        self.weighted_dev.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    fn record(&mut self, s: &FlowState) -> f64 {
        let triple = s.triple();
        let dev = weighted_deviation(s);
        self.times.push(s.t);
        self.weighted_dev.push(dev);
        self.min_lapse.push(s.lapse.min());
        self.as_defect
            .push(as_defect(&triple, 2.0).map(|d| d.d2).unwrap_or(f64::NAN));
        self.residual_norms.push(static_residual(&triple).sup());
        dev
    }
}

fn classify(e: &Error) -> Termination {
    match e {
        Error::NonFinite { .. } => Termination::Nonfinite,
        _ => Termination::PositivityLost,
    }
}

/// Runs the flow from `initial` (which also serves as background and as the
/// reference metric of the deviation monitor).
pub fn evolve(initial: &StaticTriple, controls: &FlowControls) -> FlowReport {
    let mut report = FlowReport::empty();
    if let Err(e) = controls.validate() {
        report.terminated = Termination::Nonfinite;
        report.detail = Some(e.to_string());
        return report;
    }
    let mut state = FlowState::new(initial.clone());
    let dev = report.record(&state);
    if dev > controls.deviation_budget {
        report.terminated = Termination::BudgetExceeded;
        return report;
    }
    while state.t < controls.t_end {
        let limit = controls.cfl * stable_dt(&state, controls.scheme);
        let remaining = controls.t_end - state.t;
        let dt = remaining.min(limit);
        match step(&state, dt, controls.scheme) {
            Ok(mut next) => {
                if remaining <= limit {
                    next.t = controls.t_end;
                }
                state = next;
            }
            Err(e) => {
                report.terminated = classify(&e);
                report.detail = Some(e.to_string());
                return report;
            }
        }
        report.steps += 1;
        let done = state.t >= controls.t_end;
        if report.steps % controls.monitor_every == 0 || done {
            let dev = report.record(&state);
            if dev > controls.deviation_budget {
                report.terminated = Termination::BudgetExceeded;
                report.detail = Some(format!(
                    "weighted deviation {dev:e} exceeds budget {:e} at t = {}",
                    controls.deviation_budget, state.t
                ));
                return report;
            }
        }
    }
    report
}

/// Like [`evolve`], but accepts a lapse that may fail positivity; such data
/// terminate immediately with [`Termination::PositivityLost`].
pub fn evolve_profiles(metric: &RotSymMetric, lapse: &Profile, controls: &FlowControls) -> Result<FlowReport> {
    metric.a().check_same_grid(lapse)?;
    match StaticTriple::new(metric.clone(), lapse.clone()) {
        Ok(t) => Ok(evolve(&t, controls)),
        Err(e @ Error::Lapse { .. }) => {
            let mut report = FlowReport::empty();
            report.terminated = Termination::PositivityLost;
            report.detail = Some(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

/// Maximum weighted deviation of a run up to `horizon`; infinite when the run
/// stops early.
pub fn stationarity_drift(t: &StaticTriple, horizon: f64, controls: &FlowControls) -> f64 {
    let controls = FlowControls {
        t_end: horizon,
        ..*controls
    };
    let report = evolve(t, &controls);
    match report.terminated {
        Termination::Completed => report.max_weighted_dev(),
        _ => f64::INFINITY,
    }
}
