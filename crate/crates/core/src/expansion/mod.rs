//! Expansion of static vacua at conformal infinity.
//!
//! Near the boundary a static vacuum is written as
//!
//! ```text
//!     g = τ⁻² (dτ² + g_τ),     V = u(τ) / τ,     u(0) = 1,
//! ```
//!
//! and for an Einstein boundary metric `ĝ` (`Ric(ĝ) = S/(n-1) ĝ`) the ansatz
//! `g_τ = c(τ) ĝ` closes: every tensor in the tangential equation is a
//! multiple of `ĝ`, because `Ric(c ĝ) = Ric(ĝ)` and `u` depends on `τ` only.
//! The two scalar equations are solved order by order. At order `m` the
//! `τ^{m-1}` coefficients are affine in `(c_m, u_m)` with matrix
//!
//! ```text
//!     m · [ m-2n+1     -2   ]
//!         [ -(n-1)/2  m-1-n ]
//! ```
//!
//! which is invertible for `m < n` and singular at `m = n`.

mod series;

use serde::{Deserialize, Serialize};

pub use series::TruncatedSeries;

use crate::error::{Error, Result};
use crate::geometry::{RotSymMetric, StaticTriple};
use crate::grid::{Profile, RadialGrid};

/// Determinants below this magnitude count as singular.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Einstein boundary metric of dimension `n - 1`, described by its scalar
/// curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EinsteinBoundary {
    pub n: usize,
    pub scal: f64,
}

impl EinsteinBoundary {
    pub fn new(n: usize, scal: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        if !scal.is_finite() {
            return Err(Error::InvalidParameter("boundary scalar curvature must be finite".into()));
        }
        Ok(Self { n, scal })
    }

    /// Unit round sphere `S^{n-1}`, `S = (n-1)(n-2)`.
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(n, ((n - 1) * (n - 2)) as f64)
    }

    /// Constant sectional curvature of the boundary, `S / ((n-1)(n-2))`.
    pub fn sectional_curvature(&self) -> f64 {
        self.scal / ((self.n - 1) * (self.n - 2)) as f64
    }

    fn einstein_constant(&self) -> f64 {
        self.scal / (self.n - 1) as f64
    }
}

/// Residual series of the tangential and lapse equations for
/// `g_τ = c(τ) ĝ` and `u = τ V`.
///
/// Tangential (divided by `ĝ_ij`), with `tr = g^{kl} g'_kl = (n-1) c'/c`:
///
/// ```text
///     τ u c'' + (1-n) u c' - u tr c - τ u c'²/c + (τ/2) u tr c'
///         - 2 τ u S/(n-1) - 2 u' c + τ u' c'
/// ```
///
/// Lapse: `τ u'' - n u' + (τ/2) tr u' - (1/2) tr u`.
pub fn reduce_equations(
    b: &EinsteinBoundary,
    c: &TruncatedSeries,
    u: &TruncatedSeries,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if c.order() != u.order() {
        return Err(Error::Series("c and u must share the truncation order".into()));
    }
    if c.coeff(0) != 1.0 || u.coeff(0) != 1.0 {
        return Err(Error::Series("c and u must have unit constant term".into()));
    }
    let n = b.n as f64;
    let c1 = c.derivative();
    let c2 = c1.derivative();
    let u1 = u.derivative();
    let u2 = u1.derivative();
    let trace = c1.checked_div(c)?.scale(n - 1.0);
    let quad = (&c1 * &c1).checked_div(c)?;

    let terms_g = [
        (u * &c2).shift(),
        (u * &c1).scale(1.0 - n),
        (&(u * &trace) * c).scale(-1.0),
        (u * &quad).shift().scale(-1.0),
        (&(u * &trace) * &c1).shift().scale(0.5),
        u.shift().scale(-2.0 * b.einstein_constant()),
        (&u1 * c).scale(-2.0),
        (&u1 * &c1).shift(),
    ];
    let terms_u = [
        u2.shift(),
        u1.scale(-n),
        (&trace * &u1).shift().scale(0.5),
        (&trace * u).scale(-0.5),
    ];
    let sum = |terms: &[TruncatedSeries]| {
        terms
            .iter()
            .skip(1)
            .fold(terms[0].clone(), |acc, t| &acc + t)
    };
    Ok((sum(&terms_g), sum(&terms_u)))
}

/// Boundary expansion of `g_τ = c(τ) ĝ` and `u = τ V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub n: usize,
    pub scal: f64,
    /// Highest order fixed by the boundary data, `n - 1`.
    pub max_order: usize,
    pub c: TruncatedSeries,
    pub u: TruncatedSeries,
    /// Normalized determinants `D(m)` of the order-`m` systems, `m = 1, 2, …`.
    pub determinants: Vec<f64>,
}

impl ExpansionResult {
    pub fn boundary(&self) -> EinsteinBoundary {
        EinsteinBoundary {
            n: self.n,
            scal: self.scal,
        }
    }

    /// Truncation order `M` of the series.
    pub fn order(&self) -> usize {
        self.c.order()
    }
}

/// Affine structure of the `τ^{m-1}` coefficients in `(c_m, u_m)`, read off by
/// probing the residual with unit coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSystem {
    pub matrix: [[f64; 2]; 2],
    pub rhs: [f64; 2],
}

impl OrderSystem {
    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Probes the order-`m` system given `c`, `u` known below order `m`. The
/// series must have order at least `m` with vanishing coefficients `m`.
pub fn assemble_order(
    b: &EinsteinBoundary,
    c: &TruncatedSeries,
    u: &TruncatedSeries,
    m: usize,
) -> Result<OrderSystem> {
    let pick = |c: &TruncatedSeries, u: &TruncatedSeries| -> Result<[f64; 2]> {
        let (eg, eu) = reduce_equations(b, c, u)?;
        Ok([eg.coeff(m - 1), eu.coeff(m - 1)])
    };
    let base = pick(c, u)?;
    let mut cp = c.clone();
    cp.set(m, c.coeff(m) + 1.0);
    let col_c = pick(&cp, u)?;
    let mut up = u.clone();
    up.set(m, u.coeff(m) + 1.0);
    let col_u = pick(c, &up)?;
    Ok(OrderSystem {
        matrix: [
            [col_c[0] - base[0], col_u[0] - base[0]],
            [col_c[1] - base[1], col_u[1] - base[1]],
        ],
        rhs: base,
    })
}

/// Solves the recursion through order `order ≤ n - 1`.
///
/// When `order = n - 1` the order-`n` system is also probed (not solved) so the
/// last recorded determinant shows the degeneracy at `m = n`.
pub fn expand(b: &EinsteinBoundary, order: usize) -> Result<ExpansionResult> {
    let n = b.n;
    if order > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "order {order} exceeds the uniquely determined range (at most {})",
            n - 1
        )));
    }
    let mut c = TruncatedSeries::constant(1.0, order);
    let mut u = TruncatedSeries::constant(1.0, order);
    let mut determinants = Vec::with_capacity(order + 1);
    for m in 1..=order {
        let sys = assemble_order(b, &c, &u, m)?;
        let det = sys.determinant();
        let normalized = det / (m * m) as f64;
        determinants.push(normalized);
        if normalized.abs() < DEGENERACY_TOLERANCE {
            return Err(Error::Degenerate {
                order: m,
                det: normalized,
            });
        }
        let [[p, q], [r, s]] = sys.matrix;
        let [f, g] = sys.rhs;
        // `+ 0.0` folds a signed zero into +0
        c.set(m, (q * g - s * f) / det + 0.0);
        u.set(m, (r * f - p * g) / det + 0.0);
    }
    if order == n - 1 {
        let probe = assemble_order(b, &c.with_order(n), &u.with_order(n), n)?;
        determinants.push(probe.determinant() / (n * n) as f64);
    }
    Ok(ExpansionResult {
        n,
        scal: b.scal,
        max_order: n - 1,
        c,
        u,
        determinants,
    })
}

/// Second-order Taylor coefficients `(u_2, c_2)` from the closed forms
/// `u''(0) = S/(2(n-1)(n-2))` and
/// `g''(0) = 1/(2-n) [S/(1-n) ĝ + 2 Ric(ĝ)]` with `Ric(ĝ) = S/(n-1) ĝ`.
pub fn closed_form_order2(b: &EinsteinBoundary) -> (f64, f64) {
    let n = b.n as f64;
    let s = b.scal;
    let u_second = s / (2.0 * (n - 1.0) * (n - 2.0));
    let g_second = (s / (1.0 - n) + 2.0 * s / (n - 1.0)) / (2.0 - n);
    (0.5 * u_second, 0.5 * g_second)
}

/// `(m - 2n + 1)(m - n - 1) - (n - 1)`.
pub fn solvability_determinant(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (m - 2.0 * n + 1.0) * (m - n - 1.0) - (n - 1.0)
}

/// Exact AdS data in the special gauge `τ = 2e^{-r}`:
/// `c = (1 - τ²/4)²`, `u = 1 + τ²/4`.
pub fn special_gauge_of_ads(n: usize, order: usize) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    if order < 2 {
        return Err(Error::InvalidParameter("AdS series needs order >= 2".into()));
    }
    let q = {
        let mut s = TruncatedSeries::constant(1.0, order);
        s.set(2, -0.25);
        s
    };
    let mut u = TruncatedSeries::constant(1.0, order);
    u.set(2, 0.25);
    Ok((&q * &q, u))
}

pub const PARITY_TOLERANCE: f64 = 1e-12;

/// True when every odd coefficient of `c` and `u` vanishes.
pub fn parity_check(res: &ExpansionResult) -> bool {
    let odd_small = |s: &TruncatedSeries| {
        s.coeffs()
            .iter()
            .skip(1)
            .step_by(2)
            .all(|x| x.abs() <= PARITY_TOLERANCE)
    };
    odd_small(&res.c) && odd_small(&res.u)
}

/// Bulk triple in the radial coordinate `τ`: `A = τ⁻²`, `B = τ⁻² c(τ)` over
/// the space form of curvature `S/((n-1)(n-2))`, `V = u(τ)/τ`.
pub fn reconstruct(res: &ExpansionResult, tau_grid: RadialGrid) -> Result<StaticTriple> {
    let b = res.boundary();
    let cs = tau_grid.sample(|t| res.c.eval(t));
    if let Some(node) = cs.first_non_positive() {
        return Err(Error::Domain(format!(
            "conformal factor c(τ) = {} is not positive at τ = {}",
            cs[node],
            tau_grid.node(node)
        )));
    }
    let a = tau_grid.sample(|t| 1.0 / (t * t));
    let bb = Profile::new(
        tau_grid,
        tau_grid
            .nodes()
            .zip(cs.values())
            .map(|(t, c)| c / (t * t))
            .collect(),
    )?;
    let metric = RotSymMetric::with_fiber(b.n, a, bb, b.sectional_curvature())?;
    StaticTriple::new(metric, tau_grid.sample(|t| res.u.eval(t) / t))
}
