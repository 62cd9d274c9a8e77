//! Coordinate-chart curvature computed from scratch.
//!
//! The metric is written in full coordinates `(r, [θ], ψ_1, …, ψ_{n-1})`, with
//! the fiber in nested polar form
//!
//! ```text
//!     σ_k = dψ_1² + s_k(ψ_1)² (dψ_2² + sin²ψ_2 (dψ_3² + …))
//! ```
//!
//! and Christoffel symbols and Ricci are obtained from first and second finite
//! differences of the metric matrix: grid stencils in `r`, central differences
//! with step `h` in the angles. Nothing here uses the
//! warped-product reductions of the parent module, which is what makes it
//! usable as an oracle for them.

use nalgebra::DMatrix;

use super::{lapse_hessian, ricci, StaticTriple};
use crate::grid::Profile;

/// Angular evaluation point: `ψ_1` first, then the remaining sphere angles.
const PSI_1: f64 = 0.9;
const PSI_REST: f64 = 1.1;

/// `g = A dr² [+ V² dθ²] + B σ_k` as a matrix-valued function on a chart.
#[derive(Debug, Clone)]
pub struct WarpedChart<'a> {
    n: usize,
    h: f64,
    k: f64,
    a: &'a [f64],
    b: &'a [f64],
    circle: Option<&'a [f64]>,
}

/// Christoffel symbols `Γ^k_ij`, stored as `[k][i][j]`.
pub type Christoffel = Vec<Vec<Vec<f64>>>;

impl<'a> WarpedChart<'a> {
    pub fn new(g: &'a super::RotSymMetric) -> Self {
        Self {
            n: g.n(),
            h: g.grid().spacing(),
            k: g.fiber_curvature(),
            a: g.a().values(),
            b: g.b().values(),
            circle: None,
        }
    }

    /// Chart for `h = V² dθ² + g` on `S¹ × M`.
    pub fn lifted(t: &'a StaticTriple) -> Self {
        Self {
            circle: Some(t.lapse().values()),
            ..Self::new(t.metric())
        }
    }

    pub fn dim(&self) -> usize {
        self.n + usize::from(self.circle.is_some())
    }

    fn nodes(&self) -> usize {
        self.a.len()
    }

    /// Index of `ψ_1` among the coordinates.
    pub fn first_fiber_index(&self) -> usize {
        1 + usize::from(self.circle.is_some())
    }

    /// Base point of the angular coordinates (everything except `r`).
    pub fn base_angles(&self) -> Vec<f64> {
        let mut ang = vec![0.0; self.dim() - 1];
        let first = self.first_fiber_index() - 1;
        for (j, x) in ang.iter_mut().enumerate().skip(first) {
            *x = if j == first { PSI_1 } else { PSI_REST };
        }
        ang
    }

    fn warp(&self, psi: f64) -> f64 {
        let k = self.k;
        if k > 0.0 {
            (k.sqrt() * psi).sin() / k.sqrt()
        } else if k < 0.0 {
            ((-k).sqrt() * psi).sinh() / (-k).sqrt()
        } else {
            psi
        }
    }

    pub fn metric(&self, node: usize, ang: &[f64]) -> DMatrix<f64> {
        let dim = self.dim();
        let mut g = DMatrix::zeros(dim, dim);
        g[(0, 0)] = self.a[node];
        if let Some(v) = self.circle {
            g[(1, 1)] = v[node] * v[node];
        }
        let first = self.first_fiber_index();
        let mut factor = 1.0;
        for c in first..dim {
            g[(c, c)] = self.b[node] * factor;
            let psi = ang[c - 1];
            factor *= if c == first {
                self.warp(psi).powi(2)
            } else {
                psi.sin().powi(2)
            };
        }
        g
    }

    /// First and second partials of a vector-valued function of the chart
    /// point. Radial partials use the grid stencils of [`crate::fd`], angular
    /// partials central differences with step `h`; mixed partials apply one
    /// after the other on undifferentiated samples.
    fn radial_weights(&self, node: usize, order: usize) -> Vec<(usize, f64)> {
        let last = self.nodes() - 1;
        let h = self.h;
        let w: Vec<(usize, f64)> = match (order, node) {
            (1, 0) => vec![(0, -3.0), (1, 4.0), (2, -1.0)],
            (1, i) if i == last => vec![(last, 3.0), (last - 1, -4.0), (last - 2, 1.0)],
            (1, i) => vec![(i + 1, 1.0), (i - 1, -1.0)],
            (_, 0) => vec![(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)],
            (_, i) if i == last => vec![(last, 2.0), (last - 1, -5.0), (last - 2, 4.0), (last - 3, -1.0)],
            (_, i) => vec![(i + 1, 1.0), (i, -2.0), (i - 1, 1.0)],
        };
        let scale = if order == 1 { 2.0 * h } else { h * h };
        w.into_iter().map(|(i, c)| (i, c / scale)).collect()
    }

    fn angular_weights(&self, ang: &[f64], dir: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
        let h = self.h;
        let shifted = |d: f64| {
            let mut a = ang.to_vec();
            a[dir - 1] += d;
            a
        };
        if order == 1 {
            vec![(shifted(h), 0.5 / h), (shifted(-h), -0.5 / h)]
        } else {
            vec![
                (shifted(h), 1.0 / (h * h)),
                (ang.to_vec(), -2.0 / (h * h)),
                (shifted(-h), 1.0 / (h * h)),
            ]
        }
    }

    /// Linear combination of samples `(node, angles, weight)`.
    fn stencil(&self, dirs: &[usize], node: usize, ang: &[f64]) -> Vec<(usize, Vec<f64>, f64)> {
        let mut pts = vec![(node, ang.to_vec(), 1.0)];
        let mut radial = 0;
        let mut angular: Vec<usize> = vec![];
        for &d in dirs {
            if d == 0 {
                radial += 1;
            } else {
                angular.push(d);
            }
        }
        if radial > 0 {
            pts = self
                .radial_weights(node, radial)
                .into_iter()
                .map(|(i, w)| (i, ang.to_vec(), w))
                .collect();
        }
        let same_angle = angular.len() == 2 && angular[0] == angular[1];
        let passes: Vec<(usize, usize)> = if same_angle {
            vec![(angular[0], 2)]
        } else {
            angular.iter().map(|&d| (d, 1)).collect()
        };
        for (d, order) in passes {
            pts = pts
                .into_iter()
                .flat_map(|(i, a, w)| {
                    self.angular_weights(&a, d, order)
                        .into_iter()
                        .map(move |(b, v)| (i, b, w * v))
                })
                .collect();
        }
        pts
    }

    fn partial(&self, dirs: &[usize], node: usize, ang: &[f64], f: &dyn Fn(usize, &[f64]) -> Vec<f64>) -> Vec<f64> {
        let mut out: Vec<f64> = vec![];
        for (i, a, w) in self.stencil(dirs, node, ang) {
            let v = f(i, &a);
            if out.is_empty() {
                out = vec![0.0; v.len()];
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }

    fn flat_metric(&self, node: usize, ang: &[f64]) -> Vec<f64> {
        self.metric(node, ang).as_slice().to_vec()
    }

    /// `∂_l g` for every `l`, each column-major `dim × dim`.
    fn metric_first(&self, node: usize, ang: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|l| self.partial(&[l], node, ang, &|i, x| self.flat_metric(i, x)))
            .collect()
    }

    pub fn christoffel(&self, node: usize, ang: &[f64]) -> Christoffel {
        let dim = self.dim();
        let g_inv = self
            .metric(node, ang)
            .try_inverse()
            .expect("chart metric is invertible");
        let dg = self.metric_first(node, ang);
        let d = |l: usize, i: usize, j: usize| dg[l][i + j * dim];
        let mut gamma = vec![vec![vec![0.0; dim]; dim]; dim];
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = 0.0;
                    for l in 0..dim {
                        s += g_inv[(k, l)] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                    }
                    gamma[k][i][j] = 0.5 * s;
                }
            }
        }
        gamma
    }

    /// `R_ij = ∂_k Γ^k_ij - ∂_j Γ^k_ik + Γ^k_kp Γ^p_ij - Γ^k_jp Γ^p_ik`, with
    /// `∂Γ` expanded through first and second partials of the metric.
    pub fn ricci(&self, node: usize, ang: &[f64]) -> DMatrix<f64> {
        let dim = self.dim();
        let g_inv = self
            .metric(node, ang)
            .try_inverse()
            .expect("chart metric is invertible");
        let gamma = self.christoffel(node, ang);
        let dg = self.metric_first(node, ang);
        let d = |l: usize, i: usize, j: usize| dg[l][i + j * dim];
        let mut ddg = vec![vec![vec![]; dim]; dim];
        for m in 0..dim {
            for l in m..dim {
                let v = self.partial(&[m, l], node, ang, &|i, x| self.flat_metric(i, x));
                ddg[m][l] = v.clone();
                ddg[l][m] = v;
            }
        }
        let dd = |m: usize, l: usize, i: usize, j: usize| ddg[m][l][i + j * dim];
        // ∂_m g^{kl} = -g^{ka} ∂_m g_ab g^{bl}
        let d_inv: Vec<DMatrix<f64>> = (0..dim)
            .map(|m| {
                let dm = DMatrix::from_column_slice(dim, dim, &dg[m]);
                -(&g_inv * dm * &g_inv)
            })
            .collect();
        // ∂_m Γ^k_ij
        let dgamma = |m: usize, k: usize, i: usize, j: usize| -> f64 {
            let mut s = 0.0;
            for l in 0..dim {
                let first = d(i, j, l) + d(j, i, l) - d(l, i, j);
                let second = dd(m, i, j, l) + dd(m, j, i, l) - dd(m, l, i, j);
                s += d_inv[m][(k, l)] * first + g_inv[(k, l)] * second;
            }
            0.5 * s
        };
        let mut ric = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for k in 0..dim {
                    s += dgamma(k, k, i, j) - dgamma(j, k, i, k);
                    for p in 0..dim {
                        s += gamma[k][k][p] * gamma[p][i][j] - gamma[k][j][p] * gamma[p][i][k];
                    }
                }
                ric[(i, j)] = s;
            }
        }
        ric
    }

    /// `∇²f` of a function given on grid nodes and independent of the angles.
    pub fn hessian(&self, f: &[f64], node: usize, ang: &[f64]) -> DMatrix<f64> {
        let dim = self.dim();
        let gamma = self.christoffel(node, ang);
        let sample = |j: usize, _: &[f64]| vec![f[j]];
        let df: Vec<f64> = (0..dim)
            .map(|l| self.partial(&[l], node, ang, &sample)[0])
            .collect();
        DMatrix::from_fn(dim, dim, |i, j| {
            let second = self.partial(&[i, j], node, ang, &sample)[0];
            second - (0..dim).map(|k| gamma[k][i][j] * df[k]).sum::<f64>()
        })
    }

    /// Radial component of `g^{ij}(Γ^r_ij - Γ̂^r_ij)`.
    pub fn deturck_radial(&self, background: &WarpedChart<'_>, node: usize, ang: &[f64]) -> f64 {
        let dim = self.dim();
        let g_inv = self
            .metric(node, ang)
            .try_inverse()
            .expect("chart metric is invertible");
        let gamma = self.christoffel(node, ang);
        let gamma_hat = background.christoffel(node, ang);
        let mut w = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                w += g_inv[(i, j)] * (gamma[0][i][j] - gamma_hat[0][i][j]);
            }
        }
        w
    }
}

/// Ricci of the lift `h = V² dθ² + g`, normalized in the orthonormal frame:
/// `theta = Ric_θθ / V²`, `rr = Ric_rr / A`, `sph = Ric_ψψ / (B σ_ψψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedRicci {
    pub theta: Profile,
    pub rr: Profile,
    pub sph: Profile,
}

pub fn lifted_ricci(t: &StaticTriple) -> LiftedRicci {
    let chart = WarpedChart::lifted(t);
    let ang = chart.base_angles();
    let psi = chart.first_fiber_index();
    let grid = *t.grid();
    let (a, b, v) = (t.metric().a(), t.metric().b(), t.lapse());
    let mut theta = Vec::with_capacity(grid.count());
    let mut rr = Vec::with_capacity(grid.count());
    let mut sph = Vec::with_capacity(grid.count());
    for node in 0..grid.count() {
        let ric = chart.ricci(node, &ang);
        theta.push(ric[(1, 1)] / (v[node] * v[node]));
        rr.push(ric[(0, 0)] / a[node]);
        sph.push(ric[(psi, psi)] / b[node]);
    }
    LiftedRicci {
        theta: Profile::from_raw(grid, theta),
        rr: Profile::from_raw(grid, rr),
        sph: Profile::from_raw(grid, sph),
    }
}

/// Residuals of the block form of `Ric(h)` for `h = V² dθ² + g`:
///
/// ```text
///     Ric(h)_θθ / V² = -V⁻¹ Δ_g V
///     Ric(h)|_M      = Ric(g) - V⁻¹ ∇²_g V
/// ```
///
/// with the left sides taken from the chart oracle and the right sides from
/// the warped-product operators, all in the orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftBlockResidual {
    pub theta: Profile,
    pub rr: Profile,
    pub sph: Profile,
}

impl LiftBlockResidual {
    pub fn sup(&self) -> f64 {
        self.theta
            .sup_abs()
            .max(self.rr.sup_abs())
            .max(self.sph.sup_abs())
    }
}

pub fn lift_block_check(t: &StaticTriple) -> LiftBlockResidual {
    let oracle = lifted_ricci(t);
    let ric = ricci(t.metric());
    let vh = lapse_hessian(t);
    let (a, b) = (t.metric().a(), t.metric().b());
    let grid = *t.grid();
    let at = |i: usize| {
        (
            (oracle.theta[i] + vh.laplacian[i]).abs(),
            (oracle.rr[i] - (ric.ric_rr[i] - vh.rr[i]) / a[i]).abs(),
            (oracle.sph[i] - (ric.ric_sph[i] - vh.sph[i]) / b[i]).abs(),
        )
    };
    let (mut theta, mut rr, mut sph) = (vec![], vec![], vec![]);
    for i in 0..grid.count() {
        let (x, y, z) = at(i);
        theta.push(x);
        rr.push(y);
        sph.push(z);
    }
    LiftBlockResidual {
        theta: Profile::from_raw(grid, theta),
        rr: Profile::from_raw(grid, rr),
        sph: Profile::from_raw(grid, sph),
    }
}
