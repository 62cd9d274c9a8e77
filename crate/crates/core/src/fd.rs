//! Second-order finite differences on a uniform grid.
//!
//! Interior nodes use the three-point central stencils, the two end nodes use
//! one-sided second-order stencils.

/// First derivative at node `i`.
#[inline]
pub fn d1_at(f: &[f64], h: f64, i: usize) -> f64 {
    let n = f.len();
    if i == 0 {
        (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    } else if i + 1 == n {
        (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
    } else {
        (f[i + 1] - f[i - 1]) / (2.0 * h)
    }
}

/// Second derivative at node `i`.
#[inline]
pub fn d2_at(f: &[f64], h: f64, i: usize) -> f64 {
    let n = f.len();
    if i == 0 {
        (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    } else if i + 1 == n {
        (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)
    } else {
        (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
    }
}

pub fn d1(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    d1_into(f, h, &mut out);
    out
}

pub fn d2(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    d2_into(f, h, &mut out);
    out
}

pub fn d1_into(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 4 && out.len() == n);
    let inv = 0.5 / h;
    out[0] = d1_at(f, h, 0);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv;
    }
    out[n - 1] = d1_at(f, h, n - 1);
}

pub fn d2_into(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 4 && out.len() == n);
    let inv = 1.0 / (h * h);
    out[0] = d2_at(f, h, 0);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    out[n - 1] = d2_at(f, h, n - 1);
}
