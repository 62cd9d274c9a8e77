use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power series `c_0 + c_1 τ + … + c_M τ^M` truncated at order `M`.
///
/// Products and quotients are exact through order `M`. Differentiation keeps
/// the length, so `f'` is exact through order `M - 1` and its top coefficient
/// is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Series("series needs at least a constant term".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// `τ` itself.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, k: usize, value: f64) {
        self.coeffs[k] = value;
    }

    /// Same coefficients re-truncated at `order` (zero-padded when raising).
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Self { coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        for k in 1..=m {
            coeffs[k - 1] = k as f64 * self.coeffs[k];
        }
        Self { coeffs }
    }

    /// Multiplication by `τ`, dropping the coefficient pushed past the order.
    pub fn shift(&self) -> Self {
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        coeffs[1..].copy_from_slice(&self.coeffs[..m]);
        Self { coeffs }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let d0 = other.coeffs[0];
        if d0 == 0.0 {
            return Err(Error::Series("division by a series without constant term".into()));
        }
        let m = self.order();
        let mut q = vec![0.0; m + 1];
        for k in 0..=m {
            let mut s = self.coeffs[k];
            for j in 1..=k {
                s -= other.coeffs[j] * q[k - j];
            }
            q[k] = s / d0;
        }
        Ok(Self { coeffs: q })
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * tau + c)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::Series(format!(
                "order mismatch ({} vs {})",
                self.order(),
                other.order()
            )))
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs[..=m - i].iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs }
    }
}
