use crate::error::{Error, Result};

/// Uniform nodes `r_min + i h`, `i = 0..count`, on an annulus `r_min > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    count: usize,
}

impl RadialGrid {
    pub const MIN_NODES: usize = 5;

    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if r_min <= 0.0 {
            return Err(Error::InvalidGrid(format!("r_min = {r_min} must be positive")));
        }
        if r_max <= r_min {
            return Err(Error::InvalidGrid(format!(
                "r_max = {r_max} must exceed r_min = {r_min}"
            )));
        }
        if count < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "count = {count} is below the minimum of {}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { r_min, r_max, count })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.r_max
        } else {
            self.r_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.node(i))
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Profile {
        Profile {
            grid: *self,
            values: self.nodes().map(f).collect(),
        }
    }
}

/// A real function of the radial coordinate sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch {
                expected: grid.count(),
                got: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(Self { grid, values })
    }

    /// Builds a profile without the finiteness scan. Callers guarantee
    /// `values.len() == grid.count()`.
    pub(crate) fn from_raw(grid: RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.count());
        Self { grid, values }
    }

    pub fn constant(grid: RadialGrid, value: f64) -> Self {
        Self::from_raw(grid, vec![value; grid.count()])
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Profile {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Profile, f: impl Fn(f64, f64) -> f64) -> Result<Profile> {
        self.check_same_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn check_same_grid(&self, other: &Profile) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First node whose value is not strictly positive.
    pub fn first_non_positive(&self) -> Option<usize> {
        self.values.iter().position(|&v| !(v > 0.0))
    }
}

impl std::ops::Index<usize> for Profile {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
