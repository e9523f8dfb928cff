//! Rectangular `(r, s)` sampling lattices with `|s| ≤ (1−ε)r`.

use crate::error::{Error, Result};

/// Default margin keeping `|s|` away from `r`.
pub const DEFAULT_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r_lo: f64,
    pub r_hi: f64,
    pub nr: usize,
    pub ns: usize,
    pub eps: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_lo: 0.5,
            r_hi: 2.0,
            nr: 16,
            ns: 33,
            eps: DEFAULT_EPS,
        }
    }
}

impl GridSpec {
    pub fn new(r_lo: f64, r_hi: f64, nr: usize, ns: usize) -> Result<Self> {
        let g = GridSpec {
            r_lo,
            r_hi,
            nr,
            ns,
            eps: DEFAULT_EPS,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r_lo.is_finite()
            && self.r_hi.is_finite()
            && self.r_lo > 0.0
            && self.r_lo <= self.r_hi
            && self.nr >= 1
            && self.ns >= 1
            && (self.nr > 1 || self.r_lo == self.r_hi)
            && self.eps > 0.0
            && self.eps < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid grid {self:?}")))
        }
    }

    pub fn r_values(&self) -> Vec<f64> {
        linspace(self.r_lo, self.r_hi, self.nr)
    }

    /// The `ns` values of `s` at radius `r`, ascending.
    pub fn s_values(&self, r: f64) -> Vec<f64> {
        let m = (1.0 - self.eps) * r;
        linspace(-m, m, self.ns)
    }

    /// All lattice points, ordered by `r` then `s`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.r_values()
            .into_iter()
            .flat_map(|r| self.s_values(r).into_iter().map(move |s| (r, s)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.nr * self.ns
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}
