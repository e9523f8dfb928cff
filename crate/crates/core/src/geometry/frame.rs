use ndarray::Array1;

use crate::error::{Error, Result};

/// A point `(x, y)` of the tangent bundle together with its invariants
/// `r = |x|`, `u = |y|` and `s = <x, y>/|y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrame {
    pub n: usize,
    pub x: Array1<f64>,
    pub y: Array1<f64>,
    pub r: f64,
    pub u: f64,
    pub s: f64,
}

impl PointFrame {
    /// Build a frame from explicit vectors.
    pub fn from_vectors(x: Array1<f64>, y: Array1<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::BadFrame(format!(
                "need x, y of equal dimension >= 2, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        let r = x.dot(&x).sqrt();
        let u = y.dot(&y).sqrt();
        if !(r > 0.0) || !(u > 0.0) || !r.is_finite() || !u.is_finite() {
            return Err(Error::BadFrame(format!("need |x| > 0 and |y| > 0, got {r}, {u}")));
        }
        let s = x.dot(&y) / u;
        if !(s.abs() < r) {
            return Err(Error::BadFrame(format!("|s| = {} is not below r = {r}", s.abs())));
        }
        Ok(PointFrame { n, x, y, r, u, s })
    }

    /// `r^2 - s^2`.
    pub fn w2(&self) -> f64 {
        (self.r - self.s) * (self.r + self.s)
    }
}

/// Canonical frame with `x = (r, 0, …)` and `y = (s u / r, u √(r²−s²) / r, 0, …)`.
pub fn embed_point(r: f64, s: f64, u: f64, n: usize) -> Result<PointFrame> {
    if n < 2 {
        return Err(Error::BadFrame(format!("dimension must be at least 2, got {n}")));
    }
    if !(r > 0.0) || !(u > 0.0) {
        return Err(Error::BadFrame(format!("need r > 0 and u > 0, got {r}, {u}")));
    }
    if !(s.abs() < r) {
        return Err(Error::BadFrame(format!("|s| = {} is not below r = {r}", s.abs())));
    }
    let mut x = Array1::zeros(n);
    let mut y = Array1::zeros(n);
    x[0] = r;
    y[0] = s * u / r;
    y[1] = u * (r * r - s * s).sqrt() / r;
    Ok(PointFrame { n, x, y, r, u, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_frame() {
        let f = embed_point(1.0, 0.0, 1.0, 2).unwrap();
        assert_eq!(f.x.to_vec(), vec![1.0, 0.0]);
        assert_eq!(f.y.to_vec(), vec![0.0, 1.0]);
    }

    #[test]
    fn contraction_identity() {
        let t = 0.3;
        let f = embed_point(2.0, 2.0 * t, 1.0, 3).unwrap();
        assert!((f.x.dot(&f.y) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn definition_check() {
        let f = embed_point(1.0, 0.5, 2.0, 3).unwrap();
        let g = PointFrame::from_vectors(f.x.clone(), f.y.clone()).unwrap();
        assert!((g.u - 2.0).abs() < 1e-15);
        assert!((g.s - 0.5).abs() < 1e-15);
        assert!((g.r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_boundary() {
        assert!(matches!(embed_point(1.0, 1.0, 1.0, 2), Err(Error::BadFrame(_))));
        assert!(matches!(embed_point(1.0, 0.2, 1.0, 1), Err(Error::BadFrame(_))));
        let x = Array1::from(vec![1.0, 0.0]);
        assert!(PointFrame::from_vectors(x.clone(), x).is_err());
    }
}
