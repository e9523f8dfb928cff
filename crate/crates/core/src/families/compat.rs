use crate::geometry::SprayData;
use crate::jets::Jet;

/// The two compatibility residuals of a spray `(P, Q)` against `u·φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compatibility {
    pub c1: f64,
    pub c2: f64,
    /// `φ` at the point, for normalized reporting.
    pub phi: f64,
    /// Componentwise sizes of `C1` and `C2`: each residual with every sum
    /// replaced by the sum of absolute values.
    pub scale1: f64,
    pub scale2: f64,
}

impl Compatibility {
    /// `(C1/φ, C2/φ)`, comparable across metrics of very different size.
    pub fn normalized(&self) -> (f64, f64) {
        (self.c1 / self.phi, self.c2 / self.phi)
    }

    /// Residuals relative to the larger of `|φ|` and their componentwise
    /// size. Near `|s| = r` the terms of a compatible pair grow by several
    /// orders of magnitude and cancel; this measure stays at rounding level
    /// there while an incompatible spray still gives an O(1) value.
    pub fn relative(&self) -> (f64, f64) {
        let f = self.phi.abs();
        (self.c1 / f.max(self.scale1), self.c2 / f.max(self.scale2))
    }
}

/// `C1` and `C2` at the common base point of `phi` and `pq`. Both vanish
/// exactly when `(P, Q)` is the geodesic spray of `u·φ`.
pub fn compatibility_residuals(phi: &Jet, pq: &SprayData) -> Compatibility {
    let (r, s) = phi.base();
    let w2 = (r - s) * (r + s);
    let (f, fs, fr) = (phi.coeff(0, 0), phi.coeff(0, 1), phi.coeff(1, 0));
    let t = 2.0 * pq.q - s * pq.q_s;
    let a1 = (1.0 + s * pq.p - w2 * t) * fs;
    let b1 = (s * pq.p_s - 2.0 * pq.p - s * t) * f;
    let (a2, b2, d2) = (fr / r, (pq.p + pq.q_s * w2) * fs, (pq.p_s + s * pq.q_s) * f);
    let ta = (2.0 * pq.q).abs() + (s * pq.q_s).abs();
    Compatibility {
        c1: a1 + b1,
        c2: a2 - b2 - d2,
        phi: f,
        scale1: (1.0 + (s * pq.p).abs() + w2 * ta) * fs.abs()
            + ((s * pq.p_s).abs() + (2.0 * pq.p).abs() + s.abs() * ta) * f.abs(),
        scale2: a2.abs()
            + (pq.p.abs() + (pq.q_s * w2).abs()) * fs.abs()
            + (pq.p_s.abs() + (s * pq.q_s).abs()) * f.abs(),
    }
}

/// Solve the compatibility system for `(φ_s/φ, φ_r/φ)` given spray jets.
/// Returns `None` when the coefficient of `φ_s` vanishes.
pub(crate) fn solve_log_derivs(p: &Jet, q: &Jet) -> Option<(Jet, Jet)> {
    let (r, s0) = p.base();
    let s = Jet::seed_s(r, s0);
    let w2 = (p.lift(r) - s) * (p.lift(r) + s);
    let q_s = q.d_s();
    let p_s = p.d_s();
    let t = 2.0 * *q - s * q_s;
    let alpha = 1.0 + s * *p - w2 * t;
    let beta = s * p_s - 2.0 * *p - s * t;
    let a = -(beta.checked_div(&alpha).ok()?);
    let b = r * ((*p + q_s * w2) * a + p_s + s * q_s);
    Some((a, b))
}
