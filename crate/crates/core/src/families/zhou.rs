use super::SprayField;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::phi_lang::{eval_jet, Expr};

const CHECK_POINTS: usize = 201;

/// The two-dimensional spray class
/// `P = −s/r² + (c/r²)√(r²−s²)`,
/// `Q = c0 − (4r⁴c0² + 2r³c0' + c²)s²/(2r⁴(2r²c0 − 1)) − (s/r⁴)√(r²−s²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZhouClass {
    pub c: f64,
    pub c0: Expr,
    pub interval: (f64, f64),
}

impl ZhouClass {
    /// Rejects `c = 3` and any `c0` for which `2r²c0 − 1` vanishes on the interval.
    pub fn new(c: f64, c0: Expr, interval: (f64, f64)) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidInput(format!("c must be finite, got {c}")));
        }
        if c == 3.0 {
            return Err(Error::ExcludedParameter("c = 3 is excluded from the class".into()));
        }
        if c0.uses_s() {
            return Err(Error::InvalidExpression("c0 must depend on r only".into()));
        }
        let (lo, hi) = interval;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidInput(format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
        }
        let mut prev: Option<f64> = None;
        for i in 0..CHECK_POINTS {
            let r = if lo == hi {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (CHECK_POINTS - 1) as f64
            };
            let v = 2.0 * r * r * eval_jet(&c0, r, 0.0)?.value() - 1.0;
            let crosses = prev.is_some_and(|p| p.signum() != v.signum());
            if !(v.abs() > 1e-12) || crosses {
                return Err(Error::ExcludedParameter(format!(
                    "c0 = 1/(2r^2) is excluded, and 2r^2*c0 - 1 vanishes near r = {r}"
                )));
            }
            prev = Some(v);
        }
        Ok(ZhouClass { c, c0, interval })
    }
}

impl SprayField for ZhouClass {
    fn pq_jets(&self, r: f64, s0: f64) -> Result<(Jet, Jet)> {
        if !(r > 0.0 && s0.abs() < r) {
            return Err(Error::InvalidInput(format!(
                "point (r, s) = ({r}, {s0}) is outside |s| < r"
            )));
        }
        let c0 = eval_jet(&self.c0, r, s0)?;
        let c0p = c0.d_r();
        let c = self.c;
        let s = Jet::seed_s(r, s0);
        let (r2, r3, r4) = (r * r, r.powi(3), r.powi(4));
        let w = ((s.lift(r) - s) * (s.lift(r) + s)).sqrt()?;
        let p = -s * (1.0 / r2) + w * (c / r2);
        let k = (4.0 * r4 * c0 * c0 + 2.0 * r3 * c0p + c * c)
            .checked_div(&(2.0 * r4 * (2.0 * r2 * c0 - 1.0)))
            .map_err(|_| Error::ExcludedParameter(format!("2r^2*c0 - 1 vanishes at r = {r}")))?;
        let q = c0 - k * s * s - s * w * (1.0 / r4);
        Ok((p.s_only(), q.s_only()))
    }
}
