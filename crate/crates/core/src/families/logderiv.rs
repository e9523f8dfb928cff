use std::sync::Arc;

use super::compat::solve_log_derivs;
use super::SprayField;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::phi_lang::{eval_f64, eval_jet, Expr, LogDerivMetric};

/// A metric known through `φ_s/φ` and `φ_r/φ`.
pub trait LogDerivField: Send + Sync {
    /// Jets of `(φ_s/φ, φ_r/φ)` at `(r, s)`. The s-coefficients must be exact
    /// through order 4 for the first and order 5 for the second.
    fn log_deriv_jets(&self, r: f64, s: f64) -> Result<(Jet, Jet)>;

    /// Values of `(φ_s/φ, φ_r/φ)`.
    fn log_derivs(&self, r: f64, s: f64) -> Result<(f64, f64)> {
        let (a, b) = self.log_deriv_jets(r, s)?;
        Ok((a.value(), b.value()))
    }

    /// A function of `s` whose simple zeros are the poles of `φ_s/φ` at this `r`.
    fn pole_denominator(&self, _r: f64, _s: f64) -> Option<f64> {
        None
    }
}

/// Jet of `ψ = ln φ` with value `psi0`, assembled from the log-derivative jets.
pub fn psi_jet(field: &dyn LogDerivField, r: f64, s: f64, psi0: f64) -> Result<Jet> {
    let (a, b) = field.log_deriv_jets(r, s)?;
    let (ar, br) = (a.row(0), b.row(0));
    let mut d = [[0.0; 6]; 2];
    d[0][0] = psi0;
    d[0][1..6].copy_from_slice(&ar[0..5]);
    d[1] = br;
    Ok(Jet::from_derivs(d, r, s))
}

/// Jet of `φ` up to a positive constant factor: its value is 1.
pub fn shape_jet(field: &dyn LogDerivField, r: f64, s: f64) -> Result<Jet> {
    Ok(psi_jet(field, r, s, 0.0)?.exp())
}

/// Log-derivatives given as expressions.
#[derive(Debug, Clone)]
pub struct ExprLogDerivs {
    pub phis_over_phi: Expr,
    pub phir_over_phi: Expr,
    pub pole_denominator: Option<Expr>,
}

impl From<&LogDerivMetric> for ExprLogDerivs {
    fn from(m: &LogDerivMetric) -> Self {
        ExprLogDerivs {
            phis_over_phi: m.phis_over_phi.clone(),
            phir_over_phi: m.phir_over_phi.clone(),
            pole_denominator: m.pole_denominator.clone(),
        }
    }
}

impl LogDerivField for ExprLogDerivs {
    fn log_deriv_jets(&self, r: f64, s: f64) -> Result<(Jet, Jet)> {
        let at = |e: &Expr| {
            eval_jet(e, r, s).map_err(|err| match err {
                Error::DomainError { func: "division", .. } => Error::DenominatorVanished {
                    what: "log-derivative denominator",
                    r,
                    s,
                },
                other => other,
            })
        };
        Ok((at(&self.phis_over_phi)?, at(&self.phir_over_phi)?))
    }

    fn log_derivs(&self, r: f64, s: f64) -> Result<(f64, f64)> {
        Ok((
            eval_f64(&self.phis_over_phi, r, s)?,
            eval_f64(&self.phir_over_phi, r, s)?,
        ))
    }

    fn pole_denominator(&self, r: f64, s: f64) -> Option<f64> {
        self.pole_denominator
            .as_ref()
            .and_then(|e| eval_f64(e, r, s).ok())
    }
}

/// Log-derivatives obtained by solving the compatibility system for a spray.
#[derive(Clone)]
pub struct SprayLogDerivs {
    pub spray: Arc<dyn SprayField>,
}

impl SprayLogDerivs {
    fn alpha(&self, r: f64, s: f64) -> Result<f64> {
        let pq = self.spray.spray(r, s)?;
        let w2 = (r - s) * (r + s);
        Ok(1.0 + s * pq.p - w2 * (2.0 * pq.q - s * pq.q_s))
    }
}

impl LogDerivField for SprayLogDerivs {
    fn log_deriv_jets(&self, r: f64, s: f64) -> Result<(Jet, Jet)> {
        let (p, q) = self.spray.pq_jets(r, s)?;
        solve_log_derivs(&p, &q).ok_or(Error::DenominatorVanished {
            what: "coefficient of phi_s in the first compatibility condition",
            r,
            s,
        })
    }

    fn pole_denominator(&self, r: f64, s: f64) -> Option<f64> {
        self.alpha(r, s).ok()
    }
}

const POLE_SCAN: usize = 512;

/// Simple zeros of `den` on the open interval `(lo, hi)`, located by sign
/// changes on a uniform scan and refined by bisection.
pub fn find_poles<F: Fn(f64) -> Option<f64>>(den: F, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let h = (hi - lo) / POLE_SCAN as f64;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=POLE_SCAN {
        let x = lo + h * i as f64;
        let Some(v) = den(x) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            out.push(x);
            prev = None;
            continue;
        }
        if let Some((xp, vp)) = prev {
            if vp.signum() != v.signum() {
                if let Some(root) = bisect(&den, xp, x, vp) {
                    out.push(root);
                }
            }
        }
        prev = Some((x, v));
    }
    out
}

fn bisect<F: Fn(f64) -> Option<f64>>(den: &F, mut a: f64, mut b: f64, mut fa: f64) -> Option<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = den(m)?;
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
