//! Geodesics of the spray `G^i = uPy^i + u²Qx^i`, integrated with classical
//! fixed-step RK4 while monitoring the conserved quantity `F = u·φ(r, s)`.

use ndarray::Array1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::SprayField;
use crate::geometry::SprayData;
use crate::quad::gauss_legendre_unit;
use crate::source::PhiSource;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_STEPS: usize = 2000;
/// Trajectories stop once `|s| ≥ (1−ε)r`.
pub const DOMAIN_EPS: f64 = 1e-3;
/// Trajectories stop once `r` falls below this.
pub const MIN_RADIUS: f64 = 1e-8;

/// Where a geodesic gets its spray from.
#[derive(Clone, Copy)]
pub enum GeodesicSource<'a> {
    /// The geodesic spray of `u·φ`; `F` is monitored along the way.
    Metric(&'a PhiSource),
    /// A spray given directly; nothing is monitored.
    Spray(&'a dyn SprayField),
}

impl GeodesicSource<'_> {
    fn spray(&self, r: f64, s: f64) -> Result<SprayData> {
        match self {
            GeodesicSource::Metric(m) => m.spray(r, s),
            GeodesicSource::Spray(f) => f.spray(r, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub x: Array1<f64>,
    pub y: Array1<f64>,
    pub t: f64,
}

/// `r = |x|`, `u = |y|`, `s = <x, y>/|y|`.
fn invariants(x: &Array1<f64>, y: &Array1<f64>) -> (f64, f64, f64) {
    let r = x.dot(x).sqrt();
    let u = y.dot(y).sqrt();
    (r, u, x.dot(y) / u)
}

fn domain_check(x: &Array1<f64>, y: &Array1<f64>, t: f64) -> Result<(f64, f64, f64)> {
    let (r, u, s) = invariants(x, y);
    let exit = |reason: String| Err(Error::DomainExit { t, reason });
    if !(u > 0.0) || !u.is_finite() {
        return exit(format!("velocity has length {u}"));
    }
    if !(r >= MIN_RADIUS) || !r.is_finite() {
        return exit(format!("r = {r} reached the origin"));
    }
    if !(s.abs() < (1.0 - DOMAIN_EPS) * r) {
        return exit(format!("|s| = {} reached (1-eps) r = {}", s.abs(), (1.0 - DOMAIN_EPS) * r));
    }
    Ok((r, u, s))
}

/// `(dx, dy) = (y, −2G)` at a state.
pub fn spray_rhs(source: GeodesicSource<'_>, state: &GeodesicState) -> Result<(Array1<f64>, Array1<f64>)> {
    rhs(source, &state.x, &state.y, state.t)
}

fn rhs(
    source: GeodesicSource<'_>,
    x: &Array1<f64>,
    y: &Array1<f64>,
    t: f64,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "x and y need equal dimension >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (r, u, s) = domain_check(x, y, t)?;
    let pq = source.spray(r, s)?;
    let dy = y * (-2.0 * u * pq.p) + x * (-2.0 * u * u * pq.q);
    Ok((y.clone(), dy))
}

/// A computed geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    /// `F` at every state, when the source is a metric.
    pub f_values: Option<Vec<f64>>,
    /// `max |F(t) − F(0)| / F(0)`, when the source is a metric.
    pub max_drift: Option<f64>,
    /// Why integration stopped early, if it did.
    pub domain_exit: Option<String>,
}

/// Tracks `ln F` along the trajectory. Closed metrics are evaluated
/// directly; reconstructed ones accumulate `∫ (φ_r/φ) dr + (φ_s/φ) ds` over
/// each step, which avoids a quadrature from the anchor at every state.
struct Monitor<'a> {
    source: &'a PhiSource,
    last: (f64, f64),
    log_phi: f64,
}

impl<'a> Monitor<'a> {
    fn new(source: &'a PhiSource, r: f64, s: f64) -> Result<Self> {
        let log_phi = match source {
            PhiSource::Closed(_) => source.phi(r, s)?.ln(),
            PhiSource::Reconstructed(m) => m.log_phi(r, s)?,
        };
        Ok(Monitor {
            source,
            last: (r, s),
            log_phi,
        })
    }

    fn advance(&mut self, r: f64, s: f64) -> Result<f64> {
        self.log_phi = match self.source {
            PhiSource::Closed(_) => self.source.phi(r, s)?.ln(),
            PhiSource::Reconstructed(m) => {
                let (r0, s0) = self.last;
                let (dr, ds) = (r - r0, s - s0);
                let step = gauss_legendre_unit(|t| {
                    let (a, b) = m.field.log_derivs(r0 + t * dr, s0 + t * ds)?;
                    Ok(b * dr + a * ds)
                })?;
                self.log_phi + step
            }
        };
        self.last = (r, s);
        Ok(self.log_phi)
    }
}

/// Integrate `n_steps` RK4 steps of size `step` from `(x0, y0)`. Leaving the
/// domain ends the trajectory early and is recorded, not raised.
pub fn integrate(
    source: GeodesicSource<'_>,
    x0: &[f64],
    y0: &[f64],
    step: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    let x = Array1::from(x0.to_vec());
    let y = Array1::from(y0.to_vec());
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "x and y need equal dimension >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (r, u, s) = domain_check(&x, &y, 0.0).map_err(|e| match e {
        Error::DomainExit { reason, .. } => Error::InvalidInput(format!("initial state: {reason}")),
        e => e,
    })?;

    let mut monitor = match source {
        GeodesicSource::Metric(m) => Some(Monitor::new(m, r, s)?),
        GeodesicSource::Spray(_) => None,
    };
    let mut log_f = monitor.as_ref().map(|m| vec![u.ln() + m.log_phi]);
    let mut states = vec![GeodesicState { x, y, t: 0.0 }];
    let mut domain_exit = None;

    for k in 0..n_steps {
        let cur = states.last().expect("at least one state");
        let t = cur.t;
        let next = match rk4_step(source, &cur.x, &cur.y, t, step) {
            Ok(next) => next,
            Err(Error::DomainExit { reason, .. }) => {
                domain_exit = Some(format!("t={t}: {reason}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let t_next = (k + 1) as f64 * step;
        let (xn, yn) = next;
        let (r, u, s) = match domain_check(&xn, &yn, t_next) {
            Ok(v) => v,
            Err(Error::DomainExit { reason, .. }) => {
                domain_exit = Some(format!("t={t_next}: {reason}"));
                break;
            }
            Err(e) => return Err(e),
        };
        if let (Some(m), Some(lf)) = (monitor.as_mut(), log_f.as_mut()) {
            lf.push(u.ln() + m.advance(r, s)?);
        }
        states.push(GeodesicState {
            x: xn,
            y: yn,
            t: t_next,
        });
    }

    let max_drift = log_f
        .as_ref()
        .map(|lf| lf.iter().map(|v| (v - lf[0]).exp_m1().abs()).fold(0.0, f64::max));
    let f_values = log_f.map(|v| v.into_iter().map(f64::exp).collect());
    Ok(Trajectory {
        states,
        f_values,
        max_drift,
        domain_exit,
    })
}

/// Integrate several independent trajectories in parallel.
pub fn integrate_many(
    source: GeodesicSource<'_>,
    starts: &[(Vec<f64>, Vec<f64>)],
    step: f64,
    n_steps: usize,
) -> Vec<Result<Trajectory>> {
    starts
        .par_iter()
        .map(|(x0, y0)| integrate(source, x0, y0, step, n_steps))
        .collect()
}

fn rk4_step(
    source: GeodesicSource<'_>,
    x: &Array1<f64>,
    y: &Array1<f64>,
    t: f64,
    h: f64,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let (k1x, k1y) = rhs(source, x, y, t)?;
    let (k2x, k2y) = rhs(source, &(x + &(&k1x * (0.5 * h))), &(y + &(&k1y * (0.5 * h))), t)?;
    let (k3x, k3y) = rhs(source, &(x + &(&k2x * (0.5 * h))), &(y + &(&k2y * (0.5 * h))), t)?;
    let (k4x, k4y) = rhs(source, &(x + &(&k3x * h)), &(y + &(&k3y * h)), t)?;
    let xn = x + &((&k1x + &(&k2x * 2.0) + &(&k3x * 2.0) + &k4x) * (h / 6.0));
    let yn = y + &((&k1y + &(&k2y * 2.0) + &(&k3y * 2.0) + &k4y) * (h / 6.0));
    Ok((xn, yn))
}
