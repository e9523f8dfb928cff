use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use super::logderiv::{find_poles, psi_jet, LogDerivField};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::jets::Jet;
use crate::phi_lang::Anchor;
use crate::quad::{adaptive_simpson, gauss_legendre8};

/// Absolute tolerance of each quadrature segment.
pub const QUAD_TOL: f64 = 1e-10;

/// Half-width of the excision around a pole, relative to `r`.
const POLE_GAP: f64 = 1e-2;
/// Step of the symmetric residue estimate, relative to `r`.
const RESIDUE_STEP: f64 = 1e-5;
/// Nodes closer than this to a pole, relative to `r`, are rejected.
const POLE_CLEARANCE: f64 = 1e-8;

/// `φ` on a lattice, obtained by integrating its log-derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiReconstruction {
    pub grid: GridSpec,
    pub anchor: Anchor,
    pub r: Vec<f64>,
    /// `s` nodes for each `r`.
    pub s: Vec<Vec<f64>>,
    /// `ln φ`, indexed `[r, s]`.
    pub log_phi: Array2<f64>,
    /// `φ`, indexed `[r, s]`.
    pub values: Array2<f64>,
    /// `max |(φ_s/φ)_r − (φ_r/φ)_s|` over the lattice.
    pub mixed_partial_residual: f64,
    /// `"jet"` when the r-derivative came from jets, `"difference"` otherwise.
    pub mixed_partial_method: &'static str,
}

/// A metric given by its log-derivatives and one anchor value.
#[derive(Clone)]
pub struct ReconstructedMetric {
    pub field: Arc<dyn LogDerivField>,
    pub anchor: Anchor,
}

impl ReconstructedMetric {
    pub fn new(field: Arc<dyn LogDerivField>, anchor: Anchor) -> Result<Self> {
        if !(anchor.r0 > 0.0) || !(anchor.phi0 > 0.0) || !anchor.phi0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "anchor needs r0 > 0 and phi0 > 0, got ({}, {})",
                anchor.r0, anchor.phi0
            )));
        }
        Ok(ReconstructedMetric { field, anchor })
    }

    /// `ln φ(r, 0)`.
    pub fn spine(&self, r: f64) -> Result<f64> {
        Ok(self.anchor.phi0.ln() + spine_integral(&*self.field, self.anchor.r0, r)?)
    }

    /// `ln φ(r, s)`, integrating from the spine in `s`.
    pub fn log_phi(&self, r: f64, s: f64) -> Result<f64> {
        check_point(r, s)?;
        let poles = column_poles(&*self.field, r, s.abs());
        Ok(self.spine(r)? + s_integral(&*self.field, r, 0.0, s, &poles)?)
    }

    pub fn phi(&self, r: f64, s: f64) -> Result<f64> {
        Ok(self.log_phi(r, s)?.exp())
    }

    /// Jet of `φ` at its true scale.
    pub fn phi_jet(&self, r: f64, s: f64) -> Result<Jet> {
        let psi = self.log_phi(r, s)?;
        Ok(psi_jet(&*self.field, r, s, psi)?.exp())
    }

    /// Jet of `φ / φ(r, s)`. Every scale-free quantity can be read from it
    /// without quadrature.
    pub fn shape_jet(&self, r: f64, s: f64) -> Result<Jet> {
        check_point(r, s)?;
        Ok(psi_jet(&*self.field, r, s, 0.0)?.exp())
    }

    pub fn reconstruct(&self, grid: &GridSpec) -> Result<PhiReconstruction> {
        reconstruct_phi(&*self.field, grid, self.anchor)
    }
}

fn check_point(r: f64, s: f64) -> Result<()> {
    if r > 0.0 && s.abs() < r {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("point (r, s) = ({r}, {s}) is outside |s| < r")))
    }
}

fn spine_integral(field: &dyn LogDerivField, r0: f64, r1: f64) -> Result<f64> {
    let b = |rho: f64| -> Result<f64> { Ok(field.log_derivs(rho, 0.0)?.1) };
    adaptive_simpson(b, r0, r1, QUAD_TOL).map_err(|e| match e {
        Error::IntegrationFailure(m) => {
            Error::IntegrationFailure(format!("along s = 0 from r = {r0} to r = {r1}: {m}"))
        }
        other => other,
    })
}

/// Poles of `φ_s/φ` at radius `r` with `|s| ≤ reach`.
fn column_poles(field: &dyn LogDerivField, r: f64, reach: f64) -> Vec<f64> {
    let lim = reach.min(r * (1.0 - 1e-12));
    if lim <= 0.0 || field.pole_denominator(r, 0.0).is_none() {
        return Vec::new();
    }
    find_poles(|s| field.pole_denominator(r, s), -lim, lim)
}

/// Principal value of `∫_a^b φ_s/φ ds` at radius `r`. Every listed simple
/// pole is subtracted from the integrand and integrated in closed form; a
/// short interval around each pole inside the range is covered by a
/// symmetric Gauss–Legendre rule, which annihilates any residue error.
fn s_integral(field: &dyn LogDerivField, r: f64, a: f64, b: f64, poles: &[f64]) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let a_at = |s: f64| -> Result<f64> { Ok(field.log_derivs(r, s)?.0) };
    let h = RESIDUE_STEP * r;
    let mut residues = Vec::with_capacity(poles.len());
    for &p in poles {
        residues.push(0.5 * h * (a_at(p + h)? - a_at(p - h)?));
    }
    let regular = |s: f64| -> Result<f64> {
        let mut v = a_at(s)?;
        for (&p, &alpha) in poles.iter().zip(&residues) {
            v -= alpha / (s - p);
        }
        Ok(v)
    };
    let mut total = 0.0;
    let mut start = lo;
    for &p in poles.iter().filter(|&&p| p > lo && p < hi) {
        let gap = (POLE_GAP * r).min(0.5 * (p - lo)).min(0.5 * (hi - p));
        if gap <= POLE_CLEARANCE * r {
            return Err(Error::DenominatorVanished {
                what: "log-derivative pole at a lattice node",
                r,
                s: p,
            });
        }
        total += integrate(&regular, start, p - gap, r)?;
        total += gauss_legendre8(&regular, p - gap, p + gap)?;
        start = p + gap;
    }
    total += integrate(&regular, start, hi, r)?;
    for (&p, &alpha) in poles.iter().zip(&residues) {
        if p == lo || p == hi {
            return Err(Error::DenominatorVanished {
                what: "log-derivative pole at a lattice node",
                r,
                s: p,
            });
        }
        total += alpha * ((hi - p) / (lo - p)).abs().ln();
    }
    Ok(sign * total)
}

fn integrate<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, r: f64) -> Result<f64> {
    adaptive_simpson(f, a, b, QUAD_TOL).map_err(|e| match e {
        Error::IntegrationFailure(m) => {
            Error::IntegrationFailure(format!("in s at r = {r} on [{a}, {b}]: {m}"))
        }
        other => other,
    })
}

/// Integrate `φ_r/φ` along `s = 0` from the anchor, then `φ_s/φ` in `s` at
/// each lattice radius, and exponentiate.
pub fn reconstruct_phi(
    field: &dyn LogDerivField,
    grid: &GridSpec,
    anchor: Anchor,
) -> Result<PhiReconstruction> {
    grid.validate()?;
    if !(anchor.phi0 > 0.0) || !anchor.phi0.is_finite() {
        return Err(Error::InvalidInput(format!("anchor phi0 must be positive, got {}", anchor.phi0)));
    }
    if anchor.r0 < grid.r_lo || anchor.r0 > grid.r_hi {
        return Err(Error::InvalidInput(format!(
            "anchor r0 = {} lies outside [{}, {}]",
            anchor.r0, grid.r_lo, grid.r_hi
        )));
    }
    let rs = grid.r_values();
    let spine = spine_values(field, anchor, &rs)?;

    let columns: Vec<(Vec<f64>, Vec<f64>, f64, bool)> = rs
        .par_iter()
        .zip(spine.par_iter())
        .map(|(&r, &psi0)| column(field, grid, r, psi0))
        .collect::<Result<_>>()?;

    let mut log_phi = Array2::zeros((rs.len(), grid.ns));
    let mut s_nodes = Vec::with_capacity(rs.len());
    let mut mixed = 0.0f64;
    let mut all_jet = true;
    for (i, (s, psi, m, by_jet)) in columns.into_iter().enumerate() {
        for (j, v) in psi.into_iter().enumerate() {
            log_phi[[i, j]] = v;
        }
        s_nodes.push(s);
        mixed = mixed.max(m);
        all_jet &= by_jet;
    }
    let values = log_phi.mapv(f64::exp);
    Ok(PhiReconstruction {
        grid: *grid,
        anchor,
        r: rs,
        s: s_nodes,
        log_phi,
        values,
        mixed_partial_residual: mixed,
        mixed_partial_method: if all_jet { "jet" } else { "difference" },
    })
}

fn spine_values(field: &dyn LogDerivField, anchor: Anchor, rs: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; rs.len()];
    let psi0 = anchor.phi0.ln();
    let (mut cur_r, mut cur) = (anchor.r0, psi0);
    for (i, &r) in rs.iter().enumerate().filter(|(_, &r)| r >= anchor.r0) {
        cur += spine_integral(field, cur_r, r)?;
        cur_r = r;
        out[i] = cur;
    }
    let (mut cur_r, mut cur) = (anchor.r0, psi0);
    for (i, &r) in rs.iter().enumerate().rev().filter(|(_, &r)| r < anchor.r0) {
        cur += spine_integral(field, cur_r, r)?;
        cur_r = r;
        out[i] = cur;
    }
    Ok(out)
}

fn column(
    field: &dyn LogDerivField,
    grid: &GridSpec,
    r: f64,
    psi0: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64, bool)> {
    let s = grid.s_values(r);
    let reach = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let poles = column_poles(field, r, reach);
    let mut psi = vec![0.0; s.len()];
    let (mut cur_s, mut cur) = (0.0, psi0);
    for (j, &sj) in s.iter().enumerate().filter(|(_, &v)| v >= 0.0) {
        cur += s_integral(field, r, cur_s, sj, &poles)?;
        cur_s = sj;
        psi[j] = cur;
    }
    let (mut cur_s, mut cur) = (0.0, psi0);
    for (j, &sj) in s.iter().enumerate().rev().filter(|(_, &v)| v < 0.0) {
        cur += s_integral(field, r, cur_s, sj, &poles)?;
        cur_s = sj;
        psi[j] = cur;
    }
    let mut mixed = 0.0f64;
    let mut by_jet = true;
    for &sj in &s {
        let (m, jet) = mixed_partial(field, r, sj)?;
        mixed = mixed.max(m);
        by_jet &= jet;
    }
    Ok((s, psi, mixed, by_jet))
}

/// `|(φ_s/φ)_r − (φ_r/φ)_s|` at one point, from jets when the field provides
/// an r-derivative of `φ_s/φ`, else by central differences.
fn mixed_partial(field: &dyn LogDerivField, r: f64, s: f64) -> Result<(f64, bool)> {
    let (a, b) = field.log_deriv_jets(r, s)?;
    let a_r = a.coeff(1, 0);
    let b_s = b.coeff(0, 1);
    if a_r.is_finite() {
        return Ok(((a_r - b_s).abs(), true));
    }
    let h = 1e-5 * r;
    let a_r = (field.log_derivs(r + h, s)?.0 - field.log_derivs(r - h, s)?.0) / (2.0 * h);
    Ok(((a_r - b_s).abs(), false))
}
