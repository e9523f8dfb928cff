//! Uniform access to a metric function `φ` however it was specified.

use std::sync::Arc;

use crate::error::Result;
use crate::families::{ExprLogDerivs, LogDerivField, ReconstructedMetric};
use crate::geometry::{spray_pq, SprayData};
use crate::jets::Jet;
use crate::phi_lang::{eval_f64, eval_jet, Anchor, BuiltinMetric, Expr, MetricSource};

/// Default tolerance for pipelines that are exact up to roundoff.
pub const EXACT_TOL: f64 = 1e-8;
/// Default tolerance when quadrature is part of the pipeline.
pub const RECONSTRUCTED_TOL: f64 = 1e-6;

#[derive(Clone)]
pub enum PhiSource {
    Closed(Expr),
    Reconstructed(ReconstructedMetric),
}

impl PhiSource {
    pub fn from_builtin(b: &BuiltinMetric) -> Result<Self> {
        match &b.source {
            MetricSource::Closed(e) => Ok(PhiSource::Closed(e.clone())),
            MetricSource::LogDerivs(m) => {
                PhiSource::from_log_derivs(Arc::new(ExprLogDerivs::from(m)), m.anchor)
            }
        }
    }

    pub fn from_log_derivs(field: Arc<dyn LogDerivField>, anchor: Anchor) -> Result<Self> {
        Ok(PhiSource::Reconstructed(ReconstructedMetric::new(field, anchor)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PhiSource::Closed(_) => "closed",
            PhiSource::Reconstructed(_) => "reconstructed",
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            PhiSource::Closed(_) => EXACT_TOL,
            PhiSource::Reconstructed(_) => RECONSTRUCTED_TOL,
        }
    }

    /// Jet of `φ` up to a positive constant factor. Scale-free quantities
    /// (spray, normalized residuals, signs of margins) can be read from it.
    pub fn shape_jet(&self, r: f64, s: f64) -> Result<Jet> {
        match self {
            PhiSource::Closed(e) => eval_jet(e, r, s),
            PhiSource::Reconstructed(m) => m.shape_jet(r, s),
        }
    }

    /// Jet of `φ` at its true scale.
    pub fn phi_jet(&self, r: f64, s: f64) -> Result<Jet> {
        match self {
            PhiSource::Closed(e) => eval_jet(e, r, s),
            PhiSource::Reconstructed(m) => m.phi_jet(r, s),
        }
    }

    pub fn phi(&self, r: f64, s: f64) -> Result<f64> {
        match self {
            PhiSource::Closed(e) => eval_f64(e, r, s),
            PhiSource::Reconstructed(m) => m.phi(r, s),
        }
    }

    /// Geodesic spray of `u·φ` at `(r, s)`.
    pub fn spray(&self, r: f64, s: f64) -> Result<SprayData> {
        spray_pq(&self.shape_jet(r, s)?)
    }
}
