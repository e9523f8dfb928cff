//! Constructive families of sprays and metrics, and the reconstruction of a
//! metric from its log-derivatives.

mod compat;
mod landsberg;
mod logderiv;
mod reconstruct;
mod surface;
mod zhou;

pub use compat::{compatibility_residuals, Compatibility};
pub use landsberg::{FamilyCoefficients, Integrability, LandsbergFamily, VALIDATION_POINTS};
pub use logderiv::{find_poles, psi_jet, shape_jet, ExprLogDerivs, LogDerivField, SprayLogDerivs};
pub use reconstruct::{reconstruct_phi, PhiReconstruction, ReconstructedMetric, QUAD_TOL};
pub use surface::SurfaceBerwaldFamily;
pub use zhou::ZhouClass;

use crate::error::Result;
use crate::geometry::SprayData;
use crate::jets::Jet;

/// A spray `(P, Q)` given directly rather than derived from a metric.
pub trait SprayField: Send + Sync {
    /// Jets of `P` and `Q` at `(r, s)`, exact in `s` through order 5.
    fn pq_jets(&self, r: f64, s: f64) -> Result<(Jet, Jet)>;

    fn spray(&self, r: f64, s: f64) -> Result<SprayData> {
        let (p, q) = self.pq_jets(r, s)?;
        Ok(SprayData::from_jets(&p, &q))
    }
}
