//! Pointwise tensors and scalars of a metric `F = u·φ(r, s)`.

mod curvature;
mod frame;
mod metric;
mod spray;

pub use curvature::{
    berwald_curvature, h_scalar, landsberg_curvature, landsberg_dichotomy, landsberg_scalars, m_scalar,
    mean_berwald, mean_berwald_dichotomy,
    nonlinear_connection, scalar_trace_e, surface_scalars, Landsberg, MeanBerwald, SurfaceScalars,
};
pub use frame::{embed_point, PointFrame};
pub use metric::{metric_components, metric_scalars, MetricComponents, MetricScalars, DEGENERACY_TOL};
pub use spray::{spray_denominator, spray_pq, spray_pq_jets, SprayData, SPRAY_TOL};

use ndarray::{Array2, Array3, Array4};

use crate::error::Result;
use crate::jets::Jet;

/// Every tensor and scalar at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePacket {
    pub frame: PointFrame,
    pub spray: SprayData,
    pub sigma: [f64; 4],
    pub rho: [f64; 4],
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub gmat: Array2<f64>,
    pub berwald: Array4<f64>,
    pub e: Array2<f64>,
    pub landsberg: Array3<f64>,
    pub h: f64,
    pub h_s: f64,
    pub k: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub l1: f64,
    pub l2: f64,
    pub e_scalar: f64,
}

/// Compute the full packet for `φ` given as a jet, with the spray either
/// derived from `φ` or supplied.
pub fn curvature_packet(phi: &Jet, spray: Option<SprayData>, frame: PointFrame) -> Result<CurvaturePacket> {
    let spray = match spray {
        Some(pq) => pq,
        None => spray_pq(phi)?,
    };
    let mc = metric_components(phi, &frame)?;
    let mb = mean_berwald(&spray, &frame);
    let lb = landsberg_curvature(phi, &spray, &frame);
    let ss = surface_scalars(phi, &spray);
    let e_scalar = scalar_trace_e(phi, &spray, frame.n, frame.u)?;
    Ok(CurvaturePacket {
        gmat: nonlinear_connection(&spray, &frame),
        berwald: berwald_curvature(&spray, &frame),
        sigma: mc.scalars.sigma,
        rho: mc.scalars.rho,
        g: mc.g,
        g_inv: mc.g_inv,
        e: mb.e,
        landsberg: lb.l,
        h: mb.h,
        h_s: mb.h_s,
        k: ss.k,
        lambda1: ss.lambda1,
        lambda2: ss.lambda2,
        l1: lb.l1,
        l2: lb.l2,
        e_scalar,
        frame,
        spray,
    })
}
