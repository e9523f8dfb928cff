//! Nonlinear connection, Berwald, mean Berwald and Landsberg curvatures.
//!
//! All tensors carry lower coordinate indices against the Euclidean frame, so
//! `x_i = x^i` and `y_i = y^i`. The first index of the Berwald tensor `B[[i, j, k, l]]`
//! is the upper index of `G^i_jkl`.

use ndarray::{Array2, Array3, Array4};

use super::frame::PointFrame;
use super::metric::metric_scalars;
use super::spray::SprayData;
use crate::error::Result;
use crate::jets::Jet;

fn kd(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// `G^i_j = ∂G^i/∂y^j`.
pub fn nonlinear_connection(pq: &SprayData, frame: &PointFrame) -> Array2<f64> {
    let (x, y, u, s) = (&frame.x, &frame.y, frame.u, frame.s);
    let SprayData { p, p_s, q, q_s, .. } = *pq;
    Array2::from_shape_fn((frame.n, frame.n), |(i, j)| {
        u * p * kd(i, j)
            + p_s * x[j] * y[i]
            + (p - s * p_s) / u * y[j] * y[i]
            + u * q_s * x[i] * x[j]
            + (2.0 * q - s * q_s) * x[i] * y[j]
    })
}

/// Berwald curvature `G^i_jkl`.
pub fn berwald_curvature(pq: &SprayData, frame: &PointFrame) -> Array4<f64> {
    let (x, y, u, s, n) = (&frame.x, &frame.y, frame.u, frame.s, frame.n);
    let SprayData {
        p,
        p_s,
        p_ss,
        p_sss,
        q_s,
        q_ss,
        q_sss,
        ..
    } = *pq;
    let (s2, s3) = (s * s, s * s * s);
    let (u2, u3, u4, u5) = (u * u, u * u * u, u.powi(4), u.powi(5));

    let a1 = p_ss / u;
    let a2 = (p - s * p_s) / u;
    let a3 = -s * p_ss / u2;
    let a5 = (q_s - s * q_ss) / u;
    let a6 = (s2 * p_ss + s * p_s - p) / u3;
    let a7 = (3.0 * p - s3 * p_sss - 6.0 * s2 * p_ss - 3.0 * s * p_s) / u5;
    let a8 = p_sss / u2;
    let a9 = (s2 * p_sss + 3.0 * s * p_ss) / u4;
    let a10 = -(p_ss + s * p_sss) / u3;
    let a11 = q_sss / u;
    let a12 = (s2 * q_sss + s * q_ss - q_s) / u3;
    let a13 = -s * q_sss / u2;
    let a14 = (3.0 * s * q_s - 3.0 * s2 * q_ss - s3 * q_sss) / u4;
    let a15 = (s2 * q_ss - s * q_s) / u2;

    Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
        let (xi, xj, xk, xl) = (x[i], x[j], x[k], x[l]);
        let (yi, yj, yk, yl) = (y[i], y[j], y[k], y[l]);
        let (dij, dik, dil) = (kd(i, j), kd(i, k), kd(i, l));
        let (djk, djl, dkl) = (kd(j, k), kd(j, l), kd(k, l));
        let sym_dx = djk * xl + djl * xk + dkl * xj;
        let sym_dy = djk * yl + djl * yk + dkl * yj;
        let yyx = yj * yk * xl + yj * xk * yl + xj * yk * yl;
        let xxy = xk * yj * xl + xj * yk * xl + xj * yl * xk;

        let vi = a1 * (dij * xk * xl + dil * xk * xj + dik * xj * xl)
            + a2 * (dij * dkl + dik * djl + dil * djk)
            + a3 * (dij * (xk * yl + xl * yk) + dik * (xj * yl + xl * yj) + dil * (xk * yj + xj * yk))
            + a6 * (dij * yk * yl + dik * yj * yl + dil * yk * yj);
        let along_y = a3 * sym_dx
            + a6 * sym_dy
            + a7 * yj * yk * yl
            + a8 * xj * xk * xl
            + a9 * yyx
            + a10 * xxy;
        let along_x = a5 * sym_dx
            + a11 * xj * xk * xl
            + a12 * yyx
            + a13 * xxy
            + a14 * yj * yk * yl
            + a15 * sym_dy;
        vi + along_y * yi + along_x * xi
    })
}

/// Mean Berwald curvature and the scalars it is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanBerwald {
    /// `E_ij` assembled from `H` and `H_s`.
    pub e: Array2<f64>,
    /// `E_ij` assembled term by term from `P`, `Q` and their derivatives.
    pub e_direct: Array2<f64>,
    pub h: f64,
    pub h_s: f64,
    /// `M` with `H_s = −s M`; also the limit of `−H_s / s` at `s = 0`.
    pub m: f64,
}

/// `H = (n+1)(P − sP_s) + (r²−s²)(Q_s − sQ_ss)`.
pub fn h_scalar(pq: &SprayData, n: usize) -> f64 {
    (n as f64 + 1.0) * (pq.p - pq.s * pq.p_s) + pq.w2() * (pq.q_s - pq.s * pq.q_ss)
}

/// `M = (n+1)P_ss + 2(Q_s − sQ_ss) + (r²−s²)Q_sss`, so that `H_s = −s M`.
pub fn m_scalar(pq: &SprayData, n: usize) -> f64 {
    (n as f64 + 1.0) * pq.p_ss + 2.0 * (pq.q_s - pq.s * pq.q_ss) + pq.w2() * pq.q_sss
}

/// `E_ij = G^h_ijh`.
pub fn mean_berwald(pq: &SprayData, frame: &PointFrame) -> MeanBerwald {
    let (x, y, u, s, r, n) = (&frame.x, &frame.y, frame.u, frame.s, frame.r, frame.n);
    let nf = n as f64;
    let h = h_scalar(pq, n);
    let m = m_scalar(pq, n);
    let h_s = -s * m;
    // H_s/(s u^2) is written as -M/u^2, which is regular at s = 0.
    let e = Array2::from_shape_fn((n, n), |(i, j)| {
        h / u * kd(i, j) - (s * h_s + h) / u.powi(3) * y[i] * y[j]
            - m / (u * u) * (s * (x[i] * y[j] + x[j] * y[i]) - u * x[i] * x[j])
    });
    let SprayData {
        p,
        p_s,
        p_ss,
        q_s,
        q_ss,
        q_sss,
        ..
    } = *pq;
    let (s2, s3, s4) = (s * s, s.powi(3), s.powi(4));
    let cyy = ((nf + 1.0) * (s2 * p_ss + s * p_s - p)
        + r * r * (s2 * q_sss + s * q_ss - q_s)
        + 3.0 * s2 * q_s
        - 3.0 * s3 * q_ss
        - s4 * q_sss)
        / u.powi(3);
    let e_direct = Array2::from_shape_fn((n, n), |(i, j)| {
        h / u * kd(i, j) + cyy * y[i] * y[j] + m / u * x[i] * x[j]
            - s / (u * u) * m * (x[i] * y[j] + x[j] * y[i])
    });
    MeanBerwald {
        e,
        e_direct,
        h,
        h_s,
        m,
    }
}

/// Scalar trace `E = g^ij E_ij`, with the `1/s` factor resolved through `H_s = −s M`.
pub fn scalar_trace_e(phi: &Jet, pq: &SprayData, n: usize, u: f64) -> Result<f64> {
    let rho = metric_scalars(phi)?.rho;
    let w2 = pq.w2();
    let h = h_scalar(pq, n);
    let m = m_scalar(pq, n);
    let a = (n as f64 - 1.0) * rho[0] + rho[3] * w2;
    let b = rho[0] + rho[3] * w2;
    Ok((a * h + w2 * b * m) / u)
}

/// Landsberg curvature and its two scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Landsberg {
    pub l: Array3<f64>,
    pub l1: f64,
    pub l2: f64,
}

/// `L1` and `L2` at the jet's base point.
pub fn landsberg_scalars(phi: &Jet, pq: &SprayData) -> (f64, f64) {
    let (f, fs) = (phi.coeff(0, 0), phi.coeff(0, 1));
    let s = pq.s;
    let t = s * f + pq.w2() * fs;
    let l1 = 3.0 * fs * pq.p_ss + f * pq.p_sss + t * pq.q_sss;
    let l2 = -s * f * pq.p_ss + fs * (pq.p - s * pq.p_s) + t * (pq.q_s - s * pq.q_ss);
    (l1, l2)
}

/// `L_jkl = −½ F G^h_jkl F_{y^h}` in closed form.
pub fn landsberg_curvature(phi: &Jet, pq: &SprayData, frame: &PointFrame) -> Landsberg {
    let (l1, l2) = landsberg_scalars(phi, pq);
    let (x, y, u, s, n) = (&frame.x, &frame.y, frame.u, frame.s, frame.n);
    let f = phi.value();
    let c_yyy = (3.0 * s * l2 - s.powi(3) * l1) / u.powi(3);
    let c_dy = -s * l2 / u;
    let c_xxy = -s * l1 / u;
    let c_yyx = (s * s * l1 - l2) / (u * u);
    let l = Array3::from_shape_fn((n, n, n), |(j, k, l)| {
        let (xj, xk, xl, yj, yk, yl) = (x[j], x[k], x[l], y[j], y[k], y[l]);
        let (djk, djl, dkl) = (kd(j, k), kd(j, l), kd(k, l));
        -0.5 * f
            * (l1 * xj * xk * xl
                + c_yyy * yj * yk * yl
                + l2 * (dkl * xj + djl * xk + djk * xl)
                + c_dy * (dkl * yj + djl * yk + djk * yl)
                + c_xxy * (xk * xl * yj + yk * xj * xl + xj * yl * xk)
                + c_yyx * (yk * yl * xj + xk * yj * yl + yj * xl * yk))
    });
    Landsberg { l, l1, l2 }
}

/// Scalars of the surface Landsberg decomposition `(r²−s²)L1 + 3L2 = λ1 φ_s + λ2 φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceScalars {
    pub k: f64,
    pub k_s: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub combo: f64,
}

/// Surface scalars with `H` taken at `n = 2`. `λ1 = (sH − (r²−s²)H_s)/s` is
/// evaluated as `H + (r²−s²)M`, which has no singularity at `s = 0`.
pub fn surface_scalars(phi: &Jet, pq: &SprayData) -> SurfaceScalars {
    let s = pq.s;
    let w2 = pq.w2();
    let k = pq.p_ss - pq.q_s + s * pq.q_ss;
    let k_s = pq.p_sss + s * pq.q_sss;
    let lambda1 = h_scalar(pq, 2) + w2 * m_scalar(pq, 2);
    let lambda2 = w2 * k_s - 3.0 * s * k;
    let (l1, l2) = landsberg_scalars(phi, pq);
    SurfaceScalars {
        k,
        k_s,
        lambda1,
        lambda2,
        combo: w2 * l1 + 3.0 * l2,
    }
}

/// `s(δ^ij E_ij − x^i x^j E_ij/(r²−s²))`. It equals `s(n−2)H/u`, so a vanishing
/// mean Berwald curvature forces `H = 0` unless `n = 2`.
pub fn mean_berwald_dichotomy(e: &Array2<f64>, frame: &PointFrame) -> f64 {
    let trace: f64 = (0..frame.n).map(|i| e[[i, i]]).sum();
    let xx = frame.x.dot(&e.dot(&frame.x));
    frame.s * (trace - xx / frame.w2())
}

/// `x^j δ^kl L_jkl/(r²−s²) − x^j x^k x^l L_jkl/(r²−s²)²`. It equals
/// `−(φ/2)(n−2)L2`, so a vanishing Landsberg curvature forces `L2 = 0` unless
/// `n = 2`.
pub fn landsberg_dichotomy(l: &Array3<f64>, frame: &PointFrame) -> f64 {
    let (x, n, w2) = (&frame.x, frame.n, frame.w2());
    let mut trace = 0.0;
    let mut xxx = 0.0;
    for j in 0..n {
        for k in 0..n {
            trace += x[j] * l[[j, k, k]];
            for m in 0..n {
                xxx += x[j] * x[k] * x[m] * l[[j, k, m]];
            }
        }
    }
    trace / w2 - xxx / (w2 * w2)
}
