use ndarray::Array2;

use super::frame::PointFrame;
use crate::error::{Error, Result};
use crate::jets::Jet;

/// Relative size below which a metric factor counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Builders `σ0..σ3` of `g_ij` and `ρ0..ρ3` of `g^ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScalars {
    pub sigma: [f64; 4],
    pub rho: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComponents {
    pub scalars: MetricScalars,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
}

fn check(factor: &'static str, value: f64, scale: f64, r: f64, s: f64) -> Result<()> {
    if value.abs() > DEGENERACY_TOL * scale && value.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateMetric {
            factor,
            value,
            r,
            s,
        })
    }
}

/// `σ` and `ρ` scalars at the jet's base point.
pub fn metric_scalars(phi: &Jet) -> Result<MetricScalars> {
    let (r, s) = phi.base();
    let (f, fs, fss) = (phi.coeff(0, 0), phi.coeff(0, 1), phi.coeff(0, 2));
    let w2 = (r - s) * (r + s);
    let m1 = f - s * fs;
    let m2 = m1 + w2 * fss;
    check("phi", f, 0.0, r, s)?;
    check("phi - s*phi_s", m1, f.abs() + (s * fs).abs(), r, s)?;
    check(
        "phi - s*phi_s + (r^2-s^2)*phi_ss",
        m2,
        f.abs() + (s * fs).abs() + (w2 * fss).abs(),
        r,
        s,
    )?;
    let sigma = [
        f * m1,
        fs * fs + f * fss,
        m1 * fs - s * f * fss,
        s * s * f * fss - s * m1 * fs,
    ];
    let k = f * fs - s * fs * fs - s * f * fss;
    let rho = [
        1.0 / (f * m1),
        (s * f + w2 * fs) * k / (f.powi(3) * m1 * m2),
        -k / (f * f * m1 * m2),
        -fss / (f * m1 * m2),
    ];
    Ok(MetricScalars { sigma, rho })
}

/// `g_ij` and `g^ij` in the frame, with all indices lowered by `δ`.
pub fn metric_components(phi: &Jet, frame: &PointFrame) -> Result<MetricComponents> {
    let scalars = metric_scalars(phi)?;
    let [s0, s1, s2, s3] = scalars.sigma;
    let [r0, r1, r2, r3] = scalars.rho;
    let (x, y, u, n) = (&frame.x, &frame.y, frame.u, frame.n);
    let g = Array2::from_shape_fn((n, n), |(i, j)| {
        let d = if i == j { 1.0 } else { 0.0 };
        s0 * d + s1 * x[i] * x[j] + s2 / u * (x[i] * y[j] + x[j] * y[i]) + s3 / (u * u) * y[i] * y[j]
    });
    let g_inv = Array2::from_shape_fn((n, n), |(i, j)| {
        let d = if i == j { 1.0 } else { 0.0 };
        r0 * d + r1 / (u * u) * y[i] * y[j] + r2 / u * (x[i] * y[j] + x[j] * y[i]) + r3 * x[i] * x[j]
    });
    Ok(MetricComponents { scalars, g, g_inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frame::embed_point;
    use crate::phi_lang::{eval_jet, parse_expr};

    #[test]
    fn euclidean_metric_is_identity() {
        let phi = eval_jet(&parse_expr("1").unwrap(), 1.0, 0.3).unwrap();
        let f = embed_point(1.0, 0.3, 1.0, 3).unwrap();
        let m = metric_components(&phi, &f).unwrap();
        assert_eq!(m.scalars.sigma, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(m.g, Array2::eye(3));
    }

    #[test]
    fn quadratic_metric_at_s_zero() {
        let phi = eval_jet(&parse_expr("sqrt(1+s^2)").unwrap(), 1.0, 0.0).unwrap();
        let f = embed_point(1.0, 0.0, 1.0, 2).unwrap();
        let m = metric_components(&phi, &f).unwrap();
        assert!((m.g[[0, 0]] - 2.0).abs() < 1e-15);
        assert!((m.g[[1, 1]] - 1.0).abs() < 1e-15);
        assert!(m.g[[0, 1]].abs() < 1e-15);
    }

    #[test]
    fn inverse_contracts_to_identity() {
        let exprs = [
            "sqrt(1+s^2)",
            "sqrt(r^2 - s^2)*exp(2*s/sqrt(r^2 - s^2))/r^5",
            "exp(0.3*s*r) + 0.2*s^2",
        ];
        for e in exprs {
            let e = parse_expr(e).unwrap();
            for &(r, s, u, n) in &[(1.0, 0.2, 1.0, 2), (1.4, -0.6, 2.5, 3), (0.9, 0.5, 0.4, 4)] {
                let phi = eval_jet(&e, r, s).unwrap();
                let f = embed_point(r, s, u, n).unwrap();
                let m = metric_components(&phi, &f).unwrap();
                let prod = m.g.dot(&m.g_inv);
                let err = (&prod - &Array2::<f64>::eye(n))
                    .iter()
                    .fold(0.0f64, |a, v| a.max(v.abs()));
                assert!(err < 1e-10, "{e} at {r},{s}: {err}");
                // F^2 = g(y, y)
                let gyy = f.y.dot(&m.g.dot(&f.y));
                let f2 = (u * phi.value()).powi(2);
                assert!((gyy - f2).abs() < 1e-9 * f2.max(1.0));
                let asym = (&m.g - &m.g.t()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let scale = m.g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                assert!(asym <= 1e-14 * scale);
            }
        }
    }

    #[test]
    fn degenerate_factor_is_named() {
        let phi = eval_jet(&parse_expr("s").unwrap(), 1.0, 0.3).unwrap();
        match metric_scalars(&phi) {
            Err(Error::DegenerateMetric { factor, .. }) => assert_eq!(factor, "phi - s*phi_s"),
            other => panic!("{other:?}"),
        }
    }
}
