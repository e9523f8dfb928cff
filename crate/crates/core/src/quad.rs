//! One-dimensional quadrature rules.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Fails with [`Error::IntegrationFailure`] when the integrand produces a
/// non-finite value or the recursion limit is reached before convergence.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-adaptive_simpson(f, b, a, tol)?);
    }
    let fa = finite(&f, a)?;
    let fb = finite(&f, b)?;
    let m = 0.5 * (a + b);
    let fm = finite(&f, m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn finite<F: Fn(f64) -> Result<f64>>(f: &F, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::IntegrationFailure(format!(
            "integrand is not finite at {x}"
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = finite(f, lm)?;
    let frm = finite(f, rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return Err(Error::IntegrationFailure(format!(
            "adaptive Simpson did not converge on [{a}, {b}] (error estimate {:e})",
            delta.abs() / 15.0
        )));
    }
    Ok(step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_26,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre8<F>(g: F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        acc += w * (g(m - h * x)? + g(m + h * x)?);
    }
    Ok(h * acc)
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule on `[0, 1]`: `Σ w_k g(t_k)`.
pub fn gauss_legendre_unit<F>(g: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
        acc += 0.5 * w * g(0.5 * (x + 1.0))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let v = adaptive_simpson(|x| Ok(x * x * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| Ok(x.exp()), -1.0, 1.5, 1e-12).unwrap();
        assert!((v - (1.5f64.exp() - (-1f64).exp())).abs() < 1e-11);
        let v = adaptive_simpson(|x| Ok(1.0 / x), 2.0, 1.0, 1e-12).unwrap();
        assert!((v + 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn simpson_reports_singularities() {
        assert!(matches!(
            adaptive_simpson(|x| Ok(1.0 / x), -1.0, 1.0, 1e-10),
            Err(Error::IntegrationFailure(_))
        ));
    }

    #[test]
    fn eight_point_rule_is_exact_to_degree_fifteen() {
        let v = gauss_legendre8(|t| Ok(t.powi(15) + t.powi(14)), -1.0, 2.0).unwrap();
        let want = (2f64.powi(16) - 1.0) / 16.0 + (2f64.powi(15) + 1.0) / 15.0;
        assert!((v - want).abs() < 1e-10 * want);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_nine() {
        let v = gauss_legendre_unit(|t| Ok(t.powi(9))).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }
}
