use crate::error::{Error, Result};
use crate::jets::Jet;

/// Relative size below which `φ − sφ_s + (r²−s²)φ_ss` counts as zero.
pub const SPRAY_TOL: f64 = 1e-10;

/// `P`, `Q` and their s-derivatives through order 3 at `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprayData {
    pub r: f64,
    pub s: f64,
    pub p: f64,
    pub p_s: f64,
    pub p_ss: f64,
    pub p_sss: f64,
    pub q: f64,
    pub q_s: f64,
    pub q_ss: f64,
    pub q_sss: f64,
}

impl SprayData {
    /// Read the first four s-coefficients of two jets.
    pub fn from_jets(p: &Jet, q: &Jet) -> Self {
        let (r, s) = p.base();
        SprayData {
            r,
            s,
            p: p.coeff(0, 0),
            p_s: p.coeff(0, 1),
            p_ss: p.coeff(0, 2),
            p_sss: p.coeff(0, 3),
            q: q.coeff(0, 0),
            q_s: q.coeff(0, 1),
            q_ss: q.coeff(0, 2),
            q_sss: q.coeff(0, 3),
        }
    }

    pub fn zero(r: f64, s: f64) -> Self {
        SprayData {
            r,
            s,
            p: 0.0,
            p_s: 0.0,
            p_ss: 0.0,
            p_sss: 0.0,
            q: 0.0,
            q_s: 0.0,
            q_ss: 0.0,
            q_sss: 0.0,
        }
    }

    pub fn w2(&self) -> f64 {
        (self.r - self.s) * (self.r + self.s)
    }

    pub fn is_finite(&self) -> bool {
        [
            self.p, self.p_s, self.p_ss, self.p_sss, self.q, self.q_s, self.q_ss, self.q_sss,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// `φ − sφ_s + (r²−s²)φ_ss` and the scale it is compared against.
pub fn spray_denominator(phi: &Jet) -> (f64, f64) {
    let (r, s) = phi.base();
    let (f, fs, fss) = (phi.coeff(0, 0), phi.coeff(0, 1), phi.coeff(0, 2));
    let w2 = (r - s) * (r + s);
    let d = f - s * fs + w2 * fss;
    let scale = f.abs() + (s * fs).abs() + (w2 * fss).abs();
    (d, scale)
}

/// Jets of `P` and `Q` in `s` from a jet of `φ`. The s-coefficients are exact
/// through order 3; the r-row is not available and is NaN.
pub fn spray_pq_jets(phi: &Jet) -> Result<(Jet, Jet)> {
    // P and Q do not change when φ is rescaled; work with φ/|φ| so that the
    // absolute division guard does not reject small but valid metrics.
    let v = phi.value().abs();
    let unit;
    let phi = if v > 0.0 && v.is_finite() {
        unit = *phi * (1.0 / v);
        &unit
    } else {
        phi
    };
    let (r, s0) = phi.base();
    let (d, scale) = spray_denominator(phi);
    if !(d.abs() > SPRAY_TOL * scale) {
        return Err(Error::SprayUndefined {
            r,
            s: s0,
            denominator: d,
        });
    }
    let s = Jet::seed_s(r, s0);
    let w2 = (phi.lift(r) - s) * (phi.lift(r) + s);
    let phi_s = phi.d_s();
    let phi_ss = phi_s.d_s();
    let phi_r = phi.d_r();
    let phi_rs = phi_r.d_s();
    let den = *phi - s * phi_s + w2 * phi_ss;
    let q = (-phi_r + s * phi_rs + phi_ss * r).checked_div(&(den * (2.0 * r)))?;
    let p = -(q.checked_div(phi)? * (s * *phi + w2 * phi_s))
        + (s * phi_r + phi_s * r).checked_div(&(*phi * (2.0 * r)))?;
    Ok((p.s_only(), q.s_only()))
}

/// Spray data of the metric `u·φ` at the jet's base point.
pub fn spray_pq(phi: &Jet) -> Result<SprayData> {
    let (p, q) = spray_pq_jets(phi)?;
    Ok(SprayData::from_jets(&p, &q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::fd_oracle;
    use crate::phi_lang::{eval_f64, eval_jet, parse_expr};

    #[test]
    fn euclidean_spray_vanishes() {
        let phi = eval_jet(&parse_expr("1").unwrap(), 1.2, 0.3).unwrap();
        let pq = spray_pq(&phi).unwrap();
        assert_eq!(pq, SprayData::zero(1.2, 0.3));
    }

    #[test]
    fn quadratic_spray() {
        let e = parse_expr("sqrt(1+s^2)").unwrap();
        for &(r, s) in &[(1.0, 0.0), (1.5, 0.7), (0.8, -0.5)] {
            let pq = spray_pq(&eval_jet(&e, r, s).unwrap()).unwrap();
            let want_q = 1.0 / (2.0 * (1.0 + r * r));
            assert!(pq.p.abs() < 1e-15 && pq.p_s.abs() < 1e-14);
            assert!(pq.p_ss.abs() < 1e-13 && pq.p_sss.abs() < 1e-12);
            assert!((pq.q - want_q).abs() < 1e-15);
            assert!(pq.q_s.abs() < 1e-14 && pq.q_ss.abs() < 1e-13 && pq.q_sss.abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_spray_against_finite_differences() {
        // Q assembled from finite-difference derivatives of φ.
        let e = parse_expr("sqrt(1+s^2)").unwrap();
        let f = |r: f64, s: f64| eval_f64(&e, r, s);
        let (r, s) = (1.3, 0.4);
        let d = |a, b| fd_oracle(f, r, s, a, b).unwrap();
        let phi = f(r, s).unwrap();
        let (fs, fss, fr, frs) = (d(0, 1), d(0, 2), d(1, 0), d(1, 1));
        let q = (-fr + s * frs + r * fss) / (2.0 * r * (phi - s * fs + (r * r - s * s) * fss));
        assert!((q - 1.0 / (2.0 * (1.0 + r * r))).abs() < 1e-8);
    }

    #[test]
    fn degenerate_family_has_no_spray() {
        let e = parse_expr("(1 + r)*s + r^2*sqrt(r^2 - s^2)").unwrap();
        for &(r, s) in &[(1.0, 0.2), (1.7, -0.4)] {
            let phi = eval_jet(&e, r, s).unwrap();
            assert!(matches!(
                spray_pq(&phi),
                Err(Error::SprayUndefined { .. })
            ));
        }
    }

    #[test]
    fn higher_coefficients_are_exact() {
        // P and Q jets agree with a direct re-evaluation of the formula at nearby s.
        let e = parse_expr("sqrt(r^2 - s^2)*exp(2*s/sqrt(r^2 - s^2))/r^6").unwrap();
        let (r, s) = (1.2, 0.3);
        let qf = |r: f64, s: f64| {
            Ok(spray_pq(&eval_jet(&e, r, s)?)?.q)
        };
        let pq = spray_pq(&eval_jet(&e, r, s).unwrap()).unwrap();
        let fd3 = fd_oracle(qf, r, s, 0, 3).unwrap();
        assert!((pq.q_sss - fd3).abs() < 1e-6 * (1.0 + fd3.abs()));
    }
}
