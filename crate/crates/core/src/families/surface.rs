use super::SprayField;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::phi_lang::{eval_jet, Expr};

/// Berwald sprays of spherically symmetric surfaces:
/// `P = b1 s + b2/√(r²−s²) + b3(r²−2s²)/√(r²−s²)` and
/// `Q = b0 s² + ½b1 + b2 s(r²−2s²)/(r⁴√(r²−s²)) − b3 s(r²−2s²)/(r²√(r²−s²)) − (a/r²)s√(r²−s²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceBerwaldFamily {
    pub a: Expr,
    pub b0: Expr,
    pub b1: Expr,
    pub b2: Expr,
    pub b3: Expr,
}

impl SurfaceBerwaldFamily {
    pub fn new(a: Expr, b0: Expr, b1: Expr, b2: Expr, b3: Expr) -> Result<Self> {
        for (name, e) in [("a", &a), ("b0", &b0), ("b1", &b1), ("b2", &b2), ("b3", &b3)] {
            if e.uses_s() {
                return Err(Error::InvalidExpression(format!("{name} must depend on r only")));
            }
        }
        Ok(SurfaceBerwaldFamily { a, b0, b1, b2, b3 })
    }
}

impl SprayField for SurfaceBerwaldFamily {
    fn pq_jets(&self, r: f64, s0: f64) -> Result<(Jet, Jet)> {
        if !(r > 0.0 && s0.abs() < r) {
            return Err(Error::InvalidInput(format!(
                "point (r, s) = ({r}, {s0}) is outside |s| < r"
            )));
        }
        let at = |e: &Expr| eval_jet(e, r, s0);
        let (a, b0, b1, b2, b3) = (at(&self.a)?, at(&self.b0)?, at(&self.b1)?, at(&self.b2)?, at(&self.b3)?);
        let s = Jet::seed_s(r, s0);
        let r2 = r * r;
        let w = ((s.lift(r) - s) * (s.lift(r) + s)).sqrt()?;
        let inv_w = w.recip()?;
        let t = r2 - 2.0 * s * s;
        let p = b1 * s + b2 * inv_w + b3 * t * inv_w;
        let q = b0 * s * s + 0.5 * b1 + b2 * s * t * inv_w * (1.0 / (r2 * r2))
            - b3 * s * t * inv_w * (1.0 / r2)
            - a * s * w * (1.0 / r2);
        Ok((p.s_only(), q.s_only()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{berwald_curvature, embed_point};
    use crate::phi_lang::parse_expr;

    fn family(c: [&str; 5]) -> SurfaceBerwaldFamily {
        let p = |t: &str| parse_expr(t).unwrap();
        SurfaceBerwaldFamily::new(p(c[0]), p(c[1]), p(c[2]), p(c[3]), p(c[4])).unwrap()
    }

    fn max_berwald(f: &SurfaceBerwaldFamily) -> f64 {
        let mut worst = 0.0f64;
        for &(r, s) in &[(1.0, 0.0), (1.2, 0.5), (0.7, -0.6), (1.9, 1.5)] {
            let pq = f.spray(r, s).unwrap();
            let frame = embed_point(r, s, 1.0, 2).unwrap();
            let b = berwald_curvature(&pq, &frame);
            worst = worst.max(b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        worst
    }

    #[test]
    fn zero_coefficients_give_zero_spray() {
        let pq = family(["0"; 5]).spray(1.0, 0.3).unwrap();
        assert!(pq.p == 0.0 && pq.q == 0.0 && pq.q_sss == 0.0);
    }

    #[test]
    fn quadratic_specialisation() {
        let pq = family(["0", "r", "1 + r", "0", "0"]).spray(1.5, 0.4).unwrap();
        assert!((pq.p - 2.5 * 0.4).abs() < 1e-15);
        assert!((pq.q - (1.5 * 0.16 + 1.25)).abs() < 1e-15);
    }

    #[test]
    fn berwald_curvature_vanishes() {
        let f = family(["0.3*r", "1/r", "0.5 + r^2", "0.7", "-0.4*r"]);
        assert!(max_berwald(&f) < 1e-9);
        let only_b3 = family(["0", "0", "0", "0", "1"]);
        assert!(max_berwald(&only_b3) < 1e-9);
    }
}
