use super::logderiv::LogDerivField;
use super::SprayField;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::phi_lang::{eval_jet, Expr};

/// Number of radii on which the constraints are checked at build time.
pub const VALIDATION_POINTS: usize = 201;

/// Relative size below which a constraint expression counts as zero.
const CONSTRAINT_TOL: f64 = 1e-12;

/// Landsberg spray `P = c1 s + (c2/r²)√(r²−s²)`,
/// `Q = ½c0 s² − (c2 s/r⁴)√(r²−s²) + c3` with `c0`, `c2` solved from the
/// integrability conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct LandsbergFamily {
    pub c1: Expr,
    pub c3: Expr,
    pub c: f64,
    pub interval: (f64, f64),
}

/// Coefficient values and first r-derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyCoefficients {
    pub r: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c1_r: f64,
    pub c2_r: f64,
    pub c3_r: f64,
}

/// Residuals of the two integrability conditions at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrability {
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

struct CoeffJets {
    c0: Jet,
    c1: Jet,
    c2: Jet,
    c3: Jet,
}

impl LandsbergFamily {
    /// Build the family after checking `c1 ≠ −1/r²`, `c3 ≠ 1/(2r²)`,
    /// `c1 + 2c3 ≠ 0` and the reality of `c2` on the interval.
    pub fn build(c1: Expr, c3: Expr, c: f64, interval: (f64, f64)) -> Result<Self> {
        for (name, e) in [("c1", &c1), ("c3", &c3)] {
            if e.uses_s() {
                return Err(Error::InvalidExpression(format!("{name} must depend on r only")));
            }
        }
        let (lo, hi) = interval;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need 0 < lo <= hi and finite c, got [{lo}, {hi}] and c = {c}"
            )));
        }
        let fam = LandsbergFamily {
            c1,
            c3,
            c,
            interval,
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validation_radii(&self) -> Vec<f64> {
        let (lo, hi) = self.interval;
        if lo == hi {
            return vec![lo];
        }
        let n = VALIDATION_POINTS;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let rs = self.validation_radii();
        let mut vals = Vec::with_capacity(rs.len());
        for &r in &rs {
            let c1 = eval_jet(&self.c1, r, 0.0)?.value();
            let c3 = eval_jet(&self.c3, r, 0.0)?.value();
            let r2 = r * r;
            vals.push([
                (c1 * r2 + 1.0, (c1 * r2).abs() + 1.0),
                (2.0 * c3 * r2 - 1.0, (2.0 * c3 * r2).abs() + 1.0),
                (c1 + 2.0 * c3, c1.abs() + 2.0 * c3.abs()),
            ]);
        }
        const NAMES: [&str; 3] = ["c1 != -1/r^2", "c3 != 1/(2r^2)", "c1 + 2*c3 != 0"];
        for (k, which) in NAMES.iter().enumerate() {
            for (i, &r) in rs.iter().enumerate() {
                let (v, scale) = vals[i][k];
                if !(v.abs() > CONSTRAINT_TOL * scale) {
                    return Err(Error::ConstraintViolated { which, r });
                }
                if i > 0 {
                    let (vp, _) = vals[i - 1][k];
                    if vp.signum() != v.signum() {
                        let rp = rs[i - 1];
                        let root = rp - vp * (r - rp) / (v - vp);
                        return Err(Error::ConstraintViolated { which, r: root });
                    }
                }
            }
        }
        if self.c != 0.0 {
            for (i, &r) in rs.iter().enumerate() {
                let product = vals[i][0].0 * vals[i][1].0;
                if product < 0.0 {
                    return Err(Error::NonRealC2 { r, product });
                }
            }
        }
        Ok(())
    }

    fn coeff_jets(&self, r: f64, s: f64) -> Result<CoeffJets> {
        let c1 = eval_jet(&self.c1, r, s)?;
        let c3 = eval_jet(&self.c3, r, s)?;
        let c1p = c1.d_r();
        let c3p = c3.d_r();
        let rj = Jet::seed_r(r, s);
        let r2 = rj * rj;
        let num = 4.0 * r2 * rj * c1 * c3 * (2.0 * c3 + c1) - 2.0 * r2 * (c1p * c3 - c1 * c3p)
            + 2.0 * rj * (4.0 * c3 * c3 - c1 * c1)
            + c1p
            + 2.0 * c3p;
        let g1 = c1 * r2 + 1.0;
        let g3 = 2.0 * r2 * c3 - 1.0;
        let den = 2.0 * rj * g1 * g3;
        let c0 = -(num.checked_div(&den).map_err(|_| Error::ConstraintViolated {
            which: "c1 != -1/r^2",
            r,
        })?);
        let c2 = if self.c == 0.0 {
            c1.lift(0.0)
        } else {
            let product = g1 * g3;
            if product.value() < 0.0 {
                return Err(Error::NonRealC2 {
                    r,
                    product: product.value(),
                });
            }
            self.c * product.sqrt()?
        };
        Ok(CoeffJets { c0, c1, c2, c3 })
    }

    pub fn coefficients(&self, r: f64) -> Result<FamilyCoefficients> {
        let j = self.coeff_jets(r, 0.0)?;
        Ok(FamilyCoefficients {
            r,
            c0: j.c0.value(),
            c1: j.c1.value(),
            c2: j.c2.value(),
            c3: j.c3.value(),
            c1_r: j.c1.coeff(1, 0),
            c2_r: j.c2.coeff(1, 0),
            c3_r: j.c3.coeff(1, 0),
        })
    }

    /// The integrability residuals `A(r)` and `B(r)`.
    pub fn integrability(&self, r: f64) -> Result<Integrability> {
        let k = self.coefficients(r)?;
        let (c0, c1, c2, c3) = (k.c0, k.c1, k.c2, k.c3);
        let (c1p, c2p, c3p) = (k.c1_r, k.c2_r, k.c3_r);
        let (r2, r3, r5) = (r * r, r.powi(3), r.powi(5));
        let a = r2
            * (4.0 * c0 * c1 * c3 * r5
                + 2.0 * (2.0 * c0 * c3 + 2.0 * c1 * c1 * c3 + 4.0 * c1 * c3 * c3 - c0 * c1) * r3
                + 2.0 * (c1 * c3p - c1p * c3) * r2
                + 2.0 * (4.0 * c3 * c3 - c0 - c1 * c1) * r
                + 2.0 * c3p
                + c1p);
        let b = 4.0 * c0 * c2 * c3 * r5
            + 2.0 * c2 * (2.0 * c1 * c3 + 4.0 * c3 * c3 - c0) * r3
            + 4.0 * (c2 * c3p - c2p * c3) * r2
            + 2.0 * c2 * (2.0 * c3 - c1) * r
            + 2.0 * c2p;
        Ok(Integrability { r, a, b })
    }

    /// Integrability residuals at `n` evenly spaced radii of the interval.
    pub fn integrability_on(&self, n: usize) -> Result<Vec<Integrability>> {
        let (lo, hi) = self.interval;
        (0..n)
            .map(|i| {
                let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                self.integrability(lo + (hi - lo) * t)
            })
            .collect()
    }

    /// `r² + (c1+2c3)r²s² − 2c3r⁴ + 2c2 s√(r²−s²)` as a jet.
    fn denominator_jet(&self, j: &CoeffJets, r: f64, s0: f64) -> Result<Jet> {
        let s = Jet::seed_s(r, s0);
        let rj = Jet::seed_r(r, s0);
        let r2 = rj * rj;
        let w = ((rj - s) * (rj + s)).sqrt()?;
        Ok(r2 + (j.c1 + 2.0 * j.c3) * r2 * s * s - 2.0 * r2 * r2 * j.c3 + 2.0 * j.c2 * s * w)
    }

    /// `(φ_s/φ, φ_r/φ)` at `(r, s)`.
    pub fn logderiv_phi(&self, r: f64, s: f64) -> Result<(f64, f64)> {
        let (a, b) = self.log_deriv_jets(r, s)?;
        Ok((a.value(), b.value()))
    }

    /// `φ − sφ_s + (r²−s²)φ_ss` divided by `φ`, in closed form.
    pub fn regularity_margin(&self, r: f64, s: f64) -> Result<f64> {
        let j = self.coeff_jets(r, s)?;
        let d = self.denominator_jet(&j, r, s)?.value();
        let r2 = r * r;
        let g = (j.c1.value() * r2 + 1.0) * (2.0 * j.c3.value() * r2 - 1.0);
        Ok(-r2 * r2 * g / (d * d))
    }
}

fn check_domain(r: f64, s: f64) -> Result<()> {
    if r > 0.0 && s.abs() < r {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("point (r, s) = ({r}, {s}) is outside |s| < r")))
    }
}

impl LogDerivField for LandsbergFamily {
    fn log_deriv_jets(&self, r: f64, s0: f64) -> Result<(Jet, Jet)> {
        check_domain(r, s0)?;
        let j = self.coeff_jets(r, s0)?;
        let d = self.denominator_jet(&j, r, s0)?;
        let s = Jet::seed_s(r, s0);
        let rj = Jet::seed_r(r, s0);
        let r2 = rj * rj;
        let r4 = r2 * r2;
        let r6 = r4 * r2;
        let w = ((rj - s) * (rj + s)).sqrt()?;
        let (c0, c1, c2, c3) = (j.c0, j.c1, j.c2, j.c3);
        let vanished = |_| Error::DenominatorVanished {
            what: "landsberg log-derivative denominator",
            r,
            s: s0,
        };
        let a_num = (c1 + 2.0 * c3) * r2 * s + 2.0 * c2 * w;
        let a = a_num.checked_div(&d).map_err(vanished)?;
        let b_num = (2.0 * r4 * c0 * c2 + 4.0 * r2 * (c1 + c3) * c2 - 2.0 * c2) * s * w
            + r6 * c0 * c1 * s * s
            + r4 * (c0 + 4.0 * c1 * c3 + 2.0 * c1 * c1) * s * s
            - 2.0 * r6 * c1 * c3
            + r4 * c1;
        let b = b_num.checked_div(&(d * rj)).map_err(vanished)?;
        Ok((a, b))
    }

    fn pole_denominator(&self, r: f64, s: f64) -> Option<f64> {
        let j = self.coeff_jets(r, s).ok()?;
        Some(self.denominator_jet(&j, r, s).ok()?.value())
    }
}

impl SprayField for LandsbergFamily {
    fn pq_jets(&self, r: f64, s0: f64) -> Result<(Jet, Jet)> {
        check_domain(r, s0)?;
        let j = self.coeff_jets(r, s0)?;
        let s = Jet::seed_s(r, s0);
        let w = ((s.lift(r) - s) * (s.lift(r) + s)).sqrt()?;
        let r2 = r * r;
        let p = j.c1 * s + j.c2 * w * (1.0 / r2);
        let q = 0.5 * j.c0 * s * s - j.c2 * s * w * (1.0 / (r2 * r2)) + j.c3;
        Ok((p.s_only(), q.s_only()))
    }
}
