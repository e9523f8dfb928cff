//! Truncated bivariate Taylor jets in `(r, s)`.
//!
//! A [`Jet`] carries every partial derivative `∂_r^a ∂_s^b f` with `a ≤ 1` and
//! `b ≤ 5` at a fixed base point. Arithmetic and elementary functions propagate
//! those derivatives exactly (up to rounding). Internally the coefficients are
//! stored in Taylor form, `f_{ab} / (a! b!)`, which makes products a plain
//! convolution.
//!
//! Coefficients that cannot be known after differentiation (the top s-order
//! after [`Jet::d_s`], the whole r-row after [`Jet::d_r`]) are set to NaN so that
//! any later use of them is visible instead of silently wrong.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Highest stored r-order.
pub const R_ORDER: usize = 1;
/// Highest stored s-order.
pub const S_ORDER: usize = 5;

const NR: usize = R_ORDER + 1;
const NS: usize = S_ORDER + 1;

/// Divisors below this magnitude are rejected.
pub const DIV_GUARD: f64 = 1e-13;

const FACT: [f64; 7] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

/// Truncated Taylor jet of a scalar function of `(r, s)`.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    t: [[f64; NS]; NR],
    base_r: f64,
    base_s: f64,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("base", &(self.base_r, self.base_s))
            .field("d0", &self.row(0))
            .field("d1", &self.row(1))
            .finish()
    }
}

impl Jet {
    /// The constant function `c`.
    pub fn constant(c: f64, r0: f64, s0: f64) -> Self {
        let mut t = [[0.0; NS]; NR];
        t[0][0] = c;
        Jet {
            t,
            base_r: r0,
            base_s: s0,
        }
    }

    /// The coordinate function `r`.
    pub fn seed_r(r0: f64, s0: f64) -> Self {
        let mut j = Jet::constant(r0, r0, s0);
        j.t[1][0] = 1.0;
        j
    }

    /// The coordinate function `s`.
    pub fn seed_s(r0: f64, s0: f64) -> Self {
        let mut j = Jet::constant(s0, r0, s0);
        j.t[0][1] = 1.0;
        j
    }

    /// Build a jet from partial derivatives `derivs[a][b] = ∂_r^a ∂_s^b f`.
    pub fn from_derivs(derivs: [[f64; NS]; NR], r0: f64, s0: f64) -> Self {
        let mut t = [[0.0; NS]; NR];
        for a in 0..NR {
            for b in 0..NS {
                t[a][b] = derivs[a][b] / (FACT[a] * FACT[b]);
            }
        }
        Jet {
            t,
            base_r: r0,
            base_s: s0,
        }
    }

    /// A constant at the same base point as `self`.
    pub fn lift(&self, c: f64) -> Self {
        Jet::constant(c, self.base_r, self.base_s)
    }

    pub fn base(&self) -> (f64, f64) {
        (self.base_r, self.base_s)
    }

    pub fn value(&self) -> f64 {
        self.t[0][0]
    }

    /// `∂_r^a ∂_s^b f` at the base point.
    ///
    /// # Panics
    /// If `a > 1` or `b > 5`.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        self.t[a][b] * FACT[a] * FACT[b]
    }

    /// The row `∂_r^a ∂_s^b f` for `b = 0..=5`.
    pub fn row(&self, a: usize) -> [f64; NS] {
        let mut out = [0.0; NS];
        for (b, o) in out.iter_mut().enumerate() {
            *o = self.coeff(a, b);
        }
        out
    }

    /// All twelve derivative coefficients.
    pub fn derivs(&self) -> [[f64; NS]; NR] {
        [self.row(0), self.row(1)]
    }

    /// The jet of `∂f/∂s`; its top s-coefficients are unknown and set to NaN.
    pub fn d_s(&self) -> Self {
        let mut t = [[f64::NAN; NS]; NR];
        for a in 0..NR {
            for b in 0..S_ORDER {
                t[a][b] = (b + 1) as f64 * self.t[a][b + 1];
            }
        }
        Jet { t, ..*self }
    }

    /// The jet of `∂f/∂r`; its r-row is unknown and set to NaN.
    pub fn d_r(&self) -> Self {
        let mut t = [[f64::NAN; NS]; NR];
        t[0] = self.t[1];
        Jet { t, ..*self }
    }

    /// Drop the r-row (set it to NaN), keeping a pure s-jet.
    pub fn s_only(&self) -> Self {
        let mut t = self.t;
        t[1] = [f64::NAN; NS];
        Jet { t, ..*self }
    }

    fn same_base(&self, other: &Jet) {
        debug_assert!(
            (self.base_r == other.base_r || self.base_r.is_nan() || other.base_r.is_nan())
                && (self.base_s == other.base_s
                    || self.base_s.is_nan()
                    || other.base_s.is_nan()),
            "jets at different base points: {:?} vs {:?}",
            self.base(),
            other.base()
        );
    }

    fn mul_t(a: &[[f64; NS]; NR], b: &[[f64; NS]; NR]) -> [[f64; NS]; NR] {
        let mut out = [[0.0; NS]; NR];
        for (ia, ra) in a.iter().enumerate() {
            for (ja, &x) in ra.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                for ib in 0..NR - ia {
                    for jb in 0..NS - ja {
                        out[ia + ib][ja + jb] += x * b[ib][jb];
                    }
                }
            }
        }
        out
    }

    /// Apply a univariate function given its derivatives `f^(k)(value)` for `k = 0..=6`.
    pub fn compose(&self, derivs: [f64; 7]) -> Self {
        let mut delta = self.t;
        delta[0][0] = 0.0;
        let mut out = [[0.0; NS]; NR];
        out[0][0] = derivs[0];
        let mut pow = delta;
        for (k, dk) in derivs.iter().enumerate().skip(1) {
            let c = dk / FACT[k];
            for a in 0..NR {
                for b in 0..NS {
                    out[a][b] += c * pow[a][b];
                }
            }
            if k < 6 {
                pow = Jet::mul_t(&pow, &delta);
            }
        }
        Jet { t: out, ..*self }
    }

    /// `1 / self`, rejecting divisors whose value is below [`DIV_GUARD`].
    pub fn recip(&self) -> Result<Self> {
        let v = self.value();
        if !(v.abs() >= DIV_GUARD) {
            return Err(Error::DivisionByZeroJet {
                value: v,
                guard: DIV_GUARD,
            });
        }
        let mut d = [0.0; 7];
        let mut p = 1.0 / v;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = if k % 2 == 0 { p } else { -p } * FACT[k];
            p /= v;
        }
        Ok(self.compose(d))
    }

    /// `self / other`.
    pub fn checked_div(&self, other: &Jet) -> Result<Self> {
        self.same_base(other);
        Ok(*self * other.recip()?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        let v = self.value();
        if !(v > 0.0) {
            return Err(Error::domain("sqrt", v));
        }
        Ok(self.compose(power_derivs(v, 0.5)))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e; 7])
    }

    /// `ln |self|`.
    pub fn ln_abs(&self) -> Result<Self> {
        let v = self.value();
        if v == 0.0 || !v.is_finite() {
            return Err(Error::domain("ln_abs", v));
        }
        let mut d = [0.0; 7];
        d[0] = v.abs().ln();
        for (k, dk) in d.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *dk = sign * FACT[k - 1] / v.powi(k as i32);
        }
        Ok(self.compose(d))
    }

    /// Real-branch inverse hyperbolic tangent, `½ ln |(1+x)/(1−x)|`.
    pub fn arctanh_re(&self) -> Result<Self> {
        let x = self.value();
        if (x.abs() - 1.0).abs() < f64::EPSILON || !x.is_finite() {
            return Err(Error::domain("arctanh_re", x));
        }
        let mut d = [0.0; 7];
        d[0] = arctanh_re(x);
        for (k, dk) in d.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *dk = 0.5
                * FACT[k - 1]
                * (sign / (1.0 + x).powi(k as i32) + 1.0 / (1.0 - x).powi(k as i32));
        }
        Ok(self.compose(d))
    }

    /// `|self|`, defined away from zero.
    pub fn abs(&self) -> Result<Self> {
        let v = self.value();
        if v == 0.0 {
            return Err(Error::domain("abs", v));
        }
        Ok(if v > 0.0 { *self } else { -*self })
    }

    /// `self^p` for a real constant exponent.
    ///
    /// Non-integer exponents require a positive base; integer exponents accept any
    /// base (negative ones need a nonzero base).
    pub fn powf(&self, p: f64) -> Result<Self> {
        let v = self.value();
        if p == p.trunc() && p.abs() <= i32::MAX as f64 {
            return self.powi(p as i32);
        }
        if !(v > 0.0) {
            return Err(Error::domain("pow", v));
        }
        Ok(self.compose(power_derivs(v, p)))
    }

    /// `self^n` for an integer exponent.
    pub fn powi(&self, n: i32) -> Result<Self> {
        match n {
            0 => Ok(self.lift(1.0)),
            1 => Ok(*self),
            2 => Ok(*self * *self),
            n if n < 0 => self.powi(-n)?.recip(),
            n => {
                let v = self.value();
                let mut d = [0.0; 7];
                let mut c = 1.0;
                for (k, dk) in d.iter_mut().enumerate() {
                    let e = n - k as i32;
                    *dk = if e < 0 { 0.0 } else { c * v.powi(e) };
                    c *= e as f64;
                }
                Ok(self.compose(d))
            }
        }
    }
}

/// `d^k/dx^k x^p` at `x = v`, `k = 0..=6`.
fn power_derivs(v: f64, p: f64) -> [f64; 7] {
    let mut d = [0.0; 7];
    let mut c = 1.0;
    for (k, dk) in d.iter_mut().enumerate() {
        *dk = c * v.powf(p - k as f64);
        c *= p - k as f64;
    }
    d
}

/// Real-branch inverse hyperbolic tangent on plain numbers.
pub fn arctanh_re(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).abs().ln()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.same_base(&rhs);
        let mut t = self.t;
        for a in 0..NR {
            for b in 0..NS {
                t[a][b] += rhs.t[a][b];
            }
        }
        Jet { t, ..self }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut t = self.t;
        for row in t.iter_mut() {
            for c in row.iter_mut() {
                *c = -*c;
            }
        }
        Jet { t, ..self }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.same_base(&rhs);
        Jet {
            t: Jet::mul_t(&self.t, &rhs.t),
            ..self
        }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.t[0][0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.t[0][0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for row in self.t.iter_mut() {
            for c in row.iter_mut() {
                *c *= rhs;
            }
        }
        self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

/// Base steps for the finite-difference oracle, indexed by total derivative order.
const FD_STEPS: [f64; 7] = [0.0, 1e-3, 1e-2, 2e-2, 4e-2, 5e-2, 8e-2];

fn binom(n: usize, k: usize) -> f64 {
    FACT[n] / (FACT[k] * FACT[n - k])
}

/// Central-difference estimate of `∂_r^a ∂_s^b f` at `(r0, s0)`.
///
/// Uses the tensor product of centred `k`-th differences, whose error expands in
/// even powers of the step, and two levels of Richardson extrapolation (steps
/// `h`, `h/2`, `h/4`). Every stencil point must satisfy `r > 0` and `|s| < r`.
///
/// Typical accuracy on smooth functions is about `1e-9` relative for orders up
/// to 3 and `1e-6` for orders 4 and 5.
pub fn fd_oracle<F>(f: F, r0: f64, s0: f64, order_r: usize, order_s: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if order_r > R_ORDER || order_s > S_ORDER {
        return Err(Error::InvalidInput(format!(
            "fd_oracle supports orders up to ({R_ORDER}, {S_ORDER}), got ({order_r}, {order_s})"
        )));
    }
    let k = order_r + order_s;
    if k == 0 {
        return f(r0, s0);
    }
    let h = FD_STEPS[k];
    let hr = h * r0.abs().max(1.0);
    let hs = h * s0.abs().max(1.0);
    let reach_r = order_r as f64 * 0.5 * hr;
    let reach_s = order_s as f64 * 0.5 * hs;
    if r0 - reach_r <= 0.0 || s0.abs() + reach_s >= r0 - reach_r {
        return Err(Error::StencilOutOfDomain { r: r0, s: s0 });
    }
    let diff = |scale: f64| -> Result<f64> {
        let (hr, hs) = (hr * scale, hs * scale);
        let mut acc = 0.0;
        for i in 0..=order_r {
            let dr = (order_r as f64 * 0.5 - i as f64) * hr;
            let wr = if i % 2 == 0 { 1.0 } else { -1.0 } * binom(order_r, i);
            for j in 0..=order_s {
                let ds = (order_s as f64 * 0.5 - j as f64) * hs;
                let ws = if j % 2 == 0 { 1.0 } else { -1.0 } * binom(order_s, j);
                acc += wr * ws * f(r0 + dr, s0 + ds)?;
            }
        }
        Ok(acc / (hr.powi(order_r as i32) * hs.powi(order_s as i32)))
    };
    let d1 = diff(1.0)?;
    let d2 = diff(0.5)?;
    let d4 = diff(0.25)?;
    let e1 = (4.0 * d2 - d1) / 3.0;
    let e2 = (4.0 * d4 - d2) / 3.0;
    Ok((16.0 * e2 - e1) / 15.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn seeds() {
        let r = Jet::seed_r(2.0, 0.5);
        assert_eq!(r.value(), 2.0);
        assert_eq!(r.coeff(1, 0), 1.0);
        assert_eq!(r.coeff(0, 1), 0.0);
        let s = Jet::seed_s(1.0, 0.3);
        assert_eq!(s.value(), 0.3);
        assert_eq!(s.coeff(0, 1), 1.0);
        assert_eq!(s.coeff(1, 0), 0.0);
    }

    #[test]
    fn r_squared() {
        let r = Jet::seed_r(2.0, 0.5);
        let rr = r * r;
        assert_eq!(rr.value(), 4.0);
        assert_eq!(rr.coeff(1, 0), 4.0);
    }

    #[test]
    fn reciprocal_of_r() {
        let r = Jet::seed_r(2.0, 0.0);
        let q = r.lift(1.0).checked_div(&r).unwrap();
        assert_eq!(q.value(), 0.5);
        assert_eq!(q.coeff(1, 0), -0.25);
    }

    #[test]
    fn s_squared() {
        let s = Jet::seed_s(1.0, 0.3);
        let ss = s * s;
        assert!((ss.value() - 0.09).abs() < 1e-15);
        assert!((ss.coeff(0, 1) - 0.6).abs() < 1e-15);
        assert_eq!(ss.coeff(0, 2), 2.0);
        for b in 3..=5 {
            assert_eq!(ss.coeff(0, b), 0.0);
        }
    }

    #[test]
    fn division_guard() {
        let z = Jet::constant(1e-14, 1.0, 0.0);
        assert!(matches!(
            z.recip(),
            Err(Error::DivisionByZeroJet { .. })
        ));
    }

    #[test]
    fn sqrt_of_circle() {
        let r = Jet::seed_r(1.0, 0.0);
        let s = Jet::seed_s(1.0, 0.0);
        let w = (r * r - s * s).sqrt().unwrap();
        assert_eq!(w.value(), 1.0);
        assert_eq!(w.coeff(0, 1), 0.0);
        assert!((w.coeff(0, 2) + 1.0).abs() < 1e-15);
        // w_r = r / w = 1
        assert!((w.coeff(1, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_of_zero() {
        let e = Jet::constant(0.0, 1.0, 0.2).exp();
        assert_eq!(e.value(), 1.0);
        for a in 0..2 {
            for b in 0..6 {
                if a + b > 0 {
                    assert_eq!(e.coeff(a, b), 0.0);
                }
            }
        }
    }

    #[test]
    fn arctanh_beyond_one() {
        let x = 5f64.sqrt() / 2.0;
        let j = Jet::constant(x, 1.0, 0.0).arctanh_re().unwrap();
        let want = 0.5 * ((1.0 + x) / (1.0 - x)).abs().ln();
        assert!((j.value() - want).abs() < 1e-15);
    }

    #[test]
    fn arctanh_derivatives_match_closed_form() {
        // d/ds arctanh(s) = 1/(1-s^2), d2 = 2s/(1-s^2)^2
        for &s0 in &[0.3, 1.7, -2.5] {
            let j = Jet::seed_s(4.0, s0).arctanh_re().unwrap();
            let d1 = 1.0 / (1.0 - s0 * s0);
            let d2 = 2.0 * s0 / (1.0 - s0 * s0).powi(2);
            assert!(close(j.coeff(0, 1), d1, 1e-13));
            assert!(close(j.coeff(0, 2), d2, 1e-13));
        }
    }

    #[test]
    fn domain_errors_name_function() {
        let neg = Jet::constant(-1.0, 1.0, 0.0);
        match neg.sqrt() {
            Err(Error::DomainError { func, arg, .. }) => {
                assert_eq!(func, "sqrt");
                assert_eq!(arg, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Jet::constant(0.0, 1.0, 0.0).ln_abs().is_err());
        assert!(Jet::constant(1.0, 1.0, 0.0).arctanh_re().is_err());
        assert!(Jet::constant(-2.0, 1.0, 0.0).powf(0.5).is_err());
        assert!(Jet::constant(-2.0, 1.0, 0.0).powf(3.0).is_ok());
    }

    #[test]
    fn leibniz_mixed_coefficient() {
        let r = Jet::seed_r(1.3, 0.4);
        let s = Jet::seed_s(1.3, 0.4);
        let a = (r * s + s * s * s).exp();
        let b = (r * r + s).sqrt().unwrap();
        let p = a * b;
        let want = a.coeff(0, 0) * b.coeff(1, 1)
            + a.coeff(1, 0) * b.coeff(0, 1)
            + a.coeff(0, 1) * b.coeff(1, 0)
            + a.coeff(1, 1) * b.coeff(0, 0);
        assert!(close(p.coeff(1, 1), want, 1e-13));
    }

    #[test]
    fn exp_ln_round_trip() {
        let r = Jet::seed_r(1.1, -0.3);
        let s = Jet::seed_s(1.1, -0.3);
        let a = r * r + s * s * s + 0.5;
        let back = a.ln_abs().unwrap().exp();
        for i in 0..2 {
            for j in 0..6 {
                assert!((back.coeff(i, j) - a.coeff(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn powers_match_repeated_products() {
        let r = Jet::seed_r(1.2, 0.5);
        let s = Jet::seed_s(1.2, 0.5);
        let a = r + s * s;
        let p3 = a.powi(3).unwrap();
        let m3 = a * a * a;
        let pm2 = a.powi(-2).unwrap();
        let m2 = (a * a).recip().unwrap();
        let pf = a.powf(1.5).unwrap();
        let mf = a * a.sqrt().unwrap();
        for i in 0..2 {
            for j in 0..6 {
                assert!(close(p3.coeff(i, j), m3.coeff(i, j), 1e-13));
                assert!(close(pm2.coeff(i, j), m2.coeff(i, j), 1e-12));
                assert!(close(pf.coeff(i, j), mf.coeff(i, j), 1e-12));
            }
        }
    }

    #[test]
    fn derivative_shifts_mark_unknowns() {
        let s = Jet::seed_s(1.0, 0.2);
        let r = Jet::seed_r(1.0, 0.2);
        let f = (r * s).exp();
        let fs = f.d_s();
        assert!(fs.coeff(0, 5).is_nan());
        assert!(close(fs.coeff(0, 1), f.coeff(0, 2), 1e-14));
        assert!(close(fs.coeff(1, 2), f.coeff(1, 3), 1e-14));
        let fr = f.d_r();
        assert!(close(fr.coeff(0, 3), f.coeff(1, 3), 1e-14));
        assert!(fr.coeff(1, 0).is_nan());
        // unknowns stay confined to the coefficients they can influence
        let g = fs * f;
        assert!(g.coeff(0, 4).is_finite());
        assert!(g.coeff(0, 5).is_nan());
    }

    #[test]
    fn fd_polynomial_third_derivative() {
        let f = |_r: f64, s: f64| Ok(s * s * s);
        let d = fd_oracle(f, 1.0, 0.1, 0, 3).unwrap();
        assert!((d - 6.0).abs() < 1e-6);
    }

    #[test]
    fn fd_circle_second_derivative() {
        let f = |r: f64, s: f64| Ok((r * r - s * s).sqrt());
        let d = fd_oracle(f, 1.0, 0.0, 0, 2).unwrap();
        assert!((d + 1.0).abs() < 1e-6);
    }

    #[test]
    fn fd_rejects_boundary_stencils() {
        let f = |r: f64, s: f64| Ok((r * r - s * s).sqrt());
        assert!(matches!(
            fd_oracle(f, 1.0, 0.95, 0, 5),
            Err(Error::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn fd_matches_jets_on_a_composite() {
        let f = |r: f64, s: f64| Ok((r * s).exp() * (2.0 * r * r - s * s).sqrt());
        let (r0, s0) = (1.4, 0.3);
        let r = Jet::seed_r(r0, s0);
        let s = Jet::seed_s(r0, s0);
        let j = (r * s).exp() * (2.0 * (r * r) - s * s).sqrt().unwrap();
        for a in 0..2 {
            for b in 0..6 {
                let fd = fd_oracle(f, r0, s0, a, b).unwrap();
                let tol = if a + b <= 3 { 1e-7 } else { 1e-4 };
                assert!(
                    close(fd, j.coeff(a, b), tol),
                    "({a},{b}): fd {fd} jet {}",
                    j.coeff(a, b)
                );
            }
        }
    }
}
