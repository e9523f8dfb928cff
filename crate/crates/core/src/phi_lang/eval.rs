use super::ast::{BinOp, Expr, Func};
use crate::error::{Error, Result};
use crate::jets::{self, Jet};

/// Numbers an expression can be evaluated over.
trait Scalar: Copy {
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn div(self, o: Self) -> Result<Self>;
    fn sqrt(self) -> Result<Self>;
    fn exp(self) -> Self;
    fn ln_abs(self) -> Result<Self>;
    fn arctanh_re(self) -> Result<Self>;
    fn abs(self) -> Result<Self>;
    fn powf(self, p: f64) -> Result<Self>;
}

impl Scalar for Jet {
    fn lift(&self, c: f64) -> Self {
        Jet::lift(self, c)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn div(self, o: Self) -> Result<Self> {
        self.checked_div(&o)
    }
    fn sqrt(self) -> Result<Self> {
        Jet::sqrt(&self)
    }
    fn exp(self) -> Self {
        Jet::exp(&self)
    }
    fn ln_abs(self) -> Result<Self> {
        Jet::ln_abs(&self)
    }
    fn arctanh_re(self) -> Result<Self> {
        Jet::arctanh_re(&self)
    }
    fn abs(self) -> Result<Self> {
        Jet::abs(&self)
    }
    fn powf(self, p: f64) -> Result<Self> {
        Jet::powf(&self, p)
    }
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn div(self, o: Self) -> Result<Self> {
        if o == 0.0 {
            return Err(Error::domain("division", o));
        }
        Ok(self / o)
    }
    fn sqrt(self) -> Result<Self> {
        if !(self >= 0.0) {
            return Err(Error::domain("sqrt", self));
        }
        Ok(f64::sqrt(self))
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln_abs(self) -> Result<Self> {
        if self == 0.0 || !self.is_finite() {
            return Err(Error::domain("ln_abs", self));
        }
        Ok(self.abs().ln())
    }
    fn arctanh_re(self) -> Result<Self> {
        if self.abs() == 1.0 || !self.is_finite() {
            return Err(Error::domain("arctanh_re", self));
        }
        Ok(jets::arctanh_re(self))
    }
    fn abs(self) -> Result<Self> {
        Ok(f64::abs(self))
    }
    fn powf(self, p: f64) -> Result<Self> {
        if p == p.trunc() && p.abs() <= i32::MAX as f64 {
            if p < 0.0 && self == 0.0 {
                return Err(Error::domain("pow", self));
            }
            return Ok(self.powi(p as i32));
        }
        if !(self > 0.0) {
            return Err(Error::domain("pow", self));
        }
        Ok(f64::powf(self, p))
    }
}

/// Evaluate the full `(1,5)`-jet of `e` at `(r0, s0)`.
pub fn eval_jet(e: &Expr, r0: f64, s0: f64) -> Result<Jet> {
    let mut path = Vec::new();
    eval(e, Jet::seed_r(r0, s0), Jet::seed_s(r0, s0), &mut path)
}

/// Evaluate `e` at `(r, s)` in plain floating point.
pub fn eval_f64(e: &Expr, r: f64, s: f64) -> Result<f64> {
    let mut path = Vec::new();
    eval(e, r, s, &mut path)
}

fn eval<T: Scalar>(e: &Expr, r: T, s: T, path: &mut Vec<String>) -> Result<T> {
    let here = |path: &Vec<String>| {
        if path.is_empty() {
            "root".to_string()
        } else {
            path.join(" > ")
        }
    };
    let child = |label: String, sub: &Expr, path: &mut Vec<String>| {
        path.push(label);
        let v = eval(sub, r, s, path);
        path.pop();
        v
    };
    let out = match e {
        Expr::Num(v) => Ok(r.lift(*v)),
        Expr::R => Ok(r),
        Expr::S => Ok(s),
        Expr::Neg(a) => Ok(child("neg".into(), a, path)?.neg()),
        Expr::Bin(op, a, b) => {
            let sym = op.symbol();
            let lhs = child(format!("{sym}.lhs"), a, path)?;
            if *op == BinOp::Pow {
                power(lhs, b, || child(format!("{sym}.rhs"), b, path))
            } else {
                let rhs = child(format!("{sym}.rhs"), b, path)?;
                match op {
                    BinOp::Add => Ok(lhs.add(rhs)),
                    BinOp::Sub => Ok(lhs.sub(rhs)),
                    BinOp::Mul => Ok(lhs.mul(rhs)),
                    BinOp::Div => lhs.div(rhs).map_err(|err| match err {
                        Error::DivisionByZeroJet { value, .. } => Error::domain("division", value),
                        other => other,
                    }),
                    BinOp::Pow => unreachable!(),
                }
            }
        }
        Expr::Call(func, args) => {
            let name = func.name();
            let a = child(format!("{name}[0]"), &args[0], path)?;
            match func {
                Func::Sqrt => a.sqrt(),
                Func::Exp => Ok(a.exp()),
                Func::LnAbs => a.ln_abs(),
                Func::ArctanhRe => a.arctanh_re(),
                Func::Abs => a.abs(),
                Func::Pow => power(a, &args[1], || child(format!("{name}[1]"), &args[1], path)),
            }
        }
    };
    out.map_err(|err| err.at_path(|| here(path)))
}

/// `base ^ exponent`: constant exponents use a real power, others `exp(b ln a)`.
fn power<T: Scalar>(
    base: T,
    exponent: &Expr,
    eval_exponent: impl FnOnce() -> Result<T>,
) -> Result<T> {
    if exponent.is_constant() {
        let p = eval_f64(exponent, 0.0, 0.0)?;
        return base.powf(p);
    }
    let b = eval_exponent()?;
    if !(base.value() > 0.0) {
        return Err(Error::domain("pow", base.value()));
    }
    Ok(b.mul(base.ln_abs()?).exp())
}
