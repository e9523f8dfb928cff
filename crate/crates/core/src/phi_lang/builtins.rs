use std::collections::BTreeMap;

use super::ast::{BinOp, Expr, Func};
use super::parse_expr;
use crate::error::{Error, Result};

/// Normalisation of a metric known only through its log-derivatives: `φ(r0, 0) = phi0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub r0: f64,
    pub phi0: f64,
}

/// A metric given by the pair `(φ_s/φ, φ_r/φ)` together with an anchor value.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivMetric {
    pub phis_over_phi: Expr,
    pub phir_over_phi: Expr,
    /// Common denominator of the pair; its zeros in `s` are simple poles.
    pub pole_denominator: Option<Expr>,
    pub anchor: Anchor,
    /// Closed form of `φ`, kept as a cross-check only.
    pub closed_form: Option<Expr>,
}

/// How a metric function `φ(r, s)` is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    Closed(Expr),
    LogDerivs(LogDerivMetric),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinMetric {
    pub name: String,
    pub source: MetricSource,
    pub description: &'static str,
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "euclidean",
    "riemann_quadratic",
    "example1",
    "example2",
    "zhou2d_r5",
    "zhou2d_r6",
];

const W: &str = "sqrt((r - s)*(r + s))";

fn expand(template: &str) -> Expr {
    parse_expr(&template.replace('W', W)).expect("builtin expression parses")
}

/// Look up a registered metric. `params` supplies coefficient expressions in `r`
/// for parametrised entries (`riemann_quadratic` takes `f1` and `f2`).
pub fn builtin(name: &str, params: &BTreeMap<String, Expr>) -> Result<BuiltinMetric> {
    let allowed: &[&'static str] = match name {
        "riemann_quadratic" => &["f1", "f2"],
        n if BUILTIN_NAMES.contains(&n) => &[],
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    };
    if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidInput(format!(
            "builtin `{name}` does not take parameter `{extra}`"
        )));
    }
    for (k, v) in params {
        if v.uses_s() {
            return Err(Error::InvalidExpression(format!(
                "parameter `{k}` must depend on r only"
            )));
        }
    }
    let metric = match name {
        "euclidean" => BuiltinMetric {
            name: name.into(),
            source: MetricSource::Closed(Expr::Num(1.0)),
            description: "Euclidean metric, phi = 1",
        },
        "riemann_quadratic" => {
            let get = |p: &'static str| {
                params.get(p).cloned().ok_or(Error::MissingParameter {
                    builtin: "riemann_quadratic",
                    param: p,
                })
            };
            let f1 = get("f1")?;
            let f2 = get("f2")?;
            let s2 = Expr::Bin(BinOp::Pow, Box::new(Expr::S), Box::new(Expr::Num(2.0)));
            let inner = Expr::Bin(
                BinOp::Add,
                Box::new(f1),
                Box::new(Expr::Bin(BinOp::Mul, Box::new(f2), Box::new(s2))),
            );
            BuiltinMetric {
                name: name.into(),
                source: MetricSource::Closed(Expr::Call(Func::Sqrt, vec![inner])),
                description: "Riemannian metric, phi = sqrt(f1(r) + f2(r) s^2)",
            }
        }
        "example1" => BuiltinMetric {
            name: name.into(),
            source: MetricSource::LogDerivs(LogDerivMetric {
                phis_over_phi: expand("(3*s + W)/(-r^2 + 3*s^2 + s*W)"),
                phir_over_phi: expand("-r/(-r^2 + 3*s^2 + s*W)"),
                pole_denominator: Some(expand("-r^2 + 3*s^2 + s*W")),
                anchor: Anchor { r0: 1.0, phi0: 1.0 },
                closed_form: Some(expand(
                    "pow(abs(5*s^2 - r^2), 1/3) * pow(abs(2*s^2 - r^2), 1/6) * exp(\
                     arctanh_re(sqrt(5)/10*(sqrt(5)*s + 5*r)/W)/3 \
                     - arctanh_re(sqrt(2)/2*(sqrt(2)*s + 2*r)/W)/6 \
                     + arctanh_re(sqrt(5)/10*(sqrt(5)*s - 5*r)/W)/3 \
                     - arctanh_re(sqrt(2)/2*(sqrt(2)*s - 2*r)/W)/6)",
                )),
            }),
            description: "non-Berwald Landsberg metric with c1 = c3 = 1/r^2, c2 = 1/2",
        },
        "example2" => BuiltinMetric {
            name: name.into(),
            source: MetricSource::LogDerivs(LogDerivMetric {
                phis_over_phi: expand("(2*s + W)/(-r^2 + 2*s^2 + s*W)"),
                phir_over_phi: expand("(-2*s^2 - s*W)/(r*(-r^2 + 2*s^2 + s*W))"),
                pole_denominator: Some(expand("-r^2 + 2*s^2 + s*W")),
                anchor: Anchor {
                    r0: 1.0,
                    phi0: 0.897_984_712_074_300_4,
                },
                closed_form: Some(example2_closed_form()),
            }),
            description: "non-Berwald Landsberg metric with c1 = 0, c3 = 1/r^2, c2 = 1/2",
        },
        "zhou2d_r5" => BuiltinMetric {
            name: name.into(),
            source: MetricSource::Closed(expand("W*exp(2*s/W)/r^5")),
            description: "surface metric with a(r) = 1/r^5, incompatible with its intended spray",
        },
        "zhou2d_r6" => BuiltinMetric {
            name: name.into(),
            source: MetricSource::Closed(expand("W*exp(2*s/W)/r^6")),
            description: "surface metric with a(r) = 1/r^6, compatible with its intended spray",
        },
        _ => unreachable!(),
    };
    Ok(metric)
}

fn example2_closed_form() -> Expr {
    let a = "((2*W - 2*r + (sqrt(5) - 1)*s)*W - (sqrt(5) - 1)*r*s)";
    let b = "((2*W - 2*r - (sqrt(5) - 1)*s)*W + (sqrt(5) - 1)*r*s)";
    let c = "((2*W - 2*r - (sqrt(5) + 1)*s)*W + (sqrt(5) + 1)*r*s)";
    let d = "((2*W - 2*r + (sqrt(5) + 1)*s)*W - (sqrt(5) + 1)*r*s)";
    expand(&format!(
        "pow(abs(r^4 - 5*r^2*s^2 + 5*s^4), 1/4) * pow(abs({a}/{b}), (5 - sqrt(5))/20) \
         * pow(abs({c}/{d}), (5 + sqrt(5))/20) \
         * exp(-sqrt(5)/10*arctanh_re(sqrt(5)*(r^2 - 2*s^2)/r^2)) / r"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_lang::{eval_f64, eval_jet};

    fn none() -> BTreeMap<String, Expr> {
        BTreeMap::new()
    }

    #[test]
    fn registry_is_exact() {
        for n in BUILTIN_NAMES {
            if n == "riemann_quadratic" {
                continue;
            }
            assert_eq!(builtin(n, &none()).unwrap().name, n);
        }
        assert!(matches!(
            builtin("nope", &none()),
            Err(Error::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn euclidean_is_one() {
        let m = builtin("euclidean", &none()).unwrap();
        assert_eq!(m.source, MetricSource::Closed(Expr::Num(1.0)));
    }

    #[test]
    fn riemann_quadratic_needs_parameters() {
        let mut p = none();
        p.insert("f1".into(), Expr::Num(1.0));
        assert!(matches!(
            builtin("riemann_quadratic", &p),
            Err(Error::MissingParameter { param: "f2", .. })
        ));
        p.insert("f2".into(), Expr::Num(1.0));
        let m = builtin("riemann_quadratic", &p).unwrap();
        let MetricSource::Closed(e) = m.source else {
            panic!()
        };
        assert_eq!(e, parse_expr("sqrt(1 + 1*s^2)").unwrap());
        p.insert("f3".into(), Expr::Num(1.0));
        assert!(builtin("riemann_quadratic", &p).is_err());
    }

    #[test]
    fn zhou_r5_closed_form() {
        let m = builtin("zhou2d_r5", &none()).unwrap();
        let MetricSource::Closed(e) = m.source else {
            panic!()
        };
        let (r, s) = (1.3f64, 0.4f64);
        let w = ((r - s) * (r + s)).sqrt();
        let want = w * (2.0 * s / w).exp() / r.powi(5);
        assert!((eval_f64(&e, r, s).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn example1_log_derivatives_at_origin_of_s() {
        let m = builtin("example1", &none()).unwrap();
        let MetricSource::LogDerivs(ld) = m.source else {
            panic!()
        };
        assert_eq!(eval_f64(&ld.phis_over_phi, 1.0, 0.0).unwrap(), -1.0);
        assert_eq!(eval_f64(&ld.phir_over_phi, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn closed_forms_match_their_log_derivatives() {
        for name in ["example1", "example2"] {
            let MetricSource::LogDerivs(ld) = builtin(name, &none()).unwrap().source else {
                panic!()
            };
            let cf = ld.closed_form.unwrap();
            for &(r, s) in &[(1.0, 0.2), (1.5, -0.3), (0.7, 0.6), (1.8, -1.5)] {
                let j = eval_jet(&cf, r, s).unwrap();
                let a = eval_f64(&ld.phis_over_phi, r, s).unwrap();
                let b = eval_f64(&ld.phir_over_phi, r, s).unwrap();
                assert!((j.coeff(0, 1) / j.value() - a).abs() < 1e-10 * (1.0 + a.abs()));
                assert!((j.coeff(1, 0) / j.value() - b).abs() < 1e-10 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn anchors_agree_with_closed_forms() {
        let MetricSource::LogDerivs(ld) = builtin("example1", &none()).unwrap().source else {
            panic!()
        };
        let v = eval_f64(ld.closed_form.as_ref().unwrap(), 1.0, 0.0).unwrap();
        assert!((v - ld.anchor.phi0).abs() < 1e-14);
        // the second closed form is 0/0 on s = 0; approach it from both sides
        let MetricSource::LogDerivs(ld) = builtin("example2", &none()).unwrap().source else {
            panic!()
        };
        let cf = ld.closed_form.unwrap();
        let v = 0.5 * (eval_f64(&cf, 1.0, 1e-6).unwrap() + eval_f64(&cf, 1.0, -1e-6).unwrap());
        assert!((v - ld.anchor.phi0).abs() < 1e-9);
    }
}
