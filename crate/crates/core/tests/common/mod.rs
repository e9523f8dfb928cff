#![allow(dead_code)]

use finsler_core::phi_lang::{builtin, parse_expr, Expr};
use finsler_core::PhiSource;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn named(name: &str, params: &[(&str, &str)]) -> PhiSource {
    let p = params
        .iter()
        .map(|(k, v)| (k.to_string(), parse_expr(v).unwrap()))
        .collect();
    PhiSource::from_builtin(&builtin(name, &p).unwrap()).unwrap()
}

pub fn expr(text: &str) -> Expr {
    parse_expr(text).unwrap()
}

fn coef(rng: &mut ChaCha8Rng) -> String {
    format!("{:.3}", rng.gen_range(-1.0..1.0))
}

/// A random expression in `r` and `s` that is smooth and of moderate size on
/// `0.5 ≤ r ≤ 2`, `|s| < r`.
pub fn random_smooth(rng: &mut ChaCha8Rng, depth: usize) -> String {
    if depth == 0 {
        return match rng.gen_range(0..5) {
            0 => format!("({}*r + {}*s + {})", coef(rng), coef(rng), coef(rng)),
            1 => format!("({}*s^2)", coef(rng)),
            2 => "sqrt(r^2 - s^2)".to_string(),
            3 => format!("({}*r*s)", coef(rng)),
            _ => format!("({}/r)", coef(rng)),
        };
    }
    let a = random_smooth(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => format!("exp(0.3*{a})"),
        1 => format!("sqrt(2 + {a}^2)"),
        2 => format!("ln_abs(3 + {a}^2)"),
        3 => format!("arctanh_re(0.4*{a}/(1 + {a}^2))"),
        4 => format!("pow(1.5 + {a}^2, {})", coef(rng)),
        5 => format!("({a} * {})", random_smooth(rng, depth - 1)),
        6 => format!("({a} + {})", random_smooth(rng, depth - 1)),
        _ => format!("({a} / (2 + {}^2))", random_smooth(rng, depth - 1)),
    }
}

/// A point well inside the sector. Difference stencils for fifth and sixth
/// derivatives reach about `0.2` in `s`, so the point keeps twice that from
/// the singular lines `|s| = r`.
pub fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = rng.gen_range(0.8..1.8);
    (r, rng.gen_range(-0.5..0.5) * r)
}

/// A polynomial in `r` with small random coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, base: f64) -> String {
    format!(
        "{:.3} + {:.3}*r + {:.3}*r^2",
        base + rng.gen_range(-0.2..0.2),
        rng.gen_range(-0.2..0.2),
        rng.gen_range(-0.1..0.1)
    )
}
