//! Expression language for `φ(r, s)` and for coefficient functions of `r`.

mod ast;
mod builtins;
mod eval;
mod parser;

pub use ast::{BinOp, Expr, Func};
pub use builtins::{builtin, Anchor, BuiltinMetric, LogDerivMetric, MetricSource, BUILTIN_NAMES};
pub use eval::{eval_f64, eval_jet};
pub use parser::parse_expr;

use crate::error::{Error, Result};

/// Parse a coefficient function, which may depend on `r` but not on `s`.
pub fn parse_coeff(text: &str) -> Result<Expr> {
    let e = parse_expr(text)?;
    if e.uses_s() {
        return Err(Error::InvalidExpression(format!(
            "coefficient `{text}` must depend on r only"
        )));
    }
    Ok(e)
}
