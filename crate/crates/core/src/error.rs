use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while evaluating metrics, sprays and curvatures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet division by a value of magnitude {value:e} (guard {guard:e})")]
    DivisionByZeroJet { value: f64, guard: f64 },

    #[error("{func} is not defined at argument {arg}{}", path_suffix(.path))]
    DomainError {
        func: &'static str,
        arg: f64,
        path: Option<String>,
    },

    #[error("finite-difference stencil around (r={r}, s={s}) leaves the region |s| < r")]
    StencilOutOfDomain { r: f64, s: f64 },

    #[error("parse error at byte {offset}: expected {}", .expected.join(" or "))]
    ParseError {
        offset: usize,
        expected: Vec<&'static str>,
    },

    #[error("invalid expression: {0}")]
    InvalidExpression(String),

    #[error("unknown builtin metric `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin `{builtin}` requires parameter `{param}`")]
    MissingParameter {
        builtin: &'static str,
        param: &'static str,
    },

    #[error("bad frame: {0}")]
    BadFrame(String),

    #[error("geodesic spray undefined: phi - s*phi_s + (r^2-s^2)*phi_ss = {denominator:e} at (r={r}, s={s})")]
    SprayUndefined { r: f64, s: f64, denominator: f64 },

    #[error("degenerate metric: {factor} vanishes ({value:e}) at (r={r}, s={s})")]
    DegenerateMetric {
        factor: &'static str,
        value: f64,
        r: f64,
        s: f64,
    },

    #[error("family constraint {which} violated at r={r}")]
    ConstraintViolated { which: &'static str, r: f64 },

    #[error("c2 is not real: (c1 r^2 + 1)(2 c3 r^2 - 1) = {product:e} < 0 at r={r}")]
    NonRealC2 { r: f64, product: f64 },

    #[error("denominator of {what} vanishes at (r={r}, s={s})")]
    DenominatorVanished { what: &'static str, r: f64, s: f64 },

    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    #[error("excluded parameter: {0}")]
    ExcludedParameter(String),

    #[error("trajectory left the domain at t={t}: {reason}")]
    DomainExit { t: f64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("at (r={r}, s={s}): {source}")]
    AtPoint {
        r: f64,
        s: f64,
        source: Box<Error>,
    },
}

fn path_suffix(path: &Option<String>) -> String {
    match path {
        Some(p) => format!(" (at {p})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(func: &'static str, arg: f64) -> Self {
        Error::DomainError {
            func,
            arg,
            path: None,
        }
    }

    /// Record the grid point at which an evaluation failed.
    pub fn at_point(self, r: f64, s: f64) -> Self {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                r,
                s,
                source: Box::new(e),
            },
        }
    }

    /// Attach an AST path to a domain error that does not carry one yet.
    pub(crate) fn at_path(self, path: impl FnOnce() -> String) -> Self {
        match self {
            Error::DomainError {
                func,
                arg,
                path: None,
            } => Error::DomainError {
                func,
                arg,
                path: Some(path()),
            },
            other => other,
        }
    }
}
