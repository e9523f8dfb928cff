//! Grid classification of a metric: Riemannian, Berwald, Landsberg, weakly
//! Berwald, regular and spray-defined, with per-point residuals.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::reconstruct_phi;
use crate::geometry::{
    embed_point, h_scalar, landsberg_scalars, m_scalar, mean_berwald, scalar_trace_e, spray_denominator,
    spray_pq, surface_scalars, SprayData, SPRAY_TOL,
};
use crate::grid::GridSpec;
use crate::jets::Jet;
use crate::source::PhiSource;

/// `sφ_s² + sφφ_ss − φφ_s`, which vanishes identically exactly when
/// `φ = √(f1(r) + f2(r)s²)`.
pub fn riemannian_residual(phi: &Jet) -> f64 {
    let (r, s) = phi.base();
    let _ = r;
    let (f, fs, fss) = (phi.coeff(0, 0), phi.coeff(0, 1), phi.coeff(0, 2));
    s * fs * fs + s * f * fss - f * fs
}

/// Berwald residuals. For `n ≥ 3` these are `|P − sP_s|` and `|Q_s − sQ_ss|`;
/// for surfaces they are `|sH − (r²−s²)H_s|` and `|(r²−s²)L1 + 3L2|`.
pub fn berwald_residuals(pq: &SprayData, phi: &Jet, n: usize) -> [f64; 2] {
    if n >= 3 {
        [
            (pq.p - pq.s * pq.p_s).abs(),
            (pq.q_s - pq.s * pq.q_ss).abs(),
        ]
    } else {
        [weak_berwald_surface(pq).abs(), surface_scalars(phi, pq).combo.abs()]
    }
}

/// `sH − (r²−s²)H_s` with `H` at `n = 2`.
fn weak_berwald_surface(pq: &SprayData) -> f64 {
    let s = pq.s;
    s * (h_scalar(pq, 2) + pq.w2() * m_scalar(pq, 2))
}

/// Landsberg residuals: `(|L1|, |L2|)` for `n ≥ 3`, `|(r²−s²)L1 + 3L2|` for surfaces.
pub fn landsberg_residuals(phi: &Jet, pq: &SprayData, n: usize) -> Vec<f64> {
    if n >= 3 {
        let (l1, l2) = landsberg_scalars(phi, pq);
        vec![l1.abs(), l2.abs()]
    } else {
        vec![surface_scalars(phi, pq).combo.abs()]
    }
}

/// Sums of the absolute values of the terms that cancel in the Landsberg
/// residuals, in the same layout as [`landsberg_residuals`].
pub fn landsberg_term_scales(phi: &Jet, pq: &SprayData, n: usize) -> Vec<f64> {
    let (f, fs) = (phi.coeff(0, 0), phi.coeff(0, 1));
    let s = pq.s;
    let t = s * f + pq.w2() * fs;
    let l1 = (3.0 * fs * pq.p_ss).abs() + (f * pq.p_sss).abs() + (t * pq.q_sss).abs();
    let l2 = (s * f * pq.p_ss).abs()
        + (fs * pq.p).abs()
        + (fs * s * pq.p_s).abs()
        + (t * pq.q_s).abs()
        + (t * s * pq.q_ss).abs();
    if n >= 3 {
        vec![l1, l2]
    } else {
        vec![pq.w2() * l1 + 3.0 * l2]
    }
}

/// Regularity margins of `φ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity {
    pub phi: f64,
    /// `φ − sφ_s`
    pub margin1: f64,
    /// `φ − sφ_s + (r²−s²)φ_ss`
    pub margin2: f64,
    /// `margin2` relative to the size of its terms.
    pub spray_denominator: f64,
    pub regular: bool,
    pub spray_defined: bool,
}

/// Margins and flags. A point is regular when `φ > 0` and, for `n ≥ 3`, both
/// margins are positive; for surfaces only the second margin is required.
pub fn regularity_check(phi: &Jet, n: usize) -> Regularity {
    let (_, s) = phi.base();
    let f = phi.value();
    let margin1 = f - s * phi.coeff(0, 1);
    let (margin2, scale) = spray_denominator(phi);
    let rel = if scale > 0.0 { margin2 / scale } else { 0.0 };
    let regular = f > 0.0 && margin2 > 0.0 && (n == 2 || margin1 > 0.0);
    Regularity {
        phi: f,
        margin1,
        margin2,
        spray_denominator: rel,
        regular,
        spray_defined: rel.abs() > SPRAY_TOL,
    }
}

/// Residuals at one lattice point, computed from `φ` rescaled to `1` at the
/// point so that none of them depends on the scale of `φ`. Landsberg
/// residuals are further divided by the size of the terms that cancel in
/// them when that exceeds `1`, which keeps rounding noise near poles and near
/// `|s| = r` from masquerading as curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub r: f64,
    pub s: f64,
    pub phi: f64,
    /// `(sφ_s² + sφφ_ss − φφ_s)/φ²`
    pub riemann_residual: f64,
    pub berwald_residuals: [f64; 2],
    pub landsberg_residuals: Vec<f64>,
    /// `|L1|, |L2|` (or the surface combination) for `φ` at its true scale.
    pub landsberg_raw: Vec<f64>,
    pub margin1: f64,
    pub margin2: f64,
    pub spray_denominator: f64,
    /// `max |E_ij|` in the frame with `|y| = 1`.
    pub e_tensor: f64,
    /// `|g^ij E_ij|` with `|y| = 1`.
    pub e_scalar: f64,
    pub regular: bool,
    pub spray_defined: bool,
}

/// Largest absolute value of a residual and where it occurs. A NaN anywhere
/// makes the extremum NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub r: f64,
    pub s: f64,
}

impl Extremum {
    fn max_abs<'a>(points: impl Iterator<Item = (&'a PointRecord, f64)>) -> Extremum {
        let mut best = Extremum {
            value: 0.0,
            r: f64::NAN,
            s: f64::NAN,
        };
        for (p, v) in points {
            let v = v.abs();
            if best.value.is_nan() {
                break;
            }
            if v.is_nan() || v > best.value || best.r.is_nan() {
                best = Extremum {
                    value: v,
                    r: p.r,
                    s: p.s,
                };
            }
        }
        best
    }

    fn min<'a>(points: impl Iterator<Item = (&'a PointRecord, f64)>) -> Extremum {
        let mut best = Extremum {
            value: f64::INFINITY,
            r: f64::NAN,
            s: f64::NAN,
        };
        for (p, v) in points {
            if best.value.is_nan() {
                break;
            }
            if v.is_nan() || v < best.value {
                best = Extremum {
                    value: v,
                    r: p.r,
                    s: p.s,
                };
            }
        }
        best
    }

    /// True when the value is finite and at most `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.value <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    NoneOfThese,
    LandsbergNonberwald,
    BerwaldNonriemannian,
    Riemannian,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Riemannian => "riemannian",
            Verdict::BerwaldNonriemannian => "berwald_nonriemannian",
            Verdict::LandsbergNonberwald => "landsberg_nonberwald",
            Verdict::NoneOfThese => "none_of_these",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Aggregate flags, each a statement about the lattice only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub landsberg: bool,
    pub berwald: bool,
    pub riemannian: bool,
    pub weakly_berwald: bool,
    pub regular: bool,
    pub spray_defined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionSummary {
    pub mixed_partial_residual: f64,
    pub method: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub n: usize,
    pub grid: GridSpec,
    pub tolerance: f64,
    pub source_kind: &'static str,
    pub points: Vec<PointRecord>,
    /// Residual maxima (and margin minima) keyed by name.
    pub extrema: BTreeMap<&'static str, Extremum>,
    pub flags: Flags,
    /// Cross-checks that must hold for a consistent report.
    pub consistency: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
    pub reconstruction: Option<ReconstructionSummary>,
}

/// Residuals at one point from a jet proportional to `φ` with a positive
/// factor, and the true value of `φ` there.
fn point_record(jet: &Jet, phi_true: f64, n: usize) -> Result<PointRecord> {
    let (r, s) = jet.base();
    let f = jet.value();
    let reg = regularity_check(jet, n);
    let scale = if f != 0.0 { phi_true / f } else { f64::NAN };
    let unit = if f != 0.0 { *jet * (1.0 / f.abs()) } else { *jet };
    let riemann_residual = riemannian_residual(&unit);
    let (berwald_residuals, landsberg_residuals, landsberg_raw, e_tensor, e_scalar) =
        match spray_pq(&unit) {
            Ok(pq) => {
                let mut b = berwald_residuals(&pq, &unit, n);
                let raw = landsberg_residuals(&unit, &pq, n);
                let l: Vec<f64> = raw
                    .iter()
                    .zip(landsberg_term_scales(&unit, &pq, n))
                    .map(|(v, t)| v / t.max(1.0))
                    .collect();
                if n == 2 {
                    b[1] = l[0];
                }
                let raw = raw.iter().map(|v| v * phi_true.abs()).collect();
                let frame = embed_point(r, s, 1.0, n)?;
                let mb = mean_berwald(&pq, &frame);
                let e_tensor = mb.e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let e_scalar = scalar_trace_e(&unit, &pq, n, 1.0)
                    .map(f64::abs)
                    .unwrap_or(f64::NAN);
                (b, l, raw, e_tensor, e_scalar)
            }
            Err(Error::SprayUndefined { .. }) => {
                let k = if n >= 3 { 2 } else { 1 };
                ([f64::NAN; 2], vec![f64::NAN; k], vec![f64::NAN; k], f64::NAN, f64::NAN)
            }
            Err(e) => return Err(e),
        };
    Ok(PointRecord {
        r,
        s,
        phi: phi_true,
        riemann_residual,
        berwald_residuals,
        landsberg_residuals,
        landsberg_raw,
        margin1: reg.margin1 * scale,
        margin2: reg.margin2 * scale,
        spray_denominator: reg.spray_denominator,
        e_tensor,
        e_scalar,
        regular: reg.regular && phi_true > 0.0,
        spray_defined: reg.spray_defined,
    })
}

/// Sweep the lattice and classify.
pub fn classify_metric(
    source: &PhiSource,
    n: usize,
    grid: &GridSpec,
    tolerance: Option<f64>,
) -> Result<ClassificationReport> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
    }
    grid.validate()?;
    let tol = tolerance.unwrap_or_else(|| source.default_tolerance());
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let pts = grid.points();

    let (true_phi, reconstruction): (Option<Vec<f64>>, _) = match source {
        PhiSource::Reconstructed(m)
            if m.anchor.r0 >= grid.r_lo && m.anchor.r0 <= grid.r_hi =>
        {
            let rec = reconstruct_phi(&*m.field, grid, m.anchor)?;
            let vals = rec.values.iter().copied().collect();
            (
                Some(vals),
                Some(ReconstructionSummary {
                    mixed_partial_residual: rec.mixed_partial_residual,
                    method: rec.mixed_partial_method,
                }),
            )
        }
        _ => (None, None),
    };

    let points: Vec<PointRecord> = pts
        .par_iter()
        .enumerate()
        .map(|(i, &(r, s))| {
            let run = || -> Result<PointRecord> {
                let jet = source.shape_jet(r, s)?;
                let phi_true = match (&true_phi, source) {
                    (Some(v), _) => v[i],
                    (None, PhiSource::Closed(_)) => jet.value(),
                    (None, _) => source.phi(r, s)?,
                };
                point_record(&jet, phi_true, n)
            };
            run().map_err(|e| e.at_point(r, s))
        })
        .collect::<Result<_>>()?;

    let mut extrema = BTreeMap::new();
    extrema.insert(
        "riemann",
        Extremum::max_abs(points.iter().map(|p| (p, p.riemann_residual))),
    );
    extrema.insert(
        "berwald_0",
        Extremum::max_abs(points.iter().map(|p| (p, p.berwald_residuals[0]))),
    );
    extrema.insert(
        "berwald_1",
        Extremum::max_abs(points.iter().map(|p| (p, p.berwald_residuals[1]))),
    );
    let lk = if n >= 3 { 2 } else { 1 };
    for k in 0..lk {
        let name = ["landsberg_0", "landsberg_1"][k];
        extrema.insert(
            name,
            Extremum::max_abs(points.iter().map(|p| (p, p.landsberg_residuals[k]))),
        );
        let name = ["landsberg_raw_0", "landsberg_raw_1"][k];
        extrema.insert(
            name,
            Extremum::max_abs(points.iter().map(|p| (p, p.landsberg_raw[k]))),
        );
    }
    extrema.insert(
        "e_tensor",
        Extremum::max_abs(points.iter().map(|p| (p, p.e_tensor))),
    );
    extrema.insert(
        "e_scalar",
        Extremum::max_abs(points.iter().map(|p| (p, p.e_scalar))),
    );
    extrema.insert("margin1_min", Extremum::min(points.iter().map(|p| (p, p.margin1))));
    extrema.insert("margin2_min", Extremum::min(points.iter().map(|p| (p, p.margin2))));
    extrema.insert("margin2_max", {
        let mut e = Extremum::min(points.iter().map(|p| (p, -p.margin2)));
        e.value = -e.value;
        e
    });

    let ok = |k: &str| extrema[k].within(tol);
    let landsberg = (0..lk).all(|k| ok(["landsberg_0", "landsberg_1"][k]));
    let berwald_residuals_vanish = ok("berwald_0") && ok("berwald_1");
    let berwald = landsberg && berwald_residuals_vanish;
    let riemann_vanishes = ok("riemann");
    let riemannian = berwald && riemann_vanishes;
    let weak_surface = if n == 2 { ok("berwald_0") } else { false };
    let weakly_berwald = ok("e_tensor");
    let regular = points.iter().all(|p| p.regular);
    let spray_defined = points.iter().all(|p| p.spray_defined);

    let verdict = if riemannian {
        Verdict::Riemannian
    } else if berwald {
        Verdict::BerwaldNonriemannian
    } else if landsberg {
        Verdict::LandsbergNonberwald
    } else {
        Verdict::NoneOfThese
    };

    let mut consistency = BTreeMap::new();
    if n >= 3 {
        consistency.insert(
            "berwald_implies_riemannian",
            !berwald_residuals_vanish || riemann_vanishes,
        );
        consistency.insert(
            "regular_landsberg_implies_riemannian",
            !(regular && landsberg) || riemann_vanishes,
        );
    } else {
        let band = |e: &Extremum| {
            if e.value <= tol / 10.0 {
                Some(true)
            } else if e.value > 10.0 * tol {
                Some(false)
            } else {
                None
            }
        };
        let calls = [
            band(&extrema["berwald_0"]),
            band(&extrema["e_tensor"]),
            band(&extrema["e_scalar"]),
        ];
        let decided: Vec<bool> = calls.iter().flatten().copied().collect();
        let agree = decided.windows(2).all(|w| w[0] == w[1]);
        let _ = weak_surface;
        consistency.insert("weakly_berwald_criteria_agree", agree);
    }

    Ok(ClassificationReport {
        n,
        grid: *grid,
        tolerance: tol,
        source_kind: source.kind(),
        points,
        extrema,
        flags: Flags {
            landsberg,
            berwald,
            riemannian,
            weakly_berwald,
            regular,
            spray_defined,
        },
        consistency,
        verdict,
        reconstruction,
    })
}
