use std::collections::BTreeMap;

use anyhow::Result;
use finsler_core::families::{compatibility_residuals, LandsbergFamily, SprayField, ZhouClass};
use finsler_core::geometry::spray_pq;
use finsler_core::phi_lang::{builtin, parse_expr, Anchor, MetricSource};
use finsler_core::{classify_metric, GridSpec, PhiSource, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::args::Example;
use crate::commands::{add_classification, grid_json};
use crate::report::{num, nums, obj, Check, Report};

/// Seed of the sample radii and points; fixed so that reports are reproducible.
const SAMPLE_SEED: u64 = 20_240_917;

/// Bound on the Landsberg residuals of the reconstructed examples.
pub const LANDSBERG_BOUND: f64 = 1e-7;
/// Agreement of family coefficients with their closed forms.
pub const COEFF_TOL: f64 = 1e-12;

pub fn reproduce(which: Example) -> Result<Report> {
    match which {
        Example::Example1 => landsberg_example(&EXAMPLE1),
        Example::Example2 => landsberg_example(&EXAMPLE2),
        Example::ZhouDiscrepancy => zhou_discrepancy(),
    }
}

/// Radii drawn uniformly from `[lo, hi)`.
pub fn sample_radii(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Points `(r, s)` with `r` in `[lo, hi)` and `|s| ≤ 0.9 r`.
pub fn sample_points(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED + 1);
    (0..n)
        .map(|_| {
            let r = rng.gen_range(lo..hi);
            (r, r * rng.gen_range(-0.9..0.9))
        })
        .collect()
}

struct LandsbergExample {
    name: &'static str,
    c1: &'static str,
    c3: &'static str,
    c: f64,
    /// Expected `c0` as a function of `r`.
    c0: fn(f64) -> f64,
    c2: f64,
    /// Expected `(φ_s/φ, φ_r/φ)` at `(1, 0)`, when checked.
    log_derivs: Option<(f64, f64)>,
    /// Expected `|P_ss|` at `(1, 0)`, when checked.
    p_ss: Option<f64>,
}

const EXAMPLE1: LandsbergExample = LandsbergExample {
    name: "example1",
    c1: "1/r^2",
    c3: "1/r^2",
    c: std::f64::consts::FRAC_1_SQRT_2 / 2.0,
    c0: |r| -3.0 / r.powi(4),
    c2: 0.5,
    log_derivs: None,
    p_ss: Some(0.5),
};

const EXAMPLE2: LandsbergExample = LandsbergExample {
    name: "example2",
    c1: "0",
    c3: "1/r^2",
    c: 0.5,
    c0: |r| -2.0 / r.powi(4),
    c2: 0.5,
    log_derivs: Some((-1.0, 0.0)),
    p_ss: None,
};

fn landsberg_example(ex: &LandsbergExample) -> Result<Report> {
    let grid = GridSpec::default();
    let interval = (grid.r_lo, grid.r_hi);
    let fam = LandsbergFamily::build(parse_expr(ex.c1)?, parse_expr(ex.c3)?, ex.c, interval)?;
    let metric = builtin(ex.name, &BTreeMap::new())?;
    let anchor = match &metric.source {
        MetricSource::LogDerivs(m) => m.anchor,
        MetricSource::Closed(_) => Anchor { r0: 1.0, phi0: 1.0 },
    };
    let mut report = Report::new(
        &format!("reproduce {}", ex.name),
        obj([
            ("c1", Value::String(ex.c1.into())),
            ("c3", Value::String(ex.c3.into())),
            ("c", num(ex.c)),
            ("interval", nums([interval.0, interval.1])),
            ("grid", grid_json(&grid)),
            ("anchor", obj([("r0", num(anchor.r0)), ("phi0", num(anchor.phi0))])),
            ("dim", Value::from(3)),
        ]),
    );

    let radii = sample_radii(10, interval.0, interval.1);
    let mut rows = Vec::new();
    let (mut e0, mut e2) = (0.0f64, 0.0f64);
    for &r in &radii {
        let k = fam.coefficients(r)?;
        e0 = e0.max((k.c0 - (ex.c0)(r)).abs());
        e2 = e2.max((k.c2 - ex.c2).abs());
        rows.push(obj([
            ("r", num(r)),
            ("c0", num(k.c0)),
            ("c0_expected", num((ex.c0)(r))),
            ("c2", num(k.c2)),
        ]));
    }
    report.result("coefficients", Value::Array(rows));
    report.checks.push(Check::below("c0_max_error", e0, COEFF_TOL));
    report.checks.push(Check::below("c2_max_error", e2, COEFF_TOL));

    // The metric is reconstructed from the example's own log-derivatives;
    // the family's log-derivatives must agree with them on the lattice.
    let src = PhiSource::from_builtin(&metric)?;
    let PhiSource::Reconstructed(m) = &src else {
        anyhow::bail!("{} is not given by log-derivatives", ex.name);
    };
    let mut agree = 0.0f64;
    for (r, s) in grid.points() {
        let (a, b) = m.field.log_derivs(r, s)?;
        let (fa, fb) = fam.logderiv_phi(r, s)?;
        agree = agree
            .max((a - fa).abs() / a.abs().max(1.0))
            .max((b - fb).abs() / b.abs().max(1.0));
    }
    report.maximum("family_log_derivs_mismatch", num(agree));
    report.checks.push(Check::below("family_log_derivs_mismatch", agree, 1e-10));

    let c = classify_metric(&src, 3, &grid, None)?;
    add_classification(&mut report, &c, false);
    let raw = c.extrema["landsberg_raw_0"].value.max(c.extrema["landsberg_raw_1"].value);
    report.checks.push(Check::below("landsberg_max", raw, LANDSBERG_BOUND));
    report.checks.push(Check::holds(
        "verdict_landsberg_nonberwald",
        c.verdict == Verdict::LandsbergNonberwald,
    ));
    report.checks.push(Check::holds("not_regular", !c.flags.regular));
    report.checks.push(Check::below(
        "margin2_max",
        c.extrema["margin2_max"].value,
        0.0,
    ));

    let shape = src.shape_jet(1.0, 0.0)?;
    let pq = spray_pq(&shape)?;
    report.result("berwald_witness_p_ss", num(pq.p_ss));
    report.result("family_p_ss", num(fam.spray(1.0, 0.0)?.p_ss));
    report.summary.push(format!("Landsberg residual max(|L1|, |L2|) = {raw:e}"));
    if let Some(want) = ex.p_ss {
        report.checks.push(Check::close("abs_p_ss_at_1_0", pq.p_ss.abs(), want, 1e-9));
    }
    let (a, b) = fam.logderiv_phi(1.0, 0.0)?;
    report.result("log_derivs_at_1_0", nums([a, b]));
    if let Some((wa, wb)) = ex.log_derivs {
        report.checks.push(Check::close("phis_over_phi_at_1_0", a, wa, 1e-12));
        report.checks.push(Check::close("phir_over_phi_at_1_0", b, wb, 1e-12));
    }
    Ok(report)
}

/// The closed-form spray of `zhou2d_r6`, written out independently of the
/// spray class.
fn r6_spray(r: f64, s: f64) -> (f64, f64) {
    let w = ((r - s) * (r + s)).sqrt();
    let (r2, r4) = (r * r, r.powi(4));
    let p = -s / r2 - w / r2;
    let q = 1.0 / r2 - s * s / (2.0 * r4) - s * w / r4;
    (p, q)
}

fn zhou_discrepancy() -> Result<Report> {
    let grid = GridSpec::default();
    let z = ZhouClass::new(-1.0, parse_expr("1/r^2")?, (grid.r_lo, grid.r_hi))?;
    let mut report = Report::new(
        "reproduce zhou-discrepancy",
        obj([
            ("c", num(z.c)),
            ("c0", Value::String("1/r^2".into())),
            ("grid", grid_json(&grid)),
        ]),
    );
    let none = BTreeMap::new();
    let r5 = PhiSource::from_builtin(&builtin("zhou2d_r5", &none)?)?;
    let r6 = PhiSource::from_builtin(&builtin("zhou2d_r6", &none)?)?;

    // C/φ for both metrics against the class spray; C2·r²/φ is 1 for the
    // first metric and 0 for the second.
    let mut m = [0.0f64; 5];
    let mut raw = [0.0f64; 2];
    for (r, s) in grid.points() {
        let pq = z.spray(r, s)?;
        let c5 = compatibility_residuals(&r5.shape_jet(r, s)?, &pq).normalized();
        let c6 = compatibility_residuals(&r6.shape_jet(r, s)?, &pq).normalized();
        let true5 = compatibility_residuals(&r5.phi_jet(r, s)?, &pq);
        let true6 = compatibility_residuals(&r6.phi_jet(r, s)?, &pq);
        let vals = [c5.0, c5.1 * r * r - 1.0, c6.0, c6.1, c5.1 * r * r];
        for (acc, v) in m.iter_mut().zip(vals) {
            *acc = acc.max(v.abs());
        }
        raw[0] = raw[0].max(true5.c1.abs()).max(true6.c1.abs());
        raw[1] = raw[1].max(true6.c2.abs());
    }
    report.maximum("r5_c1_over_phi", num(m[0]));
    report.maximum("r5_c2_r2_over_phi_minus_1", num(m[1]));
    report.maximum("r6_c1_over_phi", num(m[2]));
    report.maximum("r6_c2_over_phi", num(m[3]));
    report.maximum("c1_raw", num(raw[0]));
    report.maximum("r6_c2_raw", num(raw[1]));
    report.result("r5_c2_r2_over_phi_max", num(m[4]));
    report.checks.push(Check::below("r5_c1_over_phi", m[0], 1e-8));
    report.checks.push(Check::below("r5_c2_r2_over_phi_minus_1", m[1], 1e-8));
    report.checks.push(Check::below("r6_c1_over_phi", m[2], 1e-8));
    report.checks.push(Check::below("r6_c2_over_phi", m[3], 1e-8));

    let mut rows = Vec::new();
    let (mut dp, mut dq) = (0.0f64, 0.0f64);
    for (r, s) in sample_points(20, grid.r_lo, grid.r_hi) {
        let pq = spray_pq(&r6.shape_jet(r, s)?)?;
        let (p, q) = r6_spray(r, s);
        dp = dp.max((pq.p - p).abs());
        dq = dq.max((pq.q - q).abs());
        rows.push(obj([
            ("r", num(r)),
            ("s", num(s)),
            ("p", num(pq.p)),
            ("p_expected", num(p)),
            ("q", num(pq.q)),
            ("q_expected", num(q)),
        ]));
    }
    report.result("r6_spray_samples", Value::Array(rows));
    report.maximum("r6_spray_p_error", num(dp));
    report.maximum("r6_spray_q_error", num(dq));
    report.checks.push(Check::below("r6_spray_p_error", dp, 1e-9));
    report.checks.push(Check::below("r6_spray_q_error", dq, 1e-9));
    report.summary.push(format!(
        "1/r^5: C2 r^2/phi = 1 within {:e}; 1/r^6: C2/phi = {:e}",
        m[1], m[3]
    ));
    Ok(report)
}
