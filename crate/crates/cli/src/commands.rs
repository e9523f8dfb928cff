use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use finsler_core::classify::{ClassificationReport, PointRecord};
use finsler_core::families::{
    compatibility_residuals, shape_jet, LandsbergFamily, SprayField, SprayLogDerivs,
    SurfaceBerwaldFamily, ZhouClass,
};
use finsler_core::geometry::{berwald_curvature, curvature_packet, embed_point, mean_berwald, spray_pq, SprayData};
use finsler_core::phi_lang::{builtin, parse_coeff, parse_expr, Anchor, Expr};
use finsler_core::{classify_metric, integrate, GeodesicSource, GridSpec, PhiSource};
use ndarray::ArrayViewD;
use serde_json::{Map, Value};

use crate::args::{
    ClassifyArgs, CurvatureArgs, GeodesicArgs, LandsbergArgs, SourceArgs, SurfaceArgs, ZhouArgs,
};
use crate::report::{extremum, num, nums, obj, Report};

/// Lattice used for the spray families: the default radii with the s-range
/// kept 1% away from `|s| = r`, where the sprays lose several digits.
pub fn family_grid() -> GridSpec {
    GridSpec {
        eps: 1e-2,
        ..GridSpec::default()
    }
}

/// Threshold for curvature of the spray families.
pub const FAMILY_TOL: f64 = 1e-7;

/// Parse exactly `n` comma-separated numbers.
pub fn parse_numbers(text: &str, n: Option<usize>, what: &str) -> Result<Vec<f64>> {
    let vals = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{what}: `{t}` is not a finite number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if let Some(n) = n {
        if vals.len() != n {
            bail!("{what}: expected {n} comma-separated values, got {}", vals.len());
        }
    }
    Ok(vals)
}

pub fn parse_grid(text: Option<&str>) -> Result<GridSpec> {
    let Some(text) = text else {
        return Ok(GridSpec::default());
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("--grid: expected r0,r1,nr,ns, got `{text}`");
    }
    let bound = |t: &str| -> Result<f64> {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .with_context(|| format!("--grid: `{t}` is not a finite number"))
    };
    let count = |t: &str| -> Result<usize> {
        t.parse::<usize>()
            .with_context(|| format!("--grid: `{t}` is not a point count"))
    };
    Ok(GridSpec::new(bound(parts[0])?, bound(parts[1])?, count(parts[2])?, count(parts[3])?)?)
}

pub fn grid_json(g: &GridSpec) -> Value {
    obj([
        ("r_lo", num(g.r_lo)),
        ("r_hi", num(g.r_hi)),
        ("nr", Value::from(g.nr)),
        ("ns", Value::from(g.ns)),
        ("eps", num(g.eps)),
    ])
}

fn expr_arg(text: &str, what: &str) -> Result<Expr> {
    parse_expr(text).with_context(|| format!("{what}: cannot parse `{text}`"))
}

fn coeff_arg(text: &str, what: &str) -> Result<Expr> {
    parse_coeff(text).with_context(|| format!("{what}: cannot parse `{text}`"))
}

/// Resolve the metric source flags.
pub fn resolve_source(args: &SourceArgs) -> Result<(PhiSource, Value)> {
    match (&args.phi, &args.builtin) {
        (Some(text), None) => {
            let e = expr_arg(text, "--phi")?;
            Ok((PhiSource::Closed(e), obj([("phi", Value::String(text.clone()))])))
        }
        (None, Some(name)) => {
            let mut params = BTreeMap::new();
            let mut shown = Map::new();
            for p in &args.params {
                let (k, v) = p
                    .split_once('=')
                    .with_context(|| format!("--param: expected name=expr, got `{p}`"))?;
                let k = k.trim();
                if params.contains_key(k) {
                    bail!("--param: `{k}` given twice");
                }
                params.insert(k.to_string(), coeff_arg(v, &format!("--param {k}"))?);
                shown.insert(k.to_string(), Value::String(v.trim().to_string()));
            }
            let b = builtin(name, &params)?;
            let src = PhiSource::from_builtin(&b)?;
            let cfg = obj([
                ("builtin", Value::String(name.clone())),
                ("params", Value::Object(shown)),
                ("description", Value::String(b.description.to_string())),
            ]);
            Ok((src, cfg))
        }
        _ => bail!("exactly one of --phi and --builtin is required"),
    }
}

fn point_json(p: &PointRecord) -> Value {
    obj([
        ("r", num(p.r)),
        ("s", num(p.s)),
        ("phi", num(p.phi)),
        ("riemann_residual", num(p.riemann_residual)),
        ("berwald_residuals", nums(p.berwald_residuals)),
        ("landsberg_residuals", nums(p.landsberg_residuals.iter().copied())),
        ("landsberg_raw", nums(p.landsberg_raw.iter().copied())),
        ("margin1", num(p.margin1)),
        ("margin2", num(p.margin2)),
        ("spray_denominator", num(p.spray_denominator)),
        ("e_tensor", num(p.e_tensor)),
        ("e_scalar", num(p.e_scalar)),
        ("regular", Value::Bool(p.regular)),
        ("spray_defined", Value::Bool(p.spray_defined)),
    ])
}

/// Fill a report from a classification: flags, maxima, verdict and points.
pub fn add_classification(report: &mut Report, c: &ClassificationReport, with_points: bool) {
    let f = &c.flags;
    report.result(
        "classification",
        obj([
            ("n", Value::from(c.n)),
            ("grid", grid_json(&c.grid)),
            ("tolerance", num(c.tolerance)),
            ("source_kind", Value::String(c.source_kind.into())),
            ("verdict_scope", Value::String("lattice".into())),
            (
                "flags",
                obj([
                    ("landsberg", Value::Bool(f.landsberg)),
                    ("berwald", Value::Bool(f.berwald)),
                    ("riemannian", Value::Bool(f.riemannian)),
                    ("weakly_berwald", Value::Bool(f.weakly_berwald)),
                    ("regular", Value::Bool(f.regular)),
                    ("spray_defined", Value::Bool(f.spray_defined)),
                ]),
            ),
            (
                "consistency",
                Value::Object(
                    c.consistency
                        .iter()
                        .map(|(k, v)| (k.to_string(), Value::Bool(*v)))
                        .collect(),
                ),
            ),
            (
                "reconstruction",
                c.reconstruction
                    .as_ref()
                    .map(|r| {
                        obj([
                            ("mixed_partial_residual", num(r.mixed_partial_residual)),
                            ("method", Value::String(r.method.into())),
                        ])
                    })
                    .unwrap_or(Value::Null),
            ),
        ]),
    );
    if with_points {
        report.result("points", Value::Array(c.points.iter().map(point_json).collect()));
    }
    for (k, e) in &c.extrema {
        report.maximum(k, extremum(e));
    }
    report.verdict = Some(c.verdict.as_str().into());
    report.summary.push(format!(
        "lattice {} points, n = {}, tolerance {:e}, regular = {}",
        c.points.len(),
        c.n,
        c.tolerance,
        f.regular
    ));
    for k in ["riemann", "berwald_0", "berwald_1", "landsberg_0", "landsberg_1"] {
        if let Some(e) = c.extrema.get(k) {
            report.summary.push(format!("max {k} = {:e}", e.value));
        }
    }
}

pub fn classify(args: &ClassifyArgs) -> Result<Report> {
    let (src, src_cfg) = resolve_source(&args.source)?;
    let grid = parse_grid(args.grid.as_deref())?;
    if let Some(t) = args.tol {
        if !(t > 0.0) || !t.is_finite() {
            bail!("--tol must be positive, got {t}");
        }
    }
    let c = classify_metric(&src, args.dim, &grid, args.tol)?;
    let mut report = Report::new(
        "classify",
        obj([
            ("source", src_cfg),
            ("dim", Value::from(args.dim)),
            ("grid", grid_json(&grid)),
            ("tolerance", num(c.tolerance)),
        ]),
    );
    add_classification(&mut report, &c, true);
    if let Some(path) = &args.csv {
        write_points_csv(path, &c).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}

fn write_points_csv(path: &Path, c: &ClassificationReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let lk = c.points.first().map_or(0, |p| p.landsberg_residuals.len());
    let mut header = vec!["r", "s", "phi", "riemann_residual", "berwald_0", "berwald_1"];
    header.extend(["landsberg_0", "landsberg_1"].iter().take(lk));
    header.extend([
        "margin1",
        "margin2",
        "spray_denominator",
        "e_tensor",
        "e_scalar",
        "regular",
        "spray_defined",
    ]);
    w.write_record(&header)?;
    let f = |x: f64| format!("{x:.16e}");
    for p in &c.points {
        let mut row = vec![
            f(p.r),
            f(p.s),
            f(p.phi),
            f(p.riemann_residual),
            f(p.berwald_residuals[0]),
            f(p.berwald_residuals[1]),
        ];
        row.extend(p.landsberg_residuals.iter().map(|v| f(*v)));
        row.extend([
            f(p.margin1),
            f(p.margin2),
            f(p.spray_denominator),
            f(p.e_tensor),
            f(p.e_scalar),
            p.regular.to_string(),
            p.spray_defined.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Nested arrays, outermost index first.
fn tensor(a: ArrayViewD<'_, f64>) -> Value {
    if a.ndim() == 0 {
        return num(a.first().copied().unwrap_or(f64::NAN));
    }
    Value::Array(a.outer_iter().map(tensor).collect())
}

fn spray_json(pq: &SprayData) -> Value {
    obj([
        ("p", num(pq.p)),
        ("p_s", num(pq.p_s)),
        ("p_ss", num(pq.p_ss)),
        ("p_sss", num(pq.p_sss)),
        ("q", num(pq.q)),
        ("q_s", num(pq.q_s)),
        ("q_ss", num(pq.q_ss)),
        ("q_sss", num(pq.q_sss)),
    ])
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

pub fn curvature(args: &CurvatureArgs) -> Result<Report> {
    let (src, src_cfg) = resolve_source(&args.source)?;
    let at = parse_numbers(&args.at, Some(3), "--at")?;
    let (r, s, u) = (at[0], at[1], at[2]);
    let frame = embed_point(r, s, u, args.dim)?;
    let phi = src.phi_jet(r, s).map_err(|e| e.at_point(r, s))?;
    let k = curvature_packet(&phi, None, frame).map_err(|e| e.at_point(r, s))?;
    let mut report = Report::new(
        "curvature",
        obj([
            ("source", src_cfg),
            ("dim", Value::from(args.dim)),
            ("at", obj([("r", num(r)), ("s", num(s)), ("u", num(u))])),
        ]),
    );
    let t = tensor;
    report.result("x", nums(k.frame.x.iter().copied()));
    report.result("y", nums(k.frame.y.iter().copied()));
    report.result("phi", num(phi.value()));
    report.result("f", num(u * phi.value()));
    report.result("spray", spray_json(&k.spray));
    report.result("sigma", nums(k.sigma));
    report.result("rho", nums(k.rho));
    report.result("g", t(k.g.view().into_dyn()));
    report.result("g_inv", t(k.g_inv.view().into_dyn()));
    report.result("nonlinear_connection", t(k.gmat.view().into_dyn()));
    report.result("berwald", t(k.berwald.view().into_dyn()));
    report.result("mean_berwald", t(k.e.view().into_dyn()));
    report.result("landsberg", t(k.landsberg.view().into_dyn()));
    report.result(
        "scalars",
        obj([
            ("h", num(k.h)),
            ("h_s", num(k.h_s)),
            ("k", num(k.k)),
            ("lambda1", num(k.lambda1)),
            ("lambda2", num(k.lambda2)),
            ("l1", num(k.l1)),
            ("l2", num(k.l2)),
            ("e_scalar", num(k.e_scalar)),
        ]),
    );
    report.maximum("berwald", num(max_abs(k.berwald.iter())));
    report.maximum("mean_berwald", num(max_abs(k.e.iter())));
    report.maximum("landsberg", num(max_abs(k.landsberg.iter())));
    report.summary.push(format!("F = {:e}", u * phi.value()));
    report.summary.push(format!("P = {:e}, Q = {:e}", k.spray.p, k.spray.q));
    report.summary.push(format!(
        "max |B| = {:e}, max |E| = {:e}, max |L| = {:e}",
        max_abs(k.berwald.iter()),
        max_abs(k.e.iter()),
        max_abs(k.landsberg.iter())
    ));
    Ok(report)
}

fn interval_arg(text: &str) -> Result<(f64, f64)> {
    let v = parse_numbers(text, Some(2), "--interval")?;
    Ok((v[0], v[1]))
}

/// Anchor at `r = 1` when it lies in the interval, else at the lower end.
fn family_anchor(lo: f64, hi: f64) -> Anchor {
    let r0 = if lo <= 1.0 && 1.0 <= hi { 1.0 } else { lo };
    Anchor { r0, phi0: 1.0 }
}

/// Largest relative compatibility residuals of a spray against the metric
/// reconstructed from it, over the lattice.
fn compatibility_maxima(
    field: &dyn finsler_core::families::LogDerivField,
    spray: &dyn SprayField,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    let mut m = (0.0f64, 0.0f64);
    for (r, s) in grid.points() {
        let run = || -> finsler_core::Result<(f64, f64)> {
            let phi = shape_jet(field, r, s)?;
            Ok(compatibility_residuals(&phi, &spray.spray(r, s)?).relative())
        };
        let (a, b) = run().map_err(|e| e.at_point(r, s))?;
        m = (max_abs([&m.0, &a]), max_abs([&m.1, &b]));
    }
    Ok(m)
}

pub fn family_landsberg(args: &LandsbergArgs) -> Result<Report> {
    let (lo, hi) = interval_arg(&args.interval)?;
    let fam = LandsbergFamily::build(
        coeff_arg(&args.c1, "--c1")?,
        coeff_arg(&args.c3, "--c3")?,
        args.c,
        (lo, hi),
    )?;
    let mut report = Report::new(
        "family landsberg",
        obj([
            ("c1", Value::String(args.c1.clone())),
            ("c3", Value::String(args.c3.clone())),
            ("c", num(args.c)),
            ("interval", nums([lo, hi])),
        ]),
    );

    let coeffs = (0..11)
        .map(|i| {
            let r = if lo == hi { lo } else { lo + (hi - lo) * i as f64 / 10.0 };
            let k = fam.coefficients(r)?;
            Ok(obj([
                ("r", num(r)),
                ("c0", num(k.c0)),
                ("c1", num(k.c1)),
                ("c2", num(k.c2)),
                ("c3", num(k.c3)),
            ]))
        })
        .collect::<Result<Vec<Value>>>()?;
    report.result("coefficients", Value::Array(coeffs));

    let integ = fam.integrability_on(50)?;
    let ia = max_abs(integ.iter().map(|i| &i.a));
    let ib = max_abs(integ.iter().map(|i| &i.b));
    report.maximum("integrability_a", num(ia));
    report.maximum("integrability_b", num(ib));
    report.summary.push(format!("integrability residuals A = {ia:e}, B = {ib:e}"));

    let grid = GridSpec {
        r_lo: lo,
        r_hi: hi,
        nr: if lo == hi { 1 } else { GridSpec::default().nr },
        ..GridSpec::default()
    };
    let anchor = family_anchor(lo, hi);
    let field = Arc::new(fam.clone());
    let (ca, cb) = compatibility_maxima(&*field, &fam, &grid)?;
    report.maximum("compatibility_c1", num(ca));
    report.maximum("compatibility_c2", num(cb));

    let src = PhiSource::from_log_derivs(field, anchor)?;
    let c = classify_metric(&src, 3, &grid, None)?;
    add_classification(&mut report, &c, false);
    report.result("anchor", obj([("r0", num(anchor.r0)), ("phi0", num(anchor.phi0))]));
    Ok(report)
}

pub fn family_surface(args: &SurfaceArgs) -> Result<Report> {
    let fam = SurfaceBerwaldFamily::new(
        coeff_arg(&args.a, "--a")?,
        coeff_arg(&args.b0, "--b0")?,
        coeff_arg(&args.b1, "--b1")?,
        coeff_arg(&args.b2, "--b2")?,
        coeff_arg(&args.b3, "--b3")?,
    )?;
    let grid = family_grid();
    let mut report = Report::new(
        "family surface-berwald",
        obj([
            ("a", Value::String(args.a.clone())),
            ("b0", Value::String(args.b0.clone())),
            ("b1", Value::String(args.b1.clone())),
            ("b2", Value::String(args.b2.clone())),
            ("b3", Value::String(args.b3.clone())),
            ("grid", grid_json(&grid)),
            ("tolerance", num(FAMILY_TOL)),
        ]),
    );
    let (b, e) = surface_berwald_maxima(&fam, &grid)?;
    report.maximum("berwald_curvature", extremum(&b));
    report.maximum("mean_berwald", extremum(&e));
    let berwald = b.value <= FAMILY_TOL;
    report.result("berwald", Value::Bool(berwald));
    report.summary.push(format!("max |B^i_jkl| = {:e} (tolerance {FAMILY_TOL:e})", b.value));
    Ok(report)
}

/// Largest Berwald and mean Berwald curvature components of a surface spray
/// over the lattice, with `|y| = 1`.
pub fn surface_berwald_maxima(
    spray: &dyn SprayField,
    grid: &GridSpec,
) -> Result<(finsler_core::classify::Extremum, finsler_core::classify::Extremum)> {
    use finsler_core::classify::Extremum;
    let mut b = Extremum { value: 0.0, r: f64::NAN, s: f64::NAN };
    let mut e = b;
    for (r, s) in grid.points() {
        let run = || -> finsler_core::Result<(f64, f64)> {
            let frame = embed_point(r, s, 1.0, 2)?;
            let pq = spray.spray(r, s)?;
            Ok((
                max_abs(berwald_curvature(&pq, &frame).iter()),
                max_abs(mean_berwald(&pq, &frame).e.iter()),
            ))
        };
        let (vb, ve) = run().map_err(|err| err.at_point(r, s))?;
        for (acc, v) in [(&mut b, vb), (&mut e, ve)] {
            if !acc.value.is_nan() && (v.is_nan() || v > acc.value || acc.r.is_nan()) {
                *acc = Extremum { value: v, r, s };
            }
        }
    }
    Ok((b, e))
}

pub fn family_zhou(args: &ZhouArgs) -> Result<Report> {
    let interval = (0.5, 2.0);
    let z = Arc::new(ZhouClass::new(args.c, coeff_arg(&args.c0, "--c0")?, interval)?);
    let grid = family_grid();
    let mut report = Report::new(
        "family zhou",
        obj([
            ("c", num(args.c)),
            ("c0", Value::String(args.c0.clone())),
            ("interval", nums([interval.0, interval.1])),
            ("grid", grid_json(&grid)),
        ]),
    );
    let field = Arc::new(SprayLogDerivs { spray: z.clone() });
    let (ca, cb) = compatibility_maxima(&*field, &*z, &grid)?;
    report.maximum("compatibility_c1", num(ca));
    report.maximum("compatibility_c2", num(cb));

    let mut dp = 0.0f64;
    let mut dq = 0.0f64;
    for (r, s) in grid.points() {
        let run = || -> finsler_core::Result<(f64, f64)> {
            let own = spray_pq(&shape_jet(&*field, r, s)?)?;
            let given = z.spray(r, s)?;
            Ok(((own.p - given.p).abs(), (own.q - given.q).abs()))
        };
        let (a, b) = run().map_err(|e| e.at_point(r, s))?;
        dp = max_abs([&dp, &a]);
        dq = max_abs([&dq, &b]);
    }
    report.maximum("metric_spray_p", num(dp));
    report.maximum("metric_spray_q", num(dq));
    report.summary.push(format!("compatibility C1 = {ca:e}, C2 = {cb:e}"));
    report.summary.push(format!("spray of the matching metric differs by P {dp:e}, Q {dq:e}"));

    let src = PhiSource::from_log_derivs(field, Anchor { r0: 1.0, phi0: 1.0 })?;
    let c = classify_metric(&src, 2, &grid, None)?;
    add_classification(&mut report, &c, false);
    if let Some(rec) = &c.reconstruction {
        report.summary.push(format!(
            "mixed-partial residual of the solved log-derivatives {:e}",
            rec.mixed_partial_residual
        ));
    }
    Ok(report)
}

pub fn geodesic(args: &GeodesicArgs) -> Result<Report> {
    let (src, src_cfg) = resolve_source(&args.source)?;
    let x = parse_numbers(&args.x, None, "--x")?;
    let y = parse_numbers(&args.y, None, "--y")?;
    let traj = integrate(GeodesicSource::Metric(&src), &x, &y, args.step, args.steps)?;
    let mut report = Report::new(
        "geodesic",
        obj([
            ("source", src_cfg),
            ("x", nums(x.iter().copied())),
            ("y", nums(y.iter().copied())),
            ("step", num(args.step)),
            ("steps", Value::from(args.steps)),
        ]),
    );
    let states = traj
        .states
        .iter()
        .map(|st| {
            obj([
                ("t", num(st.t)),
                ("x", nums(st.x.iter().copied())),
                ("y", nums(st.y.iter().copied())),
            ])
        })
        .collect();
    report.result("states", Value::Array(states));
    report.result("steps_taken", Value::from(traj.states.len() - 1));
    report.result(
        "f_values",
        traj.f_values.as_ref().map(|v| nums(v.iter().copied())).unwrap_or(Value::Null),
    );
    report.result(
        "domain_exit",
        traj.domain_exit.clone().map(Value::String).unwrap_or(Value::Null),
    );
    let drift = traj.max_drift.unwrap_or(f64::NAN);
    report.maximum("f_drift", num(drift));
    report.summary.push(format!(
        "{} steps of {:e}, max relative F drift {drift:e}",
        traj.states.len() - 1,
        args.step
    ));
    if let Some(why) = &traj.domain_exit {
        report.summary.push(format!("stopped early: {why}"));
    }
    if let Some(path) = &args.csv {
        let run = || -> Result<()> {
            let mut w = csv::Writer::from_path(path)?;
            let n = x.len();
            let mut header = vec!["t".to_string()];
            header.extend((0..n).map(|i| format!("x{i}")));
            header.extend((0..n).map(|i| format!("y{i}")));
            header.push("f".into());
            w.write_record(&header)?;
            for (i, st) in traj.states.iter().enumerate() {
                let f = traj.f_values.as_ref().map_or(f64::NAN, |v| v[i]);
                let row = std::iter::once(st.t)
                    .chain(st.x.iter().copied())
                    .chain(st.y.iter().copied())
                    .chain(std::iter::once(f))
                    .map(|v| format!("{v:.16e}"));
                w.write_record(row)?;
            }
            w.flush()?;
            Ok(())
        };
        run().with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}
