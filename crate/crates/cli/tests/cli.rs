use finsler_cli::{run, EXIT_ERROR, EXIT_OK};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("finsler").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn number(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn classify_quadratic_metric() {
    let v = json(&["classify", "--phi", "sqrt(1+s^2)", "--dim", "3"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["verdict"], "riemannian");
    assert_eq!(v["runtime_ms"], Value::Null);
    assert_eq!(v["results"]["points"].as_array().unwrap().len(), 16 * 33);
    assert!(number(&v["residual_maxima"]["riemann"]["value"]) < 1e-12);
    assert_eq!(v["results"]["classification"]["flags"]["regular"], true);
}

#[test]
fn classify_builtin_with_parameters_and_grid() {
    let v = json(&[
        "classify",
        "--builtin",
        "riemann_quadratic",
        "--param",
        "f1=1",
        "--param",
        "f2=r",
        "--dim",
        "4",
        "--grid",
        "0.5,1.5,3,5",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(v["verdict"], "riemannian");
    assert_eq!(v["config"]["source"]["params"]["f2"], "r");
    assert_eq!(number(&v["config"]["tolerance"]), 1e-9);
    assert_eq!(v["results"]["points"].as_array().unwrap().len(), 15);
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let (code, stdout, _) = call(&[
        "classify",
        "--builtin",
        "euclidean",
        "--dim",
        "3",
        "--grid",
        "1,2,2,3",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("verdict: riemannian"), "{stdout}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "riemannian");
    let mut rd = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(&rd.headers().unwrap()[0], "r");
    assert_eq!(rd.records().count(), 6);
}

#[test]
fn timing_is_opt_in() {
    let v = json(&["--timing", "classify", "--phi", "1", "--dim", "2", "--grid", "1,1,1,3"]);
    assert!(number(&v["runtime_ms"]) >= 0.0);
}

#[test]
fn reproduce_is_byte_identical() {
    for ex in ["example1", "zhou-discrepancy"] {
        let (c1, a, _) = call(&["reproduce", ex]);
        let (c2, b, _) = call(&["reproduce", ex]);
        assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
        assert_eq!(a, b, "{ex}");
    }
}

#[test]
fn reproduce_example1_reports_the_witness() {
    let v = json(&["reproduce", "example1"]);
    assert_eq!(v["verdict"], "landsberg_nonberwald");
    assert!((number(&v["results"]["berwald_witness_p_ss"]).abs() - 0.5).abs() < 1e-9);
    assert_eq!(v["results"]["all_checks_pass"], true);
    assert_eq!(v["results"]["classification"]["flags"]["regular"], false);
}

#[test]
fn reproduce_zhou_discrepancy() {
    let v = json(&["reproduce", "zhou-discrepancy"]);
    let m = &v["residual_maxima"];
    assert!(number(&m["r5_c2_r2_over_phi_minus_1"]) < 1e-8);
    assert!(number(&m["r6_c2_over_phi"]) < 1e-8);
    assert!(v.get("verdict").is_none());
}

#[test]
fn curvature_at_a_point() {
    let v = json(&["curvature", "--phi", "sqrt(1+s^2)", "--at", "1,0,1", "--dim", "3"]);
    let q = number(&v["results"]["spray"]["q"]);
    assert!((q - 0.25).abs() < 1e-15);
    assert_eq!(v["results"]["berwald"].as_array().unwrap().len(), 3);
    assert!(number(&v["residual_maxima"]["landsberg"]) < 1e-14);
}

#[test]
fn landsberg_family_with_c_zero_is_riemannian() {
    let v = json(&[
        "family", "landsberg", "--c1", "0", "--c3", "0.1", "--c", "0", "--interval", "0.5,2",
    ]);
    assert_eq!(v["verdict"], "riemannian");
    assert!(number(&v["residual_maxima"]["integrability_a"]) < 1e-10);
}

#[test]
fn surface_family_is_berwald() {
    let v = json(&[
        "family", "surface-berwald", "--a", "1/r^2", "--b0", "0.3", "--b1", "-0.2", "--b2", "0.1*r",
        "--b3", "0.05",
    ]);
    assert_eq!(v["results"]["berwald"], true);
}

#[test]
fn zhou_family_is_berwald_on_surfaces() {
    let v = json(&["family", "zhou", "--c", "-1", "--c0", "1/r^2"]);
    assert_eq!(v["verdict"], "berwald_nonriemannian");
    assert!(number(&v["residual_maxima"]["compatibility_c1"]) < 1e-12);
}

#[test]
fn geodesic_in_flat_space() {
    let v = json(&[
        "geodesic", "--phi", "1", "--x", "1,0", "--y", "0,1", "--step", "0.01", "--steps", "50",
    ]);
    assert_eq!(number(&v["residual_maxima"]["f_drift"]), 0.0);
    let states = v["results"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 51);
    assert!((number(&states[50]["x"][1]) - 0.5).abs() < 1e-12);
}

#[test]
fn geodesic_domain_exit_is_reported() {
    let v = json(&[
        "geodesic", "--phi", "1", "--x", "1,0", "--y", "-1,0.1", "--step", "0.01", "--steps", "500",
    ]);
    assert!(v["results"]["domain_exit"].is_string());
}

#[test]
fn input_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["classify", "--phi", "sqrt(1+", "--dim", "3"],
        &["classify", "--builtin", "nope", "--dim", "3"],
        &["classify", "--builtin", "riemann_quadratic", "--dim", "3"],
        &["classify", "--builtin", "euclidean", "--param", "f1=1", "--dim", "3"],
        &["classify", "--phi", "1", "--builtin", "euclidean", "--dim", "3"],
        &["classify", "--phi", "1", "--dim", "3", "--grid", "1,2,3"],
        &["classify", "--phi", "1", "--dim", "3", "--grid", "2,1,3,3"],
        &["classify", "--phi", "1", "--dim", "1"],
        &["classify", "--phi", "1", "--dim", "3", "--tol", "-1"],
        &["classify", "--phi", "1", "--dim", "3", "--bogus"],
        &["curvature", "--phi", "1", "--at", "1,2", "--dim", "3"],
        &["curvature", "--phi", "1", "--at", "1,2,1", "--dim", "3"],
        &["family", "landsberg", "--c1", "-1/r^2", "--c3", "1", "--c", "1", "--interval", "0.5,2"],
        &["family", "landsberg", "--c1", "s", "--c3", "1", "--c", "1", "--interval", "0.5,2"],
        &["family", "zhou", "--c", "3", "--c0", "1/r^2"],
        &["geodesic", "--phi", "1", "--x", "1,0", "--y", "0,0", "--step", "0.1", "--steps", "3"],
        &["geodesic", "--phi", "1", "--x", "1,0", "--y", "0,1", "--step", "0", "--steps", "3"],
        &["reproduce", "example3"],
        &[],
    ];
    for args in cases {
        let (code, out, err) = call(args);
        assert_eq!(code, EXIT_ERROR, "{args:?}: {out}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("classify"));
}

#[test]
fn binary_runs() {
    let exe = env!("CARGO_BIN_EXE_finsler");
    let o = std::process::Command::new(exe)
        .args(["classify", "--phi", "1", "--dim", "2", "--grid", "1,1,1,3"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "riemannian");
    let o = std::process::Command::new(exe).args(["classify"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
