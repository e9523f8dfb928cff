mod common;

use std::sync::Arc;

use common::{expr, named, random_poly};
use finsler_core::families::{compatibility_residuals, LandsbergFamily, SprayField, SurfaceBerwaldFamily, ZhouClass};
use finsler_core::geometry::{berwald_curvature, embed_point, spray_pq};
use finsler_core::phi_lang::Anchor;
use finsler_core::{classify_metric, integrate, GeodesicSource, GridSpec, PhiSource, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_family(rng: &mut ChaCha8Rng, c: f64) -> LandsbergFamily {
    loop {
        let c1 = random_poly(rng, 0.3);
        let c3 = random_poly(rng, 3.0);
        if let Ok(f) = LandsbergFamily::build(expr(&c1), expr(&c3), c, (0.5, 2.0)) {
            return f;
        }
    }
}

fn reconstructed(fam: LandsbergFamily) -> PhiSource {
    PhiSource::from_log_derivs(Arc::new(fam), Anchor { r0: 1.0, phi0: 1.0 }).unwrap()
}

#[test]
fn integrability_holds_for_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let c = rng.gen_range(0.2..1.0);
        let fam = random_family(&mut rng, c);
        for rec in fam.integrability_on(50).unwrap() {
            assert!(rec.a.abs() < 1e-10 && rec.b.abs() < 1e-10, "{rec:?}");
        }
    }
}

#[test]
fn random_landsberg_families_are_not_berwald_and_not_regular() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = GridSpec::new(0.8, 1.6, 3, 9).unwrap();
    for _ in 0..3 {
        let c = rng.gen_range(0.3..1.0);
        let src = reconstructed(random_family(&mut rng, c));
        let rep = classify_metric(&src, 3, &grid, None).unwrap();
        assert_eq!(rep.verdict, Verdict::LandsbergNonberwald);
        assert!(rep.points.iter().all(|p| p.margin2 < 0.0));
        assert!(!rep.flags.regular);
    }
}

#[test]
fn families_without_c2_reconstruct_quadratic_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = GridSpec::new(0.6, 1.8, 5, 11).unwrap();
    for _ in 0..3 {
        let src = reconstructed(random_family(&mut rng, 0.0));
        for (r, s) in grid.points() {
            let phi = src.phi_jet(r, s).unwrap();
            let sq = phi * phi;
            assert!(sq.coeff(0, 3).abs() < 1e-8, "({r}, {s}): {}", sq.coeff(0, 3));
        }
        let rep = classify_metric(&src, 3, &grid, None).unwrap();
        assert_eq!(rep.verdict, Verdict::Riemannian);
    }
}

#[test]
fn surface_berwald_sprays_have_no_berwald_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    // These sprays carry 1/√(r²−s²) terms whose third derivatives reach 1e11
    // at |s| = 0.999r, where rounding alone leaves curvature of order 1e-5.
    let grid = GridSpec {
        eps: 1e-2,
        ..GridSpec::new(0.5, 2.0, 6, 13).unwrap()
    };
    for _ in 0..3 {
        let coeffs: Vec<_> = (0..5).map(|_| expr(&random_poly(&mut rng, 0.0))).collect();
        let fam = SurfaceBerwaldFamily::new(
            coeffs[0].clone(),
            coeffs[1].clone(),
            coeffs[2].clone(),
            coeffs[3].clone(),
            coeffs[4].clone(),
        )
        .unwrap();
        for (r, s) in grid.points() {
            let pq = fam.spray(r, s).unwrap();
            let b = berwald_curvature(&pq, &embed_point(r, s, 1.0, 2).unwrap());
            let m = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(m < 1e-7, "({r}, {s}): {m}");
        }
    }
}

#[test]
fn zhou_spray_matches_the_sixth_power_metric_only() {
    let zhou = ZhouClass::new(-1.0, expr("1/r^2"), (0.5, 2.0)).unwrap();
    let r6 = named("zhou2d_r6", &[]);
    let r5 = named("zhou2d_r5", &[]);
    for (r, s) in GridSpec::new(0.5, 2.0, 4, 7).unwrap().points() {
        let pq = zhou.spray(r, s).unwrap();
        let c6 = compatibility_residuals(&r6.phi_jet(r, s).unwrap(), &pq).normalized();
        assert!(c6.0.abs() < 1e-8 && c6.1.abs() < 1e-8);
        let c5 = compatibility_residuals(&r5.phi_jet(r, s).unwrap(), &pq).normalized();
        assert!((c5.1 * r * r - 1.0).abs() < 1e-8);
        let own = spray_pq(&r6.phi_jet(r, s).unwrap()).unwrap();
        assert!((own.p - pq.p).abs() < 1e-9 && (own.q - pq.q).abs() < 1e-9);
    }
}

#[test]
fn zhou_geodesics_conserve_the_sixth_power_metric() {
    let zhou = ZhouClass::new(-1.0, expr("1/r^2"), (0.5, 2.0)).unwrap();
    let r6 = named("zhou2d_r6", &[]);
    let (x0, y0) = ([1.0, 0.0], [0.1, 0.3]);
    let tr = integrate(GeodesicSource::Spray(&zhou), &x0, &y0, 1e-3, 1000).unwrap();
    assert!(tr.domain_exit.is_none());
    let f = |st: &finsler_core::GeodesicState| {
        let r = st.x.dot(&st.x).sqrt();
        let u = st.y.dot(&st.y).sqrt();
        u * r6.phi(r, st.x.dot(&st.y) / u).unwrap()
    };
    let f0 = f(&tr.states[0]);
    for st in &tr.states {
        assert!((f(st) / f0 - 1.0).abs() < 1e-9);
    }
    let metric = integrate(GeodesicSource::Metric(&r6), &x0, &y0, 1e-3, 1000).unwrap();
    let (a, b) = (tr.states.last().unwrap(), metric.states.last().unwrap());
    assert!((&a.x - &b.x).iter().all(|d| d.abs() < 1e-9));
}
