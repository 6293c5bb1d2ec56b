mod common;

use heiscurv_core::curvature::*;
use heiscurv_core::{build_norm, Error, NormSpec, TrigTable};

fn interp() -> TrigTable {
    common::table(&NormSpec::Interpolated { q: 4.0, t: 0.5 })
}

#[test]
fn rigid_norms_have_exponent_five() {
    let e = curvature_exponent(&common::table(&NormSpec::Euclidean), &SweepConfig::default()).unwrap();
    assert!((e.n_curv - 5.0).abs() <= 5e-3, "{e:?}");
    let d = curvature_exponent(&common::table(&NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] }), &SweepConfig::default()).unwrap();
    assert!((d.n_curv - 5.0).abs() <= 1e-2, "{d:?}");
    assert_eq!(e.band_violations + d.band_violations, 0);
}

#[test]
fn non_rigid_norm_exceeds_five() {
    let r = curvature_exponent(&interp(), &SweepConfig::default()).unwrap();
    assert!(r.n_curv > 5.05, "{r:?}");
    assert!(r.argmax.omega.abs() > 0.1);
}

#[test]
fn lower_bound_holds_for_every_family() {
    for (name, spec) in common::families() {
        let r = curvature_exponent(&common::table(&spec), &SweepConfig::coarse()).unwrap();
        assert!(r.n_curv >= 5.0 - 1e-3, "{name}: {}", r.n_curv);
    }
}

#[test]
fn characterizations_agree() {
    for spec in [
        NormSpec::Euclidean,
        NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] },
        NormSpec::Interpolated { q: 4.0, t: 0.5 },
    ] {
        let t = common::table(&spec);
        let (rep, minimal) = curvature_exponent_both(&t, &SweepConfig::default(), &McpConfig::default()).unwrap();
        let minimal = minimal.unwrap();
        assert!((minimal - rep.n_curv).abs() <= 1e-2, "{spec:?}: {minimal} vs {}", rep.n_curv);
        assert_eq!(rep.method, Method::Both);
    }
}

#[test]
fn ratio_check_brackets_the_exponent() {
    let t = interp();
    let n = curvature_exponent(&t, &SweepConfig::default()).unwrap().n_curv;
    let cfg = McpConfig::default();
    assert!(mcp_ratio_check(&t, n + 0.05, &cfg).unwrap().pass);
    assert!(!mcp_ratio_check(&t, n - 0.05, &cfg).unwrap().pass);
    assert!(mcp_ratio_check(&t, 1.0, &cfg).is_err());
}

#[test]
fn field_is_continuous_into_the_limit() {
    for spec in [NormSpec::Euclidean, NormSpec::Interpolated { q: 4.0, t: 0.5 }, NormSpec::Lp { p: 4.0 }] {
        let t = common::table(&spec);
        if !t.is_regular() {
            // unbounded C∘′ breaks the ψ⁴ leading term
            continue;
        }
        for i in 0..64 {
            let s = i as f64 / 64.0;
            for r in [0.5 - 1e-3, 0.5 + 1e-3] {
                let (phi, omega) = chart(&t, s, r);
                let v = n_field(&t, phi, omega).unwrap();
                assert!((v - 5.0).abs() <= 0.05, "{spec:?} {s} {r}: {v}");
            }
        }
    }
}

#[test]
fn rigidity_dichotomy() {
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        if !t.is_regular() {
            continue;
        }
        let affine = t.affine_check(1e-6).is_affine;
        let probe = rigidity_probe(&t, 0.1 * t.pi_polar(), &ProbeConfig::default());
        if affine {
            assert!(matches!(probe, Err(Error::AffineNorm)), "{name}");
            let n = curvature_exponent(&t, &SweepConfig::coarse()).unwrap().n_curv;
            assert!((n - 5.0).abs() <= 1e-2, "{name}: {n}");
        } else {
            let w = probe.unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(w.ratio < w.r4 && w.r_violation > 0.0 && w.r_violation < 1.0, "{name}: {w:?}");
            assert!(w.reverified, "{name}: {w:?}");
            assert!(w.h_bound > 0.0);
        }
    }
}

#[test]
fn witness_survives_re_evaluation() {
    let t = interp();
    let w = rigidity_probe(&t, 0.1 * t.pi_polar(), &ProbeConfig::default()).unwrap();
    let other = TrigTable::new(&build_norm(&NormSpec::Interpolated { q: 4.0, t: 0.5 }).unwrap(), 2048).unwrap();
    let num = heiscurv_core::geometry::reduced_jacobian(&other, w.phi, w.r_violation * w.omega);
    let den = heiscurv_core::geometry::reduced_jacobian(&other, w.phi, w.omega);
    assert!(num / den < w.r4);
    assert!(w.ratio_alternate < w.r4 && w.ratio_pr < w.r4 && w.ratio_resampled < w.r4);
}

#[test]
fn prescription_endpoints() {
    let cfg = PrescribeConfig::default();
    let p = prescribe_exponent(5.0 + 1e-6, 4.0, 1e-3, &cfg).unwrap();
    assert!(p.t_star < 1e-3 && (p.report.n_curv - 5.0).abs() < 1e-3, "{} {}", p.t_star, p.report.n_curv);
    let at = |t: f64| {
        let tab = TrigTable::new(&build_norm(&NormSpec::Interpolated { q: 4.0, t }).unwrap(), 1024).unwrap();
        curvature_exponent(&tab, &SweepConfig::coarse()).unwrap().n_curv
    };
    assert!(at(0.9) > at(0.1));
    assert!(prescribe_exponent(5.0, 4.0, 0.05, &cfg).is_err());
    assert!(prescribe_exponent(10.0, 4.0, 0.05, &cfg).is_err());
}

#[test]
fn hfamily_ratio_trend() {
    let vals: Vec<f64> = [8u32, 16, 32, 64].iter().map(|&h| hfamily_ratio(h, 1.0 / h as f64).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    // the supremum along the arc grows with h
    let sups: Vec<f64> = [8u32, 16, 32, 64]
        .iter()
        .map(|&h| hfamily_table(h, 256).unwrap().iter().map(|s| s.ratio).fold(f64::MIN, f64::max))
        .collect();
    assert!(sups.windows(2).all(|w| w[1] > w[0] + 5.0), "{sups:?}");
    let rows = hfamily_table(32, 64).unwrap();
    assert_eq!(rows.len(), 64);
    assert!((rows[63].y - 1.0 / 32.0).abs() < 1e-15);
    assert!(rows.iter().all(|r| r.jr > 0.0 && r.w_djr > 0.0));
}
