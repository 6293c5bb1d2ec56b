mod common;

use std::f64::consts::PI;

use heiscurv_core::{build_norm, NormSpec, TrigTable, Vec2};
use rand::Rng;

/// Shoelace area of `n` boundary points of the unit ball of `ℓ^p`.
fn lp_area(p: f64, n: usize) -> f64 {
    let pt = |k: usize| {
        let a = 2.0 * PI * k as f64 / n as f64;
        let (c, s) = (a.cos(), a.sin());
        let r = (c.abs().powf(p) + s.abs().powf(p)).powf(-1.0 / p);
        Vec2::new(r * c, r * s)
    };
    0.5 * (0..n).map(|k| pt(k).cross(pt(k + 1))).sum::<f64>()
}

#[test]
fn lp4_area_matches_dense_polygon() {
    let t = common::table(&NormSpec::Lp { p: 4.0 });
    // polygon error is O(n^-2); Richardson on two sizes
    let (a1, a2) = (lp_area(4.0, 1 << 16), lp_area(4.0, 1 << 17));
    let oracle = a2 + (a2 - a1) / 3.0;
    assert!((t.pi_omega() - oracle).abs() < 1e-8, "{} vs {oracle}", t.pi_omega());
    let dual = lp_area(4.0 / 3.0, 1 << 17) + (lp_area(4.0 / 3.0, 1 << 17) - lp_area(4.0 / 3.0, 1 << 16)) / 3.0;
    assert!((t.pi_polar() - dual).abs() < 1e-7, "{} vs {dual}", t.pi_polar());
}

#[test]
fn ellipse_area_and_classical_values() {
    let b = 0.5;
    let t = common::table(&NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 1.0 / (b * b)]] });
    assert!((t.pi_omega() - PI * b).abs() < 1e-10);
    let e = common::table(&NormSpec::Euclidean);
    assert!((e.pi_omega() - PI).abs() < 1e-10);
    let p = e.cos_sin(PI / 4.0);
    assert!((p.x - 0.5f64.sqrt()).abs() < 1e-8 && (p.y - 0.5f64.sqrt()).abs() < 1e-8);
    let p = e.cos_sin(PI / 2.0);
    assert!(p.x.abs() < 1e-8 && (p.y - 1.0).abs() < 1e-8);
}

#[test]
fn boundary_points_have_unit_norm() {
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        let norm = build_norm(&spec).unwrap();
        for theta in t.theta_grid().into_iter().step_by(7) {
            let v = norm.value(t.cos_sin(theta));
            assert!((v - 1.0).abs() <= 1e-9, "{name}: {theta} -> {v}");
        }
        assert_eq!(t.cos_sin(0.0).y, 0.0, "{name}");
    }
}

#[test]
fn pythagorean_equality_and_inequality() {
    let mut rng = common::rng(11);
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let phi = rng.gen_range(0.0..2.0 * t.pi_polar());
            let theta = t.correspondence(phi).unwrap();
            let lhs = t.cos_sin(theta).dot(t.cos_sin_polar(phi));
            worst = worst.max((lhs - 1.0).abs());
            let other = rng.gen_range(0.0..2.0 * t.pi_omega());
            assert!(t.cos_sin(other).dot(t.cos_sin_polar(phi)) <= 1.0 + 1e-9, "{name}");
        }
        assert!(worst <= 1e-8, "{name}: {worst}");
    }
}

#[test]
fn derivative_of_polar_sine_has_second_order_fd() {
    let mut rng = common::rng(12);
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        let err = |phi: f64, h: f64| {
            let fd = (t.cos_sin_polar(phi + h).y - t.cos_sin_polar(phi - h).y) / (2.0 * h);
            let exact = t.cos_sin(t.correspondence(phi).unwrap()).x;
            (fd - exact).abs()
        };
        let mut orders = Vec::new();
        for _ in 0..20 {
            let phi = rng.gen_range(0.0..2.0 * t.pi_polar());
            let (e1, e2) = (err(phi, 1e-2), err(phi, 1e-3));
            if e1 > 1e-9 {
                orders.push((e1 / e2).log10());
            }
        }
        let mean = orders.iter().sum::<f64>() / orders.len().max(1) as f64;
        assert!(orders.is_empty() || mean >= 1.8, "{name}: {orders:?}");
    }
}

#[test]
fn inverse_correspondence_is_identity() {
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        let mut prev = f64::NEG_INFINITY;
        for phi in t.phi_grid().into_iter().step_by(5) {
            let theta = t.ccirc(phi);
            assert!(theta > prev, "{name}: not increasing at {phi}");
            prev = theta;
            assert!((t.cinv(theta) - phi).abs() <= 1e-7, "{name}: {phi}");
        }
    }
}

#[test]
fn correspondence_periodicity() {
    for (name, spec) in common::families() {
        let t = common::table(&spec);
        for phi in [0.1, 1.3, 2.9] {
            let jump = t.ccirc(phi + 2.0 * t.pi_polar()) - t.ccirc(phi);
            assert!((jump - 2.0 * t.pi_omega()).abs() < 1e-9, "{name}: {jump}");
        }
    }
}

#[test]
fn inner_product_slope_is_constant() {
    let t = common::table(&NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] });
    let slopes: Vec<f64> = t.phi_grid().iter().map(|&p| t.correspondence_derivative(p)).collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!(slopes.iter().all(|s| (s - mean).abs() < 1e-6));
    let fit = t.affine_check(1e-6);
    assert!(fit.is_affine && (fit.slope - mean).abs() < 1e-6);
    assert!(fit.ode_residual <= 1e-6, "{}", fit.ode_residual);
    // slope C² = π_Ω/π_{Ω°} for an affine map between the two periods
    assert!((mean - t.pi_omega() / t.pi_polar()).abs() < 1e-9);
}

#[test]
fn lp43_slope_vanishes_on_the_axes() {
    let t = common::table(&NormSpec::Lp { p: 4.0 / 3.0 });
    let slopes: Vec<f64> = t.phi_grid().iter().map(|&p| t.correspondence_derivative(p)).collect();
    let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min >= -1e-12 && min < 1e-6, "{min}");
    assert!(t.correspondence_derivative(0.0).abs() < 1e-12);
}

#[test]
fn interpolated_is_not_affine_and_has_positive_second_difference() {
    let t = common::table(&NormSpec::Interpolated { q: 4.0, t: 0.5 });
    assert!(!t.affine_check(1e-6).is_affine);
    let hit = t.phi_grid().iter().step_by(16).any(|&p| t.second_difference(p, 0.1) > 0.0);
    assert!(hit);
    let e = common::table(&NormSpec::Euclidean);
    assert!(e.second_difference(0.7, 0.3).abs() < 1e-9);
}

#[test]
fn wrapping_is_exact() {
    let t: TrigTable = common::table(&NormSpec::Interpolated { q: 4.0, t: 0.3 });
    for th in [0.2, 1.7] {
        let (a, b) = (t.cos_sin(th + 2.0 * t.pi_omega()), t.cos_sin(th));
        assert!((a - b).norm() < 1e-13, "{a:?} {b:?}");
    }
}
