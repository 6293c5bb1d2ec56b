use heiscurv_core::norm::dual_value;
use heiscurv_core::{build_norm, Norm2D, NormSpec, Vec2};
use proptest::prelude::*;
use std::sync::OnceLock;

fn norms() -> &'static [(NormSpec, Norm2D)] {
    static N: OnceLock<Vec<(NormSpec, Norm2D)>> = OnceLock::new();
    N.get_or_init(|| {
        [
            NormSpec::Euclidean,
            NormSpec::InnerProduct { matrix: [[2.0, 0.5], [0.5, 1.0]] },
            NormSpec::Lp { p: 4.0 },
            NormSpec::Lp { p: 1.5 },
            NormSpec::Interpolated { q: 4.0, t: 0.5 },
            NormSpec::Interpolated { q: 6.0, t: 0.2 },
            NormSpec::BoundarySamples {
                points: (0..24)
                    .map(|k| {
                        let a = std::f64::consts::PI * k as f64 / 24.0;
                        [1.5 * a.cos(), a.sin()]
                    })
                    .collect(),
            },
        ]
        .into_iter()
        .map(|s| {
            let n = build_norm(&s).unwrap();
            (s, n)
        })
        .collect()
    })
}

fn vector() -> impl Strategy<Value = Vec2> {
    (0.0..std::f64::consts::TAU, -3.0f64..3.0).prop_map(|(a, l)| Vec2::polar(a) * 10f64.powf(l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homogeneous_and_symmetric(v in vector(), lambda in -50.0f64..50.0) {
        for (spec, n) in norms() {
            let a = n.value(v * lambda);
            let b = lambda.abs() * n.value(v);
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{spec:?}: {a} {b}");
            prop_assert!((n.value(-v) - n.value(v)).abs() <= 1e-14 * n.value(v), "{spec:?}");
        }
    }

    #[test]
    fn unit_normalization(v in vector()) {
        for (spec, n) in norms() {
            let u = v / n.value(v);
            prop_assert!((n.value(u) - 1.0).abs() <= 1e-12, "{spec:?}");
        }
    }

    #[test]
    fn triangle_inequality(a in vector(), b in vector()) {
        for (spec, n) in norms() {
            prop_assert!(n.value(a + b) <= (n.value(a) + n.value(b)) * (1.0 + 1e-12), "{spec:?}");
        }
    }

    #[test]
    fn euler_identity(v in vector()) {
        for (spec, n) in norms() {
            let e = n.gradient(v).dot(v);
            prop_assert!((e - n.value(v)).abs() <= 1e-8 * n.value(v), "{spec:?}: {e}");
        }
    }

    #[test]
    fn bipolar(v in vector()) {
        for (spec, n) in norms() {
            let closed = matches!(spec, NormSpec::Euclidean | NormSpec::InnerProduct { .. } | NormSpec::Lp { .. });
            let tol = if closed { 1e-12 } else { 1e-8 };
            let back = n.dual().dual_value(v);
            prop_assert!((back - n.value(v)).abs() <= tol * n.value(v), "{spec:?}: {back}");
        }
    }

    #[test]
    fn dual_is_a_support_function(p in vector()) {
        for (spec, n) in norms() {
            let d = dual_value(n, p).unwrap();
            // sup over a coarse sample of the unit sphere never exceeds it
            let sampled = (0..360)
                .map(|k| {
                    let u = Vec2::polar(k as f64 * std::f64::consts::TAU / 360.0);
                    p.dot(u / n.value(u))
                })
                .fold(f64::MIN, f64::max);
            prop_assert!(sampled <= d * (1.0 + 1e-10), "{spec:?}");
            prop_assert!(sampled >= d * (1.0 - 1e-3), "{spec:?}");
        }
    }

    #[test]
    fn interpolated_dual_monotone_in_t(p in vector(), t in 0.0f64..0.9) {
        let a = build_norm(&NormSpec::Interpolated { q: 4.0, t }).unwrap();
        let b = build_norm(&NormSpec::Interpolated { q: 4.0, t: t + 0.05 }).unwrap();
        // the dual is the blend itself and ℓ⁴ ≤ ℓ² pointwise
        prop_assert!(b.dual_value(p) <= a.dual_value(p) * (1.0 + 1e-12));
    }
}
