//! Planar norms built from declarative specs, together with their duals.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::solve::{golden_max, newton_bracketed};
use crate::vec2::{Sym2, Vec2};

/// Lower bound for the strong-convexity modulus measured along the boundary.
pub const EPS_SC: f64 = 1e-8;

/// A positively homogeneous convex function with first and second derivatives.
///
/// Hessians are evaluated anywhere off the origin and may be infinite where
/// the unit sphere has a flat point of the dual.
pub trait Gauge: Send + Sync + fmt::Debug {
    fn value(&self, v: Vec2) -> f64;
    fn gradient(&self, v: Vec2) -> Vec2;
    fn hessian(&self, v: Vec2) -> Sym2;

    /// Whether `value` is a closed-form expression rather than an inner solve.
    fn closed_form(&self) -> bool {
        true
    }
}

/// Central-difference gradient with step `1e-6 * max(1, |v|)`.
pub fn numeric_gradient(g: &dyn Gauge, v: Vec2) -> Vec2 {
    let h = 1e-6 * v.norm().max(1.0);
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    Vec2::new(
        (g.value(v + ex) - g.value(v - ex)) / (2.0 * h),
        (g.value(v + ey) - g.value(v - ey)) / (2.0 * h),
    )
}

#[derive(Clone, Copy, Debug)]
pub struct Euclidean;

impl Gauge for Euclidean {
    fn value(&self, v: Vec2) -> f64 {
        v.norm()
    }
    fn gradient(&self, v: Vec2) -> Vec2 {
        v / v.norm()
    }
    fn hessian(&self, v: Vec2) -> Sym2 {
        let n = v.norm();
        let u = v / n;
        Sym2::new(1.0, 0.0, 1.0).sub(&Sym2::outer(u)).scale(1.0 / n)
    }
}

/// `sqrt(vᵀ A v)`.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic {
    pub m: Sym2,
}

impl Gauge for Quadratic {
    fn value(&self, v: Vec2) -> f64 {
        self.m.quad(v).max(0.0).sqrt()
    }
    fn gradient(&self, v: Vec2) -> Vec2 {
        self.m.apply(v) / self.value(v)
    }
    fn hessian(&self, v: Vec2) -> Sym2 {
        let n = self.value(v);
        let av = self.m.apply(v);
        self.m.sub(&Sym2::outer(av).scale(1.0 / (n * n))).scale(1.0 / n)
    }
}

/// `(|x|^p + |y|^p)^(1/p)`.
#[derive(Clone, Copy, Debug)]
pub struct Lp {
    pub p: f64,
}

impl Gauge for Lp {
    fn value(&self, v: Vec2) -> f64 {
        let (ax, ay) = (v.x.abs(), v.y.abs());
        let m = ax.max(ay);
        if m == 0.0 {
            return 0.0;
        }
        m * ((ax / m).powf(self.p) + (ay / m).powf(self.p)).powf(1.0 / self.p)
    }
    fn gradient(&self, v: Vec2) -> Vec2 {
        let n = self.value(v);
        let c = |a: f64| a.signum() * (a.abs() / n).powf(self.p - 1.0);
        Vec2::new(c(v.x), c(v.y))
    }
    fn hessian(&self, v: Vec2) -> Sym2 {
        let n = self.value(v);
        let g = self.gradient(v);
        let d = |a: f64| (a.abs() / n).powf(self.p - 2.0);
        Sym2::new(d(v.x), 0.0, d(v.y))
            .sub(&Sym2::outer(g))
            .scale((self.p - 1.0) / n)
    }
}

/// `t·ℓ^q + (1 − t)·ℓ²`.
#[derive(Clone, Copy, Debug)]
pub struct Blend {
    pub t: f64,
    pub q: f64,
}

impl Gauge for Blend {
    fn value(&self, v: Vec2) -> f64 {
        self.t * Lp { p: self.q }.value(v) + (1.0 - self.t) * v.norm()
    }
    fn gradient(&self, v: Vec2) -> Vec2 {
        Lp { p: self.q }.gradient(v) * self.t + Euclidean.gradient(v) * (1.0 - self.t)
    }
    fn hessian(&self, v: Vec2) -> Sym2 {
        Lp { p: self.q }
            .hessian(v)
            .scale(self.t)
            .add(&Euclidean.hessian(v).scale(1.0 - self.t))
    }
}

/// Support function of the unit ball of `inner`, i.e. the dual gauge,
/// computed by maximizing `⟨p, x⟩` over the boundary of `{inner ≤ 1}`.
#[derive(Clone, Debug)]
pub struct SupportOf {
    inner: Arc<dyn Gauge>,
}

const SUPPORT_SCAN: usize = 24;

impl SupportOf {
    pub fn new(inner: Arc<dyn Gauge>) -> Self {
        SupportOf { inner }
    }

    /// Boundary point of `{inner ≤ 1}` with outer normal along `p`.
    pub fn support_point(&self, p: Vec2) -> Vec2 {
        let g = &self.inner;
        let profile = |a: f64| {
            let e = Vec2::polar(a);
            p.dot(e) / g.value(e)
        };
        let a0 = p.angle();
        let step = 2.0 * PI / SUPPORT_SCAN as f64;
        let mut best = (0usize, f64::NEG_INFINITY);
        for k in 0..SUPPORT_SCAN {
            let f = profile(a0 + step * (k as f64 - (SUPPORT_SCAN / 2) as f64));
            if f > best.1 {
                best = (k, f);
            }
        }
        let centre = a0 + step * (best.0 as f64 - (SUPPORT_SCAN / 2) as f64);
        // The normal ∇G(e(α)) is parallel to p exactly at the maximizer; its
        // cross product with p decreases through zero there.
        let stationarity = |a: f64| {
            let e = Vec2::polar(a);
            let grad = g.gradient(e);
            let dgrad = g.hessian(e).apply(e.rot90());
            (grad.cross(p), dgrad.cross(p))
        };
        let alpha = newton_bracketed(stationarity, centre - step, centre + step, centre, 1e-15)
            .unwrap_or_else(|| golden_max(profile, centre - step, centre + step, 1e-13).0);
        let e = Vec2::polar(alpha);
        e / g.value(e)
    }
}

impl Gauge for SupportOf {
    fn value(&self, p: Vec2) -> f64 {
        if p == Vec2::ZERO {
            return 0.0;
        }
        p.dot(self.support_point(p))
    }
    fn gradient(&self, p: Vec2) -> Vec2 {
        self.support_point(p)
    }
    fn hessian(&self, p: Vec2) -> Sym2 {
        let x = self.support_point(p);
        let grad = self.inner.gradient(x);
        let t = grad.rot90() / grad.norm();
        let curvature = self.inner.hessian(x).quad(t) / grad.norm();
        Sym2::outer(t).scale(1.0 / (curvature * p.norm()))
    }
    fn closed_form(&self) -> bool {
        false
    }
}

/// Gauge whose radial profile `1/ρ(α)` is a periodic cubic spline through
/// the given boundary samples.
#[derive(Clone, Debug)]
pub struct SplineGauge {
    knots: Vec<f64>,
    vals: Vec<f64>,
    second: Vec<f64>,
}

impl SplineGauge {
    /// `points` must be sorted by angle around the origin over a full turn.
    fn from_sorted(points: &[Vec2]) -> Self {
        let n = points.len();
        let knots: Vec<f64> = points.iter().map(|p| p.angle()).collect();
        let vals: Vec<f64> = points.iter().map(|p| 1.0 / p.norm()).collect();
        let width = |i: usize| {
            if i + 1 < n {
                knots[i + 1] - knots[i]
            } else {
                knots[0] + 2.0 * PI - knots[n - 1]
            }
        };
        let h: Vec<f64> = (0..n).map(width).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            sub[i] = h[im];
            diag[i] = 2.0 * (h[im] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((vals[ip] - vals[i]) / h[i] - (vals[i] - vals[im]) / h[im]);
        }
        let second = solve_cyclic(&sub, &diag, &sup, &rhs);
        SplineGauge { knots, vals, second }
    }

    /// Profile `n(α)` and its first two derivatives.
    pub fn profile(&self, alpha: f64) -> (f64, f64, f64) {
        let n = self.knots.len();
        let a0 = self.knots[0];
        let a = a0 + (alpha - a0).rem_euclid(2.0 * PI);
        let i = match self.knots.partition_point(|&k| k <= a) {
            0 => n - 1,
            k => k - 1,
        };
        let ip = (i + 1) % n;
        let lo = self.knots[i];
        let hi = if ip == 0 { self.knots[0] + 2.0 * PI } else { self.knots[ip] };
        let h = hi - lo;
        let (u, w) = (hi - a, a - lo);
        let (m0, m1) = (self.second[i], self.second[ip]);
        let (y0, y1) = (self.vals[i], self.vals[ip]);
        let val = m0 * u.powi(3) / (6.0 * h)
            + m1 * w.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * u
            + (y1 / h - m1 * h / 6.0) * w;
        let d1 = -m0 * u * u / (2.0 * h) + m1 * w * w / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0);
        let d2 = (m0 * u + m1 * w) / h;
        (val, d1, d2)
    }
}

impl Gauge for SplineGauge {
    fn value(&self, v: Vec2) -> f64 {
        let r = v.norm();
        if r == 0.0 {
            return 0.0;
        }
        r * self.profile(v.angle()).0
    }
    fn gradient(&self, v: Vec2) -> Vec2 {
        let e = v / v.norm();
        let (n, d1, _) = self.profile(v.angle());
        e * n + e.rot90() * d1
    }
    fn hessian(&self, v: Vec2) -> Sym2 {
        let r = v.norm();
        let e = v / r;
        let (n, _, d2) = self.profile(v.angle());
        Sym2::outer(e.rot90()).scale((n + d2) / r)
    }
}

/// Cyclic tridiagonal solve by Sherman–Morrison.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(sub, &d, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Declarative norm description. Serialized as `{"kind": ..., "params": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum NormSpec {
    Euclidean,
    /// Row-major symmetric positive-definite matrix.
    InnerProduct { matrix: [[f64; 2]; 2] },
    Lp { p: f64 },
    /// Dual of `t·ℓ^q + (1 − t)·ℓ²`.
    Interpolated { q: f64, t: f64 },
    Hfamily { h: u32 },
    BoundarySamples { points: Vec<[f64; 2]> },
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    params: Value,
}

impl TryFrom<RawSpec> for NormSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        fn field<T: serde::de::DeserializeOwned>(params: &Value, key: &str) -> std::result::Result<T, String> {
            let v = params
                .get(key)
                .ok_or_else(|| format!("missing params.{key}"))?;
            serde_json::from_value(v.clone()).map_err(|e| format!("params.{key}: {e}"))
        }
        fn direct_or<T: serde::de::DeserializeOwned>(params: &Value, key: &str) -> std::result::Result<T, String> {
            if params.is_array() {
                serde_json::from_value(params.clone()).map_err(|e| format!("params: {e}"))
            } else {
                field(params, key)
            }
        }
        let p = &raw.params;
        Ok(match raw.kind.as_str() {
            "euclidean" => NormSpec::Euclidean,
            "inner_product" => NormSpec::InnerProduct { matrix: direct_or(p, "matrix")? },
            "lp" => NormSpec::Lp { p: field(p, "p")? },
            "interpolated" => NormSpec::Interpolated { q: field(p, "q")?, t: field(p, "t")? },
            "hfamily" => NormSpec::Hfamily { h: field(p, "h")? },
            "boundary_samples" => NormSpec::BoundarySamples { points: direct_or(p, "points")? },
            other => return Err(format!("unknown norm kind `{other}`")),
        })
    }
}

impl From<NormSpec> for RawSpec {
    fn from(s: NormSpec) -> RawSpec {
        let (kind, params) = match s {
            NormSpec::Euclidean => ("euclidean", Value::Null),
            NormSpec::InnerProduct { matrix } => ("inner_product", serde_json::json!({ "matrix": matrix })),
            NormSpec::Lp { p } => ("lp", serde_json::json!({ "p": p })),
            NormSpec::Interpolated { q, t } => ("interpolated", serde_json::json!({ "q": q, "t": t })),
            NormSpec::Hfamily { h } => ("hfamily", serde_json::json!({ "h": h })),
            NormSpec::BoundarySamples { points } => ("boundary_samples", serde_json::json!({ "points": points })),
        };
        RawSpec { kind: kind.to_string(), params }
    }
}

impl NormSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            NormSpec::Euclidean => Ok(()),
            NormSpec::InnerProduct { matrix } => {
                let [[a, b], [b2, c]] = *matrix;
                if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                    return bad("matrix entries must be finite".into());
                }
                if (b - b2).abs() > 1e-12 * (a.abs() + c.abs()) {
                    return bad("matrix is not symmetric".into());
                }
                let (l0, _) = Sym2::new(a, b, c).eigenvalues();
                if l0 <= 0.0 {
                    return bad(format!("matrix is not positive definite (smallest eigenvalue {l0})"));
                }
                Ok(())
            }
            NormSpec::Lp { p } => {
                if !(p.is_finite() && *p > 1.0) {
                    return bad(format!("lp exponent must satisfy p > 1, got {p}"));
                }
                Ok(())
            }
            NormSpec::Interpolated { q, t } => {
                if !(q.is_finite() && *q > 2.0) {
                    return bad(format!("interpolated requires q > 2, got {q}"));
                }
                if !(0.0..1.0).contains(t) {
                    return bad(format!("interpolated requires t in [0, 1), got {t}"));
                }
                Ok(())
            }
            NormSpec::Hfamily { h } => {
                if *h < 3 {
                    return bad(format!("hfamily requires h >= 3, got {h}"));
                }
                Ok(())
            }
            NormSpec::BoundarySamples { points } => symmetrized_polygon(points).map(|_| ()),
        }
    }
}

/// Closes the samples under `v -> -v`, sorts by angle and checks that the
/// polygon is strictly convex and star-shaped about the origin.
fn symmetrized_polygon(points: &[[f64; 2]]) -> Result<Vec<Vec2>> {
    if points.len() < 3 {
        return Err(Error::InvalidSpec("boundary_samples needs at least 3 points".into()));
    }
    let mut all: Vec<Vec2> = Vec::with_capacity(2 * points.len());
    for &p in points {
        let v = Vec2::from(p);
        if !v.is_finite() || v.norm() == 0.0 {
            return Err(Error::InvalidSpec(format!("invalid boundary sample {p:?}")));
        }
        all.push(v);
        all.push(-v);
    }
    all.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    let scale = all.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut pts: Vec<Vec2> = Vec::with_capacity(all.len());
    for v in all {
        match pts.last() {
            Some(&last) if (v - last).norm() <= 1e-12 * scale => {}
            _ => pts.push(v),
        }
    }
    if pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= 1e-12 * scale {
        pts.pop();
    }
    let n = pts.len();
    for i in 0..n {
        let (a, b, c) = (pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
        if (b - a).cross(c - b) <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "boundary samples are not strictly convex near ({}, {})",
                b.x, b.y
            )));
        }
        let gap = if i + 1 < n { pts[i + 1].angle() - pts[i].angle() } else { pts[0].angle() + 2.0 * PI - pts[i].angle() };
        if gap <= 0.0 || gap >= PI {
            return Err(Error::InvalidSpec("boundary samples do not surround the origin".into()));
        }
    }
    Ok(pts)
}

/// Smallest normalized midpoint defect `4(1 − N(m)²)/|a − b|²` over chords
/// joining boundary points two samples apart. Bounded below by the
/// strong-convexity modulus of `N²`.
pub fn strong_convexity_modulus(g: &dyn Gauge, samples: usize) -> f64 {
    let pts: Vec<Vec2> = (0..samples)
        .map(|k| {
            let e = Vec2::polar(2.0 * PI * k as f64 / samples as f64);
            e / g.value(e)
        })
        .collect();
    (0..samples)
        .map(|k| {
            let a = pts[k];
            let b = pts[(k + 2) % samples];
            let m = (a + b) * 0.5;
            let nm = g.value(m);
            4.0 * (1.0 - nm * nm) / (a - b).dot(a - b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Evaluator for a planar norm together with its dual.
#[derive(Clone)]
pub struct Norm2D {
    spec: NormSpec,
    primal: Arc<dyn Gauge>,
    polar: Arc<dyn Gauge>,
    dualized: bool,
}

impl fmt::Debug for Norm2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Norm2D")
            .field("spec", &self.spec)
            .field("dualized", &self.dualized)
            .finish()
    }
}

impl Norm2D {
    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// True for the norm returned by [`Norm2D::dual`].
    pub fn is_dualized(&self) -> bool {
        self.dualized
    }

    pub fn value(&self, v: Vec2) -> f64 {
        self.primal.value(v)
    }

    pub fn gradient(&self, v: Vec2) -> Vec2 {
        self.primal.gradient(v)
    }

    pub fn hessian(&self, v: Vec2) -> Sym2 {
        self.primal.hessian(v)
    }

    pub fn dual_value(&self, p: Vec2) -> f64 {
        self.polar.value(p)
    }

    pub fn dual_gradient(&self, p: Vec2) -> Vec2 {
        self.polar.gradient(p)
    }

    pub fn dual_hessian(&self, p: Vec2) -> Sym2 {
        self.polar.hessian(p)
    }

    pub fn primal_gauge(&self) -> &Arc<dyn Gauge> {
        &self.primal
    }

    pub fn polar_gauge(&self) -> &Arc<dyn Gauge> {
        &self.polar
    }

    pub fn dual(&self) -> Norm2D {
        Norm2D {
            spec: self.spec.clone(),
            primal: self.polar.clone(),
            polar: self.primal.clone(),
            dualized: !self.dualized,
        }
    }
}

pub fn build_norm(spec: &NormSpec) -> Result<Norm2D> {
    spec.validate()?;
    let (primal, polar): (Arc<dyn Gauge>, Arc<dyn Gauge>) = match spec {
        NormSpec::Euclidean => (Arc::new(Euclidean), Arc::new(Euclidean)),
        NormSpec::InnerProduct { matrix } => {
            let m = Sym2::new(matrix[0][0], matrix[0][1], matrix[1][1]);
            let inv = m.inverse().ok_or_else(|| Error::InvalidSpec("singular matrix".into()))?;
            (Arc::new(Quadratic { m }), Arc::new(Quadratic { m: inv }))
        }
        NormSpec::Lp { p } => (Arc::new(Lp { p: *p }), Arc::new(Lp { p: p / (p - 1.0) })),
        NormSpec::Interpolated { q, t } => {
            let f: Arc<dyn Gauge> = Arc::new(Blend { t: *t, q: *q });
            (Arc::new(SupportOf::new(f.clone())), f)
        }
        NormSpec::Hfamily { h } => {
            return Err(Error::InvalidSpec(format!(
                "hfamily (h = {h}) describes a boundary arc only; use hfamily_boundary or the hfamily ratio"
            )))
        }
        NormSpec::BoundarySamples { points } => {
            let pts = symmetrized_polygon(points)?;
            let g: Arc<dyn Gauge> = Arc::new(SplineGauge::from_sorted(&pts));
            check_spline_convex(g.as_ref())?;
            (g.clone(), Arc::new(SupportOf::new(g)))
        }
    };
    let modulus = strong_convexity_modulus(primal.as_ref(), 1024);
    if !(modulus >= EPS_SC) {
        return Err(Error::InvalidSpec(format!(
            "norm is not strongly convex: boundary modulus {modulus:e} < {EPS_SC:e}"
        )));
    }
    Ok(Norm2D {
        spec: spec.clone(),
        primal,
        polar,
        dualized: false,
    })
}

fn check_spline_convex(g: &dyn Gauge) -> Result<()> {
    for k in 0..4096 {
        let e = Vec2::polar(2.0 * PI * k as f64 / 4096.0);
        let c = g.hessian(e).quad(e.rot90());
        if !(c > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "interpolated boundary loses convexity at angle {:.6}",
                e.angle()
            )));
        }
    }
    Ok(())
}

/// Dual norm of `p`, reporting a failed inner maximization.
pub fn dual_value(n: &Norm2D, p: Vec2) -> Result<f64> {
    let v = n.dual_value(p);
    if !v.is_finite() {
        return Err(Error::Convergence {
            what: "support maximization",
            residual: v,
        });
    }
    if !n.polar.closed_form() {
        // the maximizer must lie on the unit sphere of the primal norm
        let x = n.dual_gradient(p);
        let residual = (n.value(x) - 1.0).abs();
        if residual > 1e-9 {
            return Err(Error::Convergence {
                what: "support maximization",
                residual,
            });
        }
    }
    Ok(v)
}

/// Graph profile `x = g(y)` of a unit-sphere arc through `(1, 0)`.
pub trait ArcProfile: Sync {
    fn g(&self, y: f64) -> f64;
    /// `g(y) − 1` without cancellation.
    fn g_minus_one(&self, y: f64) -> f64 {
        self.g(y) - 1.0
    }
    fn dg(&self, y: f64) -> f64;
    fn d2g(&self, y: f64) -> f64;
    /// `∫_0^y g`.
    fn integral(&self, y: f64) -> f64;
}

/// Arc `g(y) = 1 − y² − (h^h/2) y^h` on `y ∈ [0, 1/h]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HFamilyArc {
    pub h: u32,
}

impl HFamilyArc {
    pub fn y_max(&self) -> f64 {
        1.0 / self.h as f64
    }

    pub fn point(&self, y: f64) -> Vec2 {
        Vec2::new(self.g(y), y)
    }

    /// Sign conditions `g > 0`, `g′ ≤ 0`, `g″ < 0` on `samples` points of `[0, 1/h]`.
    pub fn certify(&self, samples: usize) -> Result<()> {
        for k in 0..samples {
            let y = self.y_max() * k as f64 / (samples - 1) as f64;
            let (g, d1, d2) = (self.g(y), self.dg(y), self.d2g(y));
            if !(g > 0.0 && d1 <= 0.0 && d2 < 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "hfamily arc h={} fails sign conditions at y={y}: g={g}, g'={d1}, g''={d2}",
                    self.h
                )));
            }
        }
        Ok(())
    }
}

// (h^h / 2) y^h is evaluated as (h y)^h / 2 to stay finite for large h.
impl ArcProfile for HFamilyArc {
    fn g(&self, y: f64) -> f64 {
        let h = self.h as f64;
        1.0 - y * y - 0.5 * (h * y).powi(self.h as i32)
    }
    fn g_minus_one(&self, y: f64) -> f64 {
        let h = self.h as f64;
        -y * y - 0.5 * (h * y).powi(self.h as i32)
    }
    fn dg(&self, y: f64) -> f64 {
        let h = self.h as f64;
        -2.0 * y - 0.5 * h * h * (h * y).powi(self.h as i32 - 1)
    }
    fn d2g(&self, y: f64) -> f64 {
        let h = self.h as f64;
        -2.0 - 0.5 * h * h * h * (h - 1.0) * (h * y).powi(self.h as i32 - 2)
    }
    fn integral(&self, y: f64) -> f64 {
        let h = self.h as f64;
        y - y.powi(3) / 3.0 - (h * y).powi(self.h as i32 + 1) / (2.0 * h * (h + 1.0))
    }
}

pub fn hfamily_boundary(h: u32) -> Result<HFamilyArc> {
    NormSpec::Hfamily { h }.validate()?;
    let arc = HFamilyArc { h };
    arc.certify(50)?;
    Ok(arc)
}

/// Unit circle arc `g(y) = sqrt(1 − y²)`.
#[derive(Clone, Copy, Debug)]
pub struct CircleArc;

impl ArcProfile for CircleArc {
    fn g(&self, y: f64) -> f64 {
        (1.0 - y * y).sqrt()
    }
    fn g_minus_one(&self, y: f64) -> f64 {
        -y * y / (1.0 + (1.0 - y * y).sqrt())
    }
    fn dg(&self, y: f64) -> f64 {
        -y / (1.0 - y * y).sqrt()
    }
    fn d2g(&self, y: f64) -> f64 {
        -(1.0 - y * y).powf(-1.5)
    }
    fn integral(&self, y: f64) -> f64 {
        0.5 * (y * (1.0 - y * y).sqrt() + y.asin())
    }
}

/// Ellipse arc `g(y) = a·sqrt(1 − (y/b)²)`.
#[derive(Clone, Copy, Debug)]
pub struct EllipseArc {
    pub a: f64,
    pub b: f64,
}

impl ArcProfile for EllipseArc {
    fn g(&self, y: f64) -> f64 {
        let u = y / self.b;
        self.a * (1.0 - u * u).sqrt()
    }
    fn g_minus_one(&self, y: f64) -> f64 {
        let u = y / self.b;
        (self.a - 1.0) - self.a * u * u / (1.0 + (1.0 - u * u).sqrt())
    }
    fn dg(&self, y: f64) -> f64 {
        let u = y / self.b;
        -self.a * u / (self.b * (1.0 - u * u).sqrt())
    }
    fn d2g(&self, y: f64) -> f64 {
        let u = y / self.b;
        -self.a / (self.b * self.b) * (1.0 - u * u).powf(-1.5)
    }
    fn integral(&self, y: f64) -> f64 {
        let u = y / self.b;
        0.5 * self.a * self.b * (u * (1.0 - u * u).sqrt() + u.asin())
    }
}

/// Parabolic arc `g(y) = 1 − y²`, the pointwise limit of the h-family.
#[derive(Clone, Copy, Debug)]
pub struct ParabolaArc;

impl ArcProfile for ParabolaArc {
    fn g(&self, y: f64) -> f64 {
        1.0 - y * y
    }
    fn g_minus_one(&self, y: f64) -> f64 {
        -y * y
    }
    fn dg(&self, y: f64) -> f64 {
        -2.0 * y
    }
    fn d2g(&self, _y: f64) -> f64 {
        -2.0
    }
    fn integral(&self, y: f64) -> f64 {
        y - y.powi(3) / 3.0
    }
}
