//! Heisenberg group law and geodesics, with the reduced Jacobian and endpoint inversion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gl12, gl16, gl32};
use crate::solve::bisect;
use crate::trig::TrigTable;
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeisPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisPoint {
    pub const ORIGIN: HeisPoint = HeisPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        HeisPoint { x, y, z }
    }

    pub fn inverse(self) -> Self {
        HeisPoint::new(-self.x, -self.y, -self.z)
    }

    pub fn horizontal(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Euclidean distance of the coordinates.
    pub fn dist(self, o: HeisPoint) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }

    fn size(self) -> f64 {
        self.dist(HeisPoint::ORIGIN)
    }
}

/// `(x, y, z) ⋆ (x′, y′, z′) = (x + x′, y + y′, z + z′ + (x y′ − x′ y)/2)`.
pub fn group_mul(p: HeisPoint, q: HeisPoint) -> HeisPoint {
    HeisPoint::new(p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - q.x * p.y))
}

/// Coordinates `(r, φ, ω)` on the domain of the exponential map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    pub r: f64,
    pub phi: f64,
    pub omega: f64,
}

impl GeodesicParams {
    pub fn new(r: f64, phi: f64, omega: f64) -> Self {
        GeodesicParams { r, phi, omega }
    }

    pub fn validate(&self, table: &TrigTable) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidInput(format!("r must be positive, got {}", self.r)));
        }
        if !self.phi.is_finite() || !(self.omega.abs() < 2.0 * table.pi_polar()) {
            return Err(Error::InvalidInput(format!(
                "omega must lie in (-2 pi_polar, 2 pi_polar) = ±{}, got {}",
                2.0 * table.pi_polar(),
                self.omega
            )));
        }
        Ok(())
    }
}

/// Below `|ωt| < π°/12` the exponential map and the reduced Jacobian are
/// evaluated through integral forms with no cancellation.
fn small_angle(table: &TrigTable) -> f64 {
    table.pi_polar() / 12.0
}

/// Threshold `ε_ω = 1e-4·π°` under which the exponent field returns its limit.
pub fn eps_omega(table: &TrigTable) -> f64 {
    1e-4 * table.pi_polar()
}

/// Endpoint `G_t(r, φ, ω)` of the geodesic.
pub fn exp_map(table: &TrigTable, params: GeodesicParams, t: f64) -> HeisPoint {
    let GeodesicParams { r, phi, omega } = params;
    let v = omega * t;
    if v.abs() < small_angle(table) {
        return exp_map_integral(table, params, t);
    }
    let q0 = table.polar(phi);
    let q1 = table.polar(phi + v);
    let d = q1 - q0;
    HeisPoint::new(
        r / omega * d.y,
        -r / omega * d.x,
        r * r / (2.0 * omega * omega) * (v + q1.cross(q0)),
    )
}

/// `(x, y) = r t ∫₀¹ P(φ + v s) ds`, `z = (r t)²/2 ∫∫ a·P(φ + v a b) × P(φ + v a)`.
fn exp_map_integral(table: &TrigTable, params: GeodesicParams, t: f64) -> HeisPoint {
    let GeodesicParams { r, phi, omega } = params;
    let v = omega * t;
    let gl = gl16();
    if v == 0.0 {
        let p = table.companion(phi);
        return HeisPoint::new(r * t * p.x, r * t * p.y, 0.0);
    }
    let mut mean = Vec2::ZERO;
    let mut twist = 0.0;
    for (a, wa) in gl.nodes.iter().zip(&gl.weights) {
        let pa = table.companion(phi + v * a);
        mean += pa * *wa;
        let mut inner = 0.0;
        for (b, wb) in gl.nodes.iter().zip(&gl.weights) {
            inner += wb * table.companion(phi + v * a * b).cross(pa);
        }
        twist += wa * a * inner;
    }
    let rt = r * t;
    HeisPoint::new(rt * mean.x, rt * mean.y, 0.5 * rt * rt * twist)
}

/// `k` points of the geodesic at `t = i/(k − 1)`.
pub fn geodesic_trace(table: &TrigTable, params: GeodesicParams, k: usize) -> Result<Vec<HeisPoint>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("trace needs k >= 2 points, got {k}")));
    }
    Ok((0..k)
        .map(|i| {
            if i == 0 {
                HeisPoint::ORIGIN
            } else {
                exp_map(table, params, i as f64 / (k - 1) as f64)
            }
        })
        .collect())
}

/// `𝒥_R(φ, ψ)` evaluated by the bracket formula as displayed.
pub fn reduced_jacobian_direct(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    let f0 = table.frame(phi);
    let q1 = table.polar(phi + psi);
    let p1 = table.companion(phi + psi);
    2.0 - q1.dot(f0.p) - p1.dot(f0.q) - psi * f0.p.cross(p1)
}

/// `∂_ψ 𝒥_R(φ, ψ) = −C∘′(φ + ψ)·B(ψ)` with
/// `B(ψ) = Q_{φ+ψ} × Q_φ + ψ⟨Q_{φ+ψ}, P_φ⟩`, evaluated directly.
pub fn reduced_jacobian_domega_direct(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    let f0 = table.frame(phi);
    let f1 = table.frame(phi + psi);
    -f1.c1 * (f1.q.cross(f0.q) + psi * f1.q.dot(f0.p))
}

/// `B″(w) = 2 P_w × P_0 − C∘′_w Q_w × Q_0 − w C∘′_w ⟨Q_w, P_0⟩`, relative to `φ`.
fn b_second(table: &TrigTable, f0: &crate::trig::Frame, phi: f64, w: f64) -> (f64, f64) {
    let f = table.frame(phi + w);
    let val = 2.0 * f.p.cross(f0.p) - f.c1 * f.q.cross(f0.q) - w * f.c1 * f.q.dot(f0.p);
    (val, f.c1)
}

/// `B(u) = ∫₀^u (u − w) B″(w) dw`.
fn b_integral(table: &TrigTable, f0: &crate::trig::Frame, phi: f64, u: f64) -> f64 {
    let gl = gl12();
    let mut s = 0.0;
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let wv = u * x;
        s += w * (u - wv) * b_second(table, f0, phi, wv).0;
    }
    s * u
}

/// `𝒥_R = −∫₀^ψ C∘′(φ + u) B(u) du`, free of cancellation for small `ψ`.
fn reduced_jacobian_integral(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    let f0 = table.frame(phi);
    let gl = gl12();
    let mut s = 0.0;
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let u = psi * x;
        let c1 = table.frame(phi + u).c1;
        s += w * c1 * b_integral(table, &f0, phi, u);
    }
    -s * psi
}

fn reduced_jacobian_domega_integral(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    let f0 = table.frame(phi);
    -table.frame(phi + psi).c1 * b_integral(table, &f0, phi, psi)
}

/// `𝒥_R(φ, ψ)`; zero at `ψ = 0`.
pub fn reduced_jacobian(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    if psi == 0.0 {
        0.0
    } else if psi.abs() < small_angle(table) {
        reduced_jacobian_integral(table, phi, psi)
    } else {
        reduced_jacobian_direct(table, phi, psi)
    }
}

/// `∂_ψ 𝒥_R(φ, ψ)`.
pub fn reduced_jacobian_domega(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    if psi == 0.0 {
        0.0
    } else if psi.abs() < small_angle(table) {
        reduced_jacobian_domega_integral(table, phi, psi)
    } else {
        reduced_jacobian_domega_direct(table, phi, psi)
    }
}

/// `𝒥_t(r, φ, ω) = r³ t/ω⁴ · 𝒥_R(φ, ωt)`; at `ω = 0` the limit `r³ t⁵ C∘′(φ)²/12`.
pub fn jacobian(table: &TrigTable, params: GeodesicParams, t: f64) -> f64 {
    let GeodesicParams { r, phi, omega } = params;
    if omega == 0.0 {
        let c = table.correspondence_derivative(phi);
        return r.powi(3) * t.powi(5) * c * c / 12.0;
    }
    r.powi(3) * t / omega.powi(4) * reduced_jacobian(table, phi, omega * t)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrDecomposition {
    /// Leading term `½∬(t − s)² C∘′(t) C∘′(s)`.
    pub p: f64,
    /// `𝒥_R − P`.
    pub r: f64,
    /// Estimated quadrature error of `P`.
    pub p_error: f64,
}

/// Leading term and remainder of the reduced Jacobian.
pub fn pr_decomposition(table: &TrigTable, phi: f64, omega: f64) -> Result<PrDecomposition> {
    if omega == 0.0 {
        return Err(Error::InvalidInput("pr_decomposition needs omega != 0".into()));
    }
    let base = leading_pieces(table, omega);
    let whole = leading_term(table, phi, omega, base);
    let split = leading_term(table, phi, omega, 2 * base);
    let p_error = (whole - split).abs();
    if p_error > 1e-6 * split.abs().max(1e-300) {
        return Err(Error::Quadrature { estimate: split, error: p_error });
    }
    let j = reduced_jacobian(table, phi, omega);
    Ok(PrDecomposition { p: split, r: j - split, p_error })
}

/// One panel per `π°/4` of rotation.
fn leading_pieces(table: &TrigTable, omega: f64) -> usize {
    (4.0 * omega.abs() / table.pi_polar()).ceil().max(1.0) as usize
}

/// Tensor Gauss–Legendre 32² on `[φ, φ+ω]²` split into `pieces` equal parts
/// per axis.
fn leading_term(table: &TrigTable, phi: f64, omega: f64, pieces: usize) -> f64 {
    let gl = gl32();
    let h = omega / pieces as f64;
    let mut nodes = Vec::with_capacity(gl.len() * pieces);
    for k in 0..pieces {
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let s = h * (k as f64 + x);
            nodes.push((s, w * h * table.correspondence_derivative(phi + s)));
        }
    }
    let mut total = 0.0;
    for &(t, wt) in &nodes {
        for &(s, ws) in &nodes {
            total += wt * ws * (t - s) * (t - s);
        }
    }
    0.5 * total
}

/// Remainder by the triple integral over `φ ≤ u ≤ s ≤ t ≤ φ + ω` of
/// `(t − s)(s − u)[Q_φ × Q_u − (t − φ)⟨P_φ, Q_u⟩] C∘′(t) C∘′(s) C∘′(u)`.
pub fn remainder_triple(table: &TrigTable, phi: f64, omega: f64) -> f64 {
    let gl = gl16();
    let f0 = table.frame(phi);
    let mut total = 0.0;
    for (xt, wt) in gl.nodes.iter().zip(&gl.weights) {
        let t = omega * xt;
        let ct = table.correspondence_derivative(phi + t);
        let mut inner_s = 0.0;
        for (xs, ws) in gl.nodes.iter().zip(&gl.weights) {
            let s = t * xs;
            let cs = table.correspondence_derivative(phi + s);
            let mut inner_u = 0.0;
            for (xu, wu) in gl.nodes.iter().zip(&gl.weights) {
                let u = s * xu;
                let fu = table.frame(phi + u);
                let bracket = f0.q.cross(fu.q) - t * f0.p.dot(fu.q);
                inner_u += wu * (s - u) * bracket * fu.c1;
            }
            inner_s += ws * (t - s) * cs * inner_u * s;
        }
        total += wt * ct * inner_s * t;
    }
    total * omega
}

/// Difference between the double-integral form of `P(φ, ω)` and its
/// expression through first differences of `C∘`.
pub fn pw_integration_identity(table: &TrigTable, phi: f64, omega: f64) -> f64 {
    let gl = gl32();
    let pieces = 2 * leading_pieces(table, omega);
    let p = leading_term(table, phi, omega, pieces);
    let big = table.increment(phi, omega);
    let h = omega / pieces as f64;
    let mut moment = 0.0;
    let mut plain = 0.0;
    for k in 0..pieces {
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let t = h * (k as f64 + x);
            let d = table.increment(phi, t);
            moment += w * (omega - t) * d;
            plain += w * d;
        }
    }
    moment *= h;
    plain *= h;
    p - (2.0 * big * moment - plain * plain)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InverseReport {
    pub params: GeodesicParams,
    /// `|G_1(params) − target|`.
    pub residual: f64,
    pub iterations: usize,
    /// `d(0, target) = r`.
    pub distance: f64,
}

const MAX_ITER: usize = 200;

/// Horizontal chord `∫₀¹ P(φ + ω s) ds` and the scale-free height `z/r²` of `G_1`.
fn unit_endpoint(table: &TrigTable, phi: f64, omega: f64) -> (Vec2, f64) {
    let e = exp_map(table, GeodesicParams::new(1.0, phi, omega), 1.0);
    (Vec2::new(e.x, e.y), e.z)
}

/// Parameters `(r, φ, ω)` with `G_1(r, φ, ω) = target`.
pub fn inverse_exp(table: &TrigTable, target: HeisPoint, tol: f64) -> Result<InverseReport> {
    let v = target.horizontal();
    let scale = target.size();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::InvalidInput("inverse_exp needs a finite target other than the origin".into()));
    }
    let period = 2.0 * table.pi_polar();
    if v.norm() <= 1e-14 * scale {
        return Err(Error::ChartBoundary);
    }

    let line_phi = straight_line_phi(table, v)?;
    let mut phi = line_phi;
    let mut omega = 0.0;
    let mut iterations = 0;
    if target.z != 0.0 {
        // ratio z/|xy|² is invariant under r and selects ω once φ is known
        let ratio = target.z / v.dot(v);
        let kappa = |phi: f64, omega: f64| {
            let (c, z) = unit_endpoint(table, phi, omega);
            z / c.dot(c)
        };
        let limit = period * (1.0 - 1e-9);
        for it in 0..MAX_ITER {
            iterations = it + 1;
            let f = |w: f64| kappa(phi, w) - ratio;
            let (lo, hi) = if ratio > 0.0 { (0.0, limit) } else { (-limit, 0.0) };
            let new_omega = bisect(f, lo, hi, 1e-15).ok_or(Error::ChartBoundary)?;
            let new_phi = chord_phi(table, new_omega, v, phi)?;
            let change = (new_omega - omega).abs() + (new_phi - phi).abs();
            omega = new_omega;
            phi = phi + 0.8 * (new_phi - phi);
            if change < 1e-5 * period {
                break;
            }
        }
    }
    let (c, _) = unit_endpoint(table, phi, omega);
    let mut r = c.dot(v) / c.dot(c);
    let mut params = GeodesicParams::new(r, phi, omega);

    // Newton on the full system to reach the round-off floor
    let residual_of = |p: GeodesicParams| exp_map(table, p, 1.0).dist(target);
    let mut residual = residual_of(params);
    for _ in 0..30 {
        if residual <= 1e-15 * scale {
            break;
        }
        iterations += 1;
        let g = exp_map(table, params, 1.0);
        let f = [g.x - target.x, g.y - target.y, g.z - target.z];
        let jac = endpoint_jacobian(table, params);
        let Some(step) = solve3(jac, f) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let trial = GeodesicParams::new(
                params.r - lambda * step[0],
                params.phi - lambda * step[1],
                params.omega - lambda * step[2],
            );
            if trial.r > 0.0 && trial.omega.abs() < period {
                let res = residual_of(trial);
                if res < residual {
                    params = trial;
                    residual = res;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    r = params.r;
    if residual > tol.max(1e-13 * scale) {
        return Err(Error::Convergence { what: "inverse_exp", residual });
    }
    params.phi = params.phi.rem_euclid(period);
    if period - params.phi < 1e-12 * period {
        params.phi = 0.0;
    }
    Ok(InverseReport { params, residual, iterations, distance: r })
}

/// Polar angle whose primal point is parallel to `v`; along it the straight
/// line `t ↦ t v` is the `ω = 0` geodesic.
fn straight_line_phi(table: &TrigTable, v: Vec2) -> Result<f64> {
    let theta = table.primal_area().angle_of(v.angle());
    Ok(table.cinv(theta))
}

/// Polar angle `φ` nearest `guess` for which the chord of `G_1(1, φ, ω)` points along `v`.
fn chord_phi(table: &TrigTable, omega: f64, v: Vec2, guess: f64) -> Result<f64> {
    let f = |phi: f64| unit_endpoint(table, phi, omega).0.cross(v);
    let span = 2.0 * table.pi_polar();
    let along = |phi: f64| unit_endpoint(table, phi, omega).0.dot(v) > 0.0;
    let mut width = 1e-3 * span;
    while width <= 0.125 * span {
        if let Some(root) = bisect(f, guess - width, guess + width, 1e-15) {
            if along(root) {
                return Ok(root);
            }
        }
        width *= 4.0;
    }
    let n = 64;
    let start = guess - 0.5 * span;
    let mut best: Option<f64> = None;
    let mut prev = (start, f(start));
    for k in 1..=n {
        let b = start + span * k as f64 / n as f64;
        let fb = f(b);
        if prev.1 == 0.0 || prev.1.signum() != fb.signum() {
            if let Some(root) = bisect(f, prev.0, b, 1e-15) {
                if along(root) && best.map_or(true, |r| (root - guess).abs() < (r - guess).abs()) {
                    best = Some(root);
                }
            }
        }
        prev = (b, fb);
    }
    best.ok_or(Error::Convergence { what: "chord direction", residual: f64::NAN })
}

/// Partial derivatives of `G_1` by central differences.
fn endpoint_jacobian(table: &TrigTable, p: GeodesicParams) -> [[f64; 3]; 3] {
    let g = exp_map(table, p, 1.0);
    let dr = [g.x / p.r, g.y / p.r, 2.0 * g.z / p.r];
    let h = 1e-6;
    let dphi = {
        let a = exp_map(table, GeodesicParams::new(p.r, p.phi + h, p.omega), 1.0);
        let b = exp_map(table, GeodesicParams::new(p.r, p.phi - h, p.omega), 1.0);
        [(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h), (a.z - b.z) / (2.0 * h)]
    };
    let domega = {
        let a = exp_map(table, GeodesicParams::new(p.r, p.phi, p.omega + h), 1.0);
        let b = exp_map(table, GeodesicParams::new(p.r, p.phi, p.omega - h), 1.0);
        [(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h), (a.z - b.z) / (2.0 * h)]
    };
    [
        [dr[0], dphi[0], domega[0]],
        [dr[1], dphi[1], domega[1]],
        [dr[2], dphi[2], domega[2]],
    ]
}

fn solve3(m: [[f64; 3]; 3], f: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = f[row];
        }
        *o = det(mk) / d;
    }
    Some(out)
}

/// `σ_{K,N}^{(t)}(θ)`.
pub fn sigma(k: f64, n: f64, t: f64, theta: f64) -> f64 {
    if k == 0.0 || theta == 0.0 {
        return t;
    }
    if k > 0.0 {
        if n * std::f64::consts::PI.powi(2) <= k * theta * theta {
            return f64::INFINITY;
        }
        let a = theta * (k / n).sqrt();
        (t * a).sin() / a.sin()
    } else {
        let a = theta * (-k / n).sqrt();
        (t * a).sinh() / a.sinh()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Distortion {
    /// `σ_{K,N}^{(t)}(θ)`.
    pub sigma: f64,
    /// `τ_{K,N}^{(t)}(θ) = t^{1/N} σ_{K,N−1}^{(t)}(θ)^{1 − 1/N}`.
    pub tau: f64,
}

/// Distortion coefficients for `N ≥ 1`; at `N = 1` the `σ_{K,0}` factor
/// carries exponent zero and `τ = t`.
pub fn distortion_coefficients(k: f64, n: f64, t: f64, theta: f64) -> Result<Distortion> {
    if !(n >= 1.0) || !(0.0..=1.0).contains(&t) || !(theta >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "distortion needs N >= 1, t in [0,1], theta >= 0; got N={n}, t={t}, theta={theta}"
        )));
    }
    let s = sigma(k, n, t, theta);
    let tau = if n == 1.0 {
        t
    } else {
        t.powf(1.0 / n) * sigma(k, n - 1.0, t, theta).powf(1.0 - 1.0 / n)
    };
    Ok(Distortion { sigma: s, tau })
}
