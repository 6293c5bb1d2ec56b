//! Generalized trigonometric functions of a norm and of its polar, and the
//! correspondence map between the two angle variables.
//!
//! The polar side is the working parametrization: nodes are placed at equal
//! polar angle `φ_j = j·2π°/n`, where a generalized angle is twice the swept
//! sector area. At every node we store `Q_j = (cos°, sin°)(φ_j)`, the matching
//! primal point `P_j = ∇‖·‖_*(Q_j)` and the analytic slope `C∘′(φ_j)`. Between
//! nodes `Q` is a quintic Hermite interpolant built from `Q′ = rot90 P` and
//! `Q″ = −C∘′ Q`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::{Gauge, Norm2D};
use crate::quadrature::{gl16, gl8};
use crate::solve::{bisect, newton_bracketed};
use crate::vec2::Vec2;

pub const DEFAULT_RESOLUTION: usize = 4096;
/// Agreement required between the correspondence routes.
pub const ROUTE_TOL: f64 = 1e-7;
const AREA_PANELS: usize = 2048;
const TAU: f64 = 2.0 * PI;

/// Generalized angle (twice the sector area) as a function of the Euclidean
/// direction, for the unit ball of `gauge`.
#[derive(Debug)]
pub struct AreaParam {
    gauge: Arc<dyn Gauge>,
    cum: Vec<f64>,
}

impl AreaParam {
    pub fn new(gauge: Arc<dyn Gauge>) -> Self {
        let w = TAU / AREA_PANELS as f64;
        let mut cum = vec![0.0; AREA_PANELS + 1];
        for k in 0..AREA_PANELS {
            let lo = w * k as f64;
            cum[k + 1] = cum[k] + gl16().integrate(lo, lo + w, |a| radius2(gauge.as_ref(), a));
        }
        AreaParam { gauge, cum }
    }

    /// Total generalized angle `2·area`.
    pub fn total(&self) -> f64 {
        self.cum[AREA_PANELS]
    }

    pub fn radius(&self, alpha: f64) -> f64 {
        1.0 / self.gauge.value(Vec2::polar(alpha))
    }

    /// Generalized angle of the ray at Euclidean direction `alpha`.
    pub fn angle_of(&self, alpha: f64) -> f64 {
        let w = TAU / AREA_PANELS as f64;
        let turns = (alpha / TAU).floor();
        let a = alpha - turns * TAU;
        let k = ((a / w) as usize).min(AREA_PANELS - 1);
        let lo = w * k as f64;
        turns * self.total() + self.cum[k] + gl16().integrate(lo, a, |s| radius2(self.gauge.as_ref(), s))
    }

    /// Euclidean direction whose ray has generalized angle `theta`.
    pub fn direction_of(&self, theta: f64) -> f64 {
        let w = TAU / AREA_PANELS as f64;
        let total = self.total();
        let turns = (theta / total).floor();
        let t = theta - turns * total;
        let k = self.cum.partition_point(|&c| c <= t).clamp(1, AREA_PANELS) - 1;
        let lo = w * k as f64;
        let hi = lo + w;
        let base = self.cum[k];
        let frac = (t - base) / (self.cum[k + 1] - base);
        let f = |a: f64| {
            let v = base + gl16().integrate(lo, a, |s| radius2(self.gauge.as_ref(), s)) - t;
            (v, radius2(self.gauge.as_ref(), a))
        };
        let a = newton_bracketed(f, lo, hi, lo + frac * w, 1e-15).unwrap_or(lo + frac * w);
        a + turns * TAU
    }

    /// Boundary point at generalized angle `theta`.
    pub fn point(&self, theta: f64) -> Vec2 {
        let a = self.direction_of(theta);
        Vec2::polar(a) * self.radius(a)
    }
}

fn radius2(g: &dyn Gauge, alpha: f64) -> f64 {
    let r = 1.0 / g.value(Vec2::polar(alpha));
    r * r
}

/// Boundary samples at roughly constant Euclidean arc length together with the
/// cumulative swept angle `θ(t) = ∫ γ₁γ̇₂ − γ₂γ̇₁`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCurve {
    pub samples: Vec<Vec2>,
    pub cumulative_area: Vec<f64>,
}

impl BoundaryCurve {
    /// Ray scaling over `8·resolution` directions, then arc-length resampling
    /// to `resolution` points.
    pub fn sample(g: &dyn Gauge, resolution: usize) -> Result<Self> {
        let dense_n = 8 * resolution;
        let dense: Vec<Vec2> = (0..=dense_n)
            .map(|k| {
                let e = Vec2::polar(TAU * k as f64 / dense_n as f64);
                e / g.value(e)
            })
            .collect();
        let mut arc = vec![0.0; dense_n + 1];
        for k in 0..dense_n {
            arc[k + 1] = arc[k] + (dense[k + 1] - dense[k]).norm();
        }
        let length = arc[dense_n];
        let mut samples = Vec::with_capacity(resolution + 1);
        for i in 0..=resolution {
            let s = length * i as f64 / resolution as f64;
            let k = arc.partition_point(|&a| a <= s).clamp(1, dense_n) - 1;
            let u = (s - arc[k]) / (arc[k + 1] - arc[k]);
            samples.push(dense[k] + (dense[k + 1] - dense[k]) * u);
        }
        let mut cumulative_area = vec![0.0; resolution + 1];
        for i in 0..resolution {
            let inc = samples[i].cross(samples[i + 1]);
            if !(inc > 0.0) {
                return Err(Error::NonMonotoneArea { index: i + 1 });
            }
            cumulative_area[i + 1] = cumulative_area[i] + inc;
        }
        Ok(BoundaryCurve { samples, cumulative_area })
    }

    /// Enclosed area of the sampled polygon.
    pub fn area(&self) -> f64 {
        0.5 * self.cumulative_area.last().copied().unwrap_or(0.0)
    }
}

/// Values of the polar trigonometric data at one polar angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    /// `(cos°, sin°)(φ)`.
    pub q: Vec2,
    /// `(cos_Ω, sin_Ω)(C∘(φ))`.
    pub p: Vec2,
    /// `C∘′(φ)`.
    pub c1: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AffineCheck {
    pub is_affine: bool,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Largest `|cos°″ + C∘′ cos°|`, `|sin°″ + C∘′ sin°|` over the grid.
    pub ode_residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorrespondenceRoutes {
    pub table: f64,
    pub gradient_route: f64,
    pub pythagorean_route: f64,
}

/// Sampled generalized trigonometry of a norm and its polar.
pub struct TrigTable {
    norm: Norm2D,
    n: usize,
    step: f64,
    pi_polar: f64,
    pi_omega: f64,
    q: Vec<Vec2>,
    p: Vec<Vec2>,
    qdd: Vec<Vec2>,
    /// Euclidean direction of `Q` at each node.
    alpha: Vec<f64>,
    c1: Vec<f64>,
    ccirc: Vec<f64>,
    phi_anchor: f64,
    regular: bool,
    polar_area: AreaParam,
    primal_area: OnceLock<AreaParam>,
    primal_curve: BoundaryCurve,
    polar_curve: BoundaryCurve,
    theta_points: OnceLock<Vec<Vec2>>,
}

impl std::fmt::Debug for TrigTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrigTable")
            .field("norm", &self.norm)
            .field("resolution", &self.n)
            .field("pi_omega", &self.pi_omega)
            .field("pi_polar", &self.pi_polar)
            .field("regular", &self.regular)
            .finish()
    }
}

pub fn trig_table(norm: &Norm2D, resolution: usize) -> Result<TrigTable> {
    TrigTable::new(norm, resolution)
}

impl TrigTable {
    pub fn new(norm: &Norm2D, resolution: usize) -> Result<Self> {
        if resolution < 64 {
            return Err(Error::InvalidInput(format!("resolution must be >= 64, got {resolution}")));
        }
        let n = resolution;
        let polar_gauge = norm.polar_gauge().clone();
        let primal_curve = BoundaryCurve::sample(norm.primal_gauge().as_ref(), n)?;
        let polar_curve = BoundaryCurve::sample(polar_gauge.as_ref(), n)?;

        let polar_area = AreaParam::new(polar_gauge.clone());
        let pi_polar = 0.5 * polar_area.total();
        let step = 2.0 * pi_polar / n as f64;

        let mut q = Vec::with_capacity(n + 1);
        let mut p = Vec::with_capacity(n + 1);
        let mut c1 = Vec::with_capacity(n + 1);
        let mut alpha = Vec::with_capacity(n + 1);
        for j in 0..n {
            let a = polar_area.direction_of(step * j as f64);
            alpha.push(a);
            let qj = Vec2::polar(a) * polar_area.radius(a);
            let pj = polar_gauge.gradient(qj);
            let t = pj.rot90();
            q.push(qj);
            p.push(pj);
            c1.push(polar_gauge.hessian(qj).quad(t));
        }
        q.push(q[0]);
        p.push(p[0]);
        alpha.push(alpha[0] + std::f64::consts::TAU);
        c1.push(c1[0]);
        let regular = c1.iter().all(|c| c.is_finite() && *c >= 0.0);
        let qdd: Vec<Vec2> = (0..=n)
            .map(|j| {
                if c1[j].is_finite() {
                    -(q[j] * c1[j])
                } else {
                    let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
                    (p[jp].rot90() - p[jm].rot90()) / (2.0 * step)
                }
            })
            .collect();

        let mut table = TrigTable {
            norm: norm.clone(),
            n,
            step,
            pi_polar,
            pi_omega: 0.0,
            q,
            p,
            qdd,
            alpha,
            c1,
            ccirc: vec![0.0; n + 1],
            phi_anchor: 0.0,
            regular,
            polar_area,
            primal_area: OnceLock::new(),
            primal_curve,
            polar_curve,
            theta_points: OnceLock::new(),
        };

        if regular {
            let mut cum = vec![0.0; n + 1];
            for j in 0..n {
                let lo = step * j as f64;
                cum[j + 1] = cum[j] + gl8().integrate(lo, lo + step, |s| table.c1_at(s));
            }
            table.pi_omega = 0.5 * cum[n];
            let anchor = table.find_anchor()?;
            let cell = ((anchor / step) as usize).min(n - 1);
            let lo = step * cell as f64;
            let offset = cum[cell] + gl8().integrate(lo, anchor, |s| table.c1_at(s));
            table.ccirc = cum.iter().map(|c| c - offset).collect();
            table.phi_anchor = anchor;
        } else {
            // slope is unbounded somewhere: read C∘ off the primal area instead
            table.pi_omega = 0.5 * table.primal_area().total();
            table.phi_anchor = table.find_anchor()?;
            let primal = table.primal_area();
            let period = 2.0 * table.pi_omega;
            let mut ccirc: Vec<f64> = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let raw = primal.angle_of(table.p[j].angle());
                let th = match ccirc.last() {
                    None => raw - (raw / period).round() * period,
                    Some(&prev) => raw + ((prev - raw) / period).ceil() * period,
                };
                ccirc.push(th);
            }
            ccirc[n] = ccirc[0] + period;
            table.ccirc = ccirc;
        }

        for j in 0..n {
            if !(table.ccirc[j + 1] > table.ccirc[j]) {
                return Err(Error::NonMonotoneArea { index: j + 1 });
            }
        }
        Ok(table)
    }

    /// Polar angle where `P` crosses the positive x-axis, taken in `(−π°, π°]`.
    fn find_anchor(&self) -> Result<f64> {
        let n = self.n;
        for j in 0..n {
            let (a, b) = (self.p[j], self.p[j + 1]);
            if a.x > 0.0 && a.y <= 0.0 && b.y > 0.0 {
                let lo = self.step * j as f64;
                let root = if a.y == 0.0 {
                    lo
                } else {
                    bisect(|s| self.companion(s).y, lo, lo + self.step, 1e-16)
                        .ok_or(Error::Convergence { what: "anchor of the correspondence map", residual: a.y })?
                };
                return Ok(if root > self.pi_polar { root - 2.0 * self.pi_polar } else { root });
            }
        }
        Err(Error::Convergence {
            what: "anchor of the correspondence map",
            residual: f64::NAN,
        })
    }

    pub fn norm(&self) -> &Norm2D {
        &self.norm
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Area of the unit ball; the total primal angle is `2π_Ω`.
    pub fn pi_omega(&self) -> f64 {
        self.pi_omega
    }

    /// Area of the polar unit ball.
    pub fn pi_polar(&self) -> f64 {
        self.pi_polar
    }

    /// Polar-grid spacing.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// False when `C∘′` is unbounded at some node (the primal norm has a flat
    /// point of its polar); values are then best effort.
    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn phi_anchor(&self) -> f64 {
        self.phi_anchor
    }

    pub fn primal_curve(&self) -> &BoundaryCurve {
        &self.primal_curve
    }

    pub fn polar_curve(&self) -> &BoundaryCurve {
        &self.polar_curve
    }

    pub fn polar_area(&self) -> &AreaParam {
        &self.polar_area
    }

    /// Area parametrization of the primal ball, built on first use.
    pub fn primal_area(&self) -> &AreaParam {
        self.primal_area
            .get_or_init(|| AreaParam::new(self.norm.primal_gauge().clone()))
    }

    pub fn phi_grid(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.step * j as f64).collect()
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        (0..self.n).map(|k| 2.0 * self.pi_omega * k as f64 / self.n as f64).collect()
    }

    /// `P_θ` on the uniform primal grid.
    pub fn theta_points(&self) -> &[Vec2] {
        self.theta_points
            .get_or_init(|| self.theta_grid().into_iter().map(|t| self.cos_sin(t)).collect())
    }

    /// Node samples `(φ_j, C∘(φ_j), C∘′(φ_j))`.
    pub fn correspondence_samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..=self.n).map(move |j| (self.step * j as f64, self.ccirc[j], self.c1[j]))
    }

    fn locate(&self, phi: f64) -> (f64, usize, f64) {
        let period = 2.0 * self.pi_polar;
        let turns = (phi / period).floor();
        let w = phi - turns * period;
        let x = w / self.step;
        let j = (x as usize).min(self.n - 1);
        (turns, j, x - j as f64)
    }

    /// `(cos°(φ), sin°(φ))`.
    pub fn polar(&self, phi: f64) -> Vec2 {
        let (turns, j, u) = self.locate(phi);
        if !self.regular {
            // Q″ may be unbounded here, so interpolate the direction and land on the curve exactly
            let area = &self.polar_area;
            let h = self.step;
            let (a0, a1) = (self.alpha[j], self.alpha[j + 1]);
            let (r0, r1) = (area.radius(a0), area.radius(a1));
            let (d0, d1) = (h / (r0 * r0), h / (r1 * r1));
            let u2 = u * u;
            let u3 = u2 * u;
            let mut a = a0 * (1.0 - 3.0 * u2 + 2.0 * u3) + d0 * (u - 2.0 * u2 + u3) + d1 * (u3 - u2) + a1 * (3.0 * u2 - 2.0 * u3);
            let local = phi - turns * 2.0 * self.pi_polar;
            let r = area.radius(a);
            a -= (area.angle_of(a) - local) / (r * r);
            return Vec2::polar(a) * area.radius(a);
        }
        let h = self.step;
        let (q0, q1) = (self.q[j], self.q[j + 1]);
        let (d0, d1) = (self.p[j].rot90() * h, self.p[j + 1].rot90() * h);
        let u2 = u * u;
        let (a0, a1) = (self.qdd[j] * (h * h), self.qdd[j + 1] * (h * h));
        let u3 = u2 * u;
        let u4 = u3 * u;
        let u5 = u4 * u;
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
        let h3 = 0.5 * (u3 - 2.0 * u4 + u5);
        let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        q0 * h0 + d0 * h1 + a0 * h2 + a1 * h3 + d1 * h4 + q1 * h5
    }

    /// `P(C∘(φ)) = ∇‖·‖_*(Q(φ))`.
    pub fn companion(&self, phi: f64) -> Vec2 {
        self.norm.dual_gradient(self.polar(phi))
    }

    fn c1_at(&self, phi: f64) -> f64 {
        let q = self.polar(phi);
        let g = self.norm.polar_gauge();
        g.hessian(q).quad(g.gradient(q).rot90())
    }

    /// Polar point, matching primal point and `C∘′` in one evaluation.
    pub fn frame(&self, phi: f64) -> Frame {
        let q = self.polar(phi);
        let g = self.norm.polar_gauge();
        let p = g.gradient(q);
        Frame { q, p, c1: g.hessian(q).quad(p.rot90()) }
    }

    /// `C∘′(φ)` from the polar Hessian.
    pub fn correspondence_derivative(&self, phi: f64) -> f64 {
        self.c1_at(phi)
    }

    /// One-cell central difference of the tabulated `C∘`.
    pub fn correspondence_derivative_fd(&self, phi: f64) -> f64 {
        (self.ccirc(phi + self.step) - self.ccirc(phi - self.step)) / (2.0 * self.step)
    }

    /// `C∘(φ)` from the tabulated node values and the analytic slope.
    pub fn ccirc(&self, phi: f64) -> f64 {
        let (turns, j, u) = self.locate(phi);
        if !self.regular {
            // C∘′ may be unbounded inside a cell; use the primal angle of ∇‖·‖_*(Q) directly
            let guess = self.ccirc[j] + u * (self.ccirc[j + 1] - self.ccirc[j]);
            let period = 2.0 * self.pi_omega;
            let th = self.primal_area().angle_of(self.companion(phi).angle());
            return th + ((guess - th) / period).round() * period + turns * period;
        }
        let lo = self.step * j as f64;
        let inner = if u == 0.0 {
            0.0
        } else {
            gl8().integrate(lo, lo + u * self.step, |s| self.c1_at(s))
        };
        self.ccirc[j] + inner + turns * 2.0 * self.pi_omega
    }

    /// `Δ_ω C∘(φ) = C∘(φ + ω) − C∘(φ)`, integrated directly for short spans.
    pub fn increment(&self, phi: f64, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        let cells = (omega.abs() / self.step).ceil();
        if cells <= 16.0 && self.regular {
            gl8().integrate_composite(phi, phi + omega, cells as usize, |s| self.c1_at(s))
        } else {
            self.ccirc(phi + omega) - self.ccirc(phi)
        }
    }

    /// `C°(θ)`, the inverse of `C∘`.
    pub fn cinv(&self, theta: f64) -> f64 {
        let period = 2.0 * self.pi_omega;
        let c0 = self.ccirc[0];
        let turns = ((theta - c0) / period).floor();
        let t = theta - turns * period;
        let j = self.ccirc.partition_point(|&c| c <= t).clamp(1, self.n) - 1;
        let lo = self.step * j as f64;
        let hi = lo + self.step;
        let frac = (t - self.ccirc[j]) / (self.ccirc[j + 1] - self.ccirc[j]);
        let f = |s: f64| (self.ccirc(s) - t, self.c1_at(s));
        let phi = newton_bracketed(f, lo, hi, lo + frac * self.step, 1e-15).unwrap_or(lo + frac * self.step);
        phi + turns * 2.0 * self.pi_polar
    }

    /// `(cos_Ω(θ), sin_Ω(θ))`.
    pub fn cos_sin(&self, theta: f64) -> Vec2 {
        self.companion(self.cinv(theta))
    }

    /// `(cos°(φ), sin°(φ))`.
    pub fn cos_sin_polar(&self, phi: f64) -> Vec2 {
        self.polar(phi)
    }

    /// `C∘(φ)` by the gradient route (primal area of `∇‖·‖_*(Q_φ)`),
    /// checked against the Pythagorean route and the tabulated value.
    pub fn correspondence(&self, phi: f64) -> Result<f64> {
        let r = self.correspondence_routes(phi);
        let diff = (r.gradient_route - r.pythagorean_route).abs();
        if diff > ROUTE_TOL {
            return Err(Error::RouteDisagreement {
                phi,
                primary: r.gradient_route,
                fallback: r.pythagorean_route,
                diff,
            });
        }
        Ok(r.gradient_route)
    }

    pub fn correspondence_routes(&self, phi: f64) -> CorrespondenceRoutes {
        let primal = self.primal_area();
        let period = 2.0 * self.pi_omega;
        let reference = self.ccirc(phi);
        let nearest = |th: f64| th + ((reference - th) / period).round() * period;

        let p = self.companion(phi);
        let gradient_route = nearest(primal.angle_of(p.angle()));

        // Maximize ⟨P_θ, Q_φ⟩: the primal normal must be parallel to Q_φ.
        let q = self.polar(phi);
        let g = self.norm.primal_gauge();
        let s = |a: f64| {
            let e = Vec2::polar(a);
            let grad = g.gradient(e);
            (grad.cross(q), g.hessian(e).apply(e.rot90()).cross(q))
        };
        let centre = p.angle();
        let mut width = 1e-3;
        let mut alpha = None;
        while width < 1.0 {
            alpha = newton_bracketed(s, centre - width, centre + width, centre, 1e-15);
            if alpha.is_some() {
                break;
            }
            width *= 4.0;
        }
        let pythagorean_route = nearest(primal.angle_of(alpha.unwrap_or(centre)));

        CorrespondenceRoutes {
            table: reference,
            gradient_route,
            pythagorean_route,
        }
    }

    /// `(C∘(φ + 2ω) − 2C∘(φ + ω) + C∘(φ))/ω²`.
    pub fn second_difference(&self, phi: f64, omega: f64) -> f64 {
        (self.increment(phi + omega, omega) - self.increment(phi, omega)) / (omega * omega)
    }

    /// Least-squares line through the `C∘` node samples and the residual of
    /// the polar trig ODE `Q″ + C∘′ Q = 0`.
    pub fn affine_check(&self, tol: f64) -> AffineCheck {
        let m = (self.n + 1) as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (x, y, _) in self.correspondence_samples() {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let intercept = (sy - slope * sx) / m;
        let max_residual = self
            .correspondence_samples()
            .map(|(x, y, _)| (y - slope * x - intercept).abs())
            .fold(0.0, f64::max);
        AffineCheck {
            is_affine: max_residual <= tol,
            slope,
            intercept,
            max_residual,
            ode_residual: self.trig_ode_residual(512),
        }
    }

    /// Fourth-order second difference of `Q` against `−C∘′ Q` at `samples`
    /// mid-cell points.
    pub fn trig_ode_residual(&self, samples: usize) -> f64 {
        let d = self.step;
        let stride = (self.n / samples).max(1);
        (0..self.n)
            .step_by(stride)
            .map(|j| {
                let phi = self.step * (j as f64 + 0.5);
                let f = |k: f64| self.polar(phi + k * d);
                let q2 = (f(-2.0) * -1.0 + f(-1.0) * 16.0 - f(0.0) * 30.0 + f(1.0) * 16.0 - f(2.0)) / (12.0 * d * d);
                (q2 + f(0.0) * self.c1_at(phi)).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{build_norm, NormSpec};

    fn table(spec: NormSpec, n: usize) -> TrigTable {
        TrigTable::new(&build_norm(&spec).unwrap(), n).unwrap()
    }

    #[test]
    fn euclidean_recovers_classical_trig() {
        let t = table(NormSpec::Euclidean, 1024);
        assert!((t.pi_omega() - PI).abs() < 1e-10);
        assert!((t.pi_polar() - PI).abs() < 1e-10);
        for k in 0..200 {
            let th = 0.0371 * k as f64 - 1.0;
            let p = t.cos_sin(th);
            assert!((p - Vec2::polar(th)).norm() < 1e-12, "{th}");
            assert!((t.ccirc(th) - th).abs() < 1e-12);
            assert!((t.correspondence_derivative(th) - 1.0).abs() < 1e-12);
        }
        let p = t.cos_sin(PI / 4.0);
        assert!((p.x - 0.5f64.sqrt()).abs() < 1e-8 && (p.y - 0.5f64.sqrt()).abs() < 1e-8);
        let p = t.cos_sin(PI / 2.0);
        assert!(p.x.abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_area() {
        let b = 0.6;
        let t = table(NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 1.0 / (b * b)]] }, 512);
        assert!((t.pi_omega() - PI * b).abs() < 1e-11);
        assert!((t.pi_polar() - PI / b).abs() < 1e-11);
        assert!((t.primal_curve().area() - PI * b).abs() < 1e-4);
    }

    #[test]
    fn quintic_interpolant_is_tight() {
        let t = table(NormSpec::Interpolated { q: 4.0, t: 0.5 }, 256);
        let g = t.norm().polar_gauge().clone();
        for k in 0..300 {
            let phi = 0.0213 * k as f64;
            let q = t.polar(phi);
            assert!((g.value(q) - 1.0).abs() < 1e-11, "{phi}: {}", g.value(q) - 1.0);
            let exact = t.polar_area().point(phi);
            assert!((q - exact).norm() < 1e-11);
        }
    }

    #[test]
    fn periodicity_and_sin_zero() {
        let t = table(NormSpec::Interpolated { q: 4.0, t: 0.5 }, 512);
        assert!(t.cos_sin(0.0).y.abs() < 1e-14);
        for phi in [-3.0, 0.1, 1.7, 5.5] {
            let d = t.ccirc(phi + 2.0 * t.pi_polar()) - t.ccirc(phi);
            assert!((d - 2.0 * t.pi_omega()).abs() < 1e-12);
            let a = t.cos_sin(phi);
            let b = t.cos_sin(phi + 2.0 * t.pi_omega());
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn routes_agree() {
        let t = table(NormSpec::Lp { p: 1.5 }, 512);
        for k in 0..40 {
            let phi = 0.17 * k as f64 - 2.0;
            let r = t.correspondence_routes(phi);
            assert!((r.gradient_route - r.table).abs() < 1e-9, "{r:?}");
            assert!((r.pythagorean_route - r.table).abs() < 1e-9, "{r:?}");
            assert!(t.correspondence(phi).is_ok());
        }
    }

    #[test]
    fn inverse_correspondence() {
        let t = table(NormSpec::Interpolated { q: 4.0, t: 0.5 }, 512);
        for k in 0..100 {
            let phi = 0.0791 * k as f64 - 3.0;
            assert!((t.cinv(t.ccirc(phi)) - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn second_difference_forms() {
        let t = table(NormSpec::Interpolated { q: 4.0, t: 0.5 }, 512);
        for (phi, w) in [(0.2, 0.05), (1.0, 0.3), (2.5, 1.2)] {
            let direct = (t.ccirc(phi + 2.0 * w) - 2.0 * t.ccirc(phi + w) + t.ccirc(phi)) / (w * w);
            assert!((direct - t.second_difference(phi, w)).abs() < 1e-10);
        }
        let e = table(NormSpec::Euclidean, 256);
        assert!(e.second_difference(0.4, 0.2).abs() < 1e-12);
    }

    #[test]
    fn affine_detection() {
        let e = table(NormSpec::Euclidean, 512).affine_check(1e-6);
        assert!(e.is_affine && (e.slope - 1.0).abs() < 1e-12);
        let ip = table(NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] }, 512).affine_check(1e-6);
        assert!(ip.is_affine && ip.ode_residual < 1e-6, "{ip:?}");
        let it = table(NormSpec::Interpolated { q: 4.0, t: 0.5 }, 512).affine_check(1e-6);
        assert!(!it.is_affine && it.ode_residual < 1e-6, "{it:?}");
    }

    #[test]
    fn rejects_low_resolution() {
        let n = build_norm(&NormSpec::Euclidean).unwrap();
        assert!(TrigTable::new(&n, 32).is_err());
    }
}
