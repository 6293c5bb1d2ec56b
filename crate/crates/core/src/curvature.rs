//! Exponent field, curvature exponent, ratio criterion, rigidity witnesses,
//! exponent prescription and the h-family closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{
    eps_omega, reduced_jacobian, reduced_jacobian_direct, reduced_jacobian_domega, remainder_triple,
    pr_decomposition,
};
use crate::norm::{build_norm, ArcProfile, HFamilyArc, NormSpec};
use crate::quadrature::gl32;
use crate::solve::{bisect, golden_max};
use crate::trig::TrigTable;

/// Value of the exponent field in the limit `ω → 0`.
pub const LIMIT_EXPONENT: f64 = 5.0;

/// Relative floor: `𝒥_R(φ, ω) ≤ JR_FLOOR·ω⁴` is treated as a zero of the
/// reduced Jacobian.
pub const JR_FLOOR: f64 = 1e-10;

/// `N(φ, ω) = 1 + ω ∂_ω𝒥_R / 𝒥_R`, equal to 5 for `|ω| < ε_ω`.
pub fn n_field(table: &TrigTable, phi: f64, omega: f64) -> Result<f64> {
    if omega.abs() < eps_omega(table) {
        return Ok(LIMIT_EXPONENT);
    }
    let j = reduced_jacobian(table, phi, omega);
    if !(j > JR_FLOOR * omega.powi(4)) {
        return Err(Error::BelowFloor { phi, omega, value: j });
    }
    Ok(1.0 + omega * reduced_jacobian_domega(table, phi, omega) / j)
}

/// Chart `(s, r) ↦ (φ, ω) = (2π° s, 2π°(2r − 1))`.
pub fn chart(table: &TrigTable, s: f64, r: f64) -> (f64, f64) {
    let p = 2.0 * table.pi_polar();
    (p * s, p * (2.0 * r - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid_s: usize,
    pub grid_r: usize,
    /// Width of the excluded bands next to `r = 0` and `r = 1`.
    pub band: f64,
    /// Golden-section tolerance in `r`.
    pub refine_tol: f64,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid_s: 512,
            grid_r: 1024,
            band: 0.02,
            refine_tol: 1e-6,
            execution: Execution::default(),
        }
    }
}

impl SweepConfig {
    pub fn coarse() -> Self {
        SweepConfig { grid_s: 128, grid_r: 256, ..SweepConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_s < 64 || self.grid_r < 64 {
            return Err(Error::InvalidInput(format!(
                "grid must be at least 64x64, got {}x{}",
                self.grid_s, self.grid_r
            )));
        }
        if !(self.band >= 0.0 && self.band < 0.5) || !(self.refine_tol > 0.0) {
            return Err(Error::InvalidInput("band must be in [0, 0.5) and refine_tol positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub s: f64,
    pub r: f64,
    pub phi: f64,
    pub omega: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DerivativeField,
    RatioScan,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub grid_s: usize,
    pub grid_r: usize,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub n_curv: f64,
    /// Largest refined value of the field away from the `r = 1/2` limit.
    pub field_max: f64,
    pub argmax: FieldPoint,
    pub limit_value: f64,
    pub grid: GridInfo,
    pub exclusion_band: f64,
    /// Band points where `(r − 1/2) ∂_r𝒥̃_R ≥ 0`, i.e. where excluding them is not justified.
    pub band_violations: usize,
    pub method: Method,
    /// `|n_curv − minimal passing N of the ratio check|` when both were run.
    pub agreement: Option<f64>,
}

struct Slab {
    best: Option<FieldPoint>,
    violations: usize,
}

/// Supremum of the exponent field over the `(s, r)` chart.
pub fn curvature_exponent(table: &TrigTable, cfg: &SweepConfig) -> Result<CurvatureReport> {
    cfg.validate()?;
    let n_r = cfg.grid_r;
    let rs: Vec<f64> = (0..n_r).map(|j| (j as f64 + 0.5) / n_r as f64).collect();
    let in_band = |r: f64| r < cfg.band || r > 1.0 - cfg.band;

    let slabs = cfg.execution.map(cfg.grid_s, |i| -> Result<Slab> {
        let s = i as f64 / cfg.grid_s as f64;
        let mut violations = 0;
        let mut values = vec![f64::NEG_INFINITY; n_r];
        for (j, &r) in rs.iter().enumerate() {
            let (phi, omega) = chart(table, s, r);
            if in_band(r) {
                if omega * reduced_jacobian_domega(table, phi, omega) >= 0.0 {
                    violations += 1;
                    if let Ok(v) = n_field(table, phi, omega) {
                        values[j] = v;
                    }
                }
                continue;
            }
            values[j] = n_field(table, phi, omega)?;
        }
        // refine the best grid point on each side of r = 1/2
        let mut best: Option<FieldPoint> = None;
        for side in [0..n_r / 2, n_r / 2..n_r] {
            let Some(j) = side.clone().max_by(|&a, &b| values[a].total_cmp(&values[b])) else { continue };
            if !values[j].is_finite() {
                continue;
            }
            let lo = if j == side.start { rs[j] } else { rs[j - 1] };
            let hi = if j + 1 == side.end { rs[j] } else { rs[j + 1] };
            let f = |r: f64| {
                let (phi, omega) = chart(table, s, r);
                n_field(table, phi, omega).unwrap_or(f64::NEG_INFINITY)
            };
            let (r, v) = if hi > lo { golden_max(f, lo, hi, cfg.refine_tol) } else { (rs[j], values[j]) };
            let (r, v) = if v >= values[j] { (r, v) } else { (rs[j], values[j]) };
            let (phi, omega) = chart(table, s, r);
            let cand = FieldPoint { s, r, phi, omega, value: v };
            if best.map_or(true, |b| cand.value > b.value) {
                best = Some(cand);
            }
        }
        Ok(Slab { best, violations })
    });

    let mut band_violations = 0;
    let mut best: Option<FieldPoint> = None;
    for slab in slabs {
        let slab = slab?;
        band_violations += slab.violations;
        if let Some(c) = slab.best {
            if best.map_or(true, |b| c.value > b.value) {
                best = Some(c);
            }
        }
    }
    let mut best = best.ok_or(Error::Convergence { what: "curvature sweep", residual: f64::NAN })?;
    best = polish(table, cfg, best);

    Ok(CurvatureReport {
        n_curv: best.value.max(LIMIT_EXPONENT),
        field_max: best.value,
        argmax: best,
        limit_value: LIMIT_EXPONENT,
        grid: GridInfo { grid_s: cfg.grid_s, grid_r: cfg.grid_r, resolution: table.resolution() },
        exclusion_band: cfg.band,
        band_violations,
        method: Method::DerivativeField,
        agreement: None,
    })
}

/// Alternating golden-section passes in `s` and `r` around the best slab maximum.
fn polish(table: &TrigTable, cfg: &SweepConfig, start: FieldPoint) -> FieldPoint {
    let ds = 1.0 / cfg.grid_s as f64;
    let dr = 1.0 / cfg.grid_r as f64;
    let eval = |s: f64, r: f64| {
        let (phi, omega) = chart(table, s, r);
        n_field(table, phi, omega).unwrap_or(f64::NEG_INFINITY)
    };
    let lower_side = start.r < 0.5;
    let clamp_r = |r: f64| {
        let (lo, hi) = if lower_side { (cfg.band, 0.5) } else { (0.5, 1.0 - cfg.band) };
        r.clamp(lo, hi)
    };
    let mut p = start;
    for _ in 0..3 {
        let (s, v) = golden_max(|s| eval(s, p.r), p.s - ds, p.s + ds, cfg.refine_tol);
        if v > p.value {
            p.s = s;
            p.value = v;
        }
        let (r, v) = golden_max(|r| eval(p.s, r), clamp_r(p.r - dr), clamp_r(p.r + dr), cfg.refine_tol);
        if v > p.value {
            p.r = r;
            p.value = v;
        }
    }
    p.s = p.s.rem_euclid(1.0);
    let (phi, omega) = chart(table, p.s, p.r);
    p.phi = phi;
    p.omega = omega;
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McpConfig {
    pub n_phi: usize,
    /// Rotation-rate samples per sign.
    pub n_omega: usize,
    /// Accepted negative slack `𝒥_R(ωt)/𝒥_R(ω) − t^{N−1}`.
    pub slack_tol: f64,
    pub execution: Execution,
}

impl Default for McpConfig {
    fn default() -> Self {
        McpConfig { n_phi: 128, n_omega: 256, slack_tol: 1e-9, execution: Execution::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioCase {
    pub phi: f64,
    pub omega: f64,
    pub t: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McpReport {
    pub n: f64,
    pub pass: bool,
    pub min_slack: f64,
    pub worst: RatioCase,
    pub n_phi: usize,
    pub n_omega: usize,
}

/// `|𝒥_R|` on the `(φ, ω)` product grid used by the ratio criterion.
pub struct RatioGrid {
    phis: Vec<f64>,
    omegas: Vec<f64>,
    /// Per `φ`, per sign: values at `|ω_k|` in increasing order.
    values: Vec<[Vec<f64>; 2]>,
    cfg: McpConfig,
}

impl RatioGrid {
    pub fn new(table: &TrigTable, cfg: &McpConfig) -> Result<Self> {
        if cfg.n_phi < 1 || cfg.n_omega < 2 {
            return Err(Error::InvalidInput("ratio grid needs n_phi >= 1 and n_omega >= 2".into()));
        }
        let period = 2.0 * table.pi_polar();
        let phis: Vec<f64> = (0..cfg.n_phi).map(|i| period * i as f64 / cfg.n_phi as f64).collect();
        let omegas: Vec<f64> = (1..=cfg.n_omega).map(|k| period * k as f64 / (cfg.n_omega + 1) as f64).collect();
        let values = cfg.execution.map(cfg.n_phi, |i| {
            let row = |sign: f64| omegas.iter().map(|&w| reduced_jacobian(table, phis[i], sign * w).abs()).collect();
            [row(1.0), row(-1.0)]
        });
        Ok(RatioGrid { phis, omegas, values, cfg: *cfg })
    }

    /// Smallest slack over all pairs `ω_j = t ω_i`, `j < i`.
    pub fn check(&self, n: f64) -> McpReport {
        let omegas = &self.omegas;
        let rows = self.cfg.execution.map(self.phis.len(), |i| {
            let mut worst = RatioCase { phi: self.phis[i], omega: 0.0, t: 1.0, slack: f64::INFINITY };
            for (sign_idx, vals) in self.values[i].iter().enumerate() {
                let sign = if sign_idx == 0 { 1.0 } else { -1.0 };
                for big in 1..omegas.len() {
                    let jb = vals[big];
                    if jb == 0.0 {
                        continue;
                    }
                    for small in 0..big {
                        let t = omegas[small] / omegas[big];
                        let slack = vals[small] / jb - t.powf(n - 1.0);
                        if slack < worst.slack {
                            worst = RatioCase { phi: self.phis[i], omega: sign * omegas[big], t, slack };
                        }
                    }
                }
            }
            worst
        });
        let worst = rows
            .into_iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack))
            .unwrap_or(RatioCase { phi: 0.0, omega: 0.0, t: 1.0, slack: f64::INFINITY });
        McpReport {
            n,
            pass: worst.slack >= -self.cfg.slack_tol,
            min_slack: worst.slack,
            worst,
            n_phi: self.cfg.n_phi,
            n_omega: self.cfg.n_omega,
        }
    }

    /// Least `N` passing the check, bisected to `tol` on `[1, n_max]`.
    pub fn minimal_passing_n(&self, n_max: f64, tol: f64) -> Option<f64> {
        if !self.check(n_max).pass {
            return None;
        }
        let (mut lo, mut hi) = (1.0, n_max);
        if self.check(lo).pass {
            return Some(lo);
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.check(mid).pass {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// `MCP(0, N)` through `|𝒥_R(φ, ωt)| ≥ t^{N−1}|𝒥_R(φ, ω)|` on a product grid.
pub fn mcp_ratio_check(table: &TrigTable, n: f64, cfg: &McpConfig) -> Result<McpReport> {
    if !(n > 1.0) {
        return Err(Error::InvalidInput(format!("N must exceed 1, got {n}")));
    }
    Ok(RatioGrid::new(table, cfg)?.check(n))
}

/// Runs both characterizations and records their discrepancy in the report.
pub fn curvature_exponent_both(
    table: &TrigTable,
    sweep: &SweepConfig,
    mcp: &McpConfig,
) -> Result<(CurvatureReport, Option<f64>)> {
    let mut report = curvature_exponent(table, sweep)?;
    let grid = RatioGrid::new(table, mcp)?;
    let minimal = grid.minimal_passing_n(report.n_curv + 10.0, 1e-3);
    report.method = Method::Both;
    report.agreement = minimal.map(|m| (m - report.n_curv).abs());
    Ok((report, minimal))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Sample count for the searches over `φ` and for the essential infimum.
    pub samples: usize,
    pub affine_tol: f64,
    pub r_samples: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { samples: 4096, affine_tol: 1e-6, r_samples: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityWitness {
    pub delta: f64,
    pub phi: f64,
    pub omega: f64,
    /// Lower bound on the second difference.
    pub h_bound: f64,
    pub a: f64,
    pub b: f64,
    pub r_violation: f64,
    pub ratio: f64,
    pub r4: f64,
    /// Ratio recomputed with the other reduced-Jacobian route.
    pub ratio_alternate: f64,
    /// Ratio recomputed on a table of different resolution.
    pub ratio_resampled: f64,
    /// Ratio recomputed as `(P + R)` with the remainder as a triple integral.
    pub ratio_pr: f64,
    pub reverified: bool,
    /// `constructive` when the lemma chain produced the witness, `scan` for the fallback.
    pub method: String,
}

/// Witness `𝒥_R(φ, rω) < r⁴ 𝒥_R(φ, ω)` of the failure of `MCP(0, 5)`.
pub fn rigidity_probe(table: &TrigTable, h: f64, cfg: &ProbeConfig) -> Result<RigidityWitness> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    if table.affine_check(cfg.affine_tol).is_affine {
        return Err(Error::AffineNorm);
    }
    let period = 2.0 * table.pi_polar();
    let m = cfg.samples;
    let grid = |k: usize| period * k as f64 / m as f64;

    // largest second difference over φ and dyadic δ ≤ h
    let deltas: Vec<f64> = (0..4).map(|k| h / f64::powi(2.0, k)).collect();
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for &delta in &deltas {
        for k in 0..m {
            let d2 = table.second_difference(grid(k), delta);
            if d2 > best.2 {
                best = (grid(k), delta, d2);
            }
        }
    }
    let (phi0, delta, _) = best;
    let (phi_bar, h_bound) = golden_max(
        |p| table.second_difference(p, delta),
        phi0 - period / m as f64,
        phi0 + period / m as f64,
        1e-12,
    );
    if !(h_bound > 0.0) {
        return Err(Error::NoWitness(format!("no positive second difference for delta <= {h}")));
    }

    // slope data K, λ = K + Hδ/2 and the first touching window
    let k_slope = table.increment(phi_bar, delta) / delta;
    let lambda = k_slope + 0.5 * h_bound * delta;
    let fine = 512;
    let g = |x: f64| table.increment(phi_bar, x) - lambda * x;
    let mut last = 0.0;
    for k in 1..=fine {
        let x = delta * k as f64 / fine as f64;
        if g(x) >= 0.0 {
            last = x;
        }
    }
    let phi_start = if last > 0.0 && last < delta {
        let hi = (last + delta / fine as f64).min(delta);
        phi_bar + bisect(g, last, hi, 1e-14).unwrap_or(last)
    } else {
        phi_bar + last
    };
    let span = phi_bar + 2.0 * delta - phi_start;
    let omega_bar = first_crossing(|t| table.increment(phi_start, t) - lambda * t, span)
        .ok_or_else(|| Error::NoWitness("touching window of the second-difference bound is empty".into()))?;

    // A = ess inf C∘′ on the window, attained at φ′
    let (phi_min, a) = grid_min(|p| table.correspondence_derivative(p), phi_start, phi_start + omega_bar, m);
    let b = (table.ccirc(phi_start + omega_bar) - table.ccirc(phi_min)) / (phi_start + omega_bar - phi_min) - a;
    let reach = phi_start + omega_bar - phi_min;
    let omega = first_crossing(|t| table.increment(phi_min, t) - (a + b) * t, reach).unwrap_or(reach);

    let constructive = scan_r(table, phi_min, omega, cfg.r_samples);
    let (phi_w, omega_w, r, ratio, method) = match constructive {
        Some((r, ratio)) => (phi_min, omega, r, ratio, "constructive"),
        None => {
            let (p, w, r, ratio) = scan_fallback(table, cfg)
                .ok_or_else(|| Error::NoWitness("no ratio below r^4 on the probe grids".into()))?;
            (p, w, r, ratio, "scan")
        }
    };

    let alternate = {
        let num = alternate_route(table, phi_w, r * omega_w);
        let den = alternate_route(table, phi_w, omega_w);
        num / den
    };
    let resampled = {
        let n2 = (table.resolution() * 3 / 4).max(256);
        let other = TrigTable::new(table.norm(), n2)?;
        reduced_jacobian(&other, phi_w, r * omega_w) / reduced_jacobian(&other, phi_w, omega_w)
    };
    let pr = {
        let sum = |w: f64| -> Result<f64> {
            let d = pr_decomposition(table, phi_w, w)?;
            Ok(d.p + remainder_triple(table, phi_w, w))
        };
        sum(r * omega_w)? / sum(omega_w)?
    };
    let r4 = r.powi(4);
    Ok(RigidityWitness {
        delta,
        phi: phi_w,
        omega: omega_w,
        h_bound,
        a,
        b,
        r_violation: r,
        ratio,
        r4,
        ratio_alternate: alternate,
        ratio_resampled: resampled,
        ratio_pr: pr,
        reverified: alternate < r4 && resampled < r4 && pr < r4,
        method: method.to_string(),
    })
}

/// Smallest `t ∈ (0, span]` with `f(t) ≥ 0`, located on a grid and bisected.
fn first_crossing<F: Fn(f64) -> f64>(f: F, span: f64) -> Option<f64> {
    let n = 512;
    let mut prev = 0.0;
    for k in 1..=n {
        let t = span * k as f64 / n as f64;
        if f(t) >= 0.0 {
            return Some(if k == 1 { t } else { bisect(&f, prev, t, 1e-15).unwrap_or(t) });
        }
        prev = t;
    }
    None
}

/// Grid minimum with one dyadic refinement around the minimizer.
fn grid_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    let mut best = (a, f(a));
    let step = (b - a) / n as f64;
    for k in 0..n {
        let x = a + step * k as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let lo = (best.0 - step).max(a);
    let hi = (best.0 + step).min(b);
    for k in 0..=16 {
        let x = lo + (hi - lo) * k as f64 / 16.0;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Smallest `ratio/r⁴` over a geometric grid of `r ∈ (0, 1)`; `Some` when below one.
///
/// `|rω|` is kept above `3e-3·π°` so the numerator stays resolvable by every route.
fn scan_r(table: &TrigTable, phi: f64, omega: f64, samples: usize) -> Option<(f64, f64)> {
    let den = reduced_jacobian(table, phi, omega);
    let r_min = (3e-3 * table.pi_polar() / omega.abs()).max(1e-3);
    if !(den > 0.0) || r_min >= 1.0 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for k in 0..samples {
        let r = r_min.powf(1.0 - k as f64 / samples as f64);
        if r >= 1.0 {
            break;
        }
        let ratio = reduced_jacobian(table, phi, r * omega) / den;
        if best.map_or(true, |(br, bq)| ratio / r.powi(4) < bq / br.powi(4)) {
            best = Some((r, ratio));
        }
    }
    best.filter(|&(r, ratio)| ratio < r.powi(4))
}

fn scan_fallback(table: &TrigTable, cfg: &ProbeConfig) -> Option<(f64, f64, f64, f64)> {
    let period = 2.0 * table.pi_polar();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for i in 0..64 {
        let phi = period * i as f64 / 64.0;
        for k in 1..32 {
            let omega = period * k as f64 / 32.0;
            for sign in [1.0, -1.0] {
                if let Some((r, ratio)) = scan_r(table, phi, sign * omega, cfg.r_samples / 4) {
                    if best.map_or(true, |b| ratio / r.powi(4) < b.3 / b.2.powi(4)) {
                        best = Some((phi, sign * omega, r, ratio));
                    }
                }
            }
        }
    }
    best
}

/// `𝒥_R` by the route not chosen by [`reduced_jacobian`] at this angle.
fn alternate_route(table: &TrigTable, phi: f64, psi: f64) -> f64 {
    if psi.abs() < table.pi_polar() / 12.0 {
        reduced_jacobian_direct(table, phi, psi)
    } else {
        let d = pr_decomposition(table, phi, psi).map(|d| d.p).unwrap_or(f64::NAN);
        d + remainder_triple(table, phi, psi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrescribeConfig {
    pub coarse: SweepConfig,
    pub coarse_resolution: usize,
    pub fine: SweepConfig,
    pub fine_resolution: usize,
    /// Upper guard `t ≤ 1 − eps_t`.
    pub eps_t: f64,
}

impl Default for PrescribeConfig {
    fn default() -> Self {
        PrescribeConfig {
            coarse: SweepConfig::coarse(),
            coarse_resolution: 1024,
            fine: SweepConfig::default(),
            fine_resolution: crate::trig::DEFAULT_RESOLUTION,
            eps_t: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prescription {
    pub t_star: f64,
    pub report: CurvatureReport,
    /// `(t, N_curv)` pairs evaluated along the way.
    pub profile: Vec<(f64, f64)>,
    pub fine_evaluations: usize,
}

fn exponent_of(q: f64, t: f64, resolution: usize, sweep: &SweepConfig) -> Result<CurvatureReport> {
    let norm = build_norm(&NormSpec::Interpolated { q, t })?;
    let table = TrigTable::new(&norm, resolution)?;
    curvature_exponent(&table, sweep)
}

/// Interpolation parameter `t` at which the dual of `t·ℓ^q + (1 − t)·ℓ²` has
/// curvature exponent `n_star` within `tol`.
pub fn prescribe_exponent(n_star: f64, q: f64, tol: f64, cfg: &PrescribeConfig) -> Result<Prescription> {
    if !(n_star > LIMIT_EXPONENT) {
        return Err(Error::InvalidInput(format!("target exponent must exceed 5, got {n_star}")));
    }
    if !(q > 2.0) || 2.0 * q + 1.0 < n_star {
        return Err(Error::InvalidInput(format!("need q > 2 and 2q + 1 >= target, got q = {q}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let t_max = 1.0 - cfg.eps_t;
    let mut profile = Vec::new();
    let mut coarse = |t: f64| -> Result<f64> {
        let v = if t == 0.0 { LIMIT_EXPONENT } else { exponent_of(q, t, cfg.coarse_resolution, &cfg.coarse)?.n_curv };
        profile.push((t, v));
        Ok(v - n_star)
    };

    let (mut lo, mut hi) = (0.0, t_max);
    let f_lo = coarse(lo)?;
    if f_lo.abs() <= tol {
        let report = exponent_of(q, 0.0, cfg.fine_resolution, &cfg.fine)?;
        if (report.n_curv - n_star).abs() <= tol {
            return Ok(Prescription { t_star: 0.0, report, profile, fine_evaluations: 1 });
        }
    }
    let mut f_hi = coarse(hi)?;
    if f_lo.signum() == f_hi.signum() {
        // scan for a sign change
        let mut found = None;
        let mut prev = (lo, f_lo);
        for k in 1..=16 {
            let t = t_max * k as f64 / 16.0;
            let f = coarse(t)?;
            if f.signum() != prev.1.signum() {
                found = Some((prev.0, t, f));
                break;
            }
            prev = (t, f);
        }
        let Some((a, b, fb)) = found else {
            return Err(Error::BracketNotFound { t_max, profile });
        };
        lo = a;
        hi = b;
        f_hi = fb;
    }
    let lo_sign = -f_hi.signum();
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let f = coarse(mid)?;
        if f.abs() <= 0.25 * tol {
            lo = mid;
            hi = mid;
            break;
        }
        if f.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // full-resolution correction inside the coarse bracket
    let mut t = 0.5 * (lo + hi);
    let width = (hi - lo).max(0.02);
    let (mut a, mut b) = ((t - width).max(0.0), (t + width).min(t_max));
    let mut fine_evaluations = 0;
    let mut last = None;
    for _ in 0..12 {
        let report = exponent_of(q, t, cfg.fine_resolution, &cfg.fine)?;
        fine_evaluations += 1;
        profile.push((t, report.n_curv));
        let f = report.n_curv - n_star;
        if f.abs() <= tol {
            return Ok(Prescription { t_star: t, report, profile, fine_evaluations });
        }
        if f < 0.0 {
            a = t;
        } else {
            b = t;
        }
        last = Some(report);
        t = 0.5 * (a + b);
    }
    let report = last.expect("at least one fine evaluation");
    Err(Error::Convergence { what: "prescribe_exponent", residual: (report.n_curv - n_star).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSample {
    pub y: f64,
    /// Polar angle `ω(y) = 2∫₀^y g − y g(y)` of the arc point.
    pub omega: f64,
    pub jr: f64,
    pub w_djr: f64,
    pub ratio: f64,
}

/// Below this polar angle the closed forms lose too many digits to cancellation.
pub const ARC_SWITCH: f64 = 0.05;

/// `𝒥_R(0, ω)` and `ω ∂_ω𝒥_R(0, ω)` at `ω = ω(y)` for a polar unit sphere
/// that is the graph `x = g(y)` near `(1, 0)`, with `g′(0) = 0`.
///
/// With `D = g − y g′`, the primal point is `(1, −g′)/D` and
/// `C∘′ = −g″/D³`.
pub fn arc_sample<A: ArcProfile + ?Sized>(arc: &A, y: f64) -> ArcSample {
    let omega = 2.0 * arc.integral(y) - y * arc.g(y);
    if omega < ARC_SWITCH {
        arc_sample_integral(arc, y)
    } else {
        arc_sample_closed(arc, y)
    }
}

/// Direct substitution into the closed forms.
pub fn arc_sample_closed<A: ArcProfile + ?Sized>(arc: &A, y: f64) -> ArcSample {
    let g = arc.g(y);
    let dg = arc.dg(y);
    let d = g - y * dg;
    let omega = 2.0 * arc.integral(y) - y * g;
    let jr = 2.0 - g - 1.0 / d - omega * (-dg) / d;
    let c1 = -arc.d2g(y) / (d * d * d);
    let w_djr = omega * c1 * (y - omega * g);
    ArcSample { y, omega, jr, w_djr, ratio: w_djr / jr }
}

/// `E = ω g − y` and `𝒥_R` integrated along the arc, free of the `O(1)` cancellations.
///
/// `E′ = (g − 1)(g + 1) − y g g′ + ω g′` and `d𝒥_R/dy = g″ E / D²`.
pub fn arc_sample_integral<A: ArcProfile + ?Sized>(arc: &A, y: f64) -> ArcSample {
    let rule = gl32();
    let omega_of = |s: f64| 2.0 * arc.integral(s) - s * arc.g(s);
    let e_prime = |s: f64| {
        let g = arc.g(s);
        let dg = arc.dg(s);
        arc.g_minus_one(s) * (g + 1.0) - s * g * dg + omega_of(s) * dg
    };
    let e_of = |s: f64| rule.integrate_composite(0.0, s, 8, e_prime);
    let jr = rule.integrate_composite(0.0, y, 16, |s| {
        let d = arc.g(s) - s * arc.dg(s);
        arc.d2g(s) * e_of(s) / (d * d)
    });
    let d = arc.g(y) - y * arc.dg(y);
    let omega = omega_of(y);
    let w_djr = omega * arc.d2g(y) * e_of(y) / (d * d * d);
    ArcSample { y, omega, jr, w_djr, ratio: w_djr / jr }
}

/// `ω ∂_ω𝒥_R / 𝒥_R` at `y` on the h-family arc.
pub fn hfamily_ratio(h: u32, y: f64) -> Result<f64> {
    let arc = HFamilyArc { h };
    if h < 3 {
        return Err(Error::InvalidInput(format!("h must be >= 3, got {h}")));
    }
    if !(y > 0.0 && y <= arc.y_max() * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("y must lie in (0, 1/h], got {y}")));
    }
    Ok(arc_sample(&arc, y).ratio)
}

/// `samples` rows at `y_k = k/(samples·h)`, the last one at `y = 1/h`.
pub fn hfamily_table(h: u32, samples: usize) -> Result<Vec<ArcSample>> {
    let arc = crate::norm::hfamily_boundary(h)?;
    Ok((1..=samples)
        .map(|k| arc_sample(&arc, arc.y_max() * k as f64 / samples as f64))
        .collect())
}
